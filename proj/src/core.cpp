#include "costar/core.hpp"

#include "costar/text.hpp"

#include <algorithm>

namespace costar {

namespace {

struct RelationInfo {
    Relation relation;
    std::string_view symbol;
    std::optional<std::string_view> conceptnet;
};

constexpr std::array<RelationInfo, 8> kRelationTable = {{
    {Relation::Are, "are", "/r/RelatedTo"},
    {Relation::Have, "have", "/r/HasA"},
    {Relation::Can, "can", "/r/CapableOf"},
    {Relation::Cause, "cause", "/r/Causes"},
    {Relation::Prevent, "prevent", "/r/ObstructedBy"},
    {Relation::Want, "want", "/r/Desires"},
    {Relation::Should, "should", std::nullopt},
    {Relation::Do, "do", std::nullopt},
}};

bool group_has_relation_word(std::string_view group) {
    for (const auto& word : text::split_words(group)) {
        if (relation_from_string(text::strip_punctuation(word))) {
            return true;
        }
    }
    return false;
}

} // namespace

std::string_view to_string(Relation r) { return kRelationTable[static_cast<std::size_t>(r)].symbol; }

std::optional<std::string_view> conceptnet_label(Relation r) {
    return kRelationTable[static_cast<std::size_t>(r)].conceptnet;
}

std::optional<Relation> relation_from_string(std::string_view s) {
    const std::string key = text::to_lower(text::normalize_whitespace(s));
    for (const auto& info : kRelationTable) {
        if (key == info.symbol) {
            return info.relation;
        }
    }
    return std::nullopt;
}

Relation parse_relation(std::string_view s) {
    if (auto r = relation_from_string(s)) {
        return *r;
    }
    throw std::invalid_argument("not a relation: '" + std::string(s) + "'");
}

std::string_view to_string(RuleCode c) {
    switch (c) {
    case RuleCode::EmptyGroup: return "EMPTY_GROUP";
    case RuleCode::EmptyStatement: return "EMPTY_STATEMENT";
    case RuleCode::BadRelation: return "BAD_RELATION";
    case RuleCode::ConceptTooLong: return "CONCEPT_TOO_LONG";
    case RuleCode::ConceptRepeatsTuple: return "CONCEPT_REPEATS_TUPLE";
    case RuleCode::ConceptEmpty: return "CONCEPT_EMPTY";
    case RuleCode::FieldHasMarker: return "FIELD_HAS_MARKER";
    case RuleCode::GroupHasRelation: return "GROUP_HAS_RELATION";
    }
    return "UNKNOWN";
}

std::string to_string(const ValidationReport& report) {
    std::string out = "[";
    for (std::size_t i = 0; i < report.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += to_string(report[i]);
    }
    return out + "]";
}

StereotypeTuple StereotypeTuple::make(std::string_view targeted_group, Relation relation,
                                      std::string_view implied_statement) {
    if (text::contains_marker(targeted_group) || text::contains_line_break(targeted_group) ||
        text::contains_marker(implied_statement) || text::contains_line_break(implied_statement)) {
        throw InvalidValue(RuleCode::FieldHasMarker, "tuple field contains a marker or line break");
    }
    std::string group = text::normalize_whitespace(targeted_group);
    std::string statement = text::normalize_whitespace(implied_statement);
    if (group.empty()) {
        throw InvalidValue(RuleCode::EmptyGroup, "empty targeted group");
    }
    if (statement.empty()) {
        throw InvalidValue(RuleCode::EmptyStatement, "empty implied statement");
    }
    return StereotypeTuple(std::move(group), relation, std::move(statement));
}

std::string StereotypeTuple::render() const {
    std::string out = group_;
    out += ' ';
    out += to_string(relation_);
    out += ' ';
    out += statement_;
    return out;
}

std::optional<RuleCode> Conceptualisation::check(std::string_view text) {
    if (text::contains_marker(text) || text::contains_line_break(text)) {
        return RuleCode::FieldHasMarker;
    }
    const std::size_t words = text::split_words(text).size();
    if (words == 0) {
        return RuleCode::ConceptEmpty;
    }
    if (words > kMaxConceptWords) {
        return RuleCode::ConceptTooLong;
    }
    return std::nullopt;
}

Conceptualisation Conceptualisation::make(std::string_view text) {
    if (auto code = check(text)) {
        throw InvalidValue(*code, "invalid conceptualisation '" + std::string(text) +
                                      "': " + std::string(to_string(*code)));
    }
    return Conceptualisation(text::normalize_whitespace(text));
}

std::size_t Conceptualisation::word_count() const { return text::split_words(text_).size(); }

std::string_view to_string(Source s) {
    switch (s) {
    case Source::Reddit: return "reddit";
    case Source::Twitter: return "twitter";
    case Source::HateSite: return "hate_site";
    }
    return "unknown";
}

std::optional<Source> source_from_string(std::string_view s) {
    const std::string key = text::to_lower(text::normalize_whitespace(s));
    for (const Source src : {Source::Reddit, Source::Twitter, Source::HateSite}) {
        if (key == to_string(src)) {
            return src;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Gender g) {
    switch (g) {
    case Gender::Female: return "female";
    case Gender::Male: return "male";
    case Gender::Other: return "other";
    }
    return "unknown";
}

std::string_view to_string(Race r) {
    switch (r) {
    case Race::White: return "White";
    case Race::Asian: return "Asian";
    case Race::Mixed: return "mixed";
    case Race::Black: return "Black";
    case Race::Other: return "other";
    }
    return "unknown";
}

std::string_view to_string(AgeBand a) {
    switch (a) {
    case AgeBand::From18To24: return "18-24";
    case AgeBand::From25To34: return "25-34";
    case AgeBand::From35To44: return "35-44";
    case AgeBand::From45To54: return "45-54";
    case AgeBand::From55: return "55+";
    }
    return "unknown";
}

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view s, const std::array<Enum, N>& all) {
    const std::string key = text::to_lower(text::normalize_whitespace(s));
    for (const Enum e : all) {
        if (key == text::to_lower(to_string(e))) {
            return e;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<Gender> gender_from_string(std::string_view s) { return lookup(s, kAllGenders); }
std::optional<Race> race_from_string(std::string_view s) { return lookup(s, kAllRaces); }
std::optional<AgeBand> age_band_from_string(std::string_view s) { return lookup(s, kAllAgeBands); }

StereotypeTuple Annotation::tuple() const {
    const auto rel = relation_from_string(relation);
    if (!rel) {
        throw InvalidValue(RuleCode::BadRelation, "not a relation: '" + relation + "'");
    }
    return StereotypeTuple::make(targeted_group, *rel, implied_statement);
}

Conceptualisation Annotation::concept_label() const { return Conceptualisation::make(conceptualisation); }

ValidationReport validate_annotation(const Annotation& a) {
    ValidationReport report;
    const std::string group = text::normalize_whitespace(a.targeted_group);
    const std::string statement = text::normalize_whitespace(a.implied_statement);
    const std::string concept_text = text::normalize_whitespace(a.conceptualisation);
    const auto relation = relation_from_string(a.relation);

    if (group.empty()) {
        report.push_back(RuleCode::EmptyGroup);
    }
    if (statement.empty()) {
        report.push_back(RuleCode::EmptyStatement);
    }
    if (!relation) {
        report.push_back(RuleCode::BadRelation);
    }
    const auto concept_rule = Conceptualisation::check(a.conceptualisation);
    if (concept_rule == RuleCode::ConceptTooLong) {
        report.push_back(RuleCode::ConceptTooLong);
    }
    if (!concept_text.empty()) {
        const std::string rendered =
            group + " " +
            (relation ? std::string(to_string(*relation))
                      : text::to_lower(text::normalize_whitespace(a.relation))) +
            " " + statement;
        if (text::to_lower(rendered).find(text::to_lower(concept_text)) != std::string::npos) {
            report.push_back(RuleCode::ConceptRepeatsTuple);
        }
    }
    if (concept_rule == RuleCode::ConceptEmpty) {
        report.push_back(RuleCode::ConceptEmpty);
    }
    for (const std::string* field : {&a.targeted_group, &a.implied_statement, &a.conceptualisation}) {
        if (text::contains_marker(*field) || text::contains_line_break(*field)) {
            report.push_back(RuleCode::FieldHasMarker);
            break;
        }
    }
    if (!group.empty() && group_has_relation_word(group)) {
        report.push_back(RuleCode::GroupHasRelation);
    }
    return report;
}

} // namespace costar
