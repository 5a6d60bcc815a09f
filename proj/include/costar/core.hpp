#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace costar {

// ---------------------------------------------------------------------------
// Relation: the closed vocabulary of linking verbs.
// ---------------------------------------------------------------------------

enum class Relation : std::uint8_t { Are, Have, Can, Cause, Prevent, Want, Should, Do };

inline constexpr std::array<Relation, 8> kAllRelations = {
    Relation::Are,  Relation::Have, Relation::Can,    Relation::Cause,
    Relation::Prevent, Relation::Want, Relation::Should, Relation::Do,
};

std::string_view to_string(Relation r);

/// ConceptNet 5 counterpart, if the relation has one.
std::optional<std::string_view> conceptnet_label(Relation r);

/// Case-insensitive lookup; surrounding whitespace is ignored.
std::optional<Relation> relation_from_string(std::string_view s);

/// Like relation_from_string but throws std::invalid_argument.
Relation parse_relation(std::string_view s);

// ---------------------------------------------------------------------------
// Validation rule codes.
// ---------------------------------------------------------------------------

enum class RuleCode : std::uint8_t {
    EmptyGroup,
    EmptyStatement,
    BadRelation,
    ConceptTooLong,
    ConceptRepeatsTuple,
    ConceptEmpty,
    FieldHasMarker,
    GroupHasRelation,
};

std::string_view to_string(RuleCode c);

/// Violated rules in RuleCode order; empty when the annotation is valid.
using ValidationReport = std::vector<RuleCode>;

std::string to_string(const ValidationReport& report);

inline constexpr std::size_t kMaxConceptWords = 3;

class InvalidValue : public std::invalid_argument {
  public:
    InvalidValue(RuleCode code, const std::string& what)
        : std::invalid_argument(what), code_(code) {}
    RuleCode code() const noexcept { return code_; }

  private:
    RuleCode code_;
};

// ---------------------------------------------------------------------------
// StereotypeTuple
// ---------------------------------------------------------------------------

/// targeted group + relation + implied statement. Text fields are stored
/// NFC-normalized with whitespace collapsed.
class StereotypeTuple {
  public:
    /// Throws InvalidValue when a text field is empty or carries a marker
    /// or line break.
    static StereotypeTuple make(std::string_view targeted_group, Relation relation,
                                std::string_view implied_statement);

    const std::string& targeted_group() const noexcept { return group_; }
    Relation relation() const noexcept { return relation_; }
    const std::string& implied_statement() const noexcept { return statement_; }

    /// "group relation statement", single-space joined.
    std::string render() const;

    friend bool operator==(const StereotypeTuple&, const StereotypeTuple&) = default;

  private:
    StereotypeTuple(std::string group, Relation relation, std::string statement)
        : group_(std::move(group)), relation_(relation), statement_(std::move(statement)) {}

    std::string group_;
    Relation relation_;
    std::string statement_;
};

// ---------------------------------------------------------------------------
// Conceptualisation: a 1-3 word label.
// ---------------------------------------------------------------------------

class Conceptualisation {
  public:
    static Conceptualisation make(std::string_view text);

    /// The rule the text would violate, if any.
    static std::optional<RuleCode> check(std::string_view text);

    const std::string& text() const noexcept { return text_; }
    std::size_t word_count() const;

    friend bool operator==(const Conceptualisation&, const Conceptualisation&) = default;

  private:
    explicit Conceptualisation(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

// ---------------------------------------------------------------------------
// Posts and annotations.
// ---------------------------------------------------------------------------

enum class Source : std::uint8_t { Reddit, Twitter, HateSite };

std::string_view to_string(Source s);
std::optional<Source> source_from_string(std::string_view s);

struct Post {
    std::string id;
    std::string text;
    Source source = Source::Reddit;
    std::string sub_source;

    friend bool operator==(const Post&, const Post&) = default;
};

enum class Gender : std::uint8_t { Female, Male, Other };
enum class Race : std::uint8_t { White, Asian, Mixed, Black, Other };
enum class AgeBand : std::uint8_t { From18To24, From25To34, From35To44, From45To54, From55 };

inline constexpr std::array<Gender, 3> kAllGenders = {Gender::Female, Gender::Male, Gender::Other};
inline constexpr std::array<Race, 5> kAllRaces = {Race::White, Race::Asian, Race::Mixed,
                                                  Race::Black, Race::Other};
inline constexpr std::array<AgeBand, 5> kAllAgeBands = {
    AgeBand::From18To24, AgeBand::From25To34, AgeBand::From35To44, AgeBand::From45To54,
    AgeBand::From55};

std::string_view to_string(Gender g);
std::string_view to_string(Race r);
std::string_view to_string(AgeBand a);
std::optional<Gender> gender_from_string(std::string_view s);
std::optional<Race> race_from_string(std::string_view s);
std::optional<AgeBand> age_band_from_string(std::string_view s);

/// Self-reported annotator information; every field is optional.
struct AnnotatorInfo {
    std::optional<std::string> id;
    std::optional<Gender> gender;
    std::optional<Race> race;
    std::optional<AgeBand> age_band;

    friend bool operator==(const AnnotatorInfo&, const AnnotatorInfo&) = default;
};

/// One annotation as entered. Free-text fields are kept verbatim so that
/// validate_annotation can report on them; tuple() and concept_label() produce
/// the typed values.
struct Annotation {
    std::string post_id;
    std::string targeted_group;
    std::string relation;
    std::string implied_statement;
    std::string conceptualisation;
    std::optional<AnnotatorInfo> annotator;

    StereotypeTuple tuple() const;
    Conceptualisation concept_label() const;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Every violated rule, in RuleCode order. Never throws on bad input.
ValidationReport validate_annotation(const Annotation& a);

class InvalidAnnotation : public std::invalid_argument {
  public:
    explicit InvalidAnnotation(ValidationReport report)
        : std::invalid_argument("invalid annotation: " + to_string(report)),
          report_(std::move(report)) {}
    const ValidationReport& report() const noexcept { return report_; }

  private:
    ValidationReport report_;
};

} // namespace costar
