#include "costar/grammar.hpp"

#include "costar/text.hpp"

namespace costar {

std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::CS: return "cs";
    case Scheme::SC: return "sc";
    case Scheme::S: return "s";
    }
    return "unknown";
}

std::optional<Scheme> scheme_from_string(std::string_view s) {
    const std::string key = text::to_lower(text::normalize_whitespace(s));
    for (const Scheme scheme : kAllSchemes) {
        if (key == to_string(scheme)) {
            return scheme;
        }
    }
    return std::nullopt;
}

std::string_view to_string(ParseFailure f) {
    switch (f) {
    case ParseFailure::Empty: return "EMPTY";
    case ParseFailure::NoRelation: return "NO_RELATION";
    case ParseFailure::MissingSeparator: return "MISSING_SEPARATOR";
    case ParseFailure::UnexpectedMarker: return "UNEXPECTED_MARKER";
    case ParseFailure::ConceptEmpty: return "CONCEPT_EMPTY";
    case ParseFailure::ConceptTooLong: return "CONCEPT_TOO_LONG";
    }
    return "UNKNOWN";
}

ParseError::ParseError(ParseFailure code)
    : std::runtime_error("parse error: " + std::string(to_string(code))), code_(code) {}

TupleParse try_parse_tuple(std::string_view input) {
    const std::vector<std::string> words = text::split_words(input);
    if (words.empty()) {
        return {std::nullopt, ParseFailure::Empty};
    }
    if (text::contains_marker(input)) {
        return {std::nullopt, ParseFailure::UnexpectedMarker};
    }
    // Position 0 and the last position can never leave both sides non-empty.
    for (std::size_t i = 1; i + 1 < words.size(); ++i) {
        const auto relation = relation_from_string(text::strip_punctuation(words[i]));
        if (!relation) {
            continue;
        }
        return {StereotypeTuple::make(text::join(words, " ", 0, i), *relation,
                                      text::join(words, " ", i + 1)),
                std::nullopt};
    }
    return {std::nullopt, ParseFailure::NoRelation};
}

StereotypeTuple parse_tuple(std::string_view text) {
    auto result = try_parse_tuple(text);
    if (!result.tuple) {
        throw ParseError(*result.failure);
    }
    return std::move(*result.tuple);
}

std::string render_tuple(const StereotypeTuple& t) { return t.render(); }

namespace {

std::optional<ParseFailure> parse_concept(std::string_view segment,
                                          std::optional<Conceptualisation>& out) {
    const auto rule = Conceptualisation::check(segment);
    if (!rule) {
        out = Conceptualisation::make(segment);
        return std::nullopt;
    }
    switch (*rule) {
    case RuleCode::ConceptEmpty: return ParseFailure::ConceptEmpty;
    case RuleCode::ConceptTooLong: return ParseFailure::ConceptTooLong;
    default: return ParseFailure::UnexpectedMarker;
    }
}

} // namespace

ParsedOutput parse_scheme_output(std::string_view input, Scheme scheme) {
    ParsedOutput out;
    std::string_view body = input;
    if (const auto eos = body.find(kEosMarker); eos != std::string_view::npos) {
        body = body.substr(0, eos);
    }
    if (text::split_words(body).empty()) {
        out.failure_reason = ParseFailure::Empty;
        return out;
    }

    std::string_view tuple_text = body;
    std::optional<std::string_view> concept_text;
    if (scheme != Scheme::S) {
        const auto sep = body.find(kSepMarker);
        if (sep == std::string_view::npos) {
            out.failure_reason = ParseFailure::MissingSeparator;
            return out;
        }
        const std::string_view first = body.substr(0, sep);
        const std::string_view second = body.substr(sep + kSepMarker.size());
        if (scheme == Scheme::CS) {
            concept_text = first;
            tuple_text = second;
        } else {
            tuple_text = first;
            concept_text = second;
        }
    }

    std::optional<ParseFailure> concept_fail;
    if (concept_text) {
        concept_fail = parse_concept(*concept_text, out.conceptualisation);
    }
    auto tuple_parse = try_parse_tuple(tuple_text);
    out.tuple = std::move(tuple_parse.tuple);

    if (scheme == Scheme::CS) {
        out.failure_reason = concept_fail ? concept_fail : tuple_parse.failure;
    } else {
        out.failure_reason = tuple_parse.failure ? tuple_parse.failure : concept_fail;
    }
    out.well_formed = !out.failure_reason.has_value();
    return out;
}

} // namespace costar
