#pragma once

#include "costar/core.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace costar {

/// Concatenation scheme: conceptualisation then stereotype (cs), stereotype
/// then conceptualisation (sc), or stereotype only (s).
enum class Scheme : std::uint8_t { CS, SC, S };

inline constexpr std::array<Scheme, 3> kAllSchemes = {Scheme::CS, Scheme::SC, Scheme::S};

std::string_view to_string(Scheme s);
std::optional<Scheme> scheme_from_string(std::string_view s);

enum class ParseFailure : std::uint8_t {
    Empty,
    NoRelation,
    MissingSeparator,
    UnexpectedMarker,
    ConceptEmpty,
    ConceptTooLong,
};

std::string_view to_string(ParseFailure f);

class ParseError : public std::runtime_error {
  public:
    explicit ParseError(ParseFailure code);
    ParseFailure code() const noexcept { return code_; }

  private:
    ParseFailure code_;
};

/// Splits at the leftmost standalone relation word that leaves both sides
/// non-empty. Relation words match case-insensitively with edge
/// punctuation ignored ("have," matches). Throws ParseError.
StereotypeTuple parse_tuple(std::string_view text);

/// Non-throwing form of parse_tuple: exactly one of the members is set.
struct TupleParse {
    std::optional<StereotypeTuple> tuple;
    std::optional<ParseFailure> failure;
};
TupleParse try_parse_tuple(std::string_view text);

std::string render_tuple(const StereotypeTuple& t);

struct ParsedOutput {
    std::optional<StereotypeTuple> tuple;
    std::optional<Conceptualisation> conceptualisation;
    bool well_formed = false;
    /// First failing field in scheme order.
    std::optional<ParseFailure> failure_reason;
};

/// Parses a completion (the text after the eval prefix) under a scheme.
/// Everything from the first end marker on is discarded. Never throws.
ParsedOutput parse_scheme_output(std::string_view text, Scheme scheme);

} // namespace costar
