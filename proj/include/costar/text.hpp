#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace costar {

inline constexpr std::string_view kSepMarker = "[SEP]";
inline constexpr std::string_view kEosMarker = "[EOS]";

namespace text {

/// NFC-normalizes a UTF-8 string. Invalid byte sequences are replaced by U+FFFD.
std::string nfc(std::string_view s);

/// Splits on Unicode whitespace after NFC normalization. Hyphenated words
/// stay one word.
std::vector<std::string> split_words(std::string_view s);

/// NFC, trim and collapse every run of Unicode whitespace to one ASCII space.
std::string normalize_whitespace(std::string_view s);

/// Full Unicode lowercase (root locale).
std::string to_lower(std::string_view s);

/// Removes leading and trailing Unicode punctuation from a single token.
std::string strip_punctuation(std::string_view token);

bool contains_marker(std::string_view s);
bool contains_line_break(std::string_view s);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

/// Number of Unicode code points in a UTF-8 string.
std::size_t code_point_count(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep,
                 std::size_t begin = 0, std::size_t end = static_cast<std::size_t>(-1));

/// Tokens used by the overlap proxies: markers removed, lowercased,
/// punctuation stripped from token edges, stopwords kept.
std::vector<std::string> overlap_tokens(std::string_view s);

/// Set-semantics Jaccard index. Two empty sets are identical and score 1.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

} // namespace text
} // namespace costar
