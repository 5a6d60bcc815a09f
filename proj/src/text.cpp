#include "costar/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

namespace costar::text {

namespace {

icu::UnicodeString to_nfc_unicode(std::string_view s) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) {
        throw std::runtime_error("ICU NFC normalizer unavailable");
    }
    icu::UnicodeString out = norm->normalize(u, status);
    if (U_FAILURE(status)) {
        throw std::runtime_error("NFC normalization failed");
    }
    return out;
}

std::string to_utf8(const icu::UnicodeString& u) {
    std::string out;
    u.toUTF8String(out);
    return out;
}

} // namespace

std::string nfc(std::string_view s) { return to_utf8(to_nfc_unicode(s)); }

std::vector<std::string> split_words(std::string_view s) {
    const icu::UnicodeString u = to_nfc_unicode(s);
    std::vector<std::string> words;
    icu::UnicodeString current;
    for (int32_t i = 0; i < u.length();) {
        const UChar32 c = u.char32At(i);
        if (u_isUWhiteSpace(c)) {
            if (!current.isEmpty()) {
                words.push_back(to_utf8(current));
                current.remove();
            }
        } else {
            current.append(c);
        }
        i = u.moveIndex32(i, 1);
    }
    if (!current.isEmpty()) {
        words.push_back(to_utf8(current));
    }
    return words;
}

std::string normalize_whitespace(std::string_view s) { return join(split_words(s), " "); }

std::string to_lower(std::string_view s) {
    icu::UnicodeString u = to_nfc_unicode(s);
    u.toLower(icu::Locale::getRoot());
    return to_utf8(u);
}

std::string strip_punctuation(std::string_view token) {
    const icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(token.data(), static_cast<int32_t>(token.size())));
    int32_t begin = 0;
    int32_t end = u.length();
    while (begin < end && u_ispunct(u.char32At(begin))) {
        begin = u.moveIndex32(begin, 1);
    }
    while (end > begin) {
        const int32_t prev = u.moveIndex32(end, -1);
        if (!u_ispunct(u.char32At(prev))) {
            break;
        }
        end = prev;
    }
    return to_utf8(icu::UnicodeString(u, begin, end - begin));
}

bool contains_marker(std::string_view s) {
    return s.find(kSepMarker) != std::string_view::npos ||
           s.find(kEosMarker) != std::string_view::npos;
}

bool contains_line_break(std::string_view s) {
    return s.find('\n') != std::string_view::npos || s.find('\r') != std::string_view::npos;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) {
        return 0;
    }
    std::size_t n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::size_t code_point_count(std::string_view s) {
    std::size_t n = 0;
    for (const unsigned char c : s) {
        if ((c & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep, std::size_t begin,
                 std::size_t end) {
    end = std::min(end, parts.size());
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) {
            out.append(sep);
        }
        out.append(parts[i]);
    }
    return out;
}

std::vector<std::string> overlap_tokens(std::string_view s) {
    std::string cleaned(s);
    for (const std::string_view marker : {kSepMarker, kEosMarker}) {
        for (std::size_t pos = cleaned.find(marker); pos != std::string::npos;
             pos = cleaned.find(marker, pos)) {
            cleaned.replace(pos, marker.size(), " ");
        }
    }
    std::vector<std::string> tokens;
    for (const auto& word : split_words(to_lower(cleaned))) {
        std::string t = strip_punctuation(word);
        if (!t.empty()) {
            tokens.push_back(std::move(t));
        }
    }
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t inter = 0;
    for (const auto& t : a) {
        inter += b.count(t);
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace costar::text
