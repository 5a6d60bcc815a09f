#pragma once

#include "costar/core.hpp"
#include "costar/grammar.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace costar {

struct TrainingInstance {
    std::string post_id;
    Scheme scheme = Scheme::CS;
    std::string text;
    std::size_t shuffled_index = 0;
    /// The post segment was shortened by the character-budget safeguard.
    bool truncated = false;

    friend bool operator==(const TrainingInstance&, const TrainingInstance&) = default;
};

inline constexpr std::size_t kDefaultMaxLengthTokens = 256;
inline constexpr std::size_t kMinMaxLengthTokens = 16;

/// Character budget per token for the pre-truncation safeguard. Generous on
/// purpose: final token-level truncation belongs to the backend.
inline constexpr std::size_t kCharsPerTokenBudget = 8;

struct SerializerConfig {
    std::size_t max_length_tokens = kDefaultMaxLengthTokens;
    std::uint64_t shuffle_seed = 0;
    Scheme scheme = Scheme::CS;

    /// Throws std::invalid_argument when max_length_tokens < 16.
    void validate() const;
    std::size_t char_budget() const { return max_length_tokens * kCharsPerTokenBudget; }
};

/// The part a model learns to produce after "post [SEP]":
///   cs: "concept [SEP] tuple"   sc: "tuple [SEP] concept"   s: "tuple"
std::string target_segment(const Annotation& ann, Scheme scheme);

/// "post [SEP] target [EOS]". Throws InvalidAnnotation for an annotation
/// that fails validation and std::invalid_argument for an unusable post.
TrainingInstance serialize(const Post& post, const Annotation& ann, Scheme scheme,
                           std::size_t max_length_tokens = kDefaultMaxLengthTokens);

/// "post [SEP]", the only input given at evaluation time.
std::string eval_prefix(const Post& post);

/// Everything after the first separator, with the end marker and anything
/// following it removed.
std::string strip_prefix_through_first_sep(std::string_view serialized);

/// The post segment of a serialized text or eval prefix.
std::string post_segment(std::string_view serialized);

struct CorpusError {
    std::size_t index = 0; ///< position in the annotation input
    std::string post_id;
    std::string message;
    ValidationReport report;
};

struct CorpusBuild {
    std::vector<TrainingInstance> instances;
    std::vector<CorpusError> errors;
};

/// Serializes every annotation, then shuffles once with config.shuffle_seed.
/// Failed annotations are reported, never silently dropped.
CorpusBuild build_corpus(const std::vector<Post>& posts,
                         const std::vector<Annotation>& annotations,
                         const SerializerConfig& config);

/// One JSON object per line: {"post_id", "scheme", "text"}.
void write_instances(std::ostream& out, const std::vector<TrainingInstance>& instances);
std::vector<TrainingInstance> read_instances(std::istream& in);

} // namespace costar
