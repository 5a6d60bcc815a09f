#pragma once

#include "costar/backend.hpp"
#include "costar/core.hpp"
#include "costar/grammar.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace costar {

inline constexpr std::size_t kDefaultEvalSample = 500;
inline constexpr std::size_t kGenericStatementsK = 8;

/// Seeded sampling without replacement. The result depends only on the set
/// of ids, not their input order. Throws std::invalid_argument if n exceeds
/// the number of distinct ids.
std::vector<std::string> sample_dev(const std::vector<std::string>& dev_ids, std::size_t n,
                                    std::uint64_t seed);

struct EvalPost {
    std::string id;
    std::string text;
    std::vector<std::string> references; ///< rendered reference tuples
};

/// Posts with their references taken from the annotations, in the order of
/// `ids`. Throws std::invalid_argument for an id with no post.
std::vector<EvalPost> eval_posts(const std::vector<std::string>& ids, const std::vector<Post>& posts,
                                 const std::vector<Annotation>& annotations);

struct CandidateRecord {
    std::string raw; ///< verbatim completion
    ParsedOutput parsed;
    bool padded = false;
    bool truncated = false;
    bool duplicate = false;
    bool failed = false; ///< the backend raised for this post
};

struct ProxyMetrics {
    std::size_t candidates = 0; ///< non-padded candidates
    std::size_t padded = 0;
    std::size_t parsed = 0; ///< candidates whose tuple parsed
    std::size_t well_formed = 0;
    double well_formed_rate = 0.0;
    std::map<std::string, std::size_t> relation_histogram;
    double post_overlap = 0.0;
    double reference_overlap = 0.0;
    double generic_rate = 0.0;
};

struct BackendRun {
    BackendDescriptor descriptor;
    std::vector<std::vector<CandidateRecord>> candidates; ///< [post][candidate]
    std::vector<std::string> errors;
    ProxyMetrics metrics;
};

struct AblationCheck {
    std::string post_id;
    std::string first;
    std::string second;
    bool disagree = false;
};

struct EvalOptions {
    std::size_t num_candidates = kDefaultNumCandidates;
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
    /// Normalized implied statements counted as generic output.
    std::set<std::string> generic_statements;
};

struct EvalRun {
    std::vector<EvalPost> posts;
    std::vector<BackendRun> backends;
    std::vector<AblationCheck> ablation;
    std::size_t num_candidates = kDefaultNumCandidates;
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
    std::vector<std::string> generic_statements;
};

/// Top-k implied statements of a corpus, as used by the generic-output rate.
std::set<std::string> generic_statements(const std::vector<Annotation>& annotations,
                                         std::size_t k = kGenericStatementsK);

/// eval_prefix -> generate -> parse_scheme_output for every post and backend.
/// A backend that throws on a post gets failed, padded candidates for that
/// post and an error entry; the run continues.
EvalRun run_eval(const std::vector<Backend*>& backends, std::vector<EvalPost> posts,
                 const EvalOptions& options);

/// Aggregates in (post id, candidate index) order, so the result does not
/// depend on post order.
ProxyMetrics compute_metrics(const BackendRun& run, const std::vector<EvalPost>& posts,
                             const std::set<std::string>& generic);

std::string report_markdown(const EvalRun& run);
std::string report_html(const EvalRun& run);
/// One JSON line per backend.
std::string metrics_jsonl(const EvalRun& run);

nlohmann::json run_to_json(const EvalRun& run);
/// Re-parses candidates, so a stored run only needs the raw text.
EvalRun run_from_json(const nlohmann::json& j);

} // namespace costar
