#pragma once

#include "costar/grammar.hpp"
#include "costar/serializer.hpp"

#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace costar {

inline constexpr std::size_t kDefaultNumCandidates = 3;
inline constexpr std::size_t kDefaultMaxNewTokens = 50;

struct GenerationRequest {
    std::string prefix; ///< from eval_prefix
    std::size_t num_candidates = kDefaultNumCandidates;
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
};

/// Fine-tuning hyperparameters echoed to backends. Defaults are the
/// reference configuration.
struct TrainingConfig {
    int epochs = 5;
    double learning_rate = 1e-5;
    int batch_size = 1;
    std::string optimizer = "adam";
    bool eval_every_epoch = true;

    /// epochs must be in [1, 5], batch_size and learning_rate positive.
    void validate() const;

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct BackendDescriptor {
    std::string name;
    Scheme scheme = Scheme::CS;
    int instance_id = 1;
    TrainingConfig training;
    std::string decoding;
    /// false: the backend serializes requests and the harness queues them.
    bool concurrent = true;

    /// name, plus "#instance" for ablated (scheme s) or repeated instances.
    std::string label() const;
    void validate() const;

    friend bool operator==(const BackendDescriptor&, const BackendDescriptor&) = default;
};

/// Rejects a backend whose descriptor scheme differs from the scheme its
/// training corpus was built with.
void check_registration(const BackendDescriptor& descriptor, Scheme corpus_scheme);

struct GenerationResult {
    std::vector<std::string> candidates;
    std::vector<bool> truncated; ///< cut at max_new_tokens
    std::vector<bool> padded;    ///< filled in because the backend under-produced
    std::vector<bool> duplicate; ///< equal to an earlier candidate
    std::vector<double> scores;  ///< backend-specific; retrieval overlap for the baseline
};

/// Pads (flagged) or trims a result to exactly n candidates and recomputes
/// the duplicate flags.
void normalize_result(GenerationResult& result, std::size_t n);

/// Throws std::invalid_argument unless the prefix ends with its only
/// separator marker and carries no end marker.
void check_prefix(std::string_view prefix);

class BackendError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Backend {
  public:
    virtual ~Backend() = default;
    virtual const BackendDescriptor& descriptor() const = 0;
    /// Returns exactly req.num_candidates candidates, each at most
    /// req.max_new_tokens tokens under the backend's tokenizer.
    virtual GenerationResult generate(const GenerationRequest& req) = 0;
};

/// Lowercase whitespace tokens; the baseline's tokenizer.
std::vector<std::string> baseline_tokens(std::string_view s);

/// Offline retrieval stand-in for a trained model. Candidates are the target
/// segments of the training posts with the highest token-set Jaccard
/// overlap with the query post, ties broken by post id.
class BaselineBackend final : public Backend {
  public:
    static BaselineBackend train(std::span<const TrainingInstance> instances,
                                 BackendDescriptor descriptor);
    static BackendDescriptor default_descriptor(Scheme scheme, int instance_id = 1);

    const BackendDescriptor& descriptor() const override { return descriptor_; }
    /// Read-only; safe to call concurrently.
    GenerationResult generate(const GenerationRequest& req) override;

    std::size_t size() const noexcept { return entries_.size(); }

  private:
    struct Entry {
        std::string post_id;
        std::set<std::string> tokens;
        std::string target;
    };

    BaselineBackend(BackendDescriptor descriptor, std::vector<Entry> entries)
        : descriptor_(std::move(descriptor)), entries_(std::move(entries)) {}

    BackendDescriptor descriptor_;
    std::vector<Entry> entries_; ///< sorted by (post_id, target)
};

/// A backend in a child process speaking the line-delimited JSON protocol
/// (see protocol.hpp). The handshake is read on construction.
class ExternalBackend final : public Backend {
  public:
    /// Runs `command` through /bin/sh. Throws BackendError if the process
    /// cannot be started or the handshake is malformed.
    explicit ExternalBackend(const std::string& command);
    ~ExternalBackend() override;
    ExternalBackend(const ExternalBackend&) = delete;
    ExternalBackend& operator=(const ExternalBackend&) = delete;

    const BackendDescriptor& descriptor() const override { return descriptor_; }
    GenerationResult generate(const GenerationRequest& req) override;

  private:
    std::string read_line();
    void write_line(const std::string& line);

    BackendDescriptor descriptor_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::mutex mutex_;
};

} // namespace costar
