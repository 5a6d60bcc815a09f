#include "costar/backend.hpp"

#include "costar/text.hpp"

#include <algorithm>
#include <numeric>

namespace costar {

void TrainingConfig::validate() const {
    if (epochs < 1 || epochs > 5) {
        throw std::invalid_argument("epochs must be between 1 and 5");
    }
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("learning_rate must be positive");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("batch_size must be >= 1");
    }
    if (optimizer.empty()) {
        throw std::invalid_argument("optimizer must be named");
    }
}

std::string BackendDescriptor::label() const {
    if (scheme == Scheme::S || instance_id > 1) {
        return name + "#" + std::to_string(instance_id);
    }
    return name;
}

void BackendDescriptor::validate() const {
    if (name.empty()) {
        throw std::invalid_argument("backend name must not be empty");
    }
    if (instance_id < 1) {
        throw std::invalid_argument("instance_id must be >= 1");
    }
    training.validate();
}

void check_registration(const BackendDescriptor& descriptor, Scheme corpus_scheme) {
    if (descriptor.scheme != corpus_scheme) {
        throw BackendError("backend '" + descriptor.label() + "' declares scheme " +
                           std::string(to_string(descriptor.scheme)) +
                           " but its corpus was built with scheme " +
                           std::string(to_string(corpus_scheme)));
    }
}

void normalize_result(GenerationResult& r, std::size_t n) {
    const std::size_t produced = r.candidates.size();
    r.candidates.resize(n);
    r.truncated.resize(produced, false);
    r.truncated.resize(n, false);
    r.scores.resize(produced, 0.0);
    r.scores.resize(n, 0.0);
    r.padded.assign(n, false);
    for (std::size_t i = produced; i < n; ++i) {
        r.padded[i] = true;
    }
    r.duplicate.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (r.padded[i]) {
            continue;
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (!r.padded[j] && r.candidates[j] == r.candidates[i]) {
                r.duplicate[i] = true;
                break;
            }
        }
    }
}

void check_prefix(std::string_view prefix) {
    const std::string trimmed = text::normalize_whitespace(prefix);
    if (text::count_occurrences(trimmed, kSepMarker) != 1 ||
        !trimmed.ends_with(kSepMarker) || trimmed.find(kEosMarker) != std::string::npos) {
        throw std::invalid_argument("prefix must end with exactly one separator marker");
    }
    if (trimmed.size() == kSepMarker.size()) {
        throw std::invalid_argument("prefix has no post text");
    }
}

std::vector<std::string> baseline_tokens(std::string_view s) {
    return text::split_words(text::to_lower(s));
}

BackendDescriptor BaselineBackend::default_descriptor(Scheme scheme, int instance_id) {
    BackendDescriptor d;
    d.name = "baseline-" + std::string(to_string(scheme));
    d.scheme = scheme;
    d.instance_id = instance_id;
    d.decoding = "retrieval:jaccard";
    d.concurrent = true;
    return d;
}

BaselineBackend BaselineBackend::train(std::span<const TrainingInstance> instances,
                                       BackendDescriptor descriptor) {
    descriptor.validate();
    if (instances.empty()) {
        throw std::invalid_argument("cannot train the baseline on an empty corpus");
    }
    std::vector<Entry> entries;
    entries.reserve(instances.size());
    for (const auto& inst : instances) {
        check_registration(descriptor, inst.scheme);
        const auto tokens = baseline_tokens(post_segment(inst.text));
        entries.push_back({inst.post_id, {tokens.begin(), tokens.end()},
                           strip_prefix_through_first_sep(inst.text)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.post_id, a.target) < std::tie(b.post_id, b.target);
    });
    return BaselineBackend(std::move(descriptor), std::move(entries));
}

GenerationResult BaselineBackend::generate(const GenerationRequest& req) {
    check_prefix(req.prefix);
    if (req.num_candidates == 0 || req.max_new_tokens == 0) {
        throw std::invalid_argument("num_candidates and max_new_tokens must be positive");
    }
    const auto query_tokens = baseline_tokens(post_segment(req.prefix));
    const std::set<std::string> query(query_tokens.begin(), query_tokens.end());

    std::vector<double> score(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        score[i] = text::jaccard(query, entries_[i].tokens);
    }
    std::vector<std::size_t> ranked(entries_.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    // entries_ is already in post-id order, so a stable sort keeps that as
    // the tie-break.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    GenerationResult out;
    for (std::size_t c = 0; c < req.num_candidates; ++c) {
        const std::size_t idx = ranked[c % ranked.size()];
        const auto words = text::split_words(entries_[idx].target);
        const bool cut = words.size() > req.max_new_tokens;
        out.candidates.push_back(cut ? text::join(words, " ", 0, req.max_new_tokens)
                                     : entries_[idx].target);
        out.truncated.push_back(cut);
        out.scores.push_back(score[idx]);
    }
    normalize_result(out, req.num_candidates);
    return out;
}

} // namespace costar
