#include "costar/serializer.hpp"

#include "costar/rng.hpp"
#include "costar/text.hpp"

#include <nlohmann/json.hpp>

#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace costar {

using json = nlohmann::json;

void SerializerConfig::validate() const {
    if (max_length_tokens < kMinMaxLengthTokens) {
        throw std::invalid_argument("max_length_tokens must be >= " +
                                    std::to_string(kMinMaxLengthTokens));
    }
}

namespace {

std::string checked_post_text(const Post& post) {
    std::string body = text::normalize_whitespace(post.text);
    if (body.empty()) {
        throw std::invalid_argument("post '" + post.id + "' has empty text");
    }
    if (text::contains_marker(body)) {
        throw std::invalid_argument("post '" + post.id + "' contains a marker");
    }
    return body;
}

} // namespace

std::string target_segment(const Annotation& ann, Scheme scheme) {
    if (auto report = validate_annotation(ann); !report.empty()) {
        throw InvalidAnnotation(std::move(report));
    }
    const std::string tuple = ann.tuple().render();
    const std::string concept_text = ann.concept_label().text();
    const std::string sep = " " + std::string(kSepMarker) + " ";
    switch (scheme) {
    case Scheme::CS: return concept_text + sep + tuple;
    case Scheme::SC: return tuple + sep + concept_text;
    case Scheme::S: return tuple;
    }
    return tuple;
}

TrainingInstance serialize(const Post& post, const Annotation& ann, Scheme scheme,
                           std::size_t max_length_tokens) {
    if (ann.post_id != post.id) {
        throw std::invalid_argument("annotation refers to post '" + ann.post_id + "', got '" +
                                    post.id + "'");
    }
    const std::string body = checked_post_text(post);
    const std::string tail = " " + std::string(kSepMarker) + " " + target_segment(ann, scheme) +
                             " " + std::string(kEosMarker);

    TrainingInstance inst{post.id, scheme, body + tail, 0, false};

    // Only the post is shortened, at a word boundary, so markers and labels
    // always survive. At least one post word is kept.
    const std::size_t budget = max_length_tokens * kCharsPerTokenBudget;
    if (text::code_point_count(inst.text) > budget) {
        const auto words = text::split_words(body);
        const std::size_t tail_len = text::code_point_count(tail);
        std::string kept = words.front();
        for (std::size_t i = 1; i < words.size(); ++i) {
            const std::size_t next = text::code_point_count(kept) + 1 + text::code_point_count(words[i]);
            if (next + tail_len > budget) {
                break;
            }
            kept += ' ';
            kept += words[i];
        }
        inst.text = kept + tail;
        inst.truncated = true;
    }
    return inst;
}

std::string eval_prefix(const Post& post) {
    return checked_post_text(post) + " " + std::string(kSepMarker);
}

std::string strip_prefix_through_first_sep(std::string_view serialized) {
    const auto sep = serialized.find(kSepMarker);
    if (sep == std::string_view::npos) {
        return {};
    }
    std::string_view rest = serialized.substr(sep + kSepMarker.size());
    if (const auto eos = rest.find(kEosMarker); eos != std::string_view::npos) {
        rest = rest.substr(0, eos);
    }
    return text::normalize_whitespace(rest);
}

std::string post_segment(std::string_view serialized) {
    return text::normalize_whitespace(serialized.substr(0, serialized.find(kSepMarker)));
}

CorpusBuild build_corpus(const std::vector<Post>& posts,
                         const std::vector<Annotation>& annotations,
                         const SerializerConfig& config) {
    config.validate();
    std::unordered_map<std::string, const Post*> by_id;
    for (const auto& p : posts) {
        by_id.emplace(p.id, &p);
    }

    CorpusBuild out;
    out.instances.reserve(annotations.size());
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const Annotation& ann = annotations[i];
        const auto it = by_id.find(ann.post_id);
        if (it == by_id.end()) {
            out.errors.push_back({i, ann.post_id, "unknown post id", {}});
            continue;
        }
        try {
            out.instances.push_back(
                serialize(*it->second, ann, config.scheme, config.max_length_tokens));
        } catch (const InvalidAnnotation& e) {
            out.errors.push_back({i, ann.post_id, e.what(), e.report()});
        } catch (const std::invalid_argument& e) {
            out.errors.push_back({i, ann.post_id, e.what(), {}});
        }
    }

    seeded_shuffle(std::span<TrainingInstance>(out.instances), config.shuffle_seed);
    for (std::size_t i = 0; i < out.instances.size(); ++i) {
        out.instances[i].shuffled_index = i;
    }
    return out;
}

void write_instances(std::ostream& out, const std::vector<TrainingInstance>& instances) {
    for (const auto& inst : instances) {
        const json line = {
            {"post_id", inst.post_id},
            {"scheme", std::string(to_string(inst.scheme))},
            {"text", inst.text},
        };
        out << line.dump() << '\n';
    }
}

std::vector<TrainingInstance> read_instances(std::istream& in) {
    std::vector<TrainingInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        try {
            const json j = json::parse(line);
            const auto scheme = scheme_from_string(j.at("scheme").get<std::string>());
            if (!scheme) {
                throw std::invalid_argument("unknown scheme");
            }
            TrainingInstance inst;
            inst.post_id = j.at("post_id").get<std::string>();
            inst.scheme = *scheme;
            inst.text = j.at("text").get<std::string>();
            inst.shuffled_index = out.size();
            out.push_back(std::move(inst));
        } catch (const std::exception& e) {
            throw std::runtime_error("corpus line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace costar
