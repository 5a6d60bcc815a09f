#include "costar/eval.hpp"

#include "costar/dataset.hpp"
#include "costar/protocol.hpp"
#include "costar/rng.hpp"
#include "costar/serializer.hpp"
#include "costar/text.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <unordered_map>

namespace costar {

using json = nlohmann::json;

std::vector<std::string> sample_dev(const std::vector<std::string>& dev_ids, std::size_t n,
                                    std::uint64_t seed) {
    std::vector<std::string> ids(dev_ids);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (n > ids.size()) {
        throw std::invalid_argument("cannot sample " + std::to_string(n) + " posts from " +
                                    std::to_string(ids.size()));
    }
    seeded_shuffle(std::span<std::string>(ids), seed);
    ids.resize(n);
    return ids;
}

std::vector<EvalPost> eval_posts(const std::vector<std::string>& ids, const std::vector<Post>& posts,
                                 const std::vector<Annotation>& annotations) {
    std::unordered_map<std::string, const Post*> by_id;
    for (const auto& p : posts) {
        by_id.emplace(p.id, &p);
    }
    std::unordered_map<std::string, std::vector<std::string>> refs;
    for (const auto& a : annotations) {
        if (validate_annotation(a).empty()) {
            refs[a.post_id].push_back(a.tuple().render());
        }
    }
    std::vector<EvalPost> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw std::invalid_argument("no post with id '" + id + "'");
        }
        out.push_back({id, it->second->text, refs[id]});
    }
    return out;
}

std::set<std::string> generic_statements(const std::vector<Annotation>& annotations, std::size_t k) {
    std::vector<std::string> statements;
    statements.reserve(annotations.size());
    for (const auto& a : annotations) {
        statements.push_back(a.implied_statement);
    }
    std::set<std::string> out;
    for (auto& e : top_k(statements, k)) {
        out.insert(std::move(e.value));
    }
    return out;
}

namespace {

std::vector<CandidateRecord> generate_for_post(Backend& backend, const EvalPost& post,
                                               const EvalOptions& options,
                                               std::vector<std::string>& errors) {
    std::vector<CandidateRecord> records(options.num_candidates);
    const Scheme scheme = backend.descriptor().scheme;
    try {
        GenerationRequest req;
        req.prefix = eval_prefix(Post{post.id, post.text, Source::Reddit, {}});
        req.num_candidates = options.num_candidates;
        req.max_new_tokens = options.max_new_tokens;
        GenerationResult result = backend.generate(req);
        normalize_result(result, options.num_candidates);
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto& rec = records[i];
            rec.raw = result.candidates[i];
            rec.padded = result.padded[i];
            rec.truncated = result.truncated[i];
            rec.duplicate = result.duplicate[i];
            rec.parsed = parse_scheme_output(rec.raw, scheme);
        }
    } catch (const std::exception& e) {
        errors.push_back(post.id + ": " + e.what());
        for (auto& rec : records) {
            rec.padded = true;
            rec.failed = true;
            rec.parsed = parse_scheme_output("", scheme);
        }
    }
    return records;
}

std::set<std::string> token_set(std::string_view s) {
    const auto tokens = text::overlap_tokens(s);
    return {tokens.begin(), tokens.end()};
}

std::vector<AblationCheck> ablation_checks(const EvalRun& run) {
    std::vector<AblationCheck> checks;
    for (std::size_t a = 0; a < run.backends.size(); ++a) {
        for (std::size_t b = a + 1; b < run.backends.size(); ++b) {
            const auto& first = run.backends[a];
            const auto& second = run.backends[b];
            if (first.descriptor.scheme != Scheme::S || second.descriptor.scheme != Scheme::S) {
                continue;
            }
            for (std::size_t p = 0; p < run.posts.size(); ++p) {
                std::vector<std::string> x;
                std::vector<std::string> y;
                for (const auto& c : first.candidates[p]) {
                    x.push_back(c.raw);
                }
                for (const auto& c : second.candidates[p]) {
                    y.push_back(c.raw);
                }
                std::sort(x.begin(), x.end());
                std::sort(y.begin(), y.end());
                checks.push_back({run.posts[p].id, first.descriptor.label(),
                                  second.descriptor.label(), x != y});
            }
        }
    }
    return checks;
}

} // namespace

ProxyMetrics compute_metrics(const BackendRun& run, const std::vector<EvalPost>& posts,
                             const std::set<std::string>& generic) {
    ProxyMetrics m;
    std::vector<std::size_t> order(posts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return posts[a].id < posts[b].id; });

    std::size_t slots = 0;
    std::size_t with_refs = 0;
    std::size_t generic_count = 0;
    double post_sum = 0.0;
    double ref_sum = 0.0;
    for (const std::size_t p : order) {
        const auto post_tokens = token_set(posts[p].text);
        std::vector<std::set<std::string>> ref_tokens;
        for (const auto& r : posts[p].references) {
            ref_tokens.push_back(token_set(r));
        }
        for (const auto& c : run.candidates[p]) {
            ++slots;
            if (c.parsed.well_formed) {
                ++m.well_formed;
            }
            if (c.padded) {
                ++m.padded;
                continue;
            }
            ++m.candidates;
            if (c.parsed.tuple) {
                ++m.parsed;
                ++m.relation_histogram[std::string(to_string(c.parsed.tuple->relation()))];
                if (generic.contains(histogram_key(c.parsed.tuple->implied_statement()))) {
                    ++generic_count;
                }
            }
            const auto cand = token_set(c.raw);
            post_sum += text::jaccard(cand, post_tokens);
            if (!ref_tokens.empty()) {
                double best = 0.0;
                for (const auto& r : ref_tokens) {
                    best = std::max(best, text::jaccard(cand, r));
                }
                ref_sum += best;
                ++with_refs;
            }
        }
    }
    auto ratio = [](double num, std::size_t den) { return den == 0 ? 0.0 : num / static_cast<double>(den); };
    // Padded slots count against well-formedness: a missing candidate is not
    // a well-formed one.
    m.well_formed_rate = ratio(static_cast<double>(m.well_formed), slots);
    m.post_overlap = ratio(post_sum, m.candidates);
    m.reference_overlap = ratio(ref_sum, with_refs);
    m.generic_rate = ratio(static_cast<double>(generic_count), m.candidates);
    return m;
}

EvalRun run_eval(const std::vector<Backend*>& backends, std::vector<EvalPost> posts,
                 const EvalOptions& options) {
    if (backends.empty()) {
        throw std::invalid_argument("run_eval needs at least one backend");
    }
    if (options.num_candidates == 0 || options.max_new_tokens == 0) {
        throw std::invalid_argument("num_candidates and max_new_tokens must be positive");
    }
    EvalRun run;
    run.posts = std::move(posts);
    run.num_candidates = options.num_candidates;
    run.max_new_tokens = options.max_new_tokens;
    run.generic_statements.assign(options.generic_statements.begin(),
                                  options.generic_statements.end());

    // One worker per backend; a backend sees its requests one at a time.
    std::vector<std::future<BackendRun>> workers;
    for (Backend* backend : backends) {
        workers.push_back(std::async(std::launch::async, [&, backend] {
            BackendRun br;
            br.descriptor = backend->descriptor();
            br.candidates.reserve(run.posts.size());
            for (const auto& post : run.posts) {
                br.candidates.push_back(generate_for_post(*backend, post, options, br.errors));
            }
            return br;
        }));
    }
    for (auto& w : workers) {
        run.backends.push_back(w.get());
    }
    for (auto& br : run.backends) {
        br.metrics = compute_metrics(br, run.posts, options.generic_statements);
    }
    run.ablation = ablation_checks(run);
    return run;
}

json run_to_json(const EvalRun& run) {
    json posts = json::array();
    for (const auto& p : run.posts) {
        posts.push_back({{"id", p.id}, {"text", p.text}, {"references", p.references}});
    }
    json backends = json::array();
    for (const auto& br : run.backends) {
        json per_post = json::array();
        for (const auto& cands : br.candidates) {
            json list = json::array();
            for (const auto& c : cands) {
                list.push_back({{"raw", c.raw},
                                {"padded", c.padded},
                                {"truncated", c.truncated},
                                {"duplicate", c.duplicate},
                                {"failed", c.failed}});
            }
            per_post.push_back(std::move(list));
        }
        backends.push_back({{"descriptor", protocol::descriptor_to_json(br.descriptor)},
                            {"errors", br.errors},
                            {"candidates", std::move(per_post)}});
    }
    return {{"num_candidates", run.num_candidates},
            {"max_new_tokens", run.max_new_tokens},
            {"generic_statements", run.generic_statements},
            {"posts", std::move(posts)},
            {"backends", std::move(backends)}};
}

EvalRun run_from_json(const json& j) {
    EvalRun run;
    run.num_candidates = j.at("num_candidates").get<std::size_t>();
    run.max_new_tokens = j.at("max_new_tokens").get<std::size_t>();
    run.generic_statements = j.at("generic_statements").get<std::vector<std::string>>();
    for (const auto& p : j.at("posts")) {
        run.posts.push_back({p.at("id").get<std::string>(), p.at("text").get<std::string>(),
                             p.at("references").get<std::vector<std::string>>()});
    }
    const std::set<std::string> generic(run.generic_statements.begin(),
                                        run.generic_statements.end());
    for (const auto& b : j.at("backends")) {
        BackendRun br;
        br.descriptor = protocol::descriptor_from_json(b.at("descriptor"));
        br.errors = b.at("errors").get<std::vector<std::string>>();
        for (const auto& cands : b.at("candidates")) {
            std::vector<CandidateRecord> list;
            for (const auto& c : cands) {
                CandidateRecord rec;
                rec.raw = c.at("raw").get<std::string>();
                rec.padded = c.at("padded").get<bool>();
                rec.truncated = c.at("truncated").get<bool>();
                rec.duplicate = c.at("duplicate").get<bool>();
                rec.failed = c.at("failed").get<bool>();
                rec.parsed = parse_scheme_output(rec.raw, br.descriptor.scheme);
                list.push_back(std::move(rec));
            }
            br.candidates.push_back(std::move(list));
        }
        if (br.candidates.size() != run.posts.size()) {
            throw std::invalid_argument("backend '" + br.descriptor.label() +
                                        "' has candidates for a different number of posts");
        }
        br.metrics = compute_metrics(br, run.posts, generic);
        run.backends.push_back(std::move(br));
    }
    run.ablation = ablation_checks(run);
    return run;
}

} // namespace costar
