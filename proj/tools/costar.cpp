// costar: command-line pipelines over annotated corpora.
//
// Exit codes: 0 success, 1 validation findings, 2 usage error,
// 3 backend or I/O failure.

#include "costar/backend.hpp"
#include "costar/dataset.hpp"
#include "costar/eval.hpp"
#include "costar/protocol.hpp"
#include "costar/serializer.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace costar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;
constexpr std::uint64_t kDefaultSeed = 42;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

IngestResult load(const fs::path& input, const std::string& format_flag) {
    Format format = format_for_path(input);
    if (!format_flag.empty()) {
        const auto f = format_from_string(format_flag);
        if (!f) {
            throw UsageError("unknown format '" + format_flag + "'");
        }
        format = *f;
    }
    try {
        return ingest(input, format);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

json errors_to_json(const std::vector<RecordError>& errors) {
    json out = json::array();
    for (const auto& e : errors) {
        out.push_back({{"row", e.row}, {"codes", e.codes}, {"message", e.message}});
    }
    return out;
}

json manifest_to_json(const CorpusManifest& m) {
    json entries = json::array();
    for (const auto& e : m.entries) {
        entries.push_back({{"source", std::string(to_string(e.source))},
                           {"sub_source", e.sub_source},
                           {"n_posts", e.n_posts}});
    }
    json subtotals = json::object();
    for (const auto& [src, n] : m.subtotals) {
        subtotals[std::string(to_string(src))] = n;
    }
    return {{"entries", std::move(entries)}, {"subtotals", std::move(subtotals)}, {"total", m.total}};
}

json histogram_to_json(const std::vector<HistogramEntry>& h) {
    json out = json::array();
    for (const auto& e : h) {
        out.push_back({{"value", e.value}, {"count", e.count}});
    }
    return out;
}

json demographics_to_json(const DemographicTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"category", r.category}, {"count", r.count}, {"percent", r.percent}});
    }
    return {{"reported", t.reported}, {"rows", std::move(rows)}};
}

Scheme scheme_flag(const std::string& s) {
    const auto scheme = scheme_from_string(s);
    if (!scheme) {
        throw UsageError("unknown scheme '" + s + "' (expected cs, sc or s)");
    }
    return *scheme;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string input;
    std::string format;
    std::string report;
};

int cmd_validate(const ValidateArgs& a) {
    const IngestResult r = load(a.input, a.format);
    for (const auto& e : r.errors) {
        std::cout << "row " << e.row << ":";
        for (const auto& c : e.codes) {
            std::cout << ' ' << c;
        }
        std::cout << " (" << e.message << ")\n";
    }
    std::cout << r.annotations.size() << " valid, " << r.errors.size() << " rejected\n";
    if (!a.report.empty()) {
        const json doc = {{"input", a.input},
                          {"valid", r.annotations.size()},
                          {"rejected", r.errors.size()},
                          {"errors", errors_to_json(r.errors)}};
        write_file(a.report, doc.dump(2) + "\n");
    }
    return r.errors.empty() ? kExitOk : kExitFindings;
}

struct BuildArgs {
    std::string input;
    std::string format;
    std::string scheme = "cs";
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string manifest;
    std::size_t max_length = kDefaultMaxLengthTokens;
};

int cmd_build(const BuildArgs& a) {
    SerializerConfig config;
    config.scheme = scheme_flag(a.scheme);
    config.shuffle_seed = a.seed;
    config.max_length_tokens = a.max_length;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const IngestResult r = load(a.input, a.format);
    const CorpusBuild build = build_corpus(r.posts, r.annotations, config);

    std::ostringstream corpus;
    write_instances(corpus, build.instances);
    write_file(a.out, corpus.str());

    std::size_t truncated = 0;
    for (const auto& inst : build.instances) {
        truncated += inst.truncated ? 1 : 0;
    }
    json build_errors = json::array();
    for (const auto& e : build.errors) {
        build_errors.push_back({{"index", e.index}, {"post_id", e.post_id}, {"message", e.message}});
    }
    const json manifest = {
        {"input", a.input},
        {"scheme", std::string(to_string(config.scheme))},
        {"seed", config.shuffle_seed},
        {"max_length_tokens", config.max_length_tokens},
        {"instances", build.instances.size()},
        {"truncated", truncated},
        {"rejected_records", errors_to_json(r.errors)},
        {"build_errors", std::move(build_errors)},
        {"posts", manifest_to_json(make_manifest(r.posts))},
    };
    const std::string manifest_path = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
    write_file(manifest_path, manifest.dump(2) + "\n");

    std::cerr << "wrote " << build.instances.size() << " instances to " << a.out << "\n";
    if (!r.errors.empty() || !build.errors.empty()) {
        std::cerr << r.errors.size() + build.errors.size()
                  << " records rejected; see " << manifest_path << "\n";
        return kExitFindings;
    }
    return kExitOk;
}

struct StatsArgs {
    std::string input;
    std::string format;
    std::size_t k = 8;
    std::string out;
};

int cmd_stats(const StatsArgs& a) {
    if (a.k == 0) {
        throw UsageError("--k must be >= 1");
    }
    const IngestResult r = load(a.input, a.format);
    const CorpusStats s = compute_stats(r.annotations, a.k);
    const json doc = {
        {"annotations", s.total_annotations},
        {"rejected", r.errors.size()},
        {"manifest", manifest_to_json(make_manifest(r.posts))},
        {"targeted_group", histogram_to_json(s.targeted_groups)},
        {"implied_statement", histogram_to_json(s.implied_statements)},
        {"conceptualisation", histogram_to_json(s.conceptualisations)},
        {"annotators", s.unique_annotators},
        {"gender", demographics_to_json(s.gender)},
        {"race", demographics_to_json(s.race)},
        {"age", demographics_to_json(s.age)},
    };
    if (a.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        write_file(a.out, doc.dump(2) + "\n");
    }
    return kExitOk;
}

struct SplitArgs {
    std::string input;
    std::string format;
    std::uint64_t seed = kDefaultSeed;
    double dev_fraction = 0.0;
    std::size_t dev_size = 0;
    std::string out;
};

int cmd_split(const SplitArgs& a) {
    const IngestResult r = load(a.input, a.format);
    const auto ids = post_ids(r.posts);
    double fraction = a.dev_fraction;
    if (a.dev_size > 0) {
        if (ids.empty()) {
            throw UsageError("no posts to split");
        }
        fraction = static_cast<double>(a.dev_size) / static_cast<double>(ids.size());
    }
    Split s;
    try {
        s = split_posts(ids, fraction, a.seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const json doc = {{"seed", a.seed}, {"dev_fraction", fraction}, {"train", s.train}, {"dev", s.dev}};
    write_file(a.out, doc.dump(2) + "\n");
    std::cerr << "train " << s.train.size() << ", dev " << s.dev.size() << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string data;
    std::string format;
    std::string split;
    std::vector<std::string> backends;
    std::size_t n = kDefaultEvalSample;
    std::uint64_t seed = kDefaultSeed;
    std::size_t candidates = kDefaultNumCandidates;
    std::size_t max_new_tokens = kDefaultMaxNewTokens;
    int epochs = 5;
    double lr = 1e-5;
    int batch = 1;
    std::string out_dir;
};

TrainingConfig training_flags(int epochs, double lr, int batch) {
    TrainingConfig t;
    t.epochs = epochs;
    t.learning_rate = lr;
    t.batch_size = batch;
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return t;
}

std::vector<TrainingInstance> read_corpus(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open corpus '" + path.string() + "'");
    }
    try {
        return read_instances(in);
    } catch (const std::runtime_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// baseline:PATH[@INSTANCE]  or  exec:SCHEME:COMMAND
std::unique_ptr<Backend> make_backend(const std::string& spec, const TrainingConfig& training) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw UsageError("backend spec '" + spec + "' must be baseline:PATH or exec:SCHEME:COMMAND");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "baseline") {
        std::string path = rest;
        int instance = 1;
        if (const auto at = rest.rfind('@'); at != std::string::npos) {
            path = rest.substr(0, at);
            try {
                instance = std::stoi(rest.substr(at + 1));
            } catch (const std::exception&) {
                throw UsageError("bad instance id in '" + spec + "'");
            }
        }
        const auto instances = read_corpus(path);
        if (instances.empty()) {
            throw IoError("corpus '" + path + "' is empty");
        }
        BackendDescriptor d = BaselineBackend::default_descriptor(instances.front().scheme, instance);
        d.training = training;
        try {
            return std::make_unique<BaselineBackend>(BaselineBackend::train(instances, d));
        } catch (const BackendError& e) {
            throw IoError(e.what());
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (kind == "exec") {
        const auto colon2 = rest.find(':');
        if (colon2 == std::string::npos) {
            throw UsageError("exec backend spec must be exec:SCHEME:COMMAND");
        }
        const Scheme declared = scheme_flag(rest.substr(0, colon2));
        ::setenv("COSTAR_SCHEME", std::string(to_string(declared)).c_str(), 1);
        ::setenv("COSTAR_EPOCHS", std::to_string(training.epochs).c_str(), 1);
        ::setenv("COSTAR_LEARNING_RATE", std::to_string(training.learning_rate).c_str(), 1);
        ::setenv("COSTAR_BATCH_SIZE", std::to_string(training.batch_size).c_str(), 1);
        auto backend = std::make_unique<ExternalBackend>(rest.substr(colon2 + 1));
        check_registration(backend->descriptor(), declared);
        return backend;
    }
    throw UsageError("unknown backend kind '" + kind + "'");
}

void write_reports(const EvalRun& run, const fs::path& dir) {
    write_file(dir / "run.json", run_to_json(run).dump(1) + "\n");
    write_file(dir / "report.md", report_markdown(run));
    write_file(dir / "report.html", report_html(run));
    write_file(dir / "metrics.jsonl", metrics_jsonl(run));
}

int cmd_eval(const EvalArgs& a) {
    if (a.backends.empty()) {
        throw UsageError("at least one --backend is required");
    }
    if (a.n == 0 || a.candidates == 0 || a.max_new_tokens == 0) {
        throw UsageError("--n, --candidates and --max-new-tokens must be positive");
    }
    const TrainingConfig training = training_flags(a.epochs, a.lr, a.batch);
    const IngestResult data = load(a.data, a.format);

    std::vector<std::string> pool;
    if (!a.split.empty()) {
        pool = read_json_file(a.split).at("dev").get<std::vector<std::string>>();
    } else {
        pool = post_ids(data.posts);
    }
    std::vector<std::string> sample;
    try {
        sample = sample_dev(pool, a.n, a.seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::vector<EvalPost> posts;
    try {
        posts = eval_posts(sample, data.posts, data.annotations);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::vector<std::unique_ptr<Backend>> owned;
    std::vector<Backend*> backends;
    std::set<std::string> labels;
    for (const auto& spec : a.backends) {
        owned.push_back(make_backend(spec, training));
        if (!labels.insert(owned.back()->descriptor().label()).second) {
            throw UsageError("two backends share the label '" + owned.back()->descriptor().label() +
                             "'; give ablated instances distinct @INSTANCE ids");
        }
        backends.push_back(owned.back().get());
    }

    EvalOptions options;
    options.num_candidates = a.candidates;
    options.max_new_tokens = a.max_new_tokens;
    options.generic_statements = generic_statements(data.annotations);
    const EvalRun run = run_eval(backends, std::move(posts), options);
    write_reports(run, a.out_dir);
    std::cout << metrics_jsonl(run);
    return kExitOk;
}

struct ReportArgs {
    std::string run;
    std::string out_dir;
};

int cmd_report(const ReportArgs& a) {
    EvalRun run;
    try {
        run = run_from_json(read_json_file(a.run));
    } catch (const json::exception& e) {
        throw IoError("'" + a.run + "' is not a stored run: " + e.what());
    }
    write_file(fs::path(a.out_dir) / "report.md", report_markdown(run));
    write_file(fs::path(a.out_dir) / "report.html", report_html(run));
    write_file(fs::path(a.out_dir) / "metrics.jsonl", metrics_jsonl(run));
    return kExitOk;
}

struct ServeArgs {
    std::string corpus;
    int instance = 1;
    int epochs = 5;
    double lr = 1e-5;
    int batch = 1;
};

int cmd_serve(const ServeArgs& a) {
    const auto instances = read_corpus(a.corpus);
    if (instances.empty()) {
        throw IoError("corpus '" + a.corpus + "' is empty");
    }
    BackendDescriptor d = BaselineBackend::default_descriptor(instances.front().scheme, a.instance);
    d.training = training_flags(a.epochs, a.lr, a.batch);
    BaselineBackend backend = BaselineBackend::train(instances, d);
    protocol::serve(backend, std::cin, std::cout);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured implied-stereotype annotation toolkit"};
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Check every record against the annotation rules");
    validate->add_option("--input,-i", va.input, "Annotation file (JSONL or CSV)")->required();
    validate->add_option("--format", va.format, "jsonl or csv (default: by extension)");
    validate->add_option("--report", va.report, "Write the per-record report as JSON");

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "Serialize a training corpus under one scheme");
    build->add_option("--input,-i", ba.input, "Annotation file")->required();
    build->add_option("--format", ba.format, "jsonl or csv");
    build->add_option("--scheme", ba.scheme, "cs, sc or s")->capture_default_str();
    build->add_option("--seed", ba.seed, "Shuffle seed")->capture_default_str();
    build->add_option("--out,-o", ba.out, "Output corpus (JSONL)")->required();
    build->add_option("--manifest", ba.manifest, "Manifest path (default: OUT.manifest.json)");
    build->add_option("--max-length", ba.max_length, "Token budget per instance")->capture_default_str();

    StatsArgs sa;
    auto* stats = app.add_subcommand("stats", "Corpus composition, top-k responses, demographics");
    stats->add_option("--input,-i", sa.input, "Annotation file")->required();
    stats->add_option("--format", sa.format, "jsonl or csv");
    stats->add_option("--k", sa.k, "Histogram size")->capture_default_str();
    stats->add_option("--out,-o", sa.out, "Write JSON here instead of stdout");

    SplitArgs spa;
    auto* split = app.add_subcommand("split", "Seeded train/dev partition of the posts");
    split->add_option("--input,-i", spa.input, "Annotation file")->required();
    split->add_option("--format", spa.format, "jsonl or csv");
    split->add_option("--seed", spa.seed, "Split seed")->capture_default_str();
    auto* frac = split->add_option("--dev-fraction", spa.dev_fraction, "Fraction of posts in dev");
    auto* size = split->add_option("--dev-size", spa.dev_size, "Number of posts in dev");
    frac->excludes(size);
    split->add_option("--out,-o", spa.out, "Output split JSON")->required();

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Sample posts, query backends, score and report");
    eval->add_option("--data,-d", ea.data, "Annotation file with the evaluated posts")->required();
    eval->add_option("--format", ea.format, "jsonl or csv");
    eval->add_option("--split", ea.split, "Split JSON; sample from its dev ids");
    eval->add_option("--backend,-b", ea.backends,
                     "baseline:CORPUS[@INSTANCE] or exec:SCHEME:COMMAND (repeatable)")
        ->required();
    eval->add_option("--n", ea.n, "Posts to sample")->capture_default_str();
    eval->add_option("--seed", ea.seed, "Sampling seed")->capture_default_str();
    eval->add_option("--candidates", ea.candidates, "Candidates per post")->capture_default_str();
    eval->add_option("--max-new-tokens", ea.max_new_tokens, "Token budget per candidate")
        ->capture_default_str();
    eval->add_option("--epochs", ea.epochs, "Training epochs echoed to backends")->capture_default_str();
    eval->add_option("--lr", ea.lr, "Learning rate echoed to backends")->capture_default_str();
    eval->add_option("--batch-size", ea.batch, "Batch size echoed to backends")->capture_default_str();
    eval->add_option("--out-dir,-o", ea.out_dir, "Directory for run.json and reports")->required();

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Re-render reports from a stored run");
    report->add_option("--run", ra.run, "run.json written by eval")->required();
    report->add_option("--out-dir,-o", ra.out_dir, "Output directory")->required();

    ServeArgs sv;
    auto* serve = app.add_subcommand("serve", "Serve a baseline backend over the stdio protocol");
    serve->add_option("--corpus", sv.corpus, "Serialized corpus (JSONL)")->required();
    serve->add_option("--instance", sv.instance, "Instance id")->capture_default_str();
    serve->add_option("--epochs", sv.epochs, "Training epochs echoed in the handshake")
        ->capture_default_str();
    serve->add_option("--lr", sv.lr, "Learning rate echoed in the handshake")->capture_default_str();
    serve->add_option("--batch-size", sv.batch, "Batch size echoed in the handshake")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*validate) {
            return cmd_validate(va);
        }
        if (*build) {
            return cmd_build(ba);
        }
        if (*stats) {
            return cmd_stats(sa);
        }
        if (*split) {
            if (spa.dev_fraction == 0.0 && spa.dev_size == 0) {
                throw UsageError("one of --dev-fraction or --dev-size is required");
            }
            return cmd_split(spa);
        }
        if (*eval) {
            return cmd_eval(ea);
        }
        if (*report) {
            return cmd_report(ra);
        }
        if (*serve) {
            return cmd_serve(sv);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
