// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.

#include "costar/dataset.hpp"
#include "costar/grammar.hpp"
#include "costar/serializer.hpp"
#include "costar/text.hpp"
#include "published_examples.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>

using namespace costar;
using nlohmann::json;
using testing::read_file;
using testing::run_cli;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure messages.
class Checker {
  public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok) {
            ++failures_;
            if (failures_ <= 3) {
                messages_ += (messages_.empty() ? "" : "; ") + what;
            }
        }
    }
    Outcome outcome(const std::string& summary) const {
        if (failures_ == 0) {
            return {true, summary};
        }
        return {false, std::to_string(failures_) + "/" + std::to_string(checks_) +
                           " checks failed: " + messages_};
    }

  private:
    std::size_t checks_ = 0;
    std::size_t failures_ = 0;
    std::string messages_;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

const std::string kFixture = (testing::data_dir() / "synthetic_50.jsonl").string();

Outcome grammar_round_trip() {
    testing::Generator gen(20240601);
    std::vector<StereotypeTuple> tuples;
    for (int i = 0; i < 1000; ++i) {
        tuples.push_back(gen.tuple());
    }
    Checker c;
    const auto start = Clock::now();
    std::size_t ok = 0;
    for (const auto& t : tuples) {
        const auto parsed = try_parse_tuple(render_tuple(t));
        ok += parsed.tuple && *parsed.tuple == t;
    }
    const double elapsed = seconds_since(start);
    c.expect(ok == tuples.size(), std::to_string(tuples.size() - ok) + " tuples did not round-trip");
    c.expect(elapsed < 1.0, "took " + fmt(elapsed) + " s");
    return c.outcome(std::to_string(ok) + "/1000 round-trips in " + fmt(elapsed) + " s");
}

Outcome closed_relation_set() {
    const std::vector<std::string> symbols = {"are",     "have", "can",    "cause",
                                              "prevent", "want", "should", "do"};
    const std::vector<std::string> near_misses = {
        "is",      "has",     "could",    "will",      "would",    "may",       "might",
        "must",    "shall",   "does",     "did",       "done",     "doing",     "am",
        "was",     "were",    "be",       "been",      "being",    "had",       "having",
        "cannot",  "wants",   "wanted",   "causes",    "caused",   "prevents",  "prevented",
        "shouldn't", "don't", "can't",    "aren't",    "haven't",  "causing",   "preventing",
        "wanting", "need",    "needs",    "like",      "likes",    "hate",      "hates",
        "make",    "makes",   "get",      "gets",      "seem",     "seems",     "become",
        "ought"};
    Checker c;
    c.expect(near_misses.size() == 50, "near-miss list has " + std::to_string(near_misses.size()));
    std::size_t accepted = 0;
    for (const auto& s : symbols) {
        std::string upper = s;
        std::string capitalized = s;
        for (auto& ch : upper) {
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        }
        capitalized[0] = upper[0];
        bool ok = true;
        for (const auto& form : {s, upper, capitalized, " " + s + " "}) {
            const auto r = relation_from_string(form);
            ok = ok && r && to_string(*r) == s;
        }
        c.expect(ok, "'" + s + "' not accepted in every case form");
        accepted += ok;
    }
    std::size_t rejected = 0;
    for (const auto& v : near_misses) {
        const bool ok = !relation_from_string(v);
        c.expect(ok, "'" + v + "' accepted");
        rejected += ok;
        // and the annotation validator agrees
        const Annotation a{"p", "men", v, "loud", "noise", std::nullopt};
        const auto report = validate_annotation(a);
        c.expect(std::find(report.begin(), report.end(), RuleCode::BadRelation) != report.end(),
                 "validator accepted '" + v + "'");
    }
    return c.outcome(std::to_string(accepted) + "/8 symbols accepted, " + std::to_string(rejected) +
                     "/50 near misses rejected");
}

Outcome scheme_structure() {
    testing::Generator gen(777);
    Checker c;
    std::size_t cases = 0;
    for (int i = 0; i < 1000; ++i) {
        auto [post, ann] = gen.annotated_post("p" + std::to_string(i));
        const std::string tuple = ann.tuple().render();
        const std::string concept_text = ann.concept_label().text();
        for (const Scheme sc : kAllSchemes) {
            const std::string s = serialize(post, ann, sc).text;
            // marker positions
            std::vector<std::size_t> seps;
            for (auto pos = s.find(kSepMarker); pos != std::string::npos;
                 pos = s.find(kSepMarker, pos + 1)) {
                seps.push_back(pos);
            }
            const std::size_t want = sc == Scheme::S ? 1 : 2;
            c.expect(seps.size() == want, "wrong separator count in: " + s);
            c.expect(text::count_occurrences(s, kEosMarker) == 1 && s.ends_with(kEosMarker),
                     "end marker misplaced in: " + s);
            if (seps.size() != want) {
                continue;
            }
            const std::size_t eos = s.size() - kEosMarker.size();
            auto segment = [&](std::size_t from, std::size_t to) {
                return text::normalize_whitespace(s.substr(from, to - from));
            };
            if (sc == Scheme::S) {
                c.expect(segment(seps[0] + kSepMarker.size(), eos) == tuple, "s segment: " + s);
            } else {
                const std::string first = segment(seps[0] + kSepMarker.size(), seps[1]);
                const std::string second = segment(seps[1] + kSepMarker.size(), eos);
                if (sc == Scheme::CS) {
                    c.expect(first == concept_text && second == tuple, "cs order: " + s);
                } else {
                    c.expect(first == tuple && second == concept_text, "sc order: " + s);
                }
            }
        }
        ++cases;
    }
    return c.outcome(std::to_string(cases) + " annotations x 3 schemes");
}

Outcome published_fixtures() {
    Checker c;
    // labelled posts become valid eval prefixes, their conceptualisations are valid labels
    for (const auto& e : testing::concept_examples()) {
        const Post p{"t2", e.post, Source::Reddit, ""};
        const std::string prefix = eval_prefix(p);
        c.expect(text::count_occurrences(prefix, kSepMarker) == 1 && prefix.ends_with(kSepMarker),
                 "bad prefix for: " + e.post);
        c.expect(post_segment(prefix) == text::normalize_whitespace(e.post), "post altered: " + e.post);
        c.expect(!Conceptualisation::check(e.concept_text), "concept rejected: " + e.concept_text);
        const auto parsed = parse_scheme_output(e.concept_text + " [SEP] " + "group are statement",
                                                Scheme::CS);
        c.expect(parsed.well_formed && parsed.conceptualisation->text() == e.concept_text,
                 "concept does not parse: " + e.concept_text);
    }
    c.expect(eval_prefix({"e", "I hate fat bitches", Source::Twitter, ""}) == "I hate fat bitches [SEP]",
             "prefix of labelled post (e)");

    // every published model output parses under its scheme
    std::size_t outputs = 0;
    for (const auto& e : testing::generation_examples()) {
        for (const Scheme sc : kAllSchemes) {
            for (const auto& out : testing::outputs_for(e, sc)) {
                ++outputs;
                const auto parsed = parse_scheme_output(out, sc);
                c.expect(parsed.well_formed, "(" + e.label + ") " + std::string(to_string(sc)) +
                                                 " output does not parse: " + out);
            }
        }
    }
    const auto a = parse_scheme_output("gender roles [SEP] men should be masculine", Scheme::CS);
    c.expect(a.well_formed && a.conceptualisation->text() == "gender roles" &&
                 *a.tuple == StereotypeTuple::make("men", Relation::Should, "be masculine"),
             "output example (a)");
    const Post post_a{"a", "That's not what a real man would do.", Source::Reddit, ""};
    const Annotation ann_a{"a", "men", "should", "be masculine", "gender roles", std::nullopt};
    c.expect(serialize(post_a, ann_a, Scheme::CS).text ==
                 "That's not what a real man would do. [SEP] gender roles [SEP] men should be masculine [EOS]",
             "serialization example (a)");

    // the two structure examples from the framework description
    const Annotation korean{"k", "Korean folks", "have", "weird names", "naming customs", std::nullopt};
    c.expect(validate_annotation(korean).empty(), "Korean folks example rejected");
    const auto korean_parse = try_parse_tuple("Korean folks have weird names");
    c.expect(korean_parse.tuple &&
                 *korean_parse.tuple == StereotypeTuple::make("Korean folks", Relation::Have, "weird names"),
             "Korean folks example does not parse");
    c.expect(try_parse_tuple("trivialises harm to victims").failure == ParseFailure::NoRelation,
             "non-tuple reference accepted");
    return c.outcome("5 labelled posts, " + std::to_string(outputs) +
                     " published outputs, 2 structure examples");
}

// build (3 schemes) + eval with four baselines into `dir`; returns false on a
// non-zero exit code.
bool pipeline(const std::filesystem::path& dir, std::string& error) {
    std::filesystem::create_directories(dir);
    std::string backends;
    for (const char* scheme : {"cs", "sc", "s"}) {
        const auto corpus = (dir / (std::string("corpus_") + scheme + ".jsonl")).string();
        const auto r = run_cli("build -i " + kFixture + " --scheme " + scheme + " --seed 42 -o " + corpus);
        if (r.exit_code != 0) {
            error = "build " + std::string(scheme) + " exited " + std::to_string(r.exit_code);
            return false;
        }
        backends += std::string(scheme) == "s"
                        ? " -b baseline:" + corpus + "@1 -b baseline:" + corpus + "@2"
                        : " -b baseline:" + corpus;
    }
    const auto out = dir / "eval";
    const auto r = run_cli("eval -d " + kFixture + backends + " --n 20 --seed 42 -o " + out.string());
    if (r.exit_code != 0) {
        error = "eval exited " + std::to_string(r.exit_code) + ": " + r.output;
        return false;
    }
    const auto again = dir / "report";
    const auto rr = run_cli("report --run " + (out / "run.json").string() + " -o " + again.string());
    if (rr.exit_code != 0) {
        error = "report exited " + std::to_string(rr.exit_code);
        return false;
    }
    return true;
}

Outcome determinism(const std::filesystem::path& root) {
    Checker c;
    std::string error;
    const bool first = pipeline(root / "run1", error);
    c.expect(first, error);
    const bool second = pipeline(root / "run2", error);
    c.expect(second, error);
    if (!first || !second) {
        return c.outcome("");
    }
    const std::vector<std::string> files = {
        "corpus_cs.jsonl", "corpus_sc.jsonl", "corpus_s.jsonl",  "corpus_cs.jsonl.manifest.json",
        "eval/metrics.jsonl", "eval/report.md", "eval/run.json"};
    for (const auto& f : files) {
        const std::string a = read_file(root / "run1" / f);
        c.expect(!a.empty(), f + " is empty");
        c.expect(a == read_file(root / "run2" / f), f + " differs between runs");
    }
    return c.outcome(std::to_string(files.size()) + " files byte-identical across two runs");
}

Outcome end_to_end(const std::filesystem::path& root) {
    Checker c;
    std::string error;
    const auto start = Clock::now();
    const bool ok = pipeline(root / "e2e", error);
    const double elapsed = seconds_since(start);
    c.expect(ok, error);
    c.expect(elapsed < 30.0, "took " + fmt(elapsed) + " s");
    if (!ok) {
        return c.outcome("");
    }
    const auto dir = root / "e2e";
    std::istringstream metrics(read_file(dir / "eval" / "metrics.jsonl"));
    std::string line;
    std::size_t backends = 0;
    double min_rate = 1.0;
    while (std::getline(metrics, line)) {
        const json m = json::parse(line);
        ++backends;
        const double rate = m.at("well_formed_rate").get<double>();
        min_rate = std::min(min_rate, rate);
        c.expect(rate == 1.0, m.at("backend").get<std::string>() + " well_formed_rate " + fmt(rate));
        c.expect(m.at("posts") == 20, "posts != 20");
    }
    c.expect(backends == 4, std::to_string(backends) + " backends in metrics");
    const std::string md = read_file(dir / "report" / "report.md");
    c.expect(text::count_occurrences(md, "### post (") == 20, "report does not hold 20 posts");
    c.expect(md == read_file(dir / "eval" / "report.md"), "re-rendered report differs");
    c.expect(std::filesystem::exists(dir / "eval" / "report.html"), "no HTML report");
    return c.outcome("3 schemes, 4 baselines, n=20 in " + fmt(elapsed, 2) +
                     " s, min well_formed_rate " + fmt(min_rate));
}

// Writes a corpus whose composition matches the published tables: source
// buckets, the most frequent targeted group, and the overall size.
void write_replica(const std::filesystem::path& path) {
    const std::vector<std::tuple<std::string, std::string, int>> buckets = {
        {"reddit", "r/DarkJokes", 5176},     {"reddit", "r/MeanJokes", 1732},
        {"reddit", "r/OffensiveJokes", 195}, {"reddit", "microaggressions", 657},
        {"twitter", "founta", 658},          {"twitter", "davidson", 1124},
        {"twitter", "waseem", 297},          {"hate_site", "stormfront", 785},
        {"hate_site", "gab", 604},           {"hate_site", "banned_subreddits", 847}};
    const std::vector<std::pair<std::string, int>> groups = {
        {"women", 2318}, {"black folks", 1914}, {"jewish folks", 668}, {"muslim folks", 341},
        {"children", 249}, {"men", 214}, {"gay folks", 175}, {"white folks", 169}};
    std::vector<std::string> group_pool;
    for (const auto& [g, n] : groups) {
        group_pool.insert(group_pool.end(), static_cast<std::size_t>(n), g);
    }
    std::ofstream out(path);
    std::size_t i = 0;
    for (const auto& [source, sub, n] : buckets) {
        for (int k = 0; k < n; ++k, ++i) {
            const std::string group =
                i < group_pool.size() ? group_pool[i] : "group " + std::to_string(i % 997);
            out << json{{"post_id", "r" + std::to_string(i)},
                        {"post_text", "replica post number " + std::to_string(i)},
                        {"source", source},
                        {"sub_source", sub},
                        {"targeted_group", group},
                        {"relation", "are"},
                        {"implied_statement", "statement " + std::to_string(i % 50)},
                        {"conceptualisation", "label " + std::to_string(i % 30)}}
                       .dump()
                << '\n';
        }
    }
}

void check_corpus_numbers(const std::string& path, const std::filesystem::path& dir, Checker& c,
                          std::string& summary) {
    const auto stats_path = dir / "stats.json";
    const auto stats = run_cli("stats -i " + path + " --k 8 -o " + stats_path.string());
    c.expect(stats.exit_code == 0, "stats exited " + std::to_string(stats.exit_code));
    if (stats.exit_code != 0) {
        return;
    }
    const json s = json::parse(read_file(stats_path));
    const json& sub = s.at("manifest").at("subtotals");
    const auto count = [&](const char* k) { return sub.contains(k) ? sub.at(k).get<std::size_t>() : 0; };
    c.expect(count("reddit") == 7760, "reddit subtotal " + std::to_string(count("reddit")));
    c.expect(count("twitter") == 2079, "twitter subtotal " + std::to_string(count("twitter")));
    c.expect(count("hate_site") == 2236, "hate-site subtotal " + std::to_string(count("hate_site")));
    const auto total = s.at("manifest").at("total").get<std::size_t>();
    c.expect(total == 12075, "total " + std::to_string(total));
    const json& top = s.at("targeted_group").at(0);
    c.expect(top.at("value") == "women" && top.at("count") == 2318,
             "top targeted group " + top.dump());

    const auto split_path = dir / "split.json";
    std::ostringstream frac;
    frac << std::setprecision(17) << 1806.0 / 12075.0;
    const auto split = run_cli("split -i " + path + " --dev-fraction " + frac.str() + " -o " +
                               split_path.string());
    c.expect(split.exit_code == 0, "split exited " + std::to_string(split.exit_code));
    std::size_t dev = 0;
    if (split.exit_code == 0) {
        dev = json::parse(read_file(split_path)).at("dev").size();
        c.expect(dev == 1806, "dev size " + std::to_string(dev));
    }
    summary = "manifest " + std::to_string(count("reddit")) + "/" + std::to_string(count("twitter")) +
              "/" + std::to_string(count("hate_site")) + " total " + std::to_string(total) +
              ", top group " + top.at("value").get<std::string>() + "=" +
              std::to_string(top.at("count").get<std::size_t>()) + ", dev " + std::to_string(dev);
}

Outcome real_corpus_numbers(const std::filesystem::path& root) {
    Checker c;
    std::string summary;
    const auto dir = root / "corpus";
    std::filesystem::create_directories(dir);
    if (const char* real = std::getenv("COSTAR_REAL_CORPUS"); real != nullptr && *real != '\0') {
        check_corpus_numbers(real, dir, c, summary);
        return c.outcome("released corpus: " + summary);
    }
    const auto replica = dir / "replica.jsonl";
    write_replica(replica);
    check_corpus_numbers(replica.string(), dir, c, summary);
    return c.outcome("COSTAR_REAL_CORPUS not set, checked on a synthetic replica of the published "
                     "composition: " + summary);
}

} // namespace

int main() {
    const auto root = testing::temp_dir("acceptance");
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"grammar round-trip", grammar_round_trip},
        {"closed relation set", closed_relation_set},
        {"scheme structure", scheme_structure},
        {"published-text fixtures", published_fixtures},
        {"determinism", [&] { return determinism(root); }},
        {"end-to-end offline", [&] { return end_to_end(root); }},
        {"real-corpus numbers", [&] { return real_corpus_numbers(root); }},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")\n";
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed\n";
    std::filesystem::remove_all(root);
    return failed == 0 ? 0 : 1;
}
