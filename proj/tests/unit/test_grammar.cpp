#include <doctest.h>

#include "costar/grammar.hpp"
#include "costar/text.hpp"
#include "test_support.hpp"

#include <chrono>

using namespace costar;

namespace {

// Independent oracle: enumerate every position holding a relation word with
// non-empty sides and take the smallest.
std::optional<std::size_t> leftmost_relation_oracle(const std::vector<std::string>& tokens) {
    static const std::set<std::string> symbols = {"are",  "have",   "can",    "cause",
                                                  "prevent", "want", "should", "do"};
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const bool inner = i > 0 && i + 1 < tokens.size();
        if (inner && symbols.count(text::to_lower(text::strip_punctuation(tokens[i])))) {
            hits.push_back(i);
        }
    }
    if (hits.empty()) {
        return std::nullopt;
    }
    return *std::min_element(hits.begin(), hits.end());
}

ParseFailure failure_of(std::string_view s) {
    try {
        (void)parse_tuple(s);
    } catch (const ParseError& e) {
        return e.code();
    }
    FAIL("expected a parse error");
    return ParseFailure::Empty;
}

} // namespace

TEST_CASE("parse_tuple: reference examples") {
    const auto t = parse_tuple("Korean folks have weird names");
    CHECK(t.targeted_group() == "Korean folks");
    CHECK(t.relation() == Relation::Have);
    CHECK(t.implied_statement() == "weird names");

    CHECK(failure_of("trivialises harm to victims") == ParseFailure::NoRelation);

    const auto f = parse_tuple("black fathers do not have fathers");
    CHECK(f.targeted_group() == "black fathers");
    CHECK(f.relation() == Relation::Do);
    CHECK(f.implied_statement() == "not have fathers");

    CHECK(failure_of("are stupid") == ParseFailure::NoRelation);
    CHECK(failure_of("women are") == ParseFailure::NoRelation);
    CHECK(failure_of("") == ParseFailure::Empty);
    CHECK(failure_of(" \t\n") == ParseFailure::Empty);
}

TEST_CASE("parse_tuple: leftmost wins, punctuation and case tolerated") {
    const auto t = parse_tuple("men should be men");
    CHECK(t.targeted_group() == "men");
    CHECK(t.relation() == Relation::Should);

    const auto p = parse_tuple("Muslims HAVE, weird rules");
    CHECK(p.targeted_group() == "Muslims");
    CHECK(p.relation() == Relation::Have);
    CHECK(p.implied_statement() == "weird rules");

    // near misses are not relations
    CHECK(failure_of("haves and cans area") == ParseFailure::NoRelation);
    CHECK(failure_of("a [SEP] are b") == ParseFailure::UnexpectedMarker);
}

TEST_CASE("parse_tuple: leftmost-relation rule against the oracle") {
    testing::Generator gen(99);
    std::vector<std::string> vocab = testing::Generator::statement_vocab();
    for (const auto& w : testing::Generator::group_vocab()) {
        vocab.push_back(w);
    }
    for (const char* w : {"Are", "DO", "want!", "(cause)", "Should"}) {
        vocab.emplace_back(w);
    }
    for (int i = 0; i < 3000; ++i) {
        const std::string s = gen.words(vocab, 1, 9);
        const auto tokens = text::split_words(s);
        const auto expected = leftmost_relation_oracle(tokens);
        const auto got = try_parse_tuple(s);
        if (!expected) {
            REQUIRE(got.failure == ParseFailure::NoRelation);
            continue;
        }
        REQUIRE(got.tuple);
        CHECK(got.tuple->targeted_group() == text::join(tokens, " ", 0, *expected));
        CHECK(got.tuple->implied_statement() == text::join(tokens, " ", *expected + 1));
        CHECK(got.tuple->relation() ==
              parse_relation(text::strip_punctuation(tokens[*expected])));
    }
}

TEST_CASE("render_tuple: examples and round-trip") {
    CHECK(render_tuple(StereotypeTuple::make("women", Relation::Are, "sex objects")) ==
          "women are sex objects");
    CHECK(render_tuple(StereotypeTuple::make("children", Relation::Want, "x")) == "children want x");

    testing::Generator gen(1);
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 1000; ++i) {
        const StereotypeTuple t = gen.tuple();
        REQUIRE(parse_tuple(render_tuple(t)) == t);
    }
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}

TEST_CASE("parse_scheme_output: reference examples") {
    const auto a = parse_scheme_output("gender roles [SEP] men should be masculine", Scheme::CS);
    CHECK(a.well_formed);
    CHECK(a.conceptualisation->text() == "gender roles");
    CHECK(*a.tuple == StereotypeTuple::make("men", Relation::Should, "be masculine"));

    const auto b =
        parse_scheme_output("japanese folks are marginalized for a joke [SEP] war", Scheme::SC);
    CHECK(b.well_formed);
    CHECK(*b.tuple == StereotypeTuple::make("japanese folks", Relation::Are, "marginalized for a joke"));
    CHECK(b.conceptualisation->text() == "war");

    const auto e = parse_scheme_output("", Scheme::S);
    CHECK_FALSE(e.well_formed);
    CHECK(e.failure_reason == ParseFailure::Empty);
}

TEST_CASE("parse_scheme_output: failure reasons") {
    const auto eos = parse_scheme_output("men are loud [EOS] junk [SEP] more", Scheme::S);
    CHECK(eos.well_formed);
    CHECK(eos.tuple->implied_statement() == "loud");

    CHECK(parse_scheme_output("men are loud", Scheme::CS).failure_reason ==
          ParseFailure::MissingSeparator);
    CHECK(parse_scheme_output("men are loud", Scheme::SC).failure_reason ==
          ParseFailure::MissingSeparator);
    CHECK(parse_scheme_output("war [SEP] men are loud", Scheme::S).failure_reason ==
          ParseFailure::UnexpectedMarker);
    CHECK(parse_scheme_output("a b c d [SEP] men are loud", Scheme::CS).failure_reason ==
          ParseFailure::ConceptTooLong);
    CHECK(parse_scheme_output(" [SEP] men are loud", Scheme::CS).failure_reason ==
          ParseFailure::ConceptEmpty);
    // first failing field in scheme order: sc checks the tuple first
    CHECK(parse_scheme_output("loud [SEP] a b c d", Scheme::SC).failure_reason ==
          ParseFailure::NoRelation);
    CHECK(parse_scheme_output("war [SEP] loud", Scheme::CS).failure_reason ==
          ParseFailure::NoRelation);
    CHECK(parse_scheme_output("   [EOS]", Scheme::CS).failure_reason == ParseFailure::Empty);
}

TEST_CASE("parse_scheme_output: never throws on arbitrary text") {
    testing::Generator gen(5);
    const std::vector<std::string> pieces = {"[SEP]", "[EOS]", "[SEP", "men", "are", " ", "\n",
                                             "\xFF", "\xC3", "a b c d", "do", "war", "\xE2\x80\x83"};
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const std::size_t n = gen.index(12);
        for (std::size_t k = 0; k < n; ++k) {
            s += gen.pick(pieces);
        }
        for (const Scheme sc : kAllSchemes) {
            ParsedOutput out;
            CHECK_NOTHROW(out = parse_scheme_output(s, sc));
            CHECK(out.well_formed == !out.failure_reason.has_value());
        }
    }
}

TEST_CASE("parse_scheme_output: adding a missing field keeps valid fields valid") {
    testing::Generator gen(77);
    for (int i = 0; i < 500; ++i) {
        const StereotypeTuple t = gen.tuple();
        const std::string tuple = t.render();
        const std::string concept_text = gen.concept_label();
        for (const Scheme sc : {Scheme::CS, Scheme::SC}) {
            const std::string full = sc == Scheme::CS ? concept_text + " [SEP] " + tuple
                                                      : tuple + " [SEP] " + concept_text;
            const std::vector<std::string> partial =
                sc == Scheme::CS
                    ? std::vector<std::string>{" [SEP] " + tuple, concept_text + " [SEP] ", tuple}
                    : std::vector<std::string>{tuple + " [SEP] ", " [SEP] " + concept_text, tuple};
            const ParsedOutput complete = parse_scheme_output(full, sc);
            REQUIRE(complete.well_formed);
            for (const auto& p : partial) {
                const ParsedOutput broken = parse_scheme_output(p, sc);
                CHECK_FALSE(broken.well_formed);
                if (broken.tuple) {
                    CHECK(complete.tuple == broken.tuple);
                }
                if (broken.conceptualisation) {
                    CHECK(complete.conceptualisation == broken.conceptualisation);
                }
            }
        }
    }
}

TEST_CASE("scheme names") {
    CHECK(to_string(Scheme::CS) == "cs");
    CHECK(scheme_from_string("SC") == Scheme::SC);
    CHECK(scheme_from_string("s") == Scheme::S);
    CHECK_FALSE(scheme_from_string("c"));
}
