#include <doctest.h>

#include "pfsm/oracle.hpp"
#include "support/fixtures.hpp"

using namespace pfsm;

TEST_CASE("membership by both methods") {
    const auto ast = parse_regex("a(ca)*b");
    for (const auto* s : {"ab", "acab", "acacab"}) {
        CHECK(oracle::accepts(ast, s));
        CHECK(oracle::accepts_positions(ast, s));
    }
    for (const auto* s : {"", "a", "acb", "aab", "abab"}) {
        CHECK_FALSE(oracle::accepts(ast, s));
        CHECK_FALSE(oracle::accepts_positions(ast, s));
    }
    CHECK(oracle::accepts(parse_regex("a*"), ""));
    CHECK(oracle::accepts_positions(parse_regex("a*"), ""));
    CHECK(oracle::accepts(parse_regex("()"), ""));
    CHECK_FALSE(oracle::accepts(parse_regex("()"), "a"));
    CHECK(oracle::accepts(parse_regex("(a|)b+"), "bbb"));
    CHECK(oracle::accepts(parse_regex("[^a]"), "\xff"));
}

TEST_CASE("the example matches come out of the oracle") {
    std::vector<RegexAst> asts;
    for (const auto& p : testing::kExamplePatterns) {
        asts.push_back(parse_regex(p));
    }
    CHECK(oracle::all_matches(asts, testing::kExampleInput) == testing::example_matches());
    CHECK(oracle::all_matches_positions(asts, testing::kExampleInput) == testing::example_matches());
}

TEST_CASE("the two methods agree on random trees") {
    testing::Rng rng(5);
    for (int k = 0; k < 400; ++k) {
        const auto alphabet = testing::random_alphabet(rng, 3);
        const auto ast = testing::random_ast(rng, alphabet, 5);
        CAPTURE(to_pattern(ast));
        for (const auto& s : testing::all_strings(alphabet, 5)) {
            REQUIRE(oracle::accepts(ast, s) == oracle::accepts_positions(ast, s));
        }
    }
}

TEST_CASE("all_matches excludes empty spans and is sorted") {
    const std::vector<RegexAst> asts = {parse_regex("b*"), parse_regex("a")};
    const auto m = oracle::all_matches(asts, "ab");
    CHECK(m == std::vector<Match>{make_match(1, 0, 0), make_match(0, 1, 1)});
    CHECK(oracle::all_matches(asts, "").empty());
}
