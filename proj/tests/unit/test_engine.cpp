#include <doctest.h>

#include "pfsm/engine.hpp"
#include "pfsm/error.hpp"
#include "pfsm/oracle.hpp"
#include "support/fixtures.hpp"

using namespace pfsm;

namespace {

using Entries = std::vector<std::pair<StateId, std::vector<Tag>>>;

std::shared_ptr<const Pfsm> shared(Pfsm p) { return std::make_shared<const Pfsm>(std::move(p)); }

std::vector<Match> sorted(std::vector<Match> m) {
    std::sort(m.begin(), m.end());
    return m;
}

std::vector<Match> oracle_for(const std::vector<std::string>& patterns, std::string_view input) {
    std::vector<RegexAst> asts;
    for (const auto& p : patterns) {
        asts.push_back(parse_regex(p));
    }
    return oracle::all_matches(asts, input);
}

}  // namespace

TEST_CASE("the example input yields exactly the ten expected matches") {
    const auto expected = testing::example_matches();
    CHECK(sorted(run_collect(testing::example_pfsm(), testing::kExampleInput)) == expected);
    for (const auto form : {Form::dfa, Form::nfa, Form::automatic}) {
        const auto p = testing::compile_all(testing::kExamplePatterns, form);
        CHECK(sorted(run_collect(p, testing::kExampleInput)) == expected);
    }
    CHECK(sorted(run_collect(testing::compile_mixed(testing::kExamplePatterns), testing::kExampleInput)) ==
          expected);
}

TEST_CASE("matches are emitted in (end, start, label) order") {
    const auto out = run_collect(testing::compile_all(testing::kExamplePatterns, Form::nfa), testing::kExampleInput);
    CHECK(std::is_sorted(out.begin(), out.end()));
}

TEST_CASE("trace of the first two cycles on \"ac\"") {
    Engine engine(shared(testing::example_pfsm()));
    std::vector<std::tuple<std::size_t, TracePhase, Entries>> seen;
    engine.set_trace([&](std::size_t i, TracePhase phase, const ActiveSet& a) {
        seen.emplace_back(i, phase, a.entries);
    });
    std::vector<Match> matches;
    engine.feed("ac", [&](const Match& m) { matches.push_back(m); });

    REQUIRE(seen.size() == 6);
    CHECK(std::get<2>(seen[0]) == Entries{{0, {0}}});
    CHECK(std::get<2>(seen[1]) == Entries{{0, {0}}, {1, {0}}, {3, {0}}, {6, {0}}});
    CHECK(std::get<2>(seen[2]) == Entries{{1, {0}}, {4, {0}}, {7, {0}}});
    CHECK(std::get<2>(seen[3]) == Entries{{0, {1}}, {1, {0}}, {4, {0}}, {7, {0}}});
    CHECK(std::get<2>(seen[4]) ==
          Entries{{0, {1}}, {1, {0, 1}}, {3, {1}}, {4, {0}}, {6, {1}}, {7, {0}}});
    CHECK(std::get<2>(seen[5]) == Entries{{2, {0, 1}}, {5, {0}}, {8, {0}}});
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(std::get<0>(seen[k]) == k / 3);
        CHECK(std::get<1>(seen[k]) == static_cast<TracePhase>(k % 3));
    }

    CHECK(matches == std::vector<Match>{make_match(0, 0, 1), make_match(1, 0, 1), make_match(0, 1, 1)});
    // Final states without outgoing transitions are dropped after reporting.
    CHECK(engine.snapshot().entries == Entries{{8, {0}}});
}

TEST_CASE("nullable patterns never report zero-length matches") {
    const auto p = testing::compile_all({"a*", "b?"}, Form::nfa);
    const auto out = run_collect(p, "aab");
    for (const auto& m : out) {
        CHECK(m.start <= m.end);
    }
    CHECK(sorted(out) == oracle_for({"a*", "b?"}, "aab"));
    CHECK(out.size() == 4);
}

TEST_CASE("empty input and empty PFSM") {
    CHECK(run_collect(testing::example_pfsm(), "").empty());
    CHECK(run_collect(Pfsm{}, "abc").empty());
    const auto stats = run(Pfsm{}, "abc", [](const Match&) {});
    CHECK(stats.n == 3);
    CHECK(stats.r == 0);
    CHECK(stats.peak_active_pairs() == 1);
}

TEST_CASE("duplicate reports from distinct final states are merged unless disabled") {
    // Two final states of the same pattern reached from the same start.
    Automaton m;
    for (int k = 0; k < 3; ++k) {
        m.add_state();
    }
    m.set_initial(0);
    m.add_transition(0, 'a', 1);
    m.add_transition(0, 'a', 2);
    m.set_final(1, 0);
    m.set_final(2, 0);
    Pfsm p;
    p.add("two", m);
    CHECK(run_collect(p, "a").size() == 1);
    EngineOptions raw;
    raw.dedupe = false;
    CHECK(run_collect(p, "a", raw).size() == 2);
}

TEST_CASE("stats follow the run") {
    const auto p = testing::example_pfsm();
    const auto stats = run(p, testing::kExampleInput, [](const Match&) {});
    CHECK(stats.n == 7);
    CHECK(stats.r == 3);
    CHECK(stats.m_max == 4);
    CHECK(stats.s == 256);
    CHECK(stats.matches == 10);
    REQUIRE(stats.active_pairs.size() == 7);
    // Cycle 0 peaks after the start region closes: q0 plus one entry per pattern.
    CHECK(stats.active_pairs[0] == 4);
    for (std::size_t i = 0; i < stats.active_pairs.size(); ++i) {
        CHECK(stats.active_pairs[i] <= 3 * (i + 1) + 1);
    }
}

TEST_CASE("feeding in pieces equals one run") {
    const auto p = shared(testing::compile_all(testing::kExamplePatterns, Form::nfa));
    std::vector<Match> whole = run_collect(*p, "aacacabaacac");
    Engine engine(p);
    std::vector<Match> pieces;
    const auto sink = [&](const Match& m) { pieces.push_back(m); };
    for (const std::string_view chunk : {"aa", "", "cac", "a", "baacac"}) {
        engine.feed(chunk, sink);
    }
    CHECK(pieces == whole);
    CHECK(engine.position() == 12);
}

TEST_CASE("snapshot and restore continue a run") {
    const auto p = shared(testing::compile_mixed(testing::kExamplePatterns));
    const std::string_view input = "aacacab";
    const auto whole = run_collect(*p, input);
    for (std::size_t cut = 0; cut <= input.size(); ++cut) {
        Engine first(p);
        std::vector<Match> got;
        const auto sink = [&](const Match& m) { got.push_back(m); };
        first.feed(input.substr(0, cut), sink);
        const auto snap = active_set_from_wire(to_wire(first.snapshot()));
        Engine second(p);
        second.restore(snap, cut);
        second.feed(input.substr(cut), sink);
        CHECK(got == whole);
    }
}

TEST_CASE("restore rejects foreign or malformed active sets") {
    auto base = testing::example_pfsm();
    const auto p = shared(base);
    Engine engine(p);
    ActiveSet wrong_gen{5, {{1, {0}}}};
    CHECK_THROWS_AS(engine.restore(wrong_gen, 1), GenerationMismatch);
    CHECK_THROWS_AS(engine.restore(ActiveSet{0, {{99, {0}}}}, 1), Error);
    CHECK_THROWS_AS(engine.restore(ActiveSet{0, {{1, {1, 0}}}}, 2), Error);
    CHECK_THROWS_AS(engine.restore(ActiveSet{0, {{1, {}}}}, 2), Error);
    CHECK_THROWS_AS(engine.restore(ActiveSet{0, {{1, {3}}}}, 2), Error);
    CHECK_NOTHROW(engine.restore(ActiveSet{0, {{1, {0, 1}}}}, 2));

    base.remove("ac");
    Engine later(shared(base));
    CHECK_THROWS_AS(later.restore(ActiveSet{base.generation(), {{4, {0}}}}, 1), Error);
}

TEST_CASE("rebind drops removed patterns and picks up new ones") {
    auto gen0 = testing::example_pfsm();
    Engine engine(shared(gen0));
    std::vector<Match> got;
    const auto sink = [&](const Match& m) { got.push_back(m); };
    engine.feed("aca", sink);  // a(ca)*b is mid-match
    auto gen1 = gen0;
    gen1.remove("a*c");
    gen1.add("b", compile_pattern("", "b", Form::dfa).machine);
    engine.rebind(shared(gen1));
    engine.feed("b", sink);
    // After the rebind: "a(ca)*b" (now label 1) completes from starts 0 and 2, "b" (label 2) at 3.
    const std::vector<Match> tail(got.end() - 3, got.end());
    CHECK(tail == std::vector<Match>{make_match(1, 0, 3), make_match(1, 2, 3), make_match(2, 3, 3)});
    CHECK_THROWS_AS(engine.rebind(shared(gen0)), GenerationMismatch);
}

TEST_CASE("reinitialisation window and early stop") {
    const auto p = testing::example_pfsm();
    std::vector<Match> got;
    const auto result = run_segment(p, "aacacab", 0, {0, 2}, {}, [&](const Match& m) { got.push_back(m); });
    // Only starts 0 and 1 are tried; the run continues until they drain.
    for (const auto& m : got) {
        CHECK(m.start < 2);
    }
    CHECK(sorted(got) == std::vector<Match>{make_match(0, 0, 2), make_match(0, 1, 2), make_match(1, 1, 2),
                                            make_match(2, 1, 6)});
    CHECK(result.carry_out.empty());

    std::vector<Match> none;
    const auto drained = run_segment(p, "bbbbbbbb", 0, {0, 1}, {}, [&](const Match& m) { none.push_back(m); });
    CHECK(none.empty());
    CHECK(drained.stats.n == 1);

    CHECK_THROWS_AS(run_segment(p, "ab", 5, {0, 1}, {}, [](const Match&) {}), Error);
}

TEST_CASE("a segment carries its frontier forward") {
    const auto p = testing::example_pfsm();
    const std::string_view input = "aacacab";
    std::vector<Match> got;
    const auto sink = [&](const Match& m) { got.push_back(m); };
    const auto first = run_segment(p, input.substr(0, 4), 0, {0, 4}, {}, sink);
    CHECK_FALSE(first.carry_out.empty());
    run_segment(p, input.substr(4), 4, {4, 7}, first.carry_out, sink);
    CHECK(sorted(got) == testing::example_matches());
}

TEST_CASE("active set wire format") {
    const ActiveSet a{7, {{1, {0, 3, 9}}, {4, {2}}}};
    const auto text = to_wire(a);
    CHECK(text == "PFSM-ACTIVE v1\ngen 7\nactive 1 0,3,9\nactive 4 2\n");
    CHECK(active_set_from_wire(text) == a);
    CHECK(a.pair_count() == 4);
    CHECK(active_set_from_wire("PFSM-ACTIVE v1\ngen 0\n").empty());
    CHECK_THROWS_AS(active_set_from_wire("PFSM-ACTIVE v2\ngen 0\n"), FormatError);
    CHECK_THROWS_AS(active_set_from_wire("PFSM-ACTIVE v1\n"), FormatError);
    CHECK_THROWS_AS(active_set_from_wire("PFSM-ACTIVE v1\ngen 0\nactive 1 3,2\n"), FormatError);
    CHECK_THROWS_AS(active_set_from_wire("PFSM-ACTIVE v1\ngen 0\nactive 4 1\nactive 1 1\n"), FormatError);
    CHECK_THROWS_AS(active_set_from_wire("PFSM-ACTIVE v1\ngen x\n"), FormatError);
}

TEST_CASE("match formatting") {
    const auto p = testing::example_pfsm();
    const auto m = make_match(2, 1, 6);
    CHECK(format_tsv(m, p.labels(), testing::kExampleInput) == "a(ca)*b\t1\t6\tacacab");
    CHECK(format_jsonl(m, p.labels(), testing::kExampleInput) ==
          R"({"label":"a(ca)*b","start":1,"end":6,"match":"acacab"})");

    LabelRegistry labels;
    labels.add("hi");
    const std::string bad = "\xff\xfe";
    const auto json = format_jsonl(make_match(0, 0, 1), labels, bad);
    CHECK(json.find("\"match\":\"\xEF\xBF\xBD") != std::string::npos);
}

TEST_CASE("byte values above 0x7f and NUL are matched") {
    const auto p = testing::compile_all({"\\x00\\xff", "[\\x80-\\xff]+"}, Form::automatic);
    const std::string input("a\0\xff\x80", 4);
    const auto out = sorted(run_collect(p, input));
    CHECK(out == oracle_for({"\\x00\\xff", "[\\x80-\\xff]+"}, input));
    CHECK(std::find(out.begin(), out.end(), make_match(0, 1, 2)) != out.end());
}

TEST_CASE("engine agrees with the oracle on random instances") {
    testing::Rng rng(2024);
    for (int k = 0; k < 150; ++k) {
        const auto inst = testing::random_instance(rng);
        CAPTURE(inst.patterns);
        CAPTURE(inst.input);
        const auto expected = oracle::all_matches(inst.asts, inst.input);
        for (const auto form : {Form::nfa, Form::dfa}) {
            REQUIRE(sorted(run_collect(testing::compile_all(inst.patterns, form), inst.input)) == expected);
        }
    }
}
