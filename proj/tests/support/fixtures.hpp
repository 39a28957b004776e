#pragma once

// Shared test fixtures: the three-pattern example machine, its expected
// matches on "aacacab", and random instance generators.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pfsm/engine.hpp"
#include "pfsm/pfsm.hpp"
#include "pfsm/regex.hpp"

namespace pfsm::testing {

using Rng = std::mt19937_64;

inline const std::vector<std::string> kExamplePatterns = {"a*c", "ac", "a(ca)*b"};
inline constexpr std::string_view kExampleInput = "aacacab";

/// Expected matches of the example patterns on "aacacab" (label ids follow
/// kExamplePatterns), in (end, start, label) order.
inline std::vector<Match> example_matches() {
    std::vector<Match> m = {
        make_match(0, 0, 2), make_match(0, 1, 2), make_match(1, 1, 2), make_match(0, 2, 2),
        make_match(0, 3, 4), make_match(1, 3, 4), make_match(0, 4, 4),
        make_match(2, 1, 6), make_match(2, 3, 6), make_match(2, 5, 6),
    };
    std::sort(m.begin(), m.end());
    return m;
}

/// Hand-drawn minimal DFAs of the example patterns. In the union built from
/// them the state ids are:
///   0 start | a*c: 1 (a->1, c->2), 2 final | ac: 3 -a-> 4 -c-> 5 final |
///   a(ca)*b: 6 -a-> 7, 7 -c-> 8, 8 -a-> 7, 7 -b-> 9 final
inline std::vector<NamedAutomaton> example_dfas() {
    Automaton a_star_c;
    {
        const auto s = a_star_c.add_state();
        const auto f = a_star_c.add_state();
        a_star_c.set_initial(s);
        a_star_c.add_transition(s, 'a', s);
        a_star_c.add_transition(s, 'c', f);
        a_star_c.set_final(f, 0);
    }
    Automaton ac;
    {
        const auto s = ac.add_state();
        const auto m = ac.add_state();
        const auto f = ac.add_state();
        ac.set_initial(s);
        ac.add_transition(s, 'a', m);
        ac.add_transition(m, 'c', f);
        ac.set_final(f, 0);
    }
    Automaton a_ca_b;
    {
        const auto s = a_ca_b.add_state();
        const auto x = a_ca_b.add_state();
        const auto y = a_ca_b.add_state();
        const auto f = a_ca_b.add_state();
        a_ca_b.set_initial(s);
        a_ca_b.add_transition(s, 'a', x);
        a_ca_b.add_transition(x, 'c', y);
        a_ca_b.add_transition(y, 'a', x);
        a_ca_b.add_transition(x, 'b', f);
        a_ca_b.set_final(f, 0);
    }
    return {{"a*c", a_star_c}, {"ac", ac}, {"a(ca)*b", a_ca_b}};
}

inline Pfsm example_pfsm() { return Pfsm::build(example_dfas()); }

inline Pfsm compile_all(const std::vector<std::string>& patterns, Form form) {
    Pfsm p;
    for (const auto& text : patterns) {
        auto c = compile_pattern(text, text, form);
        p.add(c.label, c.machine);
    }
    return p;
}

/// Mixed: even-indexed patterns as DFAs, odd-indexed as NFAs.
inline Pfsm compile_mixed(const std::vector<std::string>& patterns) {
    Pfsm p;
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        auto c = compile_pattern(patterns[k], patterns[k], k % 2 == 0 ? Form::dfa : Form::nfa);
        p.add(c.label, c.machine);
    }
    return p;
}

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random tree of depth <= max_depth over the bytes of `alphabet`, using
/// literals, classes, concatenation, alternation and the three quantifiers.
inline RegexAst random_ast(Rng& rng, std::string_view alphabet, int max_depth) {
    const bool leaf = max_depth <= 1 || uniform(rng, 0, 9) < 3;
    if (leaf) {
        if (uniform(rng, 0, 3) == 0 && alphabet.size() > 1) {
            ByteClass bytes;
            while (bytes.none()) {
                for (const char c : alphabet) {
                    if (uniform(rng, 0, 1)) {
                        bytes.set(static_cast<std::uint8_t>(c));
                    }
                }
            }
            return RegexAst::byte_class(bytes);
        }
        return RegexAst::literal(static_cast<std::uint8_t>(alphabet[uniform(rng, 0, alphabet.size() - 1)]));
    }
    switch (uniform(rng, 0, 4)) {
        case 0:
        case 1: {
            std::vector<RegexAst> children;
            const auto n = uniform(rng, 2, 3);
            for (std::size_t k = 0; k < n; ++k) {
                children.push_back(random_ast(rng, alphabet, max_depth - 1));
            }
            return RegexAst::concat(std::move(children));
        }
        case 2: {
            std::vector<RegexAst> children;
            const auto n = uniform(rng, 2, 3);
            for (std::size_t k = 0; k < n; ++k) {
                children.push_back(random_ast(rng, alphabet, max_depth - 1));
            }
            return RegexAst::alternation(std::move(children));
        }
        default: {
            auto child = random_ast(rng, alphabet, max_depth - 1);
            switch (uniform(rng, 0, 2)) {
                case 0: return RegexAst::star(std::move(child));
                case 1: return RegexAst::plus(std::move(child));
                default: return RegexAst::optional(std::move(child));
            }
        }
    }
}

inline std::string random_string(Rng& rng, std::string_view alphabet, std::size_t max_len) {
    std::string s(uniform(rng, 0, max_len), '\0');
    for (auto& c : s) {
        c = alphabet[uniform(rng, 0, alphabet.size() - 1)];
    }
    return s;
}

inline std::string random_alphabet(Rng& rng, std::size_t max_size) {
    const std::string all = "abcd";
    return all.substr(0, uniform(rng, 1, std::min(max_size, all.size())));
}

/// Every string over `alphabet` of length <= max_len.
inline std::vector<std::string> all_strings(std::string_view alphabet, std::size_t max_len) {
    std::vector<std::string> out{""};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        const auto end = out.size();
        for (auto i = begin; i < end; ++i) {
            for (const char c : alphabet) {
                out.push_back(out[i] + c);
            }
        }
        begin = end;
    }
    return out;
}

/// Membership by direct NFA simulation (closure + step), independent of the engine.
inline bool nfa_accepts(const Automaton& a, std::string_view s) {
    const StateId seed[] = {a.initial()};
    auto current = epsilon_closure(a, seed);
    for (const char c : s) {
        current = epsilon_closure(a, step(a, current, static_cast<std::uint8_t>(c)));
    }
    for (const auto q : current) {
        if (a.is_final(q)) {
            return true;
        }
    }
    return false;
}

struct Instance {
    std::string alphabet;
    std::vector<RegexAst> asts;
    std::vector<std::string> patterns;  ///< printed back from `asts`
    std::string input;
};

inline Instance random_instance(Rng& rng, std::size_t max_patterns = 4, int max_depth = 5,
                                std::size_t max_input = 64) {
    Instance inst;
    inst.alphabet = random_alphabet(rng, 4);
    const auto r = uniform(rng, 1, max_patterns);
    for (std::size_t k = 0; k < r; ++k) {
        auto ast = random_ast(rng, inst.alphabet, max_depth);
        auto text = to_pattern(ast);
        // Labels must be distinct; the same text twice is rare but possible.
        while (std::find(inst.patterns.begin(), inst.patterns.end(), text) != inst.patterns.end()) {
            text = "(" + text + ")";
        }
        inst.patterns.push_back(std::move(text));
        inst.asts.push_back(std::move(ast));
    }
    inst.input = random_string(rng, inst.alphabet, max_input);
    return inst;
}

}  // namespace pfsm::testing
