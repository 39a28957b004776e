#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pfsm/automaton.hpp"

namespace pfsm {

using ByteClass = std::bitset<256>;

/// Syntax tree of one pattern.
///
/// Invariants: byte classes are non-empty; star/plus/optional have exactly
/// one child; concat/alternation have at least two. The factory functions
/// below keep them.
struct RegexAst {
    enum class Kind : std::uint8_t {
        empty,
        literal,
        byte_class,
        concat,
        alternation,
        star,
        plus,
        optional,
    };

    Kind kind = Kind::empty;
    std::uint8_t byte = 0;
    ByteClass bytes;
    std::vector<RegexAst> children;

    static RegexAst empty() { return {}; }
    static RegexAst literal(std::uint8_t b);
    static RegexAst byte_class(const ByteClass& bytes);
    /// Collapses to the single child, or `empty()` when there is none.
    static RegexAst concat(std::vector<RegexAst> children);
    static RegexAst alternation(std::vector<RegexAst> children);
    static RegexAst star(RegexAst child);
    static RegexAst plus(RegexAst child);
    static RegexAst optional(RegexAst child);

    bool operator==(const RegexAst&) const = default;
};

/// Supported grammar: literals, `.`, escapes (`\` + metacharacter, `\n`,
/// `\t`, `\r`, `\f`, `\v`, `\0`, `\xHH`), byte classes `[...]` / `[^...]`
/// with ranges, grouping, `|`, and the `*` `+` `?` quantifiers.
RegexAst parse_regex(std::string_view pattern);

/// Prints `ast` back as pattern text; `parse_regex(to_pattern(a))` has the
/// same language as `a`.
std::string to_pattern(const RegexAst& ast);

/// True iff the empty string is in the language of `ast`.
bool is_nullable(const RegexAst& ast);

/// Lists violated structural invariants, if any.
std::vector<std::string> check_ast(const RegexAst& ast);

/// Thompson construction. The result has exactly one initial and one final
/// state (labelled `label`), and the final state has no outgoing edges.
Automaton compile_nfa(const RegexAst& ast, LabelId label = 0);

inline constexpr std::size_t kDefaultStateCeiling = 10'000;

/// Subset construction. An already deterministic input is returned as is.
/// Throws StateCeilingExceeded past `ceiling` states, and pfsm::Error when
/// one subset would need two different final labels.
Automaton nfa_to_dfa(const Automaton& nfa, std::size_t ceiling = kDefaultStateCeiling);

/// Per-pattern engine form.
enum class Form : std::uint8_t {
    nfa,
    dfa,
    automatic,  ///< DFA unless the state ceiling trips, then NFA
};

struct CompiledPattern {
    std::string label;
    Automaton machine;
    bool nullable = false;
};

CompiledPattern compile_pattern(std::string label, std::string_view pattern, Form form = Form::automatic,
                                std::size_t ceiling = kDefaultStateCeiling);

/// One entry of a pattern file.
struct PatternSpec {
    std::string label;
    std::string pattern;
    std::size_t line = 0;
};

/// Parses a pattern file: one pattern per line, `#` comments, blank lines
/// ignored, optional `label<TAB>pattern` form.
std::vector<PatternSpec> parse_pattern_file(std::string_view contents);

}  // namespace pfsm
