#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "pfsm/engine.hpp"
#include "pfsm/regex.hpp"

/// Brute-force reference matchers. Nothing here touches the automaton
/// code: both methods read the syntax tree directly, so they can judge the
/// compiler, the engine and the partitioned runners independently.
namespace pfsm::oracle {

/// Memoised recursive interpretation of the tree over spans of `s`.
bool accepts(const RegexAst& ast, std::string_view s);

/// Position-set (Glushkov) simulation; a second, unrelated method.
bool accepts_positions(const RegexAst& ast, std::string_view s);

/// Every (label, start, end) with label = index into `patterns` and
/// input[start..end] in the pattern's language, sorted. Quadratic in the
/// input length per pattern.
std::vector<Match> all_matches(std::span<const RegexAst> patterns, std::string_view input);

/// Same contract as all_matches(), computed by position-set simulation.
std::vector<Match> all_matches_positions(std::span<const RegexAst> patterns, std::string_view input);

}  // namespace pfsm::oracle
