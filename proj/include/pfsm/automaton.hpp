#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pfsm {

using StateId = std::uint32_t;
using LabelId = std::uint32_t;

inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();

/// Sorted, duplicate-free list of state ids.
using StateSet = std::vector<StateId>;

struct Transition {
    std::uint8_t byte;
    StateId target;

    auto operator<=>(const Transition&) const = default;
};

/// Bijection between dense label ids and label texts.
class LabelRegistry {
public:
    /// Registers a new label. Throws pfsm::Error if the text is already present.
    LabelId add(std::string text);

    std::optional<LabelId> find(std::string_view text) const;
    const std::string& text(LabelId id) const { return texts_.at(id); }
    std::size_t size() const noexcept { return texts_.size(); }
    std::span<const std::string> texts() const noexcept { return texts_; }

    /// Removes `id`; every id above it shifts down by one so ids stay dense.
    void erase(LabelId id);

    bool operator==(const LabelRegistry& other) const { return texts_ == other.texts_; }

private:
    std::vector<std::string> texts_;
    std::unordered_map<std::string, LabelId> ids_;
};

/// Finite state machine over the byte alphabet. One representation serves
/// NFAs, DFAs and the PFSM union; `is_deterministic()` is derived from the
/// tables and kept exact by every mutator.
///
/// Transition targets are not range-checked on insertion so that externally
/// produced machines can be loaded and then diagnosed with `validate()`.
class Automaton {
public:
    StateId add_state();
    std::size_t size() const noexcept { return states_.size(); }

    StateId initial() const noexcept { return initial_; }
    void set_initial(StateId state);

    void add_transition(StateId from, std::uint8_t byte, StateId to);
    void add_epsilon(StateId from, StateId to);
    void remove_epsilon(StateId from, StateId to);

    void set_final(StateId state, LabelId label);
    /// Marks a state final without a label. Only useful to construct machines
    /// that `validate()` must reject.
    void set_final_unlabeled(StateId state);
    void clear_final(StateId state);

    /// Drops every outgoing edge and the final mark of each listed state.
    void clear_states(std::span<const StateId> states);

    /// Rewrites every label through `map` (indexed by old label id).
    void relabel(std::span<const LabelId> map);

    bool is_final(StateId state) const { return states_.at(state).final; }
    std::optional<LabelId> label(StateId state) const { return states_.at(state).label; }
    StateSet finals() const;

    std::span<const Transition> transitions(StateId state) const {
        return states_.at(state).transitions;
    }
    /// Transitions of `state` on `byte`, in target order.
    std::span<const Transition> transitions(StateId state, std::uint8_t byte) const;
    std::span<const StateId> epsilons(StateId state) const { return states_.at(state).epsilons; }

    bool is_deterministic() const noexcept { return deterministic_; }

    /// Recomputes the determinism flag from the tables.
    bool scan_deterministic() const;

    bool operator==(const Automaton& other) const = default;

private:
    struct State {
        std::vector<Transition> transitions;  // sorted by (byte, target)
        std::vector<StateId> epsilons;        // sorted
        bool final = false;
        std::optional<LabelId> label;

        bool operator==(const State&) const = default;
    };

    State& at(StateId state);

    std::vector<State> states_;
    StateId initial_ = kNoState;
    bool deterministic_ = true;
};

/// Least superset of `seeds` closed under epsilon transitions.
StateSet epsilon_closure(const Automaton& automaton, std::span<const StateId> seeds);

/// Union of the byte successors of `sources`. No epsilon closure is applied.
StateSet step(const Automaton& automaton, std::span<const StateId> sources, std::uint8_t byte);

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const Automaton& automaton);

/// `pattern <label> <entry>` directory line of a whole-PFSM dump.
struct PatternLine {
    std::string label;
    StateId entry;
};

/// Parsed `PFSM-AUT v1` file.
struct AutomatonFile {
    Automaton automaton;
    LabelRegistry labels;
    std::vector<PatternLine> patterns;
};

/// Writes the `PFSM-AUT v1` text form. Labels missing from `labels` are
/// written as their decimal id.
std::string dump_automaton(const Automaton& automaton, const LabelRegistry& labels,
                           std::span<const PatternLine> patterns = {});

/// Parses a `PFSM-AUT v1` file and validates the machine.
/// Throws FormatError on malformed input or a failed validation.
AutomatonFile load_automaton(std::string_view text);

}  // namespace pfsm
