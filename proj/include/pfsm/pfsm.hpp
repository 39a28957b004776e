#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pfsm/automaton.hpp"

namespace pfsm {

enum class EngineForm : std::uint8_t { deterministic, nondeterministic };

/// Directory entry of one registered pattern.
struct PatternEntry {
    StateSet states;  ///< owned state ids, sorted
    StateId entry = kNoState;
    EngineForm form = EngineForm::nondeterministic;
};

struct NamedAutomaton {
    std::string label;
    Automaton machine;
};

/// Union machine of labelled per-pattern automata.
///
/// State 0 is the ancillary start state; its only out-edges are epsilon
/// edges to each pattern's entry state. Pattern states are appended and
/// never renumbered, and removal tombstones them, so an ActiveSet taken
/// against one generation stays meaningful in the next.
class Pfsm {
public:
    Pfsm();

    static Pfsm build(std::span<const NamedAutomaton> patterns);

    const Automaton& automaton() const noexcept { return automaton_; }
    const LabelRegistry& labels() const noexcept { return labels_; }
    std::uint64_t generation() const noexcept { return generation_; }
    StateId start() const noexcept { return 0; }

    std::size_t pattern_count() const noexcept { return directory_.size(); }
    const PatternEntry& pattern(LabelId label) const { return directory_.at(label); }
    std::span<const PatternEntry> directory() const noexcept { return directory_; }

    /// False for states removed together with their pattern.
    bool is_live(StateId state) const { return state < live_.size() && live_[state]; }
    std::size_t live_state_count() const noexcept { return live_count_; }
    /// Largest owned-state count over all patterns (0 when empty).
    std::size_t max_pattern_states() const;

    /// Standalone copy of one pattern's machine; finals carry label 0.
    Automaton extract(LabelId label) const;

    /// Registers `machine` under `label`. Only states reachable from the
    /// machine's initial state are copied. Throws on a duplicate label.
    void add(std::string label, const Automaton& machine);
    /// Throws pfsm::Error for an unknown label.
    void remove(std::string_view label);

private:
    friend Pfsm load_pfsm(std::string_view text);

    Automaton automaton_;
    LabelRegistry labels_;
    std::vector<PatternEntry> directory_;  // indexed by label id
    std::vector<bool> live_;
    std::size_t live_count_ = 1;
    std::uint64_t generation_ = 0;
};

Pfsm build_pfsm(std::span<const NamedAutomaton> patterns);
Pfsm add_pattern(Pfsm pfsm, std::string label, const Automaton& machine);
Pfsm remove_pattern(Pfsm pfsm, std::string_view label);

/// Checks the automaton invariants plus the union structure: start state
/// shape, ownership partition, and final labels matching their owner.
ValidationReport validate(const Pfsm& pfsm);

/// `PFSM-AUT v1` dump with `pattern` directory lines. Tombstoned states are
/// compacted away, so dump(load(dump(p))) == dump(p).
std::string dump_pfsm(const Pfsm& pfsm);

/// Loads a whole-PFSM dump, or a plain automaton file (treated as a single
/// pattern named by its final label).
Pfsm load_pfsm(std::string_view text);

/// Publishes PFSM generations to concurrent readers. One writer at a time;
/// readers take a snapshot and keep it for as long as they need.
class LivePfsm {
public:
    explicit LivePfsm(Pfsm initial = Pfsm{});

    std::shared_ptr<const Pfsm> current() const;

    std::shared_ptr<const Pfsm> add_pattern(std::string label, const Automaton& machine);
    std::shared_ptr<const Pfsm> remove_pattern(std::string_view label);

private:
    std::shared_ptr<const Pfsm> publish(Pfsm next);

    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const Pfsm> current_;
};

}  // namespace pfsm
