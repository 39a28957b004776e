#include "pfsm/automaton.hpp"

#include <algorithm>
#include <iterator>

#include "pfsm/error.hpp"

namespace pfsm {

LabelId LabelRegistry::add(std::string text) {
    if (ids_.contains(text)) {
        throw Error("duplicate label '" + text + "'");
    }
    const auto id = static_cast<LabelId>(texts_.size());
    ids_.emplace(text, id);
    texts_.push_back(std::move(text));
    return id;
}

std::optional<LabelId> LabelRegistry::find(std::string_view text) const {
    const auto it = ids_.find(std::string(text));
    if (it == ids_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void LabelRegistry::erase(LabelId id) {
    ids_.erase(texts_.at(id));
    texts_.erase(texts_.begin() + id);
    for (auto& [text, label] : ids_) {
        if (label > id) {
            --label;
        }
    }
}

StateId Automaton::add_state() {
    states_.emplace_back();
    return static_cast<StateId>(states_.size() - 1);
}

Automaton::State& Automaton::at(StateId state) {
    if (state >= states_.size()) {
        throw Error("state " + std::to_string(state) + " does not exist");
    }
    return states_[state];
}

void Automaton::set_initial(StateId state) {
    at(state);
    initial_ = state;
}

void Automaton::add_transition(StateId from, std::uint8_t byte, StateId to) {
    auto& list = at(from).transitions;
    const Transition t{byte, to};
    if (list.empty() || list.back() < t) {
        if (!list.empty() && list.back().byte == byte) {
            deterministic_ = false;
        }
        list.push_back(t);
        return;
    }
    const auto pos = std::lower_bound(list.begin(), list.end(), t);
    if (pos != list.end() && *pos == t) {
        return;
    }
    if ((pos != list.end() && pos->byte == byte) || (pos != list.begin() && std::prev(pos)->byte == byte)) {
        deterministic_ = false;
    }
    list.insert(pos, t);
}

void Automaton::add_epsilon(StateId from, StateId to) {
    auto& list = at(from).epsilons;
    const auto pos = std::lower_bound(list.begin(), list.end(), to);
    if (pos != list.end() && *pos == to) {
        return;
    }
    list.insert(pos, to);
    deterministic_ = false;
}

void Automaton::remove_epsilon(StateId from, StateId to) {
    auto& list = at(from).epsilons;
    const auto pos = std::lower_bound(list.begin(), list.end(), to);
    if (pos != list.end() && *pos == to) {
        list.erase(pos);
        deterministic_ = scan_deterministic();
    }
}

void Automaton::set_final(StateId state, LabelId label) {
    auto& s = at(state);
    s.final = true;
    s.label = label;
}

void Automaton::set_final_unlabeled(StateId state) {
    auto& s = at(state);
    s.final = true;
    s.label.reset();
}

void Automaton::clear_final(StateId state) {
    auto& s = at(state);
    s.final = false;
    s.label.reset();
}

void Automaton::clear_states(std::span<const StateId> states) {
    for (const auto id : states) {
        auto& s = at(id);
        s = State{};
    }
    deterministic_ = scan_deterministic();
}

void Automaton::relabel(std::span<const LabelId> map) {
    for (auto& s : states_) {
        if (s.label) {
            s.label = map[*s.label];
        }
    }
}

StateSet Automaton::finals() const {
    StateSet out;
    for (StateId id = 0; id < states_.size(); ++id) {
        if (states_[id].final) {
            out.push_back(id);
        }
    }
    return out;
}

std::span<const Transition> Automaton::transitions(StateId state, std::uint8_t byte) const {
    const auto& list = states_.at(state).transitions;
    const auto lo = std::lower_bound(list.begin(), list.end(), Transition{byte, 0});
    auto hi = lo;
    while (hi != list.end() && hi->byte == byte) {
        ++hi;
    }
    return {lo, hi};
}

bool Automaton::scan_deterministic() const {
    for (const auto& s : states_) {
        if (!s.epsilons.empty()) {
            return false;
        }
        for (std::size_t i = 1; i < s.transitions.size(); ++i) {
            if (s.transitions[i].byte == s.transitions[i - 1].byte) {
                return false;
            }
        }
    }
    return true;
}

StateSet epsilon_closure(const Automaton& automaton, std::span<const StateId> seeds) {
    std::vector<bool> seen(automaton.size(), false);
    StateSet out;
    std::vector<StateId> stack;
    for (const auto s : seeds) {
        if (s < automaton.size() && !seen[s]) {
            seen[s] = true;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        out.push_back(s);
        for (const auto t : automaton.epsilons(s)) {
            if (t < automaton.size() && !seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

StateSet step(const Automaton& automaton, std::span<const StateId> sources, std::uint8_t byte) {
    StateSet out;
    for (const auto s : sources) {
        for (const auto& t : automaton.transitions(s, byte)) {
            out.push_back(t.target);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ValidationReport validate(const Automaton& automaton) {
    ValidationReport report;
    const auto n = automaton.size();
    auto dangling = [&](StateId from, StateId to, const char* kind) {
        report.violations.push_back("dangling endpoint: " + std::string(kind) + " " +
                                    std::to_string(from) + " -> " + std::to_string(to));
    };
    if (automaton.initial() == kNoState || automaton.initial() >= n) {
        report.violations.push_back("missing initial state");
    }
    for (StateId s = 0; s < n; ++s) {
        for (const auto& t : automaton.transitions(s)) {
            if (t.target >= n) {
                dangling(s, t.target, "trans");
            }
        }
        for (const auto t : automaton.epsilons(s)) {
            if (t >= n) {
                dangling(s, t, "eps");
            }
        }
        if (automaton.is_final(s) && !automaton.label(s)) {
            report.violations.push_back("unlabeled final: state " + std::to_string(s));
        }
        if (!automaton.is_final(s) && automaton.label(s)) {
            report.violations.push_back("label on non-final state " + std::to_string(s));
        }
    }
    if (automaton.is_deterministic() != automaton.scan_deterministic()) {
        report.violations.push_back("stale determinism flag");
    }
    return report;
}

}  // namespace pfsm
