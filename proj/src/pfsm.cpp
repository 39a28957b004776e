#include "pfsm/pfsm.hpp"

#include <algorithm>
#include <map>

#include "pfsm/error.hpp"

namespace pfsm {

namespace {

// States reachable from `from` over byte and epsilon edges, sorted.
StateSet reachable(const Automaton& a, StateId from) {
    std::vector<bool> seen(a.size(), false);
    std::vector<StateId> stack{from};
    seen[from] = true;
    StateSet out;
    while (!stack.empty()) {
        const auto s = stack.back();
        stack.pop_back();
        out.push_back(s);
        auto visit = [&](StateId t) {
            if (t < a.size() && !seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
        };
        for (const auto& t : a.transitions(s)) {
            visit(t.target);
        }
        for (const auto t : a.epsilons(s)) {
            visit(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

EngineForm form_of(const Automaton& a, std::span<const StateId> states) {
    for (const auto s : states) {
        if (!a.epsilons(s).empty()) {
            return EngineForm::nondeterministic;
        }
        const auto ts = a.transitions(s);
        for (std::size_t i = 1; i < ts.size(); ++i) {
            if (ts[i].byte == ts[i - 1].byte) {
                return EngineForm::nondeterministic;
            }
        }
    }
    return EngineForm::deterministic;
}

}  // namespace

Pfsm::Pfsm() {
    automaton_.set_initial(automaton_.add_state());
    live_.push_back(true);
}

Pfsm Pfsm::build(std::span<const NamedAutomaton> patterns) {
    Pfsm p;
    for (const auto& [label, machine] : patterns) {
        p.add(label, machine);
    }
    p.generation_ = 0;
    return p;
}

std::size_t Pfsm::max_pattern_states() const {
    std::size_t m = 0;
    for (const auto& e : directory_) {
        m = std::max(m, e.states.size());
    }
    return m;
}

Automaton Pfsm::extract(LabelId label) const {
    const auto& entry = directory_.at(label);
    std::map<StateId, StateId> local;
    Automaton out;
    for (const auto s : entry.states) {
        local.emplace(s, out.add_state());
    }
    for (const auto s : entry.states) {
        const auto from = local.at(s);
        for (const auto& t : automaton_.transitions(s)) {
            out.add_transition(from, t.byte, local.at(t.target));
        }
        for (const auto t : automaton_.epsilons(s)) {
            out.add_epsilon(from, local.at(t));
        }
        if (automaton_.is_final(s)) {
            out.set_final(from, 0);
        }
    }
    out.set_initial(local.at(entry.entry));
    return out;
}

void Pfsm::add(std::string label, const Automaton& machine) {
    if (labels_.find(label)) {
        throw Error("duplicate label '" + label + "'");
    }
    if (machine.initial() == kNoState || machine.initial() >= machine.size()) {
        throw Error("pattern '" + label + "' has no single initial state");
    }
    const auto kept = reachable(machine, machine.initial());
    for (const auto s : kept) {
        for (const auto& t : machine.transitions(s)) {
            if (t.target >= machine.size()) {
                throw Error("pattern '" + label + "' has a dangling transition");
            }
        }
    }

    const auto id = labels_.add(std::move(label));
    const auto base = static_cast<StateId>(automaton_.size());
    std::vector<StateId> local(machine.size(), kNoState);
    PatternEntry entry;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        local[kept[i]] = base + static_cast<StateId>(i);
        entry.states.push_back(automaton_.add_state());
        live_.push_back(true);
    }
    for (const auto s : kept) {
        for (const auto& t : machine.transitions(s)) {
            automaton_.add_transition(local[s], t.byte, local[t.target]);
        }
        for (const auto t : machine.epsilons(s)) {
            automaton_.add_epsilon(local[s], local[t]);
        }
        if (machine.is_final(s)) {
            automaton_.set_final(local[s], id);
        }
    }
    entry.entry = local[machine.initial()];
    entry.form = form_of(automaton_, entry.states);
    automaton_.add_epsilon(start(), entry.entry);
    live_count_ += kept.size();
    directory_.push_back(std::move(entry));
    ++generation_;
}

void Pfsm::remove(std::string_view label) {
    const auto id = labels_.find(label);
    if (!id) {
        throw Error("unknown label '" + std::string(label) + "'");
    }
    auto& entry = directory_[*id];
    automaton_.remove_epsilon(start(), entry.entry);
    automaton_.clear_states(entry.states);
    for (const auto s : entry.states) {
        live_[s] = false;
    }
    live_count_ -= entry.states.size();
    directory_.erase(directory_.begin() + *id);

    std::vector<LabelId> shift(labels_.size());
    for (LabelId l = 0; l < shift.size(); ++l) {
        shift[l] = l > *id ? l - 1 : l;
    }
    labels_.erase(*id);
    automaton_.relabel(shift);
    ++generation_;
}

Pfsm build_pfsm(std::span<const NamedAutomaton> patterns) { return Pfsm::build(patterns); }

Pfsm add_pattern(Pfsm pfsm, std::string label, const Automaton& machine) {
    pfsm.add(std::move(label), machine);
    return pfsm;
}

Pfsm remove_pattern(Pfsm pfsm, std::string_view label) {
    pfsm.remove(label);
    return pfsm;
}

ValidationReport validate(const Pfsm& pfsm) {
    auto report = validate(pfsm.automaton());
    auto& v = report.violations;
    const auto& a = pfsm.automaton();

    if (a.initial() != pfsm.start()) {
        v.emplace_back("initial state is not the ancillary start state");
    }
    if (!a.transitions(pfsm.start()).empty()) {
        v.emplace_back("start state has byte transitions");
    }
    if (a.is_final(pfsm.start())) {
        v.emplace_back("start state is final");
    }
    StateSet entries;
    for (const auto& e : pfsm.directory()) {
        entries.push_back(e.entry);
    }
    std::sort(entries.begin(), entries.end());
    const auto eps = a.epsilons(pfsm.start());
    if (!std::equal(eps.begin(), eps.end(), entries.begin(), entries.end())) {
        v.emplace_back("start state epsilon edges do not match the pattern entries");
    }
    if (pfsm.labels().size() != pfsm.pattern_count()) {
        v.emplace_back("label registry and pattern directory differ in size");
    }

    std::vector<std::int64_t> owner(a.size(), -1);
    for (LabelId l = 0; l < pfsm.pattern_count(); ++l) {
        const auto& e = pfsm.pattern(l);
        if (!std::binary_search(e.states.begin(), e.states.end(), e.entry)) {
            v.push_back("entry of pattern " + std::to_string(l) + " is not owned by it");
        }
        for (const auto s : e.states) {
            if (s >= a.size() || s == pfsm.start()) {
                v.push_back("pattern " + std::to_string(l) + " owns invalid state " + std::to_string(s));
                continue;
            }
            if (owner[s] != -1) {
                v.push_back("state " + std::to_string(s) + " owned twice");
            }
            owner[s] = l;
        }
    }
    for (StateId s = 1; s < a.size(); ++s) {
        if (pfsm.is_live(s) && owner[s] == -1) {
            v.push_back("live state " + std::to_string(s) + " has no owner");
        }
        if (!pfsm.is_live(s) && owner[s] != -1) {
            v.push_back("removed state " + std::to_string(s) + " still owned");
        }
        if (owner[s] == -1) {
            if (!a.transitions(s).empty() || !a.epsilons(s).empty() || a.is_final(s)) {
                v.push_back("removed state " + std::to_string(s) + " still has edges");
            }
            continue;
        }
        if (a.is_final(s) && a.label(s) != static_cast<LabelId>(owner[s])) {
            v.push_back("final state " + std::to_string(s) + " labelled for a different pattern");
        }
        auto crosses = [&](StateId t) { return t < a.size() && owner[t] != owner[s]; };
        for (const auto& t : a.transitions(s)) {
            if (crosses(t.target)) {
                v.push_back("transition from state " + std::to_string(s) + " leaves its pattern");
            }
        }
        for (const auto t : a.epsilons(s)) {
            if (crosses(t)) {
                v.push_back("epsilon from state " + std::to_string(s) + " leaves its pattern");
            }
        }
    }
    return report;
}

std::string dump_pfsm(const Pfsm& pfsm) {
    const auto& a = pfsm.automaton();
    std::vector<StateId> compact(a.size(), kNoState);
    Automaton out;
    for (StateId s = 0; s < a.size(); ++s) {
        if (pfsm.is_live(s)) {
            compact[s] = out.add_state();
        }
    }
    for (StateId s = 0; s < a.size(); ++s) {
        if (!pfsm.is_live(s)) {
            continue;
        }
        for (const auto& t : a.transitions(s)) {
            out.add_transition(compact[s], t.byte, compact[t.target]);
        }
        for (const auto t : a.epsilons(s)) {
            out.add_epsilon(compact[s], compact[t]);
        }
        if (a.is_final(s)) {
            out.set_final(compact[s], *a.label(s));
        }
    }
    out.set_initial(compact[pfsm.start()]);
    std::vector<PatternLine> lines;
    for (LabelId l = 0; l < pfsm.pattern_count(); ++l) {
        lines.push_back({pfsm.labels().text(l), compact[pfsm.pattern(l).entry]});
    }
    return dump_automaton(out, pfsm.labels(), lines);
}

Pfsm load_pfsm(std::string_view text) {
    auto file = load_automaton(text);
    auto& a = file.automaton;

    if (file.patterns.empty()) {
        if (a.size() == 1 && a.transitions(0).empty() && a.epsilons(0).empty() && !a.is_final(0)) {
            return Pfsm{};
        }
        if (file.labels.size() != 1) {
            throw Error("an automaton without pattern lines must have finals with exactly one label");
        }
        const NamedAutomaton single{file.labels.text(0), std::move(a)};
        return Pfsm::build(std::span(&single, 1));
    }

    if (a.initial() != 0) {
        throw Error("PFSM dump must have state 0 as its initial state");
    }
    Pfsm p;
    p.automaton_ = Automaton{};
    p.live_.assign(a.size(), true);
    p.live_count_ = a.size();

    std::vector<LabelId> relabel(file.labels.size(), kNoState);
    std::vector<bool> owned(a.size(), false);
    owned[0] = true;
    for (const auto& line : file.patterns) {
        if (line.entry >= a.size() || line.entry == 0) {
            throw Error("pattern '" + line.label + "' has an invalid entry state");
        }
        const auto id = p.labels_.add(line.label);
        if (const auto old = file.labels.find(line.label)) {
            relabel[*old] = id;
        }
        PatternEntry entry;
        entry.entry = line.entry;
        entry.states = reachable(a, line.entry);
        for (const auto s : entry.states) {
            if (owned[s]) {
                throw Error("state " + std::to_string(s) + " is shared between patterns");
            }
            owned[s] = true;
        }
        entry.form = form_of(a, entry.states);
        p.directory_.push_back(std::move(entry));
    }
    for (LabelId l = 0; l < relabel.size(); ++l) {
        if (relabel[l] == kNoState) {
            throw Error("final label '" + file.labels.text(l) + "' has no pattern line");
        }
    }
    a.relabel(relabel);
    p.automaton_ = std::move(a);

    const auto report = validate(p);
    if (!report.ok()) {
        throw Error("invalid PFSM dump: " + report.violations.front());
    }
    return p;
}

LivePfsm::LivePfsm(Pfsm initial) : current_(std::make_shared<const Pfsm>(std::move(initial))) {}

std::shared_ptr<const Pfsm> LivePfsm::current() const {
    std::lock_guard lock(read_mutex_);
    return current_;
}

std::shared_ptr<const Pfsm> LivePfsm::publish(Pfsm next) {
    auto ptr = std::make_shared<const Pfsm>(std::move(next));
    std::lock_guard lock(read_mutex_);
    current_ = ptr;
    return ptr;
}

std::shared_ptr<const Pfsm> LivePfsm::add_pattern(std::string label, const Automaton& machine) {
    std::lock_guard lock(write_mutex_);
    return publish(pfsm::add_pattern(*current(), std::move(label), machine));
}

std::shared_ptr<const Pfsm> LivePfsm::remove_pattern(std::string_view label) {
    std::lock_guard lock(write_mutex_);
    return publish(pfsm::remove_pattern(*current(), label));
}

}  // namespace pfsm
