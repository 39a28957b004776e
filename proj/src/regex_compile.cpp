#include <algorithm>
#include <deque>
#include <map>

#include "pfsm/error.hpp"
#include "pfsm/regex.hpp"

namespace pfsm {

namespace {

struct Fragment {
    StateId start;
    StateId end;
};

class Thompson {
public:
    Fragment build(const RegexAst& ast) {
        using Kind = RegexAst::Kind;
        const auto s = nfa_.add_state();
        switch (ast.kind) {
            case Kind::empty: {
                const auto e = nfa_.add_state();
                nfa_.add_epsilon(s, e);
                return {s, e};
            }
            case Kind::literal: {
                const auto e = nfa_.add_state();
                nfa_.add_transition(s, ast.byte, e);
                return {s, e};
            }
            case Kind::byte_class: {
                const auto e = nfa_.add_state();
                for (unsigned b = 0; b < 256; ++b) {
                    if (ast.bytes.test(b)) {
                        nfa_.add_transition(s, static_cast<std::uint8_t>(b), e);
                    }
                }
                return {s, e};
            }
            case Kind::concat: {
                auto tail = s;
                for (const auto& child : ast.children) {
                    const auto f = build(child);
                    nfa_.add_epsilon(tail, f.start);
                    tail = f.end;
                }
                return {s, tail};
            }
            case Kind::alternation: {
                std::vector<StateId> ends;
                for (const auto& child : ast.children) {
                    const auto f = build(child);
                    nfa_.add_epsilon(s, f.start);
                    ends.push_back(f.end);
                }
                const auto e = nfa_.add_state();
                for (const auto end : ends) {
                    nfa_.add_epsilon(end, e);
                }
                return {s, e};
            }
            case Kind::star:
            case Kind::plus:
            case Kind::optional: {
                const auto f = build(ast.children.front());
                const auto e = nfa_.add_state();
                nfa_.add_epsilon(s, f.start);
                nfa_.add_epsilon(f.end, e);
                if (ast.kind != Kind::plus) {
                    nfa_.add_epsilon(s, e);
                }
                if (ast.kind != Kind::optional) {
                    nfa_.add_epsilon(f.end, f.start);
                }
                return {s, e};
            }
        }
        throw Error("unknown regex node");
    }

    Automaton finish(Fragment f, LabelId label) && {
        nfa_.set_initial(f.start);
        nfa_.set_final(f.end, label);
        return std::move(nfa_);
    }

private:
    Automaton nfa_;
};

}  // namespace

Automaton compile_nfa(const RegexAst& ast, LabelId label) {
    if (const auto problems = check_ast(ast); !problems.empty()) {
        throw Error("malformed regex tree: " + problems.front());
    }
    Thompson builder;
    const auto f = builder.build(ast);
    return std::move(builder).finish(f, label);
}

Automaton nfa_to_dfa(const Automaton& nfa, std::size_t ceiling) {
    if (nfa.is_deterministic()) {
        return nfa;
    }
    if (nfa.initial() == kNoState) {
        throw Error("automaton has no initial state");
    }

    Automaton dfa;
    std::map<StateSet, StateId> ids;
    std::deque<std::pair<StateSet, StateId>> pending;

    auto intern = [&](StateSet set) -> StateId {
        if (const auto it = ids.find(set); it != ids.end()) {
            return it->second;
        }
        if (dfa.size() >= ceiling) {
            throw StateCeilingExceeded(ceiling);
        }
        const auto id = dfa.add_state();
        std::optional<LabelId> label;
        for (const auto s : set) {
            if (!nfa.is_final(s)) {
                continue;
            }
            const auto l = nfa.label(s);
            if (!l) {
                throw Error("final state " + std::to_string(s) + " has no label");
            }
            if (label && *label != *l) {
                throw Error("subset construction would merge final states with different labels");
            }
            label = l;
        }
        if (label) {
            dfa.set_final(id, *label);
        }
        ids.emplace(set, id);
        pending.emplace_back(std::move(set), id);
        return id;
    };

    const StateId seed[] = {nfa.initial()};
    dfa.set_initial(intern(epsilon_closure(nfa, seed)));

    std::vector<Transition> moves;
    StateSet targets;
    while (!pending.empty()) {
        const auto [set, id] = std::move(pending.front());
        pending.pop_front();
        moves.clear();
        for (const auto s : set) {
            const auto out = nfa.transitions(s);
            moves.insert(moves.end(), out.begin(), out.end());
        }
        std::sort(moves.begin(), moves.end());
        for (std::size_t i = 0; i < moves.size();) {
            const auto byte = moves[i].byte;
            targets.clear();
            for (; i < moves.size() && moves[i].byte == byte; ++i) {
                targets.push_back(moves[i].target);
            }
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
            dfa.add_transition(id, byte, intern(epsilon_closure(nfa, targets)));
        }
    }
    return dfa;
}

CompiledPattern compile_pattern(std::string label, std::string_view pattern, Form form, std::size_t ceiling) {
    const auto ast = parse_regex(pattern);
    CompiledPattern out{std::move(label), compile_nfa(ast), is_nullable(ast)};
    switch (form) {
        case Form::nfa:
            break;
        case Form::dfa:
            out.machine = nfa_to_dfa(out.machine, ceiling);
            break;
        case Form::automatic:
            try {
                out.machine = nfa_to_dfa(out.machine, ceiling);
            } catch (const StateCeilingExceeded&) {
                // keep the NFA
            }
            break;
    }
    return out;
}

}  // namespace pfsm
