#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "pfsm/automaton.hpp"
#include "pfsm/error.hpp"

namespace pfsm {

namespace {

constexpr std::string_view kHeader = "PFSM-AUT v1";

void check_label_text(const std::string& text) {
    if (text.find('\n') != std::string::npos || text.find('\r') != std::string::npos) {
        throw Error("label text cannot contain line breaks");
    }
}

std::string_view next_token(std::string_view& rest) {
    while (!rest.empty() && rest.front() == ' ') {
        rest.remove_prefix(1);
    }
    const auto end = rest.find(' ');
    const auto token = rest.substr(0, end);
    rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
    return token;
}

std::uint64_t parse_number(std::string_view token, std::size_t line, int base = 10) {
    std::uint64_t value = 0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value, base);
    if (token.empty() || ec != std::errc{} || ptr != last) {
        throw FormatError(line, "expected a number, got '" + std::string(token) + "'");
    }
    return value;
}

StateId parse_state(std::string_view token, std::size_t line) {
    const auto value = parse_number(token, line);
    if (value >= kNoState) {
        throw FormatError(line, "state id out of range");
    }
    return static_cast<StateId>(value);
}

std::uint8_t parse_byte(std::string_view token, std::size_t line) {
    if (token.size() != 4 || token[0] != '0' || (token[1] != 'x' && token[1] != 'X')) {
        throw FormatError(line, "expected byte as 0xHH, got '" + std::string(token) + "'");
    }
    return static_cast<std::uint8_t>(parse_number(token.substr(2), line, 16));
}

}  // namespace

std::string dump_automaton(const Automaton& automaton, const LabelRegistry& labels,
                           std::span<const PatternLine> patterns) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (StateId s = 0; s < automaton.size(); ++s) {
        out << "state " << s;
        if (s == automaton.initial()) {
            out << " initial";
        }
        if (automaton.is_final(s)) {
            const auto label = automaton.label(s);
            if (!label) {
                throw Error("cannot dump unlabeled final state " + std::to_string(s));
            }
            const auto text = *label < labels.size() ? labels.text(*label) : std::to_string(*label);
            check_label_text(text);
            out << " final " << text;
        }
        out << '\n';
    }
    char hex[8];
    for (StateId s = 0; s < automaton.size(); ++s) {
        for (const auto& t : automaton.transitions(s)) {
            std::snprintf(hex, sizeof hex, "0x%02x", t.byte);
            out << "trans " << s << ' ' << hex << ' ' << t.target << '\n';
        }
    }
    for (StateId s = 0; s < automaton.size(); ++s) {
        for (const auto t : automaton.epsilons(s)) {
            out << "eps " << s << ' ' << t << '\n';
        }
    }
    for (const auto& p : patterns) {
        check_label_text(p.label);
        out << "pattern " << p.label << ' ' << p.entry << '\n';
    }
    return out.str();
}

AutomatonFile load_automaton(std::string_view text) {
    AutomatonFile file;
    auto& aut = file.automaton;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool initial_seen = false;

    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != kHeader) {
                throw FormatError(line_no, "missing 'PFSM-AUT v1' header");
            }
            header_seen = true;
            continue;
        }

        auto rest = line;
        const auto kind = next_token(rest);
        if (kind == "state") {
            const auto id = parse_state(next_token(rest), line_no);
            if (id != aut.size()) {
                throw FormatError(line_no, "state ids must be declared densely and in order");
            }
            aut.add_state();
            auto attr = next_token(rest);
            if (attr == "initial") {
                if (initial_seen) {
                    throw FormatError(line_no, "multiple initial states");
                }
                initial_seen = true;
                aut.set_initial(id);
                attr = next_token(rest);
            }
            if (attr == "final") {
                // Label text is the remainder of the line after one space.
                const auto label_text = rest.empty() ? std::string{} : std::string(rest.substr(1));
                auto label = file.labels.find(label_text);
                if (!label) {
                    label = file.labels.add(label_text);
                }
                aut.set_final(id, *label);
            } else if (!attr.empty()) {
                throw FormatError(line_no, "unexpected state attribute '" + std::string(attr) + "'");
            }
        } else if (kind == "trans") {
            const auto from = parse_state(next_token(rest), line_no);
            const auto byte = parse_byte(next_token(rest), line_no);
            const auto to = parse_state(next_token(rest), line_no);
            if (from >= aut.size()) {
                throw FormatError(line_no, "transition from undeclared state");
            }
            aut.add_transition(from, byte, to);
        } else if (kind == "eps") {
            const auto from = parse_state(next_token(rest), line_no);
            const auto to = parse_state(next_token(rest), line_no);
            if (from >= aut.size()) {
                throw FormatError(line_no, "epsilon from undeclared state");
            }
            aut.add_epsilon(from, to);
        } else if (kind == "pattern") {
            if (!rest.empty()) {
                rest.remove_prefix(1);
            }
            const auto sep = rest.rfind(' ');
            if (sep == std::string_view::npos) {
                throw FormatError(line_no, "expected 'pattern <label> <entry>'");
            }
            file.patterns.push_back({std::string(rest.substr(0, sep)),
                                     parse_state(rest.substr(sep + 1), line_no)});
        } else {
            throw FormatError(line_no, "unknown directive '" + std::string(kind) + "'");
        }
        if (kind != "state" && kind != "pattern" && !next_token(rest).empty()) {
            throw FormatError(line_no, "trailing tokens");
        }
    }
    if (!header_seen) {
        throw FormatError(std::max<std::size_t>(line_no, 1), "missing 'PFSM-AUT v1' header");
    }
    const auto report = validate(aut);
    if (!report.ok()) {
        throw FormatError(line_no, "invalid automaton: " + report.violations.front());
    }
    return file;
}

}  // namespace pfsm
