#include <charconv>
#include <sstream>

#include "pfsm/engine.hpp"
#include "pfsm/error.hpp"

namespace pfsm {

namespace {

constexpr std::string_view kHeader = "PFSM-ACTIVE v1";

template <typename T>
T parse_uint(std::string_view token, std::size_t line) {
    T value{};
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), last, value);
    if (token.empty() || ec != std::errc{} || ptr != last) {
        throw FormatError(line, "expected a number, got '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

std::string to_wire(const ActiveSet& active) {
    std::ostringstream out;
    out << kHeader << '\n' << "gen " << active.generation << '\n';
    for (const auto& [state, tags] : active.entries) {
        out << "active " << state << ' ';
        for (std::size_t i = 0; i < tags.size(); ++i) {
            out << (i ? "," : "") << tags[i];
        }
        out << '\n';
    }
    return out.str();
}

ActiveSet active_set_from_wire(std::string_view text) {
    ActiveSet out;
    std::size_t line_no = 0;
    bool header = false;
    bool gen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!header) {
            if (line != kHeader) {
                throw FormatError(line_no, "missing 'PFSM-ACTIVE v1' header");
            }
            header = true;
            continue;
        }
        if (!gen) {
            if (!line.starts_with("gen ")) {
                throw FormatError(line_no, "expected 'gen <generation>'");
            }
            out.generation = parse_uint<std::uint64_t>(line.substr(4), line_no);
            gen = true;
            continue;
        }
        if (!line.starts_with("active ")) {
            throw FormatError(line_no, "expected 'active <state> <tags>'");
        }
        line.remove_prefix(7);
        const auto sp = line.find(' ');
        if (sp == std::string_view::npos) {
            throw FormatError(line_no, "missing tag list");
        }
        const auto state = parse_uint<StateId>(line.substr(0, sp), line_no);
        auto list = line.substr(sp + 1);
        std::vector<Tag> tags;
        while (true) {
            const auto comma = list.find(',');
            tags.push_back(parse_uint<Tag>(list.substr(0, comma), line_no));
            if (tags.size() > 1 && tags[tags.size() - 2] >= tags.back()) {
                throw FormatError(line_no, "tags must be strictly ascending");
            }
            if (comma == std::string_view::npos) {
                break;
            }
            list.remove_prefix(comma + 1);
        }
        if (!out.entries.empty() && out.entries.back().first >= state) {
            throw FormatError(line_no, "states must be strictly ascending");
        }
        out.entries.emplace_back(state, std::move(tags));
    }
    if (!gen) {
        throw FormatError(line_no, "truncated active set");
    }
    return out;
}

}  // namespace pfsm
