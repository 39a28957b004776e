#include <json.hpp>

#include "pfsm/engine.hpp"

namespace pfsm {

namespace {

std::string_view matched(const Match& m, std::string_view input) {
    return input.substr(m.start, m.end - m.start + 1);
}

}  // namespace

std::string format_tsv(const Match& match, const LabelRegistry& labels, std::string_view input) {
    std::string out = labels.text(match.label);
    out += '\t';
    out += std::to_string(match.start);
    out += '\t';
    out += std::to_string(match.end);
    out += '\t';
    out += matched(match, input);
    return out;
}

std::string format_jsonl(const Match& match, const LabelRegistry& labels, std::string_view input) {
    const nlohmann::ordered_json row = {
        {"label", labels.text(match.label)},
        {"start", match.start},
        {"end", match.end},
        {"match", std::string(matched(match, input))},
    };
    return row.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace pfsm
