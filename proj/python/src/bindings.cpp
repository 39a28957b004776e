#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pfsm/engine.hpp"
#include "pfsm/error.hpp"
#include "pfsm/oracle.hpp"
#include "pfsm/parallel.hpp"
#include "pfsm/regex.hpp"

namespace py = pybind11;
using namespace pfsm;

namespace {

using PyMatch = std::tuple<std::string, std::size_t, std::size_t>;

Form form_from(const std::string& name) {
    if (name == "nfa") return Form::nfa;
    if (name == "dfa") return Form::dfa;
    if (name == "auto") return Form::automatic;
    throw py::value_error("form must be 'nfa', 'dfa' or 'auto'");
}

std::vector<PyMatch> to_python(const std::vector<Match>& matches, const LabelRegistry& labels) {
    std::vector<PyMatch> out;
    out.reserve(matches.size());
    for (const auto& m : matches) {
        out.emplace_back(labels.text(m.label), m.start, m.end);
    }
    return out;
}

void add_compiled(Pfsm& p, const std::string& label, const std::string& pattern, const std::string& form) {
    auto compiled = compile_pattern(label, pattern, form_from(form));
    p.add(std::move(compiled.label), compiled.machine);
}

std::vector<Match> match(const Pfsm& p, const std::string& input, const std::string& strategy_name,
                         std::size_t workers, const std::string& scheduler) {
    const auto strategy = parse_strategy(strategy_name);
    PartitionPlan plan;
    switch (strategy) {
        case Strategy::single: break;
        case Strategy::regex: plan = PartitionPlan::round_robin(p, workers); break;
        default: plan = PartitionPlan::even_segments(strategy, input.size(), workers); break;
    }
    ParallelOptions options;
    if (scheduler == "threads") {
        options.scheduler = Scheduler::threads;
    } else if (scheduler != "sequential") {
        throw py::value_error("scheduler must be 'sequential' or 'threads'");
    }
    py::gil_scoped_release release;
    return run_partitioned(p, input, plan, options).matches;
}

// Online matcher over a frozen copy of a Pfsm.
class Scanner {
public:
    explicit Scanner(const Pfsm& p) : engine_(std::make_shared<const Pfsm>(p)) {}

    std::vector<PyMatch> feed(const std::string& chunk) {
        std::vector<Match> out;
        engine_.feed(chunk, [&](const Match& m) { out.push_back(m); });
        return to_python(out, engine_.pfsm().labels());
    }

    std::size_t position() const { return engine_.position(); }
    std::string snapshot() const { return to_wire(engine_.snapshot()); }
    void restore(const std::string& wire, std::size_t position) {
        engine_.restore(active_set_from_wire(wire), position);
    }

private:
    Engine engine_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-pattern, all-occurrences regular expression matching";

    static py::exception<Error> base_error(m, "PfsmError", PyExc_RuntimeError);
    static py::exception<ParseError> parse_error(m, "PatternError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::set_error(parse_error, e.what());
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });

    py::class_<Pfsm>(m, "Pfsm")
        .def(py::init<>())
        .def_static(
            "from_patterns",
            [](const std::vector<std::string>& patterns, const std::string& form) {
                Pfsm p;
                for (const auto& text : patterns) {
                    add_compiled(p, text, text, form);
                }
                return p;
            },
            py::arg("patterns"), py::arg("form") = "auto",
            "Build from pattern strings; each pattern is its own label.")
        .def_static("load", &load_pfsm, py::arg("text"), "Load a PFSM-AUT v1 dump.")
        .def("add", &add_compiled, py::arg("label"), py::arg("pattern"), py::arg("form") = "auto")
        .def("remove", &Pfsm::remove, py::arg("label"))
        .def_property_readonly("generation", &Pfsm::generation)
        .def_property_readonly("labels",
                               [](const Pfsm& p) {
                                   const auto t = p.labels().texts();
                                   return std::vector<std::string>(t.begin(), t.end());
                               })
        .def("__len__", &Pfsm::pattern_count)
        .def("dump", &dump_pfsm)
        .def("validate", [](const Pfsm& p) { return validate(p).violations; })
        .def(
            "match",
            [](const Pfsm& p, const std::string& input, const std::string& strategy, std::size_t workers,
               const std::string& scheduler) { return to_python(match(p, input, strategy, workers, scheduler), p.labels()); },
            py::arg("input"), py::arg("strategy") = "single", py::arg("workers") = 1,
            py::arg("scheduler") = "sequential",
            "All matches as (label, start, end) with inclusive ends, sorted by (end, start, label).");

    py::class_<Scanner>(m, "Scanner")
        .def(py::init<const Pfsm&>(), py::arg("pfsm"))
        .def("feed", &Scanner::feed, py::arg("chunk"), "Consume bytes; returns the matches they complete.")
        .def_property_readonly("position", &Scanner::position)
        .def("snapshot", &Scanner::snapshot, "Active set in PFSM-ACTIVE v1 form.")
        .def("restore", &Scanner::restore, py::arg("wire"), py::arg("position"));

    m.def(
        "oracle_matches",
        [](const std::vector<std::string>& patterns, const std::string& input) {
            std::vector<RegexAst> asts;
            LabelRegistry labels;
            for (const auto& p : patterns) {
                asts.push_back(parse_regex(p));
                labels.add(p);
            }
            return to_python(oracle::all_matches(asts, input), labels);
        },
        py::arg("patterns"), py::arg("input"), "Brute-force reference result.");

    m.def(
        "parse_check", [](const std::string& pattern) { parse_regex(pattern); }, py::arg("pattern"),
        "Raise PatternError if `pattern` is not valid syntax.");
}
