#include "pfsm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "pfsm/bench.hpp"
#include "pfsm/engine.hpp"
#include "pfsm/error.hpp"
#include "pfsm/oracle.hpp"
#include "pfsm/parallel.hpp"
#include "pfsm/regex.hpp"

namespace pfsm::cli {

namespace {

// Input problem detected after flag parsing (bad file, bad pattern, ...).
struct UsageError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct PatternFlags {
    std::vector<std::string> expressions;
    std::string pattern_file;

    void attach(CLI::App& app) {
        app.add_option("-e,--regexp", expressions, "Pattern (repeatable); the pattern is its own label");
        app.add_option("--patterns", pattern_file, "Pattern file: one pattern per line, optional label<TAB>pattern");
    }

    std::vector<PatternSpec> load() const {
        std::vector<PatternSpec> specs;
        for (std::size_t k = 0; k < expressions.size(); ++k) {
            specs.push_back({expressions[k], expressions[k], 0});
        }
        if (!pattern_file.empty()) {
            for (auto& spec : parse_pattern_file(read_file(pattern_file))) {
                specs.push_back(std::move(spec));
            }
        }
        return specs;
    }

    std::string where(const PatternSpec& spec) const {
        if (spec.line == 0) {
            return "pattern '" + spec.pattern + "'";
        }
        return pattern_file + ":" + std::to_string(spec.line);
    }
};

Form parse_form(const std::string& name) {
    if (name == "nfa") return Form::nfa;
    if (name == "dfa") return Form::dfa;
    return Form::automatic;
}

Pfsm compile_specs(const PatternFlags& flags, const std::vector<PatternSpec>& specs, Form form,
                   std::size_t ceiling, std::ostream& err) {
    Pfsm p;
    for (const auto& spec : specs) {
        CompiledPattern compiled;
        try {
            compiled = compile_pattern(spec.label, spec.pattern, form, ceiling);
        } catch (const ParseError& e) {
            throw Error(flags.where(spec) + ": " + e.what());
        } catch (const StateCeilingExceeded& e) {
            throw Error(flags.where(spec) + ": " + e.what());
        }
        if (compiled.nullable) {
            err << "warning: " << flags.where(spec)
                << " matches the empty string; zero-length matches are not reported\n";
        }
        p.add(std::move(compiled.label), compiled.machine);
    }
    return p;
}

std::vector<RegexAst> parse_specs(const PatternFlags& flags, const std::vector<PatternSpec>& specs) {
    std::vector<RegexAst> out;
    for (const auto& spec : specs) {
        try {
            out.push_back(parse_regex(spec.pattern));
        } catch (const ParseError& e) {
            throw Error(flags.where(spec) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::size_t> parse_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) {
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw UsageError("expected a comma-separated list of numbers, got '" + text + "'");
        }
    }
    return out;
}

void print_matches(std::ostream& out, const std::vector<Match>& matches, const LabelRegistry& labels,
                   std::string_view input, const std::string& format) {
    for (const auto& m : matches) {
        out << (format == "jsonl" ? format_jsonl(m, labels, input) : format_tsv(m, labels, input)) << '\n';
    }
}

int cmd_match(CLI::App& app, std::ostream& out, std::ostream& err, const PatternFlags& pflags,
              const std::string& automaton, const std::string& input_file, const std::optional<std::string>& text,
              const std::string& form, const std::string& strategy_name, std::size_t workers,
              const std::string& segments, const std::string& format, bool stats, bool dedupe,
              const std::string& scheduler, std::size_t ceiling) {
    const bool have_patterns = !pflags.expressions.empty() || !pflags.pattern_file.empty();
    if (have_patterns == !automaton.empty()) {
        throw UsageError("give patterns (-e/--patterns) or --automaton, not both or neither");
    }
    if (input_file.empty() == !text.has_value()) {
        throw UsageError("give exactly one of --input and --text");
    }
    const auto strategy = parse_strategy(strategy_name);

    const auto input = text ? *text : read_file(input_file);
    const auto pfsm = automaton.empty()
                          ? compile_specs(pflags, pflags.load(), parse_form(form), ceiling, err)
                          : load_pfsm(read_file(automaton));

    PartitionPlan plan;
    switch (strategy) {
        case Strategy::single:
            if (workers != 1) {
                throw UsageError("--workers needs --strategy regex, lazy or chained");
            }
            break;
        case Strategy::regex:
            plan = PartitionPlan::round_robin(pfsm, workers);
            break;
        case Strategy::lazy:
        case Strategy::chained:
            if (segments == "auto") {
                plan = PartitionPlan::even_segments(strategy, input.size(), workers);
            } else {
                plan.strategy = strategy;
                plan.cuts = parse_list(segments);
                if (plan.cuts.empty() || plan.cuts.front() != 0) {
                    plan.cuts.insert(plan.cuts.begin(), 0);
                }
                if (app.get_option("--workers")->count() > 0 && workers != plan.cuts.size()) {
                    throw UsageError("--workers conflicts with the number of --segments");
                }
                plan.workers = plan.cuts.size();
            }
            break;
    }
    if (strategy != Strategy::lazy && strategy != Strategy::chained && segments != "auto") {
        throw UsageError("--segments needs --strategy lazy or chained");
    }

    EngineOptions engine_options;
    engine_options.dedupe = dedupe;
    std::vector<Match> matches;
    std::optional<EngineStats> engine_stats;
    ParallelResult parallel;
    if (strategy == Strategy::single) {
        engine_stats = run(pfsm, input, [&](const Match& m) { matches.push_back(m); }, engine_options);
    } else {
        ParallelOptions options;
        options.engine = engine_options;
        options.scheduler = scheduler == "threads" ? Scheduler::threads : Scheduler::sequential;
        parallel = run_partitioned(pfsm, input, plan, options);
        matches = parallel.matches;
    }
    std::sort(matches.begin(), matches.end());
    print_matches(out, matches, pfsm.labels(), input, format);

    if (stats) {
        nlohmann::ordered_json s;
        s["strategy"] = std::string(to_string(strategy));
        s["n"] = input.size();
        s["r"] = pfsm.pattern_count();
        s["m_max"] = pfsm.max_pattern_states();
        s["s"] = 256;
        s["matches"] = matches.size();
        if (engine_stats) {
            s["peak_active_pairs"] = engine_stats->peak_active_pairs();
        }
        if (strategy != Strategy::single) {
            auto& ws = s["workers"] = nlohmann::ordered_json::array();
            for (const auto& w : parallel.workers) {
                ws.push_back({{"resident_states", w.resident_states},
                              {"matches", w.matches},
                              {"frontiers_received", w.frontiers_received},
                              {"frontier_pairs", w.frontier_pairs}});
            }
        }
        if (format == "jsonl") {
            out << nlohmann::ordered_json{{"stats", s}}.dump() << '\n';
        } else {
            for (const auto& [key, value] : s.items()) {
                out << "# " << key << '=' << value.dump() << '\n';
            }
        }
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-pattern all-occurrences regex matcher"};
    app.require_subcommand(1);

    PatternFlags match_patterns;
    std::string automaton, input_file, form = "auto", strategy = "single", segments = "auto",
                format = "tsv", scheduler = "sequential";
    std::optional<std::string> text;
    std::size_t workers = 1;
    std::size_t ceiling = kDefaultStateCeiling;
    bool stats = false;
    bool dedupe = true;

    auto* match = app.add_subcommand("match", "Report every match of every pattern");
    match_patterns.attach(*match);
    match->add_option("--automaton", automaton, "PFSM-AUT v1 file to run instead of patterns");
    match->add_option("--input", input_file, "Input file (read as raw bytes)");
    match->add_option("--text", text, "Literal input text");
    match->add_option("--form", form, "Per-pattern form")->check(CLI::IsMember({"nfa", "dfa", "auto"}));
    match->add_option("--strategy", strategy, "Execution strategy")
        ->check(CLI::IsMember({"single", "regex", "lazy", "chained"}));
    match->add_option("--workers", workers, "Worker count")->check(CLI::PositiveNumber);
    match->add_option("--segments", segments, "Segment cut points (comma-separated) or 'auto'");
    match->add_option("--format", format, "Output format")->check(CLI::IsMember({"tsv", "jsonl"}));
    match->add_option("--scheduler", scheduler, "Worker runtime")
        ->check(CLI::IsMember({"sequential", "threads"}));
    match->add_option("--ceiling", ceiling, "DFA state ceiling per pattern");
    match->add_flag("--stats", stats, "Append run statistics");
    match->add_flag("--dedupe,!--no-dedupe", dedupe, "Drop repeated (label, start, end) triples");

    PatternFlags compile_patterns;
    std::string compile_form = "auto", output;
    std::size_t compile_ceiling = kDefaultStateCeiling;
    auto* compile = app.add_subcommand("compile", "Compile patterns into a PFSM-AUT v1 dump");
    compile_patterns.attach(*compile);
    compile->add_option("--form", compile_form, "Per-pattern form")->check(CLI::IsMember({"nfa", "dfa", "auto"}));
    compile->add_option("--ceiling", compile_ceiling, "DFA state ceiling per pattern");
    compile->add_option("-o,--output", output, "Output file (default: stdout)");

    PatternFlags bench_patterns;
    std::string bench_input, corpus = "random", alphabet = "abc", sizes = "1000,2000,4000", counts = "1,2,4,8",
                strategies = "single", bench_workers = "1", bench_form = "auto", bench_scheduler = "threads";
    int repeats = 3;
    std::uint64_t seed = 1;
    auto* bench = app.add_subcommand("bench", "Time runs against input size and pattern count; CSV output");
    bench_patterns.attach(*bench);
    bench->add_option("--input", bench_input, "Corpus file (sizes are prefixes of it)");
    bench->add_option("--corpus", corpus, "Generated corpus kind")->check(CLI::IsMember({"random", "repeat"}));
    bench->add_option("--alphabet", alphabet, "Bytes of the generated corpus");
    bench->add_option("--sizes", sizes, "Input sizes");
    bench->add_option("--counts", counts, "Pattern counts");
    bench->add_option("--strategies", strategies, "Comma-separated strategies");
    bench->add_option("--workers", bench_workers, "Comma-separated worker counts");
    bench->add_option("--form", bench_form, "Per-pattern form")->check(CLI::IsMember({"nfa", "dfa", "auto"}));
    bench->add_option("--scheduler", bench_scheduler, "Worker runtime")
        ->check(CLI::IsMember({"sequential", "threads"}));
    bench->add_option("--repeats", repeats, "Runs per measurement (median reported)");
    bench->add_option("--seed", seed, "Corpus seed");

    PatternFlags oracle_patterns;
    std::string oracle_input, oracle_format = "tsv";
    std::optional<std::string> oracle_text;
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force reference matcher (slow; for debugging)");
    oracle_patterns.attach(*oracle_cmd);
    oracle_cmd->add_option("--input", oracle_input, "Input file");
    oracle_cmd->add_option("--text", oracle_text, "Literal input text");
    oracle_cmd->add_option("--format", oracle_format, "Output format")->check(CLI::IsMember({"tsv", "jsonl"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (match->parsed()) {
            return cmd_match(*match, out, err, match_patterns, automaton, input_file, text, form, strategy, workers,
                             segments, format, stats, dedupe, scheduler, ceiling);
        }
        if (compile->parsed()) {
            const auto pfsm = compile_specs(compile_patterns, compile_patterns.load(), parse_form(compile_form),
                                            compile_ceiling, err);
            const auto dump = dump_pfsm(pfsm);
            if (output.empty()) {
                out << dump;
            } else {
                std::ofstream file(output, std::ios::binary);
                if (!(file << dump)) {
                    throw Error("cannot write '" + output + "'");
                }
            }
            return kExitOk;
        }
        if (bench->parsed()) {
            bench::Config config;
            config.patterns = bench_patterns.load();
            if (config.patterns.empty()) {
                config.patterns = {{"a*c", "a*c", 0}, {"ac", "ac", 0}, {"a(ca)*b", "a(ca)*b", 0}};
            }
            config.sizes = parse_list(sizes);
            config.pattern_counts = parse_list(counts);
            config.workers = parse_list(bench_workers);
            if (config.sizes.empty() || config.workers.empty()) {
                throw UsageError("--sizes and --workers must not be empty");
            }
            std::stringstream list(strategies);
            for (std::string item; std::getline(list, item, ',');) {
                config.strategies.push_back(parse_strategy(item));
            }
            config.form = parse_form(bench_form);
            config.scheduler = bench_scheduler == "threads" ? Scheduler::threads : Scheduler::sequential;
            config.repeats = repeats;
            const auto largest = *std::max_element(config.sizes.begin(), config.sizes.end());
            if (!bench_input.empty()) {
                config.corpus = read_file(bench_input);
            } else if (corpus == "repeat") {
                config.corpus = std::string(largest, alphabet.empty() ? 'a' : alphabet.front());
            } else {
                config.corpus = bench::random_corpus(largest, alphabet, seed);
            }
            const auto rows = bench::sweep(config);
            out << bench::to_csv(rows);

            // Log-log slopes per (strategy, workers) series, on stderr.
            for (const auto strategy_kind : config.strategies) {
                for (const auto w : config.workers) {
                    std::vector<double> xs, ys, rs, rt;
                    for (const auto& row : rows) {
                        if (row.strategy != strategy_kind ||
                            row.workers != (strategy_kind == Strategy::single ? 1 : w)) {
                            continue;
                        }
                        if (row.series == "n" && row.n > 0) {
                            xs.push_back(static_cast<double>(row.n));
                            ys.push_back(row.seconds);
                        } else if (row.series == "r" && row.r > 0) {
                            rs.push_back(static_cast<double>(row.r));
                            rt.push_back(row.seconds);
                        }
                    }
                    err << "# " << to_string(strategy_kind) << " workers=" << w;
                    if (xs.size() >= 2) err << " slope_n=" << bench::loglog_slope(xs, ys);
                    if (rs.size() >= 2) err << " slope_r=" << bench::loglog_slope(rs, rt);
                    err << '\n';
                    if (strategy_kind == Strategy::single) break;
                }
            }
            return kExitOk;
        }
        if (oracle_cmd->parsed()) {
            if (oracle_input.empty() == !oracle_text.has_value()) {
                throw UsageError("give exactly one of --input and --text");
            }
            const auto input = oracle_text ? *oracle_text : read_file(oracle_input);
            const auto specs = oracle_patterns.load();
            const auto asts = parse_specs(oracle_patterns, specs);
            LabelRegistry labels;
            for (const auto& spec : specs) {
                labels.add(spec.label);
            }
            print_matches(out, oracle::all_matches(asts, input), labels, input, oracle_format);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace pfsm::cli
