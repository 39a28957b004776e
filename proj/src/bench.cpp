#include "pfsm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "pfsm/error.hpp"

namespace pfsm::bench {

namespace {

Pfsm compile_all(std::span<const PatternSpec> patterns, Form form) {
    Pfsm p;
    for (const auto& spec : patterns) {
        auto compiled = compile_pattern(spec.label, spec.pattern, form);
        p.add(std::move(compiled.label), compiled.machine);
    }
    return p;
}

PartitionPlan plan_for(const Pfsm& pfsm, Strategy strategy, std::size_t workers, std::size_t n) {
    switch (strategy) {
        case Strategy::single:
            return PartitionPlan::single();
        case Strategy::regex:
            return PartitionPlan::round_robin(pfsm, workers);
        case Strategy::lazy:
        case Strategy::chained:
            return PartitionPlan::even_segments(strategy, n, workers);
    }
    return PartitionPlan::single();
}

}  // namespace

Timing time_run(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan, Scheduler scheduler,
                int repeats) {
    ParallelOptions options;
    options.scheduler = scheduler;
    options.collect = false;
    std::vector<double> times;
    Timing out;
    for (int k = 0; k < std::max(repeats, 1); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = run_partitioned(pfsm, input, plan, options);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
        out.matches = result.match_count;
    }
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
    out.seconds = times[times.size() / 2];
    return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error("slope needs at least two paired samples");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::max(y[i], 1e-9));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string random_corpus(std::size_t n, std::string_view alphabet, std::uint64_t seed) {
    if (alphabet.empty()) {
        throw Error("corpus alphabet is empty");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out(n, '\0');
    for (auto& c : out) {
        c = alphabet[pick(rng)];
    }
    return out;
}

std::vector<PatternSpec> replicate(std::span<const PatternSpec> patterns, std::size_t r) {
    std::vector<PatternSpec> out;
    if (patterns.empty()) {
        return out;
    }
    for (std::size_t k = 0; k < r; ++k) {
        auto spec = patterns[k % patterns.size()];
        if (k >= patterns.size()) {
            spec.label += "#" + std::to_string(k / patterns.size());
        }
        out.push_back(std::move(spec));
    }
    return out;
}

std::vector<Row> sweep(const Config& config) {
    std::vector<Row> rows;
    const auto full = compile_all(config.patterns, config.form);
    for (const auto strategy : config.strategies) {
        for (const auto workers : config.workers) {
            if (strategy == Strategy::single && workers != config.workers.front()) {
                continue;
            }
            const std::size_t w = strategy == Strategy::single ? 1 : workers;
            for (const auto n : config.sizes) {
                const auto input = std::string_view(config.corpus).substr(0, n);
                const auto plan = plan_for(full, strategy, w, input.size());
                const auto t = time_run(full, input, plan, config.scheduler, config.repeats);
                rows.push_back({"n", strategy, w, input.size(), full.pattern_count(), t.seconds, t.matches});
            }
            const auto input = std::string_view(config.corpus)
                                   .substr(0, config.sizes.empty() ? config.corpus.size()
                                                                   : *std::max_element(config.sizes.begin(),
                                                                                       config.sizes.end()));
            for (const auto r : config.pattern_counts) {
                const auto p = compile_all(replicate(config.patterns, r), config.form);
                const auto plan = plan_for(p, strategy, w, input.size());
                const auto t = time_run(p, input, plan, config.scheduler, config.repeats);
                rows.push_back({"r", strategy, w, input.size(), p.pattern_count(), t.seconds, t.matches});
            }
        }
    }
    return rows;
}

std::string to_csv(std::span<const Row> rows) {
    std::ostringstream out;
    out << "series,strategy,workers,n,r,seconds,matches\n";
    for (const auto& row : rows) {
        out << row.series << ',' << to_string(row.strategy) << ',' << row.workers << ',' << row.n << ','
            << row.r << ',' << row.seconds << ',' << row.matches << '\n';
    }
    return out.str();
}

}  // namespace pfsm::bench
