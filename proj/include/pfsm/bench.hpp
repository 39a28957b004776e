#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pfsm/parallel.hpp"
#include "pfsm/regex.hpp"

namespace pfsm::bench {

struct Timing {
    double seconds = 0;  ///< median wall time over the repeats
    std::size_t matches = 0;
};

/// Times `repeats` runs of `plan` over `input` without storing matches.
Timing time_run(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan, Scheduler scheduler,
                int repeats = 3);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// `n` bytes drawn uniformly from `alphabet`.
std::string random_corpus(std::size_t n, std::string_view alphabet, std::uint64_t seed);

/// `r` copies of `patterns`, cycled, with distinct labels.
std::vector<PatternSpec> replicate(std::span<const PatternSpec> patterns, std::size_t r);

struct Config {
    std::vector<PatternSpec> patterns;
    std::string corpus;  ///< sizes below are prefixes of this
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> pattern_counts;
    std::vector<Strategy> strategies;
    std::vector<std::size_t> workers;
    Form form = Form::automatic;
    Scheduler scheduler = Scheduler::threads;
    int repeats = 3;
};

struct Row {
    std::string series;  ///< "n" (size sweep at fixed r) or "r" (pattern sweep at fixed n)
    Strategy strategy = Strategy::single;
    std::size_t workers = 1;
    std::size_t n = 0;
    std::size_t r = 0;
    double seconds = 0;
    std::size_t matches = 0;
};

/// Size sweep at r = |patterns| followed by a pattern-count sweep at the
/// largest size, for every strategy and worker count.
std::vector<Row> sweep(const Config& config);

std::string to_csv(std::span<const Row> rows);

}  // namespace pfsm::bench
