#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pfsm/engine.hpp"

namespace pfsm {

enum class Strategy : std::uint8_t { single, regex, lazy, chained };

std::string_view to_string(Strategy strategy);
/// Throws pfsm::Error for an unknown name.
Strategy parse_strategy(std::string_view name);

/// Workers run either one after another on the calling thread (output is
/// reproducible step for step) or on one OS thread each.
enum class Scheduler : std::uint8_t { sequential, threads };

struct PartitionPlan {
    Strategy strategy = Strategy::single;
    std::size_t workers = 1;
    /// regex: worker of each label id
    std::vector<std::size_t> assignment;
    /// lazy / chained: first position of each segment; cuts[0] == 0
    std::vector<std::size_t> cuts;

    static PartitionPlan single();
    static PartitionPlan round_robin(const Pfsm& pfsm, std::size_t workers);
    /// Near-equal segments; the worker count is clamped to [1, max(n, 1)].
    static PartitionPlan even_segments(Strategy strategy, std::size_t n, std::size_t workers);
};

/// Throws pfsm::Error if `plan` does not fit `pfsm` and an input of length `n`.
void check_plan(const PartitionPlan& plan, const Pfsm& pfsm, std::size_t n);

struct ParallelOptions {
    Scheduler scheduler = Scheduler::sequential;
    EngineOptions engine;
    /// When false only counts are kept, for runs with huge match sets.
    bool collect = true;
};

struct WorkerReport {
    std::size_t resident_states = 0;  ///< live states of the automaton the worker holds
    std::size_t matches = 0;
    std::size_t frontiers_received = 0;
    /// (state, tag) pairs of every frontier the worker sent on.
    std::vector<std::size_t> frontier_pairs;
};

struct ParallelResult {
    std::vector<Match> matches;  ///< sorted by (end, start, label)
    std::size_t match_count = 0;
    std::vector<WorkerReport> workers;
};

/// Every worker runs the whole input against the sub-PFSM of its labels.
ParallelResult run_regex_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                                     const ParallelOptions& options = {});

/// Worker k reinitialises only inside segment k but keeps consuming input
/// until the end or until its active set drains.
ParallelResult run_lazy_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                                    const ParallelOptions& options = {});

/// Worker k scans only segment k. Active states left at a segment end travel
/// to the next worker as a `PFSM-ACTIVE v1` frontier and are continued there
/// without reinitialisation, hop by hop, until they drain.
ParallelResult run_chained_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                                       const ParallelOptions& options = {});

/// Dispatches on `plan.strategy`; `single` is one plain engine run.
ParallelResult run_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                               const ParallelOptions& options = {});

}  // namespace pfsm
