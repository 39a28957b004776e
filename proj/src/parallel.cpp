#include "pfsm/parallel.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "pfsm/error.hpp"

namespace pfsm {

namespace {

// Worker-private match buffer.
struct Collector {
    bool keep = true;
    std::vector<Match> matches;
    std::size_t count = 0;

    MatchSink sink() {
        return [this](const Match& m) {
            ++count;
            if (keep) {
                matches.push_back(m);
            }
        };
    }
};

void for_each_worker(std::size_t workers, Scheduler scheduler, const std::function<void(std::size_t)>& body) {
    if (scheduler == Scheduler::sequential || workers <= 1) {
        for (std::size_t k = 0; k < workers; ++k) {
            body(k);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t k = 0; k < workers; ++k) {
        threads.emplace_back([&, k] {
            try {
                body(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

ParallelResult gather(std::vector<Collector>& collectors, std::vector<WorkerReport> reports) {
    ParallelResult out;
    for (std::size_t k = 0; k < collectors.size(); ++k) {
        reports[k].matches = collectors[k].count;
        out.match_count += collectors[k].count;
        out.matches.insert(out.matches.end(), collectors[k].matches.begin(), collectors[k].matches.end());
    }
    std::sort(out.matches.begin(), out.matches.end());
    out.workers = std::move(reports);
    return out;
}

std::pair<std::size_t, std::size_t> segment(const PartitionPlan& plan, std::size_t k, std::size_t n) {
    const auto begin = plan.cuts[k];
    const auto end = k + 1 < plan.cuts.size() ? plan.cuts[k + 1] : n;
    return {begin, end};
}

// Single-consumer queue of frontier messages; nullopt closes the stream.
class Inbox {
public:
    void push(std::optional<std::string> message) {
        {
            std::lock_guard lock(mutex_);
            queue_.push_back(std::move(message));
        }
        ready_.notify_one();
    }

    std::optional<std::string> pop() {
        std::unique_lock lock(mutex_);
        ready_.wait(lock, [&] { return !queue_.empty(); });
        auto message = std::move(queue_.front());
        queue_.pop_front();
        return message;
    }

private:
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<std::optional<std::string>> queue_;
};

}  // namespace

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::single: return "single";
        case Strategy::regex: return "regex";
        case Strategy::lazy: return "lazy";
        case Strategy::chained: return "chained";
    }
    return "?";
}

Strategy parse_strategy(std::string_view name) {
    for (const auto s : {Strategy::single, Strategy::regex, Strategy::lazy, Strategy::chained}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw Error("unknown strategy '" + std::string(name) + "'");
}

PartitionPlan PartitionPlan::single() { return {}; }

PartitionPlan PartitionPlan::round_robin(const Pfsm& pfsm, std::size_t workers) {
    PartitionPlan plan;
    plan.strategy = Strategy::regex;
    plan.workers = std::max<std::size_t>(workers, 1);
    for (std::size_t l = 0; l < pfsm.pattern_count(); ++l) {
        plan.assignment.push_back(l % plan.workers);
    }
    return plan;
}

PartitionPlan PartitionPlan::even_segments(Strategy strategy, std::size_t n, std::size_t workers) {
    PartitionPlan plan;
    plan.strategy = strategy;
    plan.workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    for (std::size_t k = 0; k < plan.workers; ++k) {
        plan.cuts.push_back(n * k / plan.workers);
    }
    return plan;
}

void check_plan(const PartitionPlan& plan, const Pfsm& pfsm, std::size_t n) {
    if (plan.workers == 0) {
        throw Error("partition plan needs at least one worker");
    }
    switch (plan.strategy) {
        case Strategy::single:
            return;
        case Strategy::regex:
            if (plan.assignment.size() != pfsm.pattern_count()) {
                throw Error("partition plan leaves labels unassigned");
            }
            for (const auto w : plan.assignment) {
                if (w >= plan.workers) {
                    throw Error("label assigned to a nonexistent worker");
                }
            }
            return;
        case Strategy::lazy:
        case Strategy::chained:
            if (plan.cuts.empty() || plan.cuts.front() != 0) {
                throw Error("malformed segments: the first segment must start at 0");
            }
            if (plan.cuts.size() != plan.workers) {
                throw Error("malformed segments: one segment per worker required");
            }
            for (std::size_t k = 1; k < plan.cuts.size(); ++k) {
                if (plan.cuts[k] <= plan.cuts[k - 1] || plan.cuts[k] >= n) {
                    throw Error("malformed segments: cut points must ascend strictly inside the input");
                }
            }
            return;
    }
}

ParallelResult run_regex_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                                     const ParallelOptions& options) {
    if (plan.strategy != Strategy::regex) {
        throw Error("plan is not a regex partition");
    }
    check_plan(plan, pfsm, input.size());

    std::vector<Pfsm> parts(plan.workers);
    std::vector<std::vector<LabelId>> global(plan.workers);
    for (LabelId l = 0; l < pfsm.pattern_count(); ++l) {
        const auto w = plan.assignment[l];
        parts[w].add(pfsm.labels().text(l), pfsm.extract(l));
        global[w].push_back(l);
    }

    std::vector<Collector> collectors(plan.workers);
    std::vector<WorkerReport> reports(plan.workers);
    for_each_worker(plan.workers, options.scheduler, [&](std::size_t k) {
        reports[k].resident_states = parts[k].live_state_count();
        if (parts[k].pattern_count() == 0) {
            return;
        }
        auto& c = collectors[k];
        c.keep = options.collect;
        run(parts[k], input, [&](const Match& m) {
            ++c.count;
            if (c.keep) {
                c.matches.push_back(make_match(global[k][m.label], m.start, m.end));
            }
        }, options.engine);
    });
    return gather(collectors, std::move(reports));
}

ParallelResult run_lazy_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                                    const ParallelOptions& options) {
    if (plan.strategy != Strategy::lazy) {
        throw Error("plan is not a lazy data partition");
    }
    check_plan(plan, pfsm, input.size());

    std::vector<Collector> collectors(plan.workers);
    std::vector<WorkerReport> reports(plan.workers);
    for_each_worker(plan.workers, options.scheduler, [&](std::size_t k) {
        const auto [begin, end] = segment(plan, k, input.size());
        collectors[k].keep = options.collect;
        reports[k].resident_states = pfsm.live_state_count();
        run_segment(pfsm, input.substr(begin), begin, {begin, end}, {}, collectors[k].sink(), options.engine);
    });
    return gather(collectors, std::move(reports));
}

ParallelResult run_chained_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                                       const ParallelOptions& options) {
    if (plan.strategy != Strategy::chained) {
        throw Error("plan is not a chained data partition");
    }
    check_plan(plan, pfsm, input.size());

    const auto workers = plan.workers;
    std::vector<Collector> collectors(workers);
    std::vector<WorkerReport> reports(workers);
    std::vector<Inbox> inboxes(workers);

    for_each_worker(workers, options.scheduler, [&](std::size_t k) {
        const auto [begin, end] = segment(plan, k, input.size());
        const auto bytes = input.substr(begin, end - begin);
        auto& report = reports[k];
        collectors[k].keep = options.collect;
        const auto sink = collectors[k].sink();
        report.resident_states = pfsm.live_state_count();
        const bool has_next = k + 1 < workers;
        // Close the successor's stream even when this worker fails.
        struct CloseOnExit {
            Inbox* next;
            ~CloseOnExit() {
                if (next) {
                    next->push(std::nullopt);
                }
            }
        } close_next{has_next ? &inboxes[k + 1] : nullptr};

        auto forward = [&](const ActiveSet& carry) {
            if (has_next && !carry.empty()) {
                report.frontier_pairs.push_back(carry.pair_count());
                inboxes[k + 1].push(to_wire(carry));
            }
        };

        forward(run_segment(pfsm, bytes, begin, {begin, end}, {}, sink, options.engine).carry_out);
        if (k > 0) {
            while (auto message = inboxes[k].pop()) {
                ++report.frontiers_received;
                const auto carry = active_set_from_wire(*message);
                forward(run_segment(pfsm, bytes, begin, {begin, begin}, carry, sink, options.engine).carry_out);
            }
        }
    });
    return gather(collectors, std::move(reports));
}

ParallelResult run_partitioned(const Pfsm& pfsm, std::string_view input, const PartitionPlan& plan,
                               const ParallelOptions& options) {
    switch (plan.strategy) {
        case Strategy::single: {
            std::vector<Collector> collectors(1);
            collectors[0].keep = options.collect;
            run(pfsm, input, collectors[0].sink(), options.engine);
            std::vector<WorkerReport> reports(1);
            reports[0].resident_states = pfsm.live_state_count();
            return gather(collectors, std::move(reports));
        }
        case Strategy::regex:
            return run_regex_partitioned(pfsm, input, plan, options);
        case Strategy::lazy:
            return run_lazy_partitioned(pfsm, input, plan, options);
        case Strategy::chained:
            return run_chained_partitioned(pfsm, input, plan, options);
    }
    throw Error("unknown strategy");
}

}  // namespace pfsm
