#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfsm/pfsm.hpp"

namespace pfsm {

/// Start position attached to an active state.
using Tag = std::uint32_t;

inline constexpr std::size_t kMaxInputLength = std::numeric_limits<Tag>::max();

/// One occurrence: `label` matched input[start..end], both inclusive.
/// Ordered by end, then start, then label.
struct Match {
    std::size_t end = 0;
    std::size_t start = 0;
    LabelId label = 0;

    auto operator<=>(const Match&) const = default;
};

inline Match make_match(LabelId label, std::size_t start, std::size_t end) { return {end, start, label}; }

/// Tagged active states, sorted by state id; every tag list is sorted and
/// non-empty.
struct ActiveSet {
    std::uint64_t generation = 0;
    std::vector<std::pair<StateId, std::vector<Tag>>> entries;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t pair_count() const;

    bool operator==(const ActiveSet&) const = default;
};

/// `PFSM-ACTIVE v1` wire form used for chained-partition frontiers.
std::string to_wire(const ActiveSet& active);
ActiveSet active_set_from_wire(std::string_view text);

struct EngineStats {
    std::size_t n = 0;      ///< symbols processed
    std::size_t r = 0;      ///< registered patterns
    std::size_t m_max = 0;  ///< largest per-pattern state count
    std::size_t s = 256;    ///< alphabet size
    /// Peak active (state, tag) pairs of each processed cycle.
    std::vector<std::size_t> active_pairs;
    std::size_t matches = 0;

    std::size_t peak_active_pairs() const;
};

using MatchSink = std::function<void(const Match&)>;

struct EngineOptions {
    bool dedupe = true;
    bool prune_dead = true;
};

/// Positions at which the start state is re-activated: [begin, end).
struct ReinitWindow {
    std::size_t begin = 0;
    std::size_t end = std::numeric_limits<std::size_t>::max();

    bool contains(std::size_t position) const noexcept { return position >= begin && position < end; }
};

enum class TracePhase : std::uint8_t {
    reinitialized,   ///< start state tagged with the current position
    epsilon_closed,  ///< start region closed over epsilon edges
    applied,         ///< symbol consumed, successors tagged and closed (before pruning)
};

using TraceFn = std::function<void(std::size_t position, TracePhase phase, const ActiveSet& active)>;

/// Online multi-pattern matcher over one PFSM generation.
///
/// Each cycle: tag the start state with the current position (when inside
/// the reinitialisation window), close the start region over epsilon edges,
/// follow transitions on the current byte, then close the reached states.
/// Every final state holding tag t at cycle i yields Match(label, t, i),
/// emitted before the next byte is read. Zero-length matches of nullable
/// patterns are never reported.
class Engine {
public:
    explicit Engine(std::shared_ptr<const Pfsm> pfsm, EngineOptions options = {});

    const Pfsm& pfsm() const noexcept { return *pfsm_; }
    std::size_t position() const noexcept { return position_; }
    bool idle() const noexcept { return active_.empty(); }
    const EngineStats& stats() const noexcept { return stats_; }

    void set_window(ReinitWindow window) noexcept { window_ = window; }
    void set_trace(TraceFn trace) { trace_ = std::move(trace); }

    /// Processes `bytes` as input positions position()..position()+size-1.
    /// With `stop_when_drained`, returns early once no state is active and no
    /// later position can reinitialise. Returns the number of bytes consumed.
    std::size_t feed(std::string_view bytes, const MatchSink& sink, bool stop_when_drained = false);

    /// Drops all active states and moves to `position`.
    void reset(std::size_t position = 0);

    ActiveSet snapshot() const;
    /// Replaces the run state. Throws GenerationMismatch when `active` was
    /// taken against another generation, pfsm::Error when it is malformed.
    void restore(const ActiveSet& active, std::size_t position);

    /// Switches to a newer generation of the same PFSM lineage. Active
    /// states of removed patterns are dropped; added patterns join at the
    /// next reinitialisation.
    void rebind(std::shared_ptr<const Pfsm> pfsm);

private:
    void prepare();
    void cycle(std::uint8_t byte, const MatchSink& sink);
    void collect_matches(std::size_t end, Tag lowest, std::size_t hits);
    ActiveSet view(const std::vector<StateId>& list, const std::vector<std::vector<Tag>>& tags) const;

    std::shared_ptr<const Pfsm> pfsm_;
    EngineOptions options_;
    ReinitWindow window_;
    TraceFn trace_;
    std::size_t position_ = 0;
    EngineStats stats_;

    // Per-generation tables.
    std::vector<StateSet> closure_;  // empty when a state has no epsilon edges
    StateSet start_region_;
    std::vector<bool> has_bytes_;

    // Run state: tag lists indexed by state id plus the list of active ids.
    std::vector<std::vector<Tag>> tags_;
    std::vector<StateId> active_;
    std::vector<std::vector<Tag>> next_tags_;
    std::vector<StateId> next_active_;
    std::vector<Tag> scratch_;
    std::vector<Match> cycle_matches_;
    std::vector<StateId> cycle_finals_;
    struct Cursor {
        const Tag* next;
        const Tag* last;
        LabelId label;
    };
    std::vector<Cursor> cursors_;
};

/// Runs `pfsm` over `input` from position 0 with reinitialisation at every position.
EngineStats run(const Pfsm& pfsm, std::string_view input, const MatchSink& sink, EngineOptions options = {});

/// Convenience wrapper collecting the emitted matches in emission order.
std::vector<Match> run_collect(const Pfsm& pfsm, std::string_view input, EngineOptions options = {});

struct SegmentResult {
    EngineStats stats;
    ActiveSet carry_out;
};

/// Runs `input`, whose first byte sits at absolute position `offset`,
/// seeded with `carry_in` and reinitialising only inside `window`.
/// Processing stops at the end of `input` or once nothing can match any more.
SegmentResult run_segment(const Pfsm& pfsm, std::string_view input, std::size_t offset, ReinitWindow window,
                          const ActiveSet& carry_in, const MatchSink& sink, EngineOptions options = {});

/// `label<TAB>start<TAB>end<TAB>matched-bytes`
std::string format_tsv(const Match& match, const LabelRegistry& labels, std::string_view input);
/// {"label":..,"start":..,"end":..,"match":..}; invalid UTF-8 is replaced.
std::string format_jsonl(const Match& match, const LabelRegistry& labels, std::string_view input);

}  // namespace pfsm
