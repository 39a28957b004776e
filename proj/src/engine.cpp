#include "pfsm/engine.hpp"

#include <algorithm>

#include "pfsm/error.hpp"

namespace pfsm {

namespace {

// dst := dst ∪ src, both sorted.
void merge_tags(std::vector<Tag>& dst, const std::vector<Tag>& src, std::vector<Tag>& scratch) {
    if (src.empty()) {
        return;
    }
    if (dst.empty()) {
        dst.assign(src.begin(), src.end());
    } else if (dst.back() < src.front()) {
        dst.insert(dst.end(), src.begin(), src.end());
    } else {
        scratch.clear();
        std::set_union(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(scratch));
        dst.swap(scratch);
    }
}

std::shared_ptr<const Pfsm> borrow(const Pfsm& pfsm) {
    // Aliasing constructor with no owner: the caller keeps `pfsm` alive.
    return std::shared_ptr<const Pfsm>(std::shared_ptr<const Pfsm>{}, &pfsm);
}

}  // namespace

std::size_t ActiveSet::pair_count() const {
    std::size_t n = 0;
    for (const auto& [state, tags] : entries) {
        n += tags.size();
    }
    return n;
}

std::size_t EngineStats::peak_active_pairs() const {
    return active_pairs.empty() ? 0 : *std::max_element(active_pairs.begin(), active_pairs.end());
}

Engine::Engine(std::shared_ptr<const Pfsm> pfsm, EngineOptions options)
    : pfsm_(std::move(pfsm)), options_(options) {
    if (!pfsm_) {
        throw Error("engine needs a PFSM");
    }
    prepare();
}

void Engine::prepare() {
    const auto& a = pfsm_->automaton();
    const auto n = a.size();
    closure_.assign(n, {});
    has_bytes_.assign(n, false);
    for (StateId s = 0; s < n; ++s) {
        if (!a.epsilons(s).empty()) {
            const StateId seed[] = {s};
            closure_[s] = epsilon_closure(a, seed);
        }
        has_bytes_[s] = !a.transitions(s).empty();
    }
    const StateId seed[] = {pfsm_->start()};
    start_region_ = epsilon_closure(a, seed);

    tags_.resize(n);
    next_tags_.resize(n);
    stats_.r = pfsm_->pattern_count();
    stats_.m_max = pfsm_->max_pattern_states();
}

void Engine::reset(std::size_t position) {
    for (const auto s : active_) {
        tags_[s].clear();
    }
    active_.clear();
    position_ = position;
}

ActiveSet Engine::view(const std::vector<StateId>& list, const std::vector<std::vector<Tag>>& tags) const {
    ActiveSet out;
    out.generation = pfsm_->generation();
    for (const auto s : list) {
        if (!tags[s].empty()) {
            out.entries.emplace_back(s, tags[s]);
        }
    }
    std::sort(out.entries.begin(), out.entries.end());
    return out;
}

ActiveSet Engine::snapshot() const { return view(active_, tags_); }

void Engine::restore(const ActiveSet& active, std::size_t position) {
    if (active.generation != pfsm_->generation()) {
        throw GenerationMismatch("active set of generation " + std::to_string(active.generation) +
                                 " used with generation " + std::to_string(pfsm_->generation()));
    }
    for (const auto& [state, tags] : active.entries) {
        if (!pfsm_->is_live(state)) {
            throw Error("active set references unknown state " + std::to_string(state));
        }
        if (tags.empty() || !std::is_sorted(tags.begin(), tags.end()) ||
            std::adjacent_find(tags.begin(), tags.end()) != tags.end()) {
            throw Error("active set tags of state " + std::to_string(state) + " are not a sorted set");
        }
        if (tags.back() >= position) {
            throw Error("active set tag lies beyond the restore position");
        }
    }
    reset(position);
    for (const auto& [state, tags] : active.entries) {
        if (tags_[state].empty()) {
            active_.push_back(state);
        }
        merge_tags(tags_[state], tags, scratch_);
    }
}

void Engine::rebind(std::shared_ptr<const Pfsm> pfsm) {
    if (!pfsm) {
        throw Error("engine needs a PFSM");
    }
    if (pfsm->generation() < pfsm_->generation()) {
        throw GenerationMismatch("cannot rebind to an older generation");
    }
    pfsm_ = std::move(pfsm);
    const auto& a = pfsm_->automaton();
    std::vector<StateId> kept;
    for (const auto s : active_) {
        if (s < a.size() && pfsm_->is_live(s)) {
            kept.push_back(s);
        } else if (s < tags_.size()) {
            tags_[s].clear();
        }
    }
    active_.swap(kept);
    prepare();
}

std::size_t Engine::feed(std::string_view bytes, const MatchSink& sink, bool stop_when_drained) {
    if (position_ + bytes.size() > kMaxInputLength) {
        throw Error("input longer than the addressable tag range");
    }
    std::size_t consumed = 0;
    for (const char c : bytes) {
        const bool reinit_ahead = window_.begin < window_.end && position_ < window_.end;
        if (stop_when_drained && active_.empty() && !reinit_ahead) {
            break;
        }
        cycle(static_cast<std::uint8_t>(c), sink);
        ++consumed;
    }
    return consumed;
}

void Engine::cycle(std::uint8_t byte, const MatchSink& sink) {
    const auto& a = pfsm_->automaton();
    const auto i = position_;
    const auto tag = static_cast<Tag>(i);

    std::size_t pairs = 0;
    for (const auto s : active_) {
        pairs += tags_[s].size();
    }

    // Steps 1-2: reinitialise and close the start region. Tags already
    // present are all < i, so appending keeps every list sorted.
    if (window_.contains(i)) {
        auto activate = [&](StateId s) {
            if (tags_[s].empty()) {
                active_.push_back(s);
            }
            if (tags_[s].empty() || tags_[s].back() != tag) {
                tags_[s].push_back(tag);
                ++pairs;
            }
        };
        activate(pfsm_->start());
        if (trace_) {
            trace_(i, TracePhase::reinitialized, view(active_, tags_));
        }
        for (const auto s : start_region_) {
            activate(s);
        }
    }
    if (trace_) {
        trace_(i, TracePhase::epsilon_closed, view(active_, tags_));
    }

    // Steps 3-4: follow transitions on `byte`.
    for (const auto s : active_) {
        for (const auto& t : a.transitions(s, byte)) {
            auto& dst = next_tags_[t.target];
            if (dst.empty()) {
                next_active_.push_back(t.target);
            }
            merge_tags(dst, tags_[s], scratch_);
        }
    }
    // Close the reached states over epsilon edges within the same cycle so
    // that final states reached this way end at position i.
    const auto reached = next_active_.size();
    for (std::size_t k = 0; k < reached; ++k) {
        const auto t = next_active_[k];
        for (const auto u : closure_[t]) {
            if (u == t) {
                continue;
            }
            auto& dst = next_tags_[u];
            if (dst.empty()) {
                next_active_.push_back(u);
            }
            merge_tags(dst, next_tags_[t], scratch_);
        }
    }

    std::size_t applied_pairs = 0;
    std::size_t hits = 0;
    Tag lowest = tag;
    cycle_finals_.clear();
    for (const auto u : next_active_) {
        const auto& tags = next_tags_[u];
        applied_pairs += tags.size();
        if (a.is_final(u)) {
            cycle_finals_.push_back(u);
            hits += tags.size();
            lowest = std::min(lowest, tags.front());
        }
    }
    collect_matches(i, lowest, hits);
    stats_.active_pairs.push_back(std::max(pairs, applied_pairs));
    stats_.matches += cycle_matches_.size();
    if (trace_) {
        trace_(i, TracePhase::applied, view(next_active_, next_tags_));
    }
    for (const auto& m : cycle_matches_) {
        sink(m);
    }

    // States without byte transitions can never contribute again.
    if (options_.prune_dead) {
        std::erase_if(next_active_, [&](StateId u) {
            if (has_bytes_[u]) {
                return false;
            }
            next_tags_[u].clear();
            return true;
        });
    }
    for (const auto s : active_) {
        tags_[s].clear();
    }
    active_.clear();
    tags_.swap(next_tags_);
    active_.swap(next_active_);
    ++position_;
    ++stats_.n;
}

void Engine::collect_matches(std::size_t end, Tag lowest, std::size_t hits) {
    const auto& a = pfsm_->automaton();
    cycle_matches_.clear();
    if (cycle_finals_.empty()) {
        return;
    }
    if (cycle_finals_.size() == 1) {
        const auto u = cycle_finals_.front();
        const auto label = *a.label(u);
        for (const auto t : next_tags_[u]) {
            cycle_matches_.push_back(make_match(label, t, end));
        }
        return;
    }
    std::sort(cycle_finals_.begin(), cycle_finals_.end(), [&](StateId x, StateId y) {
        return std::pair(*a.label(x), x) < std::pair(*a.label(y), y);
    });
    // Each final contributes a run sorted by start. When the runs are dense,
    // sweep the start positions and advance every run's cursor in label
    // order; otherwise fall back to sorting.
    const std::size_t range = end - lowest + 1;
    if (range * cycle_finals_.size() <= 4 * hits + 64) {
        cursors_.clear();
        for (const auto u : cycle_finals_) {
            const auto& tags = next_tags_[u];
            cursors_.push_back({tags.data(), tags.data() + tags.size(), *a.label(u)});
        }
        cycle_matches_.reserve(hits);
        for (std::size_t t = lowest; t <= end; ++t) {
            for (auto& c : cursors_) {
                if (c.next != c.last && *c.next == t) {
                    cycle_matches_.push_back(make_match(c.label, t, end));
                    ++c.next;
                }
            }
        }
    } else {
        for (const auto u : cycle_finals_) {
            const auto label = *a.label(u);
            for (const auto t : next_tags_[u]) {
                cycle_matches_.push_back(make_match(label, t, end));
            }
        }
        std::sort(cycle_matches_.begin(), cycle_matches_.end());
    }
    // Repeats need two finals of one pattern; runs are label-sorted, so
    // checking neighbours suffices.
    bool shared_label = false;
    for (std::size_t k = 1; k < cycle_finals_.size(); ++k) {
        shared_label = shared_label || a.label(cycle_finals_[k]) == a.label(cycle_finals_[k - 1]);
    }
    if (options_.dedupe && shared_label) {
        cycle_matches_.erase(std::unique(cycle_matches_.begin(), cycle_matches_.end()), cycle_matches_.end());
    }
}

EngineStats run(const Pfsm& pfsm, std::string_view input, const MatchSink& sink, EngineOptions options) {
    Engine engine(borrow(pfsm), options);
    engine.feed(input, sink);
    return engine.stats();
}

std::vector<Match> run_collect(const Pfsm& pfsm, std::string_view input, EngineOptions options) {
    std::vector<Match> out;
    run(pfsm, input, [&](const Match& m) { out.push_back(m); }, options);
    return out;
}

SegmentResult run_segment(const Pfsm& pfsm, std::string_view input, std::size_t offset, ReinitWindow window,
                          const ActiveSet& carry_in, const MatchSink& sink, EngineOptions options) {
    if (window.begin < window.end && (window.begin < offset || window.end > offset + input.size())) {
        throw Error("reinitialisation window lies outside the segment");
    }
    Engine engine(borrow(pfsm), options);
    engine.set_window(window);
    if (!carry_in.empty()) {
        engine.restore(carry_in, offset);
    } else {
        engine.reset(offset);
    }
    engine.feed(input, sink, true);
    return {engine.stats(), engine.snapshot()};
}

}  // namespace pfsm
