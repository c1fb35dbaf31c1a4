// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Token-passing antenna selection engine. Places model antennas, a token
// marks an active antenna, and a token may cross an edge only when doing so
// strictly increases the capacity of the neighbourhood governing that move.
// Firing rules:
//   1. a move is possible only across an edge with a token in exactly one
//      of the two places;
//   2. the move occurs only if the neighbourhood capacity with the token
//      moved exceeds the capacity with the token in place;
//   3. among several possible moves from one place, the largest capacity
//      gain wins (ties go to the lowest destination place id);
//   4. passes have no designated order — each pass visits places in a
//      seeded random order, updating the marking as it goes — and passes
//      repeat until a full pass fires nothing.
// Token count is conserved and no place ever holds more than one token.

#pragma once

#include "rpnsel/flops.hpp"
#include "rpnsel/objective.hpp"
#include "rpnsel/rng.hpp"
#include "rpnsel/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpnsel {

// Which token count enters the N_TS power scaling of a guard evaluation:
// the tokens inside the governing neighbourhood (default; both sides of a
// move then share the same scaling) or the global selection size.
enum class GuardScaling { kLocalTokens, kGlobalTokens };

struct RpnOptions {
    GuardScaling scaling = GuardScaling::kLocalTokens;
    double fire_tolerance = 1e-12;  // minimum gain to fire, suppresses FP chatter
    int max_passes = 20;
};

// The marking: one boolean flag per place. Token count never changes over a
// state's lifetime.
struct SelectionState {
    const RpnTopology* topology = nullptr;
    std::vector<char> token;
    int token_count = 0;

    bool has_token(int place) const { return token.at(static_cast<std::size_t>(place)) != 0; }

    std::vector<int> selected_places() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(token_count));
        for (int p = 0; p < static_cast<int>(token.size()); ++p)
            if (token[static_cast<std::size_t>(p)]) out.push_back(p);
        return out;
    }

    // Antenna rows of the channel tensor, sorted ascending.
    std::vector<int> selected_antennas() const {
        std::vector<int> out = selected_places();
        for (int& p : out) p = topology->antenna(p);
        std::sort(out.begin(), out.end());
        return out;
    }

    void check() const {
        if (topology == nullptr || static_cast<int>(token.size()) != topology->n_places)
            throw std::logic_error("SelectionState: marking size mismatch");
        int count = 0;
        for (char c : token) count += (c != 0);
        if (count != token_count)
            throw std::logic_error("SelectionState: token_count does not match marking");
    }
};

struct Transition {
    int from = -1;
    int to = -1;
    std::vector<int> neighbourhood;
    double delta = 0.0;  // capacity gain, bits/s/Hz
};

struct FiringEvent {
    int pass = 0;
    int from = -1;
    int to = -1;
    double delta = 0.0;
};

struct RunStats {
    int passes = 0;
    int firings = 0;
    double initial_capacity = 0.0;
    double final_capacity = 0.0;
    std::uint64_t flops = 0;
    bool converged = false;
    std::vector<FiringEvent> trace;
};

// Uniformly random marking of n_tokens distinct places.
inline SelectionState init_state(const RpnTopology& topology, int n_tokens, std::uint64_t seed) {
    if (n_tokens < 1 || n_tokens > topology.n_places)
        throw std::invalid_argument("init_state: n_tokens must lie in [1, n_places]");
    std::vector<int> places(static_cast<std::size_t>(topology.n_places));
    for (int p = 0; p < topology.n_places; ++p) places[static_cast<std::size_t>(p)] = p;
    std::mt19937_64 rng = make_rng(seed);
    SelectionState s;
    s.topology = &topology;
    s.token.assign(static_cast<std::size_t>(topology.n_places), 0);
    s.token_count = n_tokens;
    for (int i = 0; i < n_tokens; ++i) {
        std::uniform_int_distribution<int> pick(i, topology.n_places - 1);
        std::swap(places[static_cast<std::size_t>(i)], places[static_cast<std::size_t>(pick(rng))]);
        s.token[static_cast<std::size_t>(places[static_cast<std::size_t>(i)])] = 1;
    }
    return s;
}

namespace detail {

// Capacity of the token-holding places inside one neighbourhood, with the
// token optionally relocated from one member to another. An empty holder
// set has capacity zero.
inline double neighbourhood_capacity(const SelectionState& s, const ChannelTensor& h, double rho,
                                     std::span<const int> neighbourhood, int moved_from,
                                     int moved_to, const RpnOptions& opts, FlopLedger* ledger) {
    std::vector<int> antennas;
    antennas.reserve(neighbourhood.size());
    for (int p : neighbourhood) {
        const bool holds = (p == moved_to) ? true : (p == moved_from ? false : s.has_token(p));
        if (holds) antennas.push_back(s.topology->antenna(p));
    }
    if (antennas.empty()) return 0.0;
    std::sort(antennas.begin(), antennas.end());
    const int n_ts_override =
        opts.scaling == GuardScaling::kGlobalTokens ? s.token_count : 0;
    return selection_objective(h, antennas, rho, ledger, "rpn", "guard", n_ts_override);
}

inline void require_dims(const SelectionState& s, const ChannelTensor& h, const SnrConfig& snr) {
    if (s.topology == nullptr) throw std::invalid_argument("rpn: state has no topology");
    if (h.n_tx() != s.topology->n_places)
        throw std::invalid_argument("rpn: channel antenna dimension " + std::to_string(h.n_tx()) +
                                    " != n_places " + std::to_string(s.topology->n_places));
    if (snr.n_users != h.n_users())
        throw std::invalid_argument("rpn: SnrConfig n_users does not match channel tensor");
}

// Best strictly-improving move out of `from` against the current marking.
inline std::optional<Transition> best_move(const SelectionState& s, const ChannelTensor& h,
                                           const SnrConfig& snr, int from, const RpnOptions& opts,
                                           FlopLedger* ledger) {
    std::optional<Transition> best;
    for (int to : s.topology->neighbours(from)) {
        if (s.has_token(to)) continue;
        const std::vector<int>& nb = s.topology->neighbourhood(from, to);
        const double before = neighbourhood_capacity(s, h, snr.rho, nb, -1, -1, opts, ledger);
        const double after = neighbourhood_capacity(s, h, snr.rho, nb, from, to, opts, ledger);
        const double delta = after - before;
        // Ascending destination order plus strict comparison implements the
        // lowest-destination tie break.
        if (delta > opts.fire_tolerance && (!best || delta > best->delta))
            best = Transition{from, to, nb, delta};
    }
    return best;
}

}  // namespace detail

// All moves permitted by rules 1 and 2 against the current marking, in
// (from, to) ascending order.
inline std::vector<Transition> enabled_transitions(const SelectionState& s, const ChannelTensor& h,
                                                   const SnrConfig& snr,
                                                   const RpnOptions& opts = {},
                                                   FlopLedger* ledger = nullptr) {
    detail::require_dims(s, h, snr);
    std::vector<Transition> out;
    for (int from = 0; from < s.topology->n_places; ++from) {
        if (!s.has_token(from)) continue;
        for (int to : s.topology->neighbours(from)) {
            if (s.has_token(to)) continue;
            const std::vector<int>& nb = s.topology->neighbourhood(from, to);
            const double before =
                detail::neighbourhood_capacity(s, h, snr.rho, nb, -1, -1, opts, ledger);
            const double after =
                detail::neighbourhood_capacity(s, h, snr.rho, nb, from, to, opts, ledger);
            const double delta = after - before;
            if (delta > opts.fire_tolerance) out.push_back({from, to, nb, delta});
        }
    }
    return out;
}

// One asynchronous pass: places are visited in a seeded random order; each
// token-holding place fires its best improving move immediately, so later
// visits see the updated marking. Returns the events fired during the pass,
// or nullopt when the pass fired nothing (a fixpoint).
inline std::optional<std::vector<FiringEvent>> step(SelectionState& s, const ChannelTensor& h,
                                                    const SnrConfig& snr, std::mt19937_64& rng,
                                                    int pass_index = 0, const RpnOptions& opts = {},
                                                    FlopLedger* ledger = nullptr) {
    detail::require_dims(s, h, snr);
    std::vector<int> order(static_cast<std::size_t>(s.topology->n_places));
    for (int p = 0; p < s.topology->n_places; ++p) order[static_cast<std::size_t>(p)] = p;
    for (int i = s.topology->n_places - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
    }

    std::vector<FiringEvent> fired;
    for (int p : order) {
        if (!s.has_token(p)) continue;
        const std::optional<Transition> move = detail::best_move(s, h, snr, p, opts, ledger);
        if (!move) continue;
        s.token[static_cast<std::size_t>(move->from)] = 0;
        s.token[static_cast<std::size_t>(move->to)] = 1;
        fired.push_back({pass_index, move->from, move->to, move->delta});
    }
    if (fired.empty()) return std::nullopt;
    return fired;
}

// Repeated passes until a fixpoint or the pass budget runs out. The stats
// record every firing, the full-array objective before and after, and the
// flops this run spent; the run's ledger activity is merged into `ledger`.
inline RunStats run_to_fixpoint(SelectionState& s, const ChannelTensor& h, const SnrConfig& snr,
                                std::uint64_t scheduler_seed, FlopLedger& ledger,
                                const RpnOptions& opts = {}) {
    if (opts.max_passes < 1) throw std::invalid_argument("run_to_fixpoint: max_passes must be >= 1");
    detail::require_dims(s, h, snr);

    FlopLedger local;
    RunStats stats;
    stats.initial_capacity =
        selection_objective(h, s.selected_antennas(), snr.rho, &local, "rpn", "objective");

    std::mt19937_64 rng = make_rng(scheduler_seed);
    for (int pass = 1; pass <= opts.max_passes; ++pass) {
        stats.passes = pass;
        const auto fired = step(s, h, snr, rng, pass, opts, &local);
        if (!fired) {
            stats.converged = true;
            break;
        }
        stats.firings += static_cast<int>(fired->size());
        stats.trace.insert(stats.trace.end(), fired->begin(), fired->end());
    }

    stats.final_capacity =
        selection_objective(h, s.selected_antennas(), snr.rho, &local, "rpn", "objective");
    stats.flops = local.total_flops();
    ledger.merge(local);
    return stats;
}

struct RaceResult {
    SelectionState best;
    int best_index = -1;
    std::vector<RunStats> stats;
    std::vector<std::vector<int>> member_selections;  // final antennas per member
};

// k independent runs from distinct seeded initial markings; the winner is
// the final state with the largest full-selection objective (ties go to the
// lowest member index).
inline RaceResult race(const RpnTopology& topology, const ChannelTensor& h, const SnrConfig& snr,
                       int n_tokens, int k, std::span<const std::uint64_t> seeds,
                       FlopLedger& ledger, const RpnOptions& opts = {}) {
    if (k < 1) throw std::invalid_argument("race: k must be >= 1");
    if (static_cast<int>(seeds.size()) < k)
        throw std::invalid_argument("race: need at least k seeds");

    RaceResult result;
    double best_score = 0.0;
    for (int i = 0; i < k; ++i) {
        SelectionState s = init_state(topology, n_tokens, derive_seed(seeds[static_cast<std::size_t>(i)], 0));
        RunStats stats = run_to_fixpoint(s, h, snr, derive_seed(seeds[static_cast<std::size_t>(i)], 1),
                                         ledger, opts);
        const double score = stats.final_capacity;
        if (result.best_index < 0 || score > best_score) {
            best_score = score;
            result.best_index = i;
            result.best = s;
        }
        result.member_selections.push_back(s.selected_antennas());
        result.stats.push_back(std::move(stats));
    }
    return result;
}

// Undo a firing record: walking the trace backwards and moving each token
// to -> from reconstructs the marking the run started from.
inline SelectionState replay_backwards(const SelectionState& final_state,
                                       std::span<const FiringEvent> trace) {
    SelectionState s = final_state;
    for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
        if (!s.has_token(it->to) || s.has_token(it->from))
            throw std::logic_error("replay_backwards: trace inconsistent with marking at pass " +
                                   std::to_string(it->pass));
        s.token[static_cast<std::size_t>(it->to)] = 0;
        s.token[static_cast<std::size_t>(it->from)] = 1;
    }
    return s;
}

// Line-per-event trace: "pass from to delta".
inline void save_trace(std::span<const FiringEvent> trace, std::ostream& os) {
    char buf[64];
    for (const FiringEvent& e : trace) {
        std::snprintf(buf, sizeof buf, "%.17g", e.delta);
        os << e.pass << ' ' << e.from << ' ' << e.to << ' ' << buf << '\n';
    }
}

inline std::vector<FiringEvent> load_trace(std::istream& is) {
    std::vector<FiringEvent> out;
    FiringEvent e;
    while (is >> e.pass >> e.from >> e.to >> e.delta) out.push_back(e);
    return out;
}

}  // namespace rpnsel
