// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Comparison algorithms: centralised greedy, uniform random, exhaustive
// search (small-instance optimality oracle) and the distributed
// nearest-neighbours membership rule.

#pragma once

#include "rpnsel/flops.hpp"
#include "rpnsel/objective.hpp"
#include "rpnsel/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpnsel {

// A set of distinct antenna indices, kept sorted.
struct Selection {
    std::vector<int> antennas;

    Selection() = default;
    explicit Selection(std::vector<int> idx) : antennas(std::move(idx)) {
        std::sort(antennas.begin(), antennas.end());
        check();
    }

    int size() const { return static_cast<int>(antennas.size()); }

    void check() const {
        if (antennas.empty()) throw std::invalid_argument("Selection: must contain >= 1 antenna");
        for (std::size_t i = 0; i < antennas.size(); ++i) {
            if (antennas[i] < 0) throw std::invalid_argument("Selection: negative antenna index");
            if (i > 0 && antennas[i] == antennas[i - 1])
                throw std::invalid_argument("Selection: duplicate antenna index");
        }
    }
};

// Adds, per round, the antenna whose inclusion maximises the capacity of the
// augmented set (ties to the lowest index). Each candidate is evaluated by
// full recomputation.
inline Selection greedy_select(const ChannelTensor& h, int n, const SnrConfig& snr,
                               FlopLedger& ledger) {
    const int n_tx = h.n_tx();
    if (n < 1 || n > n_tx) throw std::invalid_argument("greedy_select: n must lie in [1, N_T]");

    std::vector<int> selected;
    std::vector<char> in_set(static_cast<std::size_t>(n_tx), 0);
    std::vector<int> trial;
    for (int round = 0; round < n; ++round) {
        int best = -1;
        double best_cap = -std::numeric_limits<double>::infinity();
        for (int cand = 0; cand < n_tx; ++cand) {
            if (in_set[static_cast<std::size_t>(cand)]) continue;
            trial = selected;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), cand), cand);
            const double cap = selection_objective(h, trial, snr.rho, &ledger, "greedy", "candidate");
            if (cap > best_cap) {
                best_cap = cap;
                best = cand;
            }
        }
        selected.insert(std::upper_bound(selected.begin(), selected.end(), best), best);
        in_set[static_cast<std::size_t>(best)] = 1;
    }
    return Selection(std::move(selected));
}

// Uniform random n-subset of [0, n_total).
inline Selection random_select(int n_total, int n, std::uint64_t seed) {
    if (n < 1 || n > n_total) throw std::invalid_argument("random_select: n must lie in [1, n_total]");
    std::vector<int> idx(static_cast<std::size_t>(n_total));
    for (int i = 0; i < n_total; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng = make_rng(seed);
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(i, n_total - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(n));
    return Selection(std::move(idx));
}

namespace detail {

// C(n, k) clamped at the refusal bound.
inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        if (result > cap) return cap + 1;
    }
    return result;
}

}  // namespace detail

inline constexpr std::uint64_t kExhaustiveBound = 1000000;

// Enumerates every n-subset and returns the capacity-maximising one; ties go
// to the lexicographically smallest subset. Refuses instances with more than
// kExhaustiveBound subsets.
inline Selection exhaustive_select(const ChannelTensor& h, int n, const SnrConfig& snr) {
    const int n_tx = h.n_tx();
    if (n < 1 || n > n_tx) throw std::invalid_argument("exhaustive_select: n must lie in [1, N_T]");
    if (detail::binomial_capped(n_tx, n, kExhaustiveBound) > kExhaustiveBound)
        throw std::invalid_argument("exhaustive_select: C(" + std::to_string(n_tx) + "," +
                                    std::to_string(n) + ") exceeds the " +
                                    std::to_string(kExhaustiveBound) + "-subset bound");

    std::vector<int> comb(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comb[static_cast<std::size_t>(i)] = i;
    std::vector<int> best;
    double best_cap = -std::numeric_limits<double>::infinity();
    for (;;) {
        const double cap = selection_objective(h, comb, snr.rho);
        if (cap > best_cap) {  // strict: lexicographic enumeration keeps the smallest on ties
            best_cap = cap;
            best = comb;
        }
        // next combination in lexicographic order
        int i = n - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == n_tx - n + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
    return Selection(std::move(best));
}

// The k nearest antennas of each antenna by physical distance (ties by
// index), for the NN baseline's local evaluations. k outside [1, n-1] means
// every other antenna.
inline std::vector<std::vector<int>> nearest_neighbour_map(const std::vector<Vec2>& positions,
                                                           int k) {
    const int n = static_cast<int>(positions.size());
    if (k <= 0 || k >= n) k = n - 1;
    std::vector<std::vector<int>> map(static_cast<std::size_t>(n));
    std::vector<std::pair<double, int>> by_dist;
    for (int a = 0; a < n; ++a) {
        by_dist.clear();
        for (int b = 0; b < n; ++b)
            if (b != a)
                by_dist.push_back({distance(positions[static_cast<std::size_t>(a)],
                                            positions[static_cast<std::size_t>(b)]),
                                   b});
        std::sort(by_dist.begin(), by_dist.end());
        for (int i = 0; i < k; ++i) map[static_cast<std::size_t>(a)].push_back(by_dist[static_cast<std::size_t>(i)].second);
        std::sort(map[static_cast<std::size_t>(a)].begin(), map[static_cast<std::size_t>(a)].end());
    }
    return map;
}

// Distributed membership rule: every antenna, in a fresh seeded order per
// iteration, compares the capacity of the currently selected antennas among
// its neighbours with and without itself and keeps whichever flag wins.
// Selection size is emergent. Returns the best full-array-capacity state
// seen across iterations.
inline Selection nn_select(const ChannelTensor& h, const std::vector<std::vector<int>>& adjacency,
                           int iterations, const SnrConfig& snr, std::uint64_t seed,
                           FlopLedger& ledger) {
    const int n_tx = h.n_tx();
    if (iterations < 1) throw std::invalid_argument("nn_select: iterations must be >= 1");
    if (static_cast<int>(adjacency.size()) != n_tx)
        throw std::invalid_argument("nn_select: adjacency size != N_T");

    std::mt19937_64 rng = make_rng(derive_seed(seed, 0));
    std::vector<char> member(static_cast<std::size_t>(n_tx), 0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int a = 0; a < n_tx; ++a) member[static_cast<std::size_t>(a)] = static_cast<char>(coin(rng));

    std::vector<int> best_selection;
    double best_cap = -std::numeric_limits<double>::infinity();
    std::vector<int> order(static_cast<std::size_t>(n_tx));
    for (int a = 0; a < n_tx; ++a) order[static_cast<std::size_t>(a)] = a;

    for (int iter = 0; iter < iterations; ++iter) {
        for (int i = n_tx - 1; i > 0; --i) {
            std::uniform_int_distribution<int> pick(0, i);
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
        }
        for (int a : order) {
            std::vector<int> without;
            for (int b : adjacency[static_cast<std::size_t>(a)])
                if (member[static_cast<std::size_t>(b)]) without.push_back(b);
            std::vector<int> with = without;
            with.insert(std::upper_bound(with.begin(), with.end(), a), a);

            const double c_with = selection_objective(h, with, snr.rho, &ledger, "nn", "local");
            const double c_without =
                without.empty() ? 0.0
                                : selection_objective(h, without, snr.rho, &ledger, "nn", "local");
            member[static_cast<std::size_t>(a)] = c_with > c_without;
        }

        std::vector<int> current;
        for (int a = 0; a < n_tx; ++a)
            if (member[static_cast<std::size_t>(a)]) current.push_back(a);
        const double cap =
            current.empty() ? 0.0
                            : selection_objective(h, current, snr.rho, &ledger, "nn", "objective");
        if (cap > best_cap) {
            best_cap = cap;
            best_selection = current;
        }
    }

    if (best_selection.empty()) best_selection.push_back(0);  // degenerate all-zero channel
    return Selection(std::move(best_selection));
}

}  // namespace rpnsel
