// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Complexity-scaling measurement and the computational-load comparison
// table. All costs come from the analytic ledger model in flops.hpp.
//
// Fitted slopes are reported two ways: on total flops, and on flops per
// computing node (NN computes at every antenna, the token-passing engine
// only at token holders, greedy at one central node). The per-node slope is
// the one comparable to the per-node complexity bounds O(N_T^w) for NN and
// O(N_T^(w/2)) for the token engine with sqrt(N_T) neighbourhoods.

#pragma once

#include "rpnsel/baselines.hpp"
#include "rpnsel/channel.hpp"
#include "rpnsel/flops.hpp"
#include "rpnsel/rpn.hpp"
#include "rpnsel/topology.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpnsel {

// Least-squares slope of ln(y) against ln(x).
inline double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_loglog_slope: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog_slope: values must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Toroid shape whose neighbourhood size (2 * rows) equals floor(sqrt(N_T)).
struct ToroidShape {
    int rows = 0;
    int cols = 0;
};

inline ToroidShape toroid_shape_for(int n_t) {
    const int side = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_t))));
    if (side < 4 || side % 2 != 0 || n_t % (side / 2) != 0)
        throw std::invalid_argument("toroid_shape_for: no toroid with neighbourhood floor(sqrt(" +
                                    std::to_string(n_t) + ")) is defined");
    const int rows = side / 2;
    const int cols = n_t / rows;
    if (cols < 2)
        throw std::invalid_argument("toroid_shape_for: degenerate toroid for N_T = " +
                                    std::to_string(n_t));
    return {rows, cols};
}

struct ScalingPoint {
    int n_t = 0;
    double total_flops = 0.0;     // mean over seeds
    double per_node_flops = 0.0;  // total divided by computing-node count
    int nodes = 0;
};

struct ScalingRow {
    std::string algorithm;
    std::vector<ScalingPoint> points;
    double slope_total = 0.0;
    double slope_per_node = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
};

// The scaling probe targets the worst-case regime the per-node bounds are
// about: NN runs its first sweep from half-full membership, where local
// evaluation sets are proportional to its ~N_T neighbourhood. Later sweeps
// shrink toward the channel-dependent emergent selection and measure the
// scene, not the algorithm's structure; deployment-scale iteration costs
// belong to compare_flops.
struct ScalingOptions {
    double rho = SnrConfig::db_to_linear(-5.0);
    int tokens_divisor = 4;  // token count = N_T / divisor
    int nn_iterations = 1;   // first sweep = structural worst case
    int rpn_max_passes = 20;
};

// Runs each algorithm across the N_T grid (toroid and neighbourhood derived
// per toroid_shape_for), accumulates ledger totals per size, and fits the
// log-log slopes. Recognised ids: "rpn", "nn", "greedy", "dummy".
inline ScalingReport measure_scaling(std::span<const std::string> algorithms,
                                     std::span<const int> n_t_grid, const SceneConfig& scene_template,
                                     std::span<const std::uint64_t> seeds,
                                     const ScalingOptions& opts = {}) {
    if (n_t_grid.size() < 3)
        throw std::invalid_argument("measure_scaling: need at least 3 grid sizes for a slope fit");
    if (seeds.empty()) throw std::invalid_argument("measure_scaling: need at least one seed");
    for (int n_t : n_t_grid) toroid_shape_for(n_t);  // fail before any run starts

    ScalingReport report;
    for (const std::string& alg : algorithms) {
        ScalingRow row;
        row.algorithm = alg;
        for (int n_t : n_t_grid) {
            const ToroidShape shape = toroid_shape_for(n_t);
            const int n_tokens = std::max(1, n_t / opts.tokens_divisor);
            double flops_acc = 0.0;
            int nodes = 1;
            for (std::uint64_t seed : seeds) {
                SceneConfig cfg = scene_template;
                cfg.n_tx = n_t;
                cfg.seed = seed;
                cfg.tx_positions.clear();
                cfg.user_positions.clear();
                const ChannelTensor h = normalize_channel(generate_channel(cfg));
                const SnrConfig snr(opts.rho, n_tokens, h.n_users());
                FlopLedger ledger;

                if (alg == "rpn") {
                    const RpnTopology topo = build_toroid(shape.rows, shape.cols);
                    RpnOptions ropts;
                    ropts.max_passes = opts.rpn_max_passes;
                    const std::uint64_t member_seed[1] = {derive_seed(seed, 11)};
                    race(topo, h, snr, n_tokens, 1, member_seed, ledger, ropts);
                    nodes = n_tokens;
                } else if (alg == "nn") {
                    const auto adjacency = nearest_neighbour_map(h.tx_positions, n_t - 1);
                    nn_select(h, adjacency, opts.nn_iterations, snr, derive_seed(seed, 12), ledger);
                    nodes = n_t;
                } else if (alg == "greedy") {
                    greedy_select(h, n_tokens, snr, ledger);
                    nodes = 1;
                } else if (alg == "dummy") {
                    ledger.record_capacity_eval("dummy", "calibration", 8, 4, 16);
                    nodes = 1;
                } else {
                    throw std::invalid_argument("measure_scaling: unknown algorithm id '" + alg + "'");
                }
                flops_acc += static_cast<double>(ledger.total_flops());
            }
            const double mean_flops = flops_acc / static_cast<double>(seeds.size());
            row.points.push_back({n_t, mean_flops, mean_flops / nodes, nodes});
        }

        std::vector<double> xs, totals, per_node;
        for (const ScalingPoint& p : row.points) {
            xs.push_back(static_cast<double>(p.n_t));
            totals.push_back(p.total_flops);
            per_node.push_back(p.per_node_flops);
        }
        row.slope_total = fit_loglog_slope(xs, totals);
        row.slope_per_node = fit_loglog_slope(xs, per_node);
        report.rows.push_back(std::move(row));
    }
    return report;
}

// One row of the computational-load table: total flops to choose n antennas
// out of the scene's N_T, averaged over seeds. NN cannot target a selected
// count (its size is emergent), so its per-seed cost is a constant across n.
struct FlopsTableRow {
    int n_selected = 0;
    double rpn_flops = 0.0;
    double nn_flops = 0.0;
    double greedy_flops = 0.0;
};

struct CompareFlopsOptions {
    double rho = SnrConfig::db_to_linear(-5.0);
    int k_race = 5;
    int nn_iterations = 50;
    int rpn_max_passes = 20;
    int toroid_rows = 4;
};

inline std::vector<FlopsTableRow> compare_flops(const SceneConfig& scene,
                                                std::span<const int> n_grid,
                                                std::span<const std::uint64_t> seeds,
                                                const CompareFlopsOptions& opts = {}) {
    if (n_grid.empty() || seeds.empty())
        throw std::invalid_argument("compare_flops: empty grid or seed list");
    if (scene.n_tx % opts.toroid_rows != 0)
        throw std::invalid_argument("compare_flops: N_T not divisible by toroid rows");
    const RpnTopology topo = build_toroid(opts.toroid_rows, scene.n_tx / opts.toroid_rows);

    std::vector<FlopsTableRow> table;
    for (int n : n_grid) table.push_back({n, 0.0, 0.0, 0.0});

    for (std::uint64_t seed : seeds) {
        SceneConfig cfg = scene;
        cfg.seed = seed;
        const ChannelTensor h = normalize_channel(generate_channel(cfg));

        // NN once per seed: its cost does not depend on the target count.
        FlopLedger nn_ledger;
        {
            const SnrConfig snr(opts.rho, 1, h.n_users());
            const auto adjacency = nearest_neighbour_map(h.tx_positions, scene.n_tx - 1);
            nn_select(h, adjacency, opts.nn_iterations, snr, derive_seed(seed, 21), nn_ledger);
        }

        for (std::size_t i = 0; i < table.size(); ++i) {
            const int n = table[i].n_selected;
            if (n < 1 || n > scene.n_tx)
                throw std::invalid_argument("compare_flops: selected count out of range");
            const SnrConfig snr(opts.rho, n, h.n_users());

            FlopLedger rpn_ledger;
            {
                std::vector<std::uint64_t> member_seeds;
                for (int m = 0; m < opts.k_race; ++m)
                    member_seeds.push_back(derive_seed(seed, 100 + static_cast<std::uint64_t>(m)));
                RpnOptions ropts;
                ropts.max_passes = opts.rpn_max_passes;
                race(topo, h, snr, n, opts.k_race, member_seeds, rpn_ledger, ropts);
            }

            FlopLedger greedy_ledger;
            greedy_select(h, n, snr, greedy_ledger);

            table[i].rpn_flops += static_cast<double>(rpn_ledger.total_flops());
            table[i].nn_flops += static_cast<double>(nn_ledger.total_flops());
            table[i].greedy_flops += static_cast<double>(greedy_ledger.total_flops());
        }
    }
    for (FlopsTableRow& row : table) {
        row.rpn_flops /= static_cast<double>(seeds.size());
        row.nn_flops /= static_cast<double>(seeds.size());
        row.greedy_flops /= static_cast<double>(seeds.size());
    }
    return table;
}

}  // namespace rpnsel
