// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors

#include "rpnsel/metrics.hpp"

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace rpnsel;

TEST_CASE("toroid shapes derived from floor(sqrt(N_T))") {
    REQUIRE(toroid_shape_for(16).rows == 2);
    REQUIRE(toroid_shape_for(16).cols == 8);
    REQUIRE(toroid_shape_for(64).rows == 4);
    REQUIRE(toroid_shape_for(64).cols == 16);
    REQUIRE(toroid_shape_for(256).rows == 8);
    REQUIRE(toroid_shape_for(256).cols == 32);
    REQUIRE(toroid_shape_for(36).rows == 3);
    REQUIRE_THROWS_AS(toroid_shape_for(25), std::invalid_argument);  // odd sqrt
    REQUIRE_THROWS_AS(toroid_shape_for(10), std::invalid_argument);
}

TEST_CASE("slope fitting recovers exact power laws") {
    const std::vector<double> x = {16, 64, 256};
    const std::vector<double> quad = {256, 4096, 65536};
    REQUIRE(fit_loglog_slope(x, quad) == Catch::Approx(2.0).margin(1e-12));
    std::vector<double> capped = {5, 5, 5};
    REQUIRE(fit_loglog_slope(x, capped) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                      std::invalid_argument);
}

TEST_CASE("a constant-cost dummy algorithm fits slope zero") {
    SceneConfig scene;
    scene.n_tx = 16;
    scene.n_users = 2;
    scene.n_scatterers = 5;
    scene.n_subcarriers = 2;
    const std::vector<std::string> algs = {"dummy"};
    const std::vector<int> grid = {16, 36, 64};
    const std::vector<std::uint64_t> seeds = {1};
    const ScalingReport report = measure_scaling(algs, grid, scene, seeds);
    REQUIRE(report.rows.size() == 1);
    REQUIRE(report.rows[0].slope_total == Catch::Approx(0.0).margin(0.05));
    REQUIRE(report.rows[0].slope_per_node == Catch::Approx(0.0).margin(0.05));
}

TEST_CASE("rpn fits a shallower slope than nn on the reference grid") {
    SceneConfig scene;
    scene.n_users = 2;
    scene.n_subcarriers = 2;
    const std::vector<std::string> algs = {"rpn", "nn"};
    const std::vector<int> grid = {16, 64, 256};
    const std::vector<std::uint64_t> seeds = {1, 2};
    const ScalingReport report = measure_scaling(algs, grid, scene, seeds);
    REQUIRE(report.rows[0].algorithm == "rpn");
    REQUIRE(report.rows[1].algorithm == "nn");
    REQUIRE(report.rows[0].slope_per_node < report.rows[1].slope_per_node);
    REQUIRE(report.rows[0].slope_total < report.rows[1].slope_total);
}

TEST_CASE("nn per-node flops scale like the cubic cost model") {
    // Fitted past the small-size transient, where the Cholesky term of the
    // cost model dominates the Gram term.
    SceneConfig scene;
    scene.n_users = 2;
    scene.n_subcarriers = 2;
    const std::vector<std::string> algs = {"nn"};
    const std::vector<int> grid = {64, 144, 256};
    const std::vector<std::uint64_t> seeds = {1, 2};
    const ScalingReport report = measure_scaling(algs, grid, scene, seeds);
    REQUIRE(report.rows[0].slope_per_node == Catch::Approx(3.0).margin(0.5));
}

TEST_CASE("measure_scaling rejects bad grids and unknown algorithms") {
    SceneConfig scene;
    const std::vector<std::uint64_t> seeds = {1};
    REQUIRE_THROWS_AS(measure_scaling(std::vector<std::string>{"rpn"}, std::vector<int>{16, 64},
                                      scene, seeds),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(measure_scaling(std::vector<std::string>{"nope"},
                                      std::vector<int>{16, 36, 64}, scene, seeds),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(measure_scaling(std::vector<std::string>{"rpn"},
                                      std::vector<int>{16, 25, 64}, scene, seeds),
                      std::invalid_argument);
}

TEST_CASE("greedy ledger total matches the closed-form candidate sum") {
    SceneConfig scene;
    scene.n_tx = 10;
    scene.n_users = 2;
    scene.n_scatterers = 5;
    scene.n_subcarriers = 3;
    scene.seed = 4;
    const ChannelTensor h = normalize_channel(generate_channel(scene));
    const int n = 6;
    FlopLedger ledger;
    greedy_select(h, n, SnrConfig(1.0, n, 2), ledger);

    // Round k evaluates (N_T - k + 1) candidate sets of size k.
    std::uint64_t expected = 0;
    for (int k = 1; k <= n; ++k)
        expected += static_cast<std::uint64_t>(scene.n_tx - k + 1) *
                    flops_capacity_avg(k, scene.n_users, scene.n_subcarriers);
    REQUIRE(ledger.total_flops() == expected);
    REQUIRE(ledger.total_flops("greedy") == expected);
}

TEST_CASE("rpn ledger totals reconstruct exactly from the event records") {
    const RpnTopology topo = build_toroid(2, 8);
    const ChannelTensor h = normalize_channel(test::random_tensor(3, 16, 2, 88));
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 4, 2);
    FlopLedger ledger;
    SelectionState s = init_state(topo, 4, 1);
    const RunStats stats = run_to_fixpoint(s, h, snr, 2, ledger);

    std::uint64_t guard = 0, objective = 0;
    for (const FlopEvent& e : ledger.events()) {
        REQUIRE(e.algorithm == "rpn");
        (e.phase == "guard" ? guard : objective) += e.flops();
    }
    REQUIRE(guard == ledger.counters("rpn", "guard").flops);
    REQUIRE(objective == ledger.counters("rpn", "objective").flops);
    REQUIRE(guard + objective == stats.flops);
    // Guard evaluations come in before/after pairs.
    REQUIRE(ledger.counters("rpn", "guard").evaluations % 2 == 0);
}

TEST_CASE("doubling the race width doubles rpn flops") {
    const RpnTopology topo = build_toroid(2, 8);
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 4, 2);
    double flops5 = 0.0, flops10 = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ChannelTensor h =
            normalize_channel(test::random_tensor(3, 16, 2, derive_seed(77, seed)));
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t m = 0; m < 10; ++m) seeds.push_back(derive_seed(seed, m));
        FlopLedger l5, l10;
        race(topo, h, snr, 4, 5, seeds, l5);
        race(topo, h, snr, 4, 10, seeds, l10);
        flops5 += static_cast<double>(l5.total_flops());
        flops10 += static_cast<double>(l10.total_flops());
    }
    REQUIRE(flops10 / flops5 == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("compare_flops emits one row per selected count with constant nn cost") {
    SceneConfig scene;
    scene.n_tx = 16;
    scene.n_users = 2;
    scene.n_scatterers = 5;
    scene.n_subcarriers = 2;
    const std::vector<int> grid = {4, 8, 12};
    const std::vector<std::uint64_t> seeds = {1, 2};
    CompareFlopsOptions opts;
    opts.nn_iterations = 5;
    const std::vector<FlopsTableRow> table = compare_flops(scene, grid, seeds, opts);
    REQUIRE(table.size() == 3);
    for (const FlopsTableRow& row : table) {
        REQUIRE(row.rpn_flops > 0.0);
        REQUIRE(row.greedy_flops > 0.0);
        REQUIRE(row.nn_flops == table[0].nn_flops);  // emergent size: cost independent of n
    }
}

TEST_CASE("compare_flops greedy column matches the closed form") {
    SceneConfig scene;
    scene.n_tx = 8;
    scene.n_users = 2;
    scene.n_scatterers = 5;
    scene.n_subcarriers = 2;
    const std::vector<int> grid = {8};  // n = N_T
    const std::vector<std::uint64_t> seeds = {3};
    CompareFlopsOptions opts;
    opts.nn_iterations = 2;
    opts.toroid_rows = 2;
    const std::vector<FlopsTableRow> table = compare_flops(scene, grid, seeds, opts);
    std::uint64_t expected = 0;
    for (int k = 1; k <= 8; ++k)
        expected += static_cast<std::uint64_t>(8 - k + 1) *
                    flops_capacity_avg(k, scene.n_users, scene.n_subcarriers);
    REQUIRE(table[0].greedy_flops == Catch::Approx(static_cast<double>(expected)));
}
