// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors

#include "rpnsel/rpn.hpp"

#include "rpnsel/objective.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

using namespace rpnsel;

namespace {

// Single-user channel whose antenna magnitudes are given directly.
ChannelTensor magnitude_channel(const std::vector<double>& magnitudes) {
    ComplexMatrix m(static_cast<Eigen::Index>(magnitudes.size()), 1);
    for (std::size_t t = 0; t < magnitudes.size(); ++t) m(static_cast<Eigen::Index>(t), 0) = magnitudes[t];
    return test::tensor_from_matrices({m});
}

RpnTopology two_places() {
    std::map<std::pair<int, int>, std::vector<int>> nbhd;
    nbhd[{0, 1}] = {0, 1};
    return build_custom(2, {{0, 1}}, nbhd);
}

RpnTopology star_three() {
    std::map<std::pair<int, int>, std::vector<int>> nbhd;
    nbhd[{0, 1}] = {0, 1};
    nbhd[{0, 2}] = {0, 2};
    return build_custom(3, {{0, 1}, {0, 2}}, nbhd);
}

SelectionState marking(const RpnTopology& topo, const std::vector<int>& places) {
    SelectionState s;
    s.topology = &topo;
    s.token.assign(static_cast<std::size_t>(topo.n_places), 0);
    for (int p : places) s.token[static_cast<std::size_t>(p)] = 1;
    s.token_count = static_cast<int>(places.size());
    return s;
}

// Recompute a firing's gain from scratch, outside the engine.
double recompute_delta(const RpnTopology& topo, const std::vector<char>& tokens,
                       const ChannelTensor& h, double rho, int from, int to) {
    const std::vector<int>& nb = topo.neighbourhood(from, to);
    std::vector<int> before, after;
    for (int p : nb) {
        const bool holds = tokens[static_cast<std::size_t>(p)] != 0;
        if (holds) before.push_back(topo.antenna(p));
        const bool holds_after = p == to ? true : (p == from ? false : holds);
        if (holds_after) after.push_back(topo.antenna(p));
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    const double c_before = before.empty() ? 0.0 : selection_objective(h, before, rho);
    const double c_after = after.empty() ? 0.0 : selection_objective(h, after, rho);
    return c_after - c_before;
}

}  // namespace

TEST_CASE("init_state fills every place when n_tokens = n_places") {
    const RpnTopology topo = build_toroid(2, 4);
    const SelectionState s = init_state(topo, 8, 1);
    REQUIRE(s.token_count == 8);
    REQUIRE(s.selected_places().size() == 8);
}

TEST_CASE("init_state is reproducible and seed-sensitive") {
    const RpnTopology topo = build_toroid(4, 16);
    const SelectionState a = init_state(topo, 1, 42);
    const SelectionState b = init_state(topo, 1, 42);
    REQUIRE(a.selected_places() == b.selected_places());

    int collisions = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SelectionState x = init_state(topo, 16, derive_seed(7, seed));
        const SelectionState y = init_state(topo, 16, derive_seed(7, seed + 1000));
        if (x.selected_places() == y.selected_places()) ++collisions;
    }
    REQUIRE(collisions == 0);
}

TEST_CASE("init_state rejects out-of-range token counts") {
    const RpnTopology topo = build_toroid(2, 2);
    REQUIRE_THROWS_AS(init_state(topo, 0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(init_state(topo, 5, 1), std::invalid_argument);
}

TEST_CASE("no transition is enabled when every place is filled") {
    const RpnTopology topo = build_toroid(2, 4);
    const SelectionState s = init_state(topo, 8, 3);
    const ChannelTensor h = test::random_tensor(2, 8, 2, 5);
    const SnrConfig snr(1.0, 8, 2);
    REQUIRE(enabled_transitions(s, h, snr).empty());
}

TEST_CASE("a token may move only across edges with exactly one occupied end") {
    // Seven-place net: tokens at A and B; B->G is a candidate, A->B is not.
    const int A = 0, B = 1, C = 2, D = 3, E = 4, F = 5, G = 6;
    std::map<std::pair<int, int>, std::vector<int>> nbhd;
    const std::vector<int> n1 = {A, B, E, F, G};
    const std::vector<int> n2 = {A, C, D, E};
    nbhd[{A, B}] = n1;
    nbhd[{B, G}] = n1;
    nbhd[{E, F}] = n1;
    nbhd[{A, C}] = n2;
    nbhd[{A, D}] = n2;
    nbhd[{A, E}] = n2;
    const RpnTopology topo =
        build_custom(7, {{A, B}, {A, C}, {A, D}, {A, E}, {B, G}, {E, F}}, nbhd);

    // G's antenna is far stronger than B's, so moving B's token to G is a
    // neighbourhood improvement.
    const ChannelTensor h = magnitude_channel({1.0, 0.5, 0.4, 0.3, 0.2, 0.1, 4.0});
    const SelectionState s = marking(topo, {A, B});
    const SnrConfig snr(1.0, 2, 1);

    const std::vector<Transition> enabled = enabled_transitions(s, h, snr);
    bool b_to_g = false;
    for (const Transition& t : enabled) {
        REQUIRE(s.has_token(t.from));
        REQUIRE_FALSE(s.has_token(t.to));
        REQUIRE(t.delta > 0.0);
        if (t.from == B && t.to == G) b_to_g = true;
        REQUIRE_FALSE((t.from == A && t.to == B));
        REQUIRE_FALSE((t.from == B && t.to == A));
    }
    REQUIRE(b_to_g);
}

TEST_CASE("two-place guard matches a direct two-evaluation oracle") {
    const RpnTopology topo = two_places();
    const ChannelTensor h = magnitude_channel({1.0, 2.0});
    const SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);

    const std::vector<Transition> enabled = enabled_transitions(s, h, snr);
    REQUIRE(enabled.size() == 1);
    REQUIRE(enabled[0].from == 0);
    REQUIRE(enabled[0].to == 1);
    const std::vector<int> sel0 = {0}, sel1 = {1};
    const double expected = selection_objective(h, sel1, 1.0) - selection_objective(h, sel0, 1.0);
    REQUIRE(enabled[0].delta == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("step reports a fixpoint when nothing can fire") {
    const RpnTopology topo = two_places();
    const ChannelTensor h = magnitude_channel({2.0, 1.0});  // token already on the best antenna
    SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);
    std::mt19937_64 rng = make_rng(1);
    REQUIRE_FALSE(step(s, h, snr, rng).has_value());
}

TEST_CASE("step moves a lone token to the better antenna then stops") {
    const RpnTopology topo = two_places();
    const ChannelTensor h = magnitude_channel({1.0, 2.0});
    SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);
    std::mt19937_64 rng = make_rng(1);

    const auto fired = step(s, h, snr, rng, 1);
    REQUIRE(fired.has_value());
    REQUIRE(fired->size() == 1);
    REQUIRE(s.has_token(1));
    REQUIRE_FALSE(s.has_token(0));
    REQUIRE_FALSE(step(s, h, snr, rng, 2).has_value());
}

TEST_CASE("the largest capacity gain wins among a place's enabled moves") {
    const RpnTopology topo = star_three();
    const ChannelTensor h = magnitude_channel({1.0, 2.0, 3.0});
    SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);
    std::mt19937_64 rng = make_rng(9);

    const auto fired = step(s, h, snr, rng, 1);
    REQUIRE(fired.has_value());
    REQUIRE(fired->front().to == 2);  // biggest gain
}

TEST_CASE("equal deltas break ties toward the lowest destination id") {
    const RpnTopology topo = star_three();
    const ChannelTensor h = magnitude_channel({1.0, 2.0, 2.0});  // identical gains at 1 and 2
    SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);
    std::mt19937_64 rng = make_rng(9);
    const auto fired = step(s, h, snr, rng, 1);
    REQUIRE(fired.has_value());
    REQUIRE(fired->front().to == 1);
}

TEST_CASE("run_to_fixpoint on an already-stable state takes one empty pass") {
    const RpnTopology topo = two_places();
    const ChannelTensor h = magnitude_channel({2.0, 1.0});
    SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);
    FlopLedger ledger;
    const RunStats stats = run_to_fixpoint(s, h, snr, 1, ledger);
    REQUIRE(stats.passes == 1);
    REQUIRE(stats.firings == 0);
    REQUIRE(stats.converged);
    REQUIRE(stats.initial_capacity == Catch::Approx(stats.final_capacity));
}

TEST_CASE("run_to_fixpoint flags non-convergence when the pass budget is exhausted") {
    const RpnTopology topo = two_places();
    const ChannelTensor h = magnitude_channel({1.0, 2.0});
    SelectionState s = marking(topo, {0});
    const SnrConfig snr(1.0, 1, 1);
    FlopLedger ledger;
    RpnOptions opts;
    opts.max_passes = 1;  // the single pass fires, leaving convergence unproven
    const RunStats stats = run_to_fixpoint(s, h, snr, 1, ledger, opts);
    REQUIRE(stats.passes == 1);
    REQUIRE(stats.firings == 1);
    REQUIRE_FALSE(stats.converged);
}

TEST_CASE("fixpoints are neighbourhood-locally optimal on a small toroid") {
    const RpnTopology topo = build_toroid(2, 4);
    const ChannelTensor h =
        normalize_channel(test::random_tensor(4, 8, 2, 17));
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 4, 2);
    FlopLedger ledger;

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SelectionState s = init_state(topo, 4, derive_seed(seed, 0));
        const RunStats stats = run_to_fixpoint(s, h, snr, derive_seed(seed, 1), ledger);
        REQUIRE(stats.converged);
        REQUIRE(enabled_transitions(s, h, snr).empty());

        // Exhaustive single-move oracle, recomputed outside the engine.
        for (int from = 0; from < topo.n_places; ++from) {
            if (!s.has_token(from)) continue;
            for (int to : topo.neighbours(from)) {
                if (s.has_token(to)) continue;
                REQUIRE(recompute_delta(topo, s.token, h, snr.rho, from, to) <= 1e-12);
            }
        }
    }
}

TEST_CASE("tokens are conserved and deltas match independent recomputation") {
    const RpnTopology topo = build_toroid(4, 16);
    const ChannelTensor h = normalize_channel(test::random_tensor(4, 64, 4, 23));
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 16, 4);
    FlopLedger ledger;

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SelectionState s = init_state(topo, 16, derive_seed(seed, 10));
        const SelectionState initial = s;
        const RunStats stats = run_to_fixpoint(s, h, snr, derive_seed(seed, 11), ledger);

        REQUIRE(s.token_count == 16);
        s.check();  // flag count matches token_count, no double tokens

        // Walk the trace forward from the initial marking, recomputing every
        // recorded delta from scratch.
        std::vector<char> tokens = initial.token;
        for (const FiringEvent& e : stats.trace) {
            REQUIRE(tokens[static_cast<std::size_t>(e.from)] != 0);
            REQUIRE(tokens[static_cast<std::size_t>(e.to)] == 0);
            const double expected = recompute_delta(topo, tokens, h, snr.rho, e.from, e.to);
            REQUIRE(e.delta == Catch::Approx(expected).margin(1e-9));
            REQUIRE(e.delta > 0.0);
            tokens[static_cast<std::size_t>(e.from)] = 0;
            tokens[static_cast<std::size_t>(e.to)] = 1;
        }
        REQUIRE(tokens == s.token);
    }
}

TEST_CASE("runs are deterministic given identical seeds") {
    const RpnTopology topo = build_toroid(4, 16);
    const ChannelTensor h = normalize_channel(test::random_tensor(4, 64, 8, 29));
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 16, 8);

    FlopLedger la, lb;
    SelectionState a = init_state(topo, 16, 5);
    SelectionState b = init_state(topo, 16, 5);
    const RunStats sa = run_to_fixpoint(a, h, snr, 6, la);
    const RunStats sb = run_to_fixpoint(b, h, snr, 6, lb);
    REQUIRE(a.token == b.token);
    REQUIRE(sa.passes == sb.passes);
    REQUIRE(sa.firings == sb.firings);
    REQUIRE(sa.final_capacity == sb.final_capacity);
    REQUIRE(sa.flops == sb.flops);
    REQUIRE(la.total_flops() == lb.total_flops());
}

TEST_CASE("replaying the trace backwards reconstructs the initial marking") {
    const RpnTopology topo = build_toroid(4, 16);
    const ChannelTensor h = normalize_channel(test::random_tensor(4, 64, 4, 31));
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 12, 4);
    FlopLedger ledger;

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SelectionState s = init_state(topo, 12, derive_seed(seed, 20));
        const SelectionState initial = s;
        const RunStats stats = run_to_fixpoint(s, h, snr, derive_seed(seed, 21), ledger);
        const SelectionState rewound = replay_backwards(s, stats.trace);
        REQUIRE(rewound.token == initial.token);
    }
}

TEST_CASE("trace export and import round-trip through the text form") {
    std::vector<FiringEvent> trace = {{1, 0, 1, 0.25}, {1, 5, 3, 1.0 / 3.0}, {2, 3, 5, 0.125}};
    std::stringstream ss;
    save_trace(trace, ss);
    const std::vector<FiringEvent> back = load_trace(ss);
    REQUIRE(back.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        REQUIRE(back[i].pass == trace[i].pass);
        REQUIRE(back[i].from == trace[i].from);
        REQUIRE(back[i].to == trace[i].to);
        REQUIRE(back[i].delta == trace[i].delta);  // %.17g round-trips doubles
    }
}

TEST_CASE("a race of one equals a single run") {
    const RpnTopology topo = build_toroid(2, 4);
    const ChannelTensor h = normalize_channel(test::random_tensor(2, 8, 2, 37));
    const SnrConfig snr(1.0, 4, 2);

    FlopLedger lr, ls;
    const std::uint64_t seeds[1] = {99};
    const RaceResult r = race(topo, h, snr, 4, 1, seeds, lr);

    SelectionState s = init_state(topo, 4, derive_seed(99, 0));
    const RunStats stats = run_to_fixpoint(s, h, snr, derive_seed(99, 1), ls);
    REQUIRE(r.best.token == s.token);
    REQUIRE(r.stats[0].final_capacity == stats.final_capacity);
    REQUIRE(lr.total_flops() == ls.total_flops());
}

TEST_CASE("the race winner dominates every member") {
    const RpnTopology topo = build_toroid(2, 4);
    const ChannelTensor h = normalize_channel(test::random_tensor(2, 8, 2, 41));
    const SnrConfig snr(1.0, 3, 2);
    FlopLedger ledger;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    const RaceResult r = race(topo, h, snr, 3, 5, seeds, ledger);
    const double best = r.stats[static_cast<std::size_t>(r.best_index)].final_capacity;
    for (const RunStats& s : r.stats) REQUIRE(best >= s.final_capacity);
}

TEST_CASE("best-of-five beats a single run on average") {
    const RpnTopology topo = build_toroid(2, 4);
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 3, 2);
    double mean_single = 0.0, mean_best = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const ChannelTensor h = normalize_channel(test::random_tensor(2, 8, 2, derive_seed(43, seed)));
        FlopLedger ledger;
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t m = 0; m < 5; ++m) seeds.push_back(derive_seed(seed, 50 + m));
        const RaceResult r = race(topo, h, snr, 3, 5, seeds, ledger);
        mean_best += r.stats[static_cast<std::size_t>(r.best_index)].final_capacity;
        mean_single += r.stats[0].final_capacity;
    }
    REQUIRE(mean_best >= mean_single);
}

TEST_CASE("global-count guard scaling is available and conserves tokens") {
    const RpnTopology topo = build_toroid(4, 16);
    const ChannelTensor h = normalize_channel(test::random_tensor(4, 64, 4, 53));
    const SnrConfig snr(SnrConfig::db_to_linear(-5.0), 16, 4);
    RpnOptions global;
    global.scaling = GuardScaling::kGlobalTokens;
    FlopLedger ledger;

    SelectionState s = init_state(topo, 16, 3);
    const RunStats stats = run_to_fixpoint(s, h, snr, 4, ledger, global);
    REQUIRE(s.token_count == 16);
    s.check();
    REQUIRE(stats.passes <= global.max_passes);
    REQUIRE(enabled_transitions(s, h, snr, global).empty());

    // The two conventions scale both sides of a move identically inside one
    // neighbourhood, so a single-token instance enables the same move; the
    // reported gains differ because the power scale differs.
    const RpnTopology pair = [] {
        std::map<std::pair<int, int>, std::vector<int>> nbhd;
        nbhd[{0, 1}] = {0, 1};
        return build_custom(2, {{0, 1}}, nbhd);
    }();
    ComplexMatrix m(2, 1);
    m << std::complex<double>(1.0, 0.0), std::complex<double>(2.0, 0.0);
    const ChannelTensor small = test::tensor_from_matrices({m});
    SelectionState one;
    one.topology = &pair;
    one.token = {1, 0};
    one.token_count = 1;
    const SnrConfig ssnr(1.0, 1, 1);
    const auto local_t = enabled_transitions(one, small, ssnr);
    const auto global_t = enabled_transitions(one, small, ssnr, global);
    REQUIRE(local_t.size() == 1);
    REQUIRE(global_t.size() == 1);
    REQUIRE(local_t[0].to == global_t[0].to);
    REQUIRE(local_t[0].delta == Catch::Approx(global_t[0].delta));  // 1 token: same scale
}

TEST_CASE("the engine rejects mismatched channel dimensions") {
    const RpnTopology topo = build_toroid(2, 4);
    const ChannelTensor h = test::random_tensor(2, 6, 2, 47);  // 6 antennas, 8 places
    const SelectionState s = init_state(topo, 4, 1);
    const SnrConfig snr(1.0, 4, 2);
    REQUIRE_THROWS_AS(enabled_transitions(s, h, snr), std::invalid_argument);
}
