// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Batch experiment orchestration: seeded sum-rate sweeps, degraded-CSI
// sweeps, and the flops comparison, emitted as deterministic CSV or JSON.
// Selection may run on a degraded channel, but every reported rate is
// evaluated on the true channel, which is threaded separately throughout.

#pragma once

#include "rpnsel/baselines.hpp"
#include "rpnsel/channel.hpp"
#include "rpnsel/metrics.hpp"
#include "rpnsel/objective.hpp"
#include "rpnsel/rpn.hpp"
#include "rpnsel/topology.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace rpnsel {

struct ExperimentConfig {
    SceneConfig scene;
    double rho_db = -5.0;
    std::vector<int> users_grid = {4, 8, 12, 16};
    std::vector<int> tokens_grid = {16, 32, 48, 64};
    std::vector<std::string> algorithms = {"random", "greedy", "rpn"};
    int k_race = 0;  // 0 = auto: 5 when users <= sqrt(N_T), else 1
    int toroid_rows = 4;
    std::vector<double> csi_error_grid = {0.0};
    std::vector<double> subcarrier_fraction_grid = {1.0};
    std::vector<std::uint64_t> seeds = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10,
                                        11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    std::string out_path = "results.csv";
    std::string format = "csv";
    int nn_iterations = 50;
    int nn_neighbourhood = 0;  // 0 = N_T - 1
    int rpn_max_passes = 20;
    std::vector<int> flops_n_grid;     // defaults derived from N_T when empty
    std::vector<int> scaling_nt_grid = {16, 64, 256};

    double rho_linear() const { return SnrConfig::db_to_linear(rho_db); }

    int race_width(int n_users) const {
        if (k_race > 0) return k_race;
        return n_users * n_users <= scene.n_tx ? 5 : 1;
    }

    void check() const {
        scene.check();
        if (!std::isfinite(rho_db)) throw std::invalid_argument("config: rho_db must be finite");
        if (users_grid.empty() || tokens_grid.empty() || seeds.empty())
            throw std::invalid_argument("config: users, tokens and seeds must be non-empty");
        if (algorithms.empty()) throw std::invalid_argument("config: no algorithms configured");
        std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
        if (distinct.size() != seeds.size())
            throw std::invalid_argument("config: seeds must be distinct");
        for (int u : users_grid)
            if (u < 1 || u > scene.n_tx)
                throw std::invalid_argument("config: user count " + std::to_string(u) +
                                            " out of range");
        for (int n : tokens_grid)
            if (n < 1 || n > scene.n_tx)
                throw std::invalid_argument("config: selected count " + std::to_string(n) +
                                            " exceeds N_T");
        for (double e : csi_error_grid)
            if (!(e >= 0.0 && e <= 1.0))
                throw std::invalid_argument("config: csi error must lie in [0,1]");
        for (double f : subcarrier_fraction_grid)
            if (!(f > 0.0 && f <= 1.0))
                throw std::invalid_argument("config: subcarrier fraction must lie in (0,1]");
        const std::set<std::string> known = {"random", "greedy", "exhaustive", "nn", "rpn"};
        for (const std::string& a : algorithms)
            if (known.count(a) == 0)
                throw std::invalid_argument("config: unknown algorithm '" + a + "'");
        if (std::find(algorithms.begin(), algorithms.end(), "rpn") != algorithms.end() &&
            (toroid_rows < 2 || scene.n_tx % toroid_rows != 0 || scene.n_tx / toroid_rows < 2))
            throw std::invalid_argument("config: N_T does not factor into a " +
                                        std::to_string(toroid_rows) + "-row toroid");
        if (format != "csv" && format != "json")
            throw std::invalid_argument("config: format must be csv or json");
    }
};

struct ResultRecord {
    std::string algorithm;
    std::uint64_t seed = 0;
    int n_users = 0;
    int n_selected = 0;
    double objective_capacity = 0.0;  // Eq-style log-det, uniform power, true channel
    double zf_rate = 0.0;             // post-ZF water-filled, true channel
    bool zf_feasible = true;
    double passes = 0.0;              // passes or iterations; mean for rpn-mean
    std::uint64_t flops = 0;
    bool converged = true;
    double csi_error = 0.0;
    double subcarrier_fraction = 1.0;
};

namespace detail {

struct Evaluated {
    double objective = 0.0;
    double zf_rate = 0.0;
    bool zf_feasible = true;
};

inline Evaluated evaluate_on_true(const ChannelTensor& true_h, std::span<const int> selection,
                                  double rho) {
    Evaluated e;
    e.objective = selection_objective(true_h, selection, rho);
    const ZfRateResult zf = zf_waterfilled_rate(true_h, selection, rho);
    e.zf_rate = zf.rate;
    e.zf_feasible = zf.feasible;
    return e;
}

// Runs every configured algorithm for one (seed, users, tokens) grid point.
// `select_h` is what the algorithms see; `true_h` is what the rates are
// computed on. Identical seeds yield identical records regardless of which
// experiment calls this.
inline void run_grid_point(const ExperimentConfig& cfg, const ChannelTensor& select_h,
                           const ChannelTensor& true_h, std::uint64_t seed, int n_users,
                           int n_tokens, double csi_error, double fraction,
                           std::vector<ResultRecord>& out) {
    const double rho = cfg.rho_linear();
    auto base_record = [&](const std::string& alg) {
        ResultRecord r;
        r.algorithm = alg;
        r.seed = seed;
        r.n_users = n_users;
        r.n_selected = n_tokens;
        r.csi_error = csi_error;
        r.subcarrier_fraction = fraction;
        return r;
    };

    for (const std::string& alg : cfg.algorithms) {
        if (alg == "random") {
            const Selection sel =
                random_select(select_h.n_tx(), n_tokens, derive_seed(seed, 0x7A0 + static_cast<std::uint64_t>(n_tokens)));
            ResultRecord r = base_record("random");
            const Evaluated e = evaluate_on_true(true_h, sel.antennas, rho);
            r.objective_capacity = e.objective;
            r.zf_rate = e.zf_rate;
            r.zf_feasible = e.zf_feasible;
            r.passes = 1.0;
            out.push_back(r);
        } else if (alg == "greedy") {
            FlopLedger ledger;
            const SnrConfig snr(rho, n_tokens, select_h.n_users());
            const Selection sel = greedy_select(select_h, n_tokens, snr, ledger);
            ResultRecord r = base_record("greedy");
            const Evaluated e = evaluate_on_true(true_h, sel.antennas, rho);
            r.objective_capacity = e.objective;
            r.zf_rate = e.zf_rate;
            r.zf_feasible = e.zf_feasible;
            r.passes = static_cast<double>(n_tokens);
            r.flops = ledger.total_flops();
            out.push_back(r);
        } else if (alg == "exhaustive") {
            const SnrConfig snr(rho, n_tokens, select_h.n_users());
            const Selection sel = exhaustive_select(select_h, n_tokens, snr);
            ResultRecord r = base_record("exhaustive");
            const Evaluated e = evaluate_on_true(true_h, sel.antennas, rho);
            r.objective_capacity = e.objective;
            r.zf_rate = e.zf_rate;
            r.zf_feasible = e.zf_feasible;
            out.push_back(r);
        } else if (alg == "nn") {
            continue;  // selected count is emergent: handled once per grid row
        } else if (alg == "rpn") {
            FlopLedger ledger;
            const SnrConfig snr(rho, n_tokens, select_h.n_users());
            const RpnTopology topo = build_toroid(cfg.toroid_rows, select_h.n_tx() / cfg.toroid_rows);
            RpnOptions ropts;
            ropts.max_passes = cfg.rpn_max_passes;
            const int k = cfg.race_width(n_users);
            std::vector<std::uint64_t> member_seeds;
            for (int m = 0; m < k; ++m)
                member_seeds.push_back(derive_seed(seed, 0x100 + static_cast<std::uint64_t>(m) +
                                                             (static_cast<std::uint64_t>(n_tokens) << 16)));
            const RaceResult result = race(topo, select_h, snr, n_tokens, k, member_seeds, ledger, ropts);

            ResultRecord best = base_record("rpn-best");
            const Evaluated eb = evaluate_on_true(true_h, result.best.selected_antennas(), rho);
            best.objective_capacity = eb.objective;
            best.zf_rate = eb.zf_rate;
            best.zf_feasible = eb.zf_feasible;
            best.passes = result.stats[static_cast<std::size_t>(result.best_index)].passes;
            best.converged = result.stats[static_cast<std::size_t>(result.best_index)].converged;
            best.flops = ledger.total_flops();
            out.push_back(best);

            ResultRecord mean = base_record("rpn-mean");
            double obj_acc = 0.0, zf_acc = 0.0, pass_acc = 0.0;
            bool all_feasible = true, all_converged = true;
            for (int m = 0; m < k; ++m) {
                const Evaluated em =
                    evaluate_on_true(true_h, result.member_selections[static_cast<std::size_t>(m)], rho);
                obj_acc += em.objective;
                zf_acc += em.zf_rate;
                all_feasible = all_feasible && em.zf_feasible;
                pass_acc += result.stats[static_cast<std::size_t>(m)].passes;
                all_converged = all_converged && result.stats[static_cast<std::size_t>(m)].converged;
            }
            mean.objective_capacity = obj_acc / k;
            mean.zf_rate = zf_acc / k;
            mean.zf_feasible = all_feasible;
            mean.passes = pass_acc / k;
            mean.converged = all_converged;
            mean.flops = ledger.total_flops();
            out.push_back(mean);
        }
    }
}

// NN cannot target a selected count, so it contributes one record per
// (seed, users) row with its emergent size, independent of the tokens grid.
inline void run_nn_point(const ExperimentConfig& cfg, const ChannelTensor& select_h,
                         const ChannelTensor& true_h, std::uint64_t seed, int n_users,
                         double csi_error, double fraction, std::vector<ResultRecord>& out) {
    if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), "nn") == cfg.algorithms.end())
        return;
    const double rho = cfg.rho_linear();
    FlopLedger ledger;
    const SnrConfig snr(rho, 1, select_h.n_users());
    const int k = cfg.nn_neighbourhood > 0 ? cfg.nn_neighbourhood : select_h.n_tx() - 1;
    const auto adjacency = nearest_neighbour_map(select_h.tx_positions, k);
    const Selection sel =
        nn_select(select_h, adjacency, cfg.nn_iterations, snr, derive_seed(seed, 0x22), ledger);

    ResultRecord r;
    r.algorithm = "nn";
    r.seed = seed;
    r.n_users = n_users;
    r.n_selected = sel.size();
    r.csi_error = csi_error;
    r.subcarrier_fraction = fraction;
    const Evaluated e = evaluate_on_true(true_h, sel.antennas, rho);
    r.objective_capacity = e.objective;
    r.zf_rate = e.zf_rate;
    r.zf_feasible = e.zf_feasible;
    r.passes = static_cast<double>(cfg.nn_iterations);
    r.flops = ledger.total_flops();
    out.push_back(r);
}

inline void sort_records(std::vector<ResultRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        return std::tie(a.n_users, a.n_selected, a.csi_error, a.subcarrier_fraction, a.algorithm,
                        a.seed) < std::tie(b.n_users, b.n_selected, b.csi_error,
                                           b.subcarrier_fraction, b.algorithm, b.seed);
    });
}

}  // namespace detail

// Sum-rate sweep on the true channel.
inline std::vector<ResultRecord> run_sumrate_experiment(const ExperimentConfig& cfg) {
    cfg.check();
    std::vector<ResultRecord> records;
    for (std::uint64_t seed : cfg.seeds) {
        for (int users : cfg.users_grid) {
            SceneConfig scene = cfg.scene;
            scene.n_users = users;
            scene.seed = seed;
            const ChannelTensor h = normalize_channel(generate_channel(scene));
            for (int tokens : cfg.tokens_grid)
                detail::run_grid_point(cfg, h, h, seed, users, tokens, 0.0, 1.0, records);
            detail::run_nn_point(cfg, h, h, seed, users, 0.0, 1.0, records);
        }
    }
    detail::sort_records(records);
    return records;
}

// Selection on a perturbed and/or subsampled channel, rates on the true one.
inline std::vector<ResultRecord> run_csi_experiment(const ExperimentConfig& cfg) {
    cfg.check();
    if (cfg.csi_error_grid.empty() && cfg.subcarrier_fraction_grid.empty())
        throw std::invalid_argument("run_csi_experiment: needs a csi_error or fraction grid");
    std::vector<ResultRecord> records;
    for (std::uint64_t seed : cfg.seeds) {
        for (int users : cfg.users_grid) {
            SceneConfig scene = cfg.scene;
            scene.n_users = users;
            scene.seed = seed;
            const ChannelTensor true_h = normalize_channel(generate_channel(scene));
            for (double eps : cfg.csi_error_grid) {
                const ChannelTensor perturbed = perturb_csi(true_h, eps, derive_seed(seed, 0xE11));
                for (double fraction : cfg.subcarrier_fraction_grid) {
                    const ChannelTensor select_h =
                        fraction >= 1.0 ? perturbed
                                        : subsample_subcarriers(perturbed, fraction,
                                                                derive_seed(seed, 0xF11));
                    for (int tokens : cfg.tokens_grid)
                        detail::run_grid_point(cfg, select_h, true_h, seed, users, tokens, eps,
                                               fraction, records);
                    detail::run_nn_point(cfg, select_h, true_h, seed, users, eps, fraction,
                                         records);
                }
            }
        }
    }
    detail::sort_records(records);
    return records;
}

struct FlopsExperimentReport {
    std::vector<FlopsTableRow> table;
    ScalingReport scaling;
};

// Computational-load table at the scene's N_T plus the scaling fit.
inline FlopsExperimentReport run_flops_experiment(const ExperimentConfig& cfg) {
    cfg.scene.check();
    FlopsExperimentReport report;

    std::vector<int> n_grid = cfg.flops_n_grid;
    if (n_grid.empty())
        for (int n = 4; n <= cfg.scene.n_tx; n += 4) n_grid.push_back(n);

    CompareFlopsOptions copts;
    copts.rho = cfg.rho_linear();
    copts.k_race = cfg.k_race > 0 ? cfg.k_race : 5;
    copts.nn_iterations = cfg.nn_iterations;
    copts.rpn_max_passes = cfg.rpn_max_passes;
    copts.toroid_rows = cfg.toroid_rows;
    report.table = compare_flops(cfg.scene, n_grid, cfg.seeds, copts);

    ScalingOptions sopts;
    sopts.rho = cfg.rho_linear();
    const std::vector<std::string> algs = {"rpn", "nn", "greedy"};
    report.scaling = measure_scaling(algs, cfg.scaling_nt_grid, cfg.scene, cfg.seeds, sopts);
    return report;
}

// ---------------------------------------------------------------------------
// Emission. Output bytes depend only on config and seeds.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline void write_records_csv(const std::vector<ResultRecord>& records,
                              const ExperimentConfig& cfg, std::ostream& os) {
    os << "# rpnsel-results v1\n";
    os << "# n_seeds " << cfg.seeds.size() << '\n';
    os << "# rho_db " << detail::fmt_double(cfg.rho_db) << '\n';
    os << "# n_tx " << cfg.scene.n_tx << '\n';
    os << "# n_subcarriers " << cfg.scene.n_subcarriers << '\n';
    os << "algorithm,seed,n_users,n_selected,objective_bits,zf_rate_bits,zf_feasible,passes,"
          "flops,converged,csi_error,subcarrier_fraction\n";
    for (const ResultRecord& r : records) {
        os << r.algorithm << ',' << r.seed << ',' << r.n_users << ',' << r.n_selected << ','
           << detail::fmt_double(r.objective_capacity) << ',' << detail::fmt_double(r.zf_rate)
           << ',' << (r.zf_feasible ? 1 : 0) << ',' << detail::fmt_double(r.passes) << ','
           << r.flops << ',' << (r.converged ? 1 : 0) << ',' << detail::fmt_double(r.csi_error)
           << ',' << detail::fmt_double(r.subcarrier_fraction) << '\n';
    }
}

inline nlohmann::json record_to_json(const ResultRecord& r) {
    return nlohmann::json{{"algorithm", r.algorithm},
                          {"seed", r.seed},
                          {"n_users", r.n_users},
                          {"n_selected", r.n_selected},
                          {"objective_bits", r.objective_capacity},
                          {"zf_rate_bits", r.zf_rate},
                          {"zf_feasible", r.zf_feasible},
                          {"passes", r.passes},
                          {"flops", r.flops},
                          {"converged", r.converged},
                          {"csi_error", r.csi_error},
                          {"subcarrier_fraction", r.subcarrier_fraction}};
}

inline void write_records_json(const std::vector<ResultRecord>& records,
                               const ExperimentConfig& cfg, std::ostream& os) {
    nlohmann::json doc;
    doc["meta"] = {{"n_seeds", cfg.seeds.size()},
                   {"rho_db", cfg.rho_db},
                   {"n_tx", cfg.scene.n_tx},
                   {"n_subcarriers", cfg.scene.n_subcarriers}};
    doc["records"] = nlohmann::json::array();
    for (const ResultRecord& r : records) doc["records"].push_back(record_to_json(r));
    os << doc.dump(2) << '\n';
}

inline void write_flops_report_csv(const FlopsExperimentReport& report, std::ostream& os) {
    os << "# rpnsel-flops v1\n";
    os << "record_type,key,rpn,nn,greedy\n";
    for (const FlopsTableRow& row : report.table)
        os << "fig_table," << row.n_selected << ',' << detail::fmt_double(row.rpn_flops) << ','
           << detail::fmt_double(row.nn_flops) << ',' << detail::fmt_double(row.greedy_flops)
           << '\n';
    for (const ScalingRow& row : report.scaling.rows) {
        for (const ScalingPoint& p : row.points)
            os << "scaling_total_" << row.algorithm << ',' << p.n_t << ','
               << detail::fmt_double(p.total_flops) << ',' << detail::fmt_double(p.per_node_flops)
               << ',' << p.nodes << '\n';
        os << "slope_" << row.algorithm << ",per_node," << detail::fmt_double(row.slope_per_node)
           << ',' << detail::fmt_double(row.slope_total) << ",0\n";
    }
}

inline void write_flops_report_json(const FlopsExperimentReport& report, std::ostream& os) {
    nlohmann::json doc;
    doc["table"] = nlohmann::json::array();
    for (const FlopsTableRow& row : report.table)
        doc["table"].push_back({{"n_selected", row.n_selected},
                                {"rpn_flops", row.rpn_flops},
                                {"nn_flops", row.nn_flops},
                                {"greedy_flops", row.greedy_flops}});
    doc["scaling"] = nlohmann::json::array();
    for (const ScalingRow& row : report.scaling.rows) {
        nlohmann::json jr;
        jr["algorithm"] = row.algorithm;
        jr["slope_total"] = row.slope_total;
        jr["slope_per_node"] = row.slope_per_node;
        jr["points"] = nlohmann::json::array();
        for (const ScalingPoint& p : row.points)
            jr["points"].push_back({{"n_t", p.n_t},
                                    {"total_flops", p.total_flops},
                                    {"per_node_flops", p.per_node_flops},
                                    {"nodes", p.nodes}});
        doc["scaling"].push_back(jr);
    }
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Config file parsing (JSON) and path resolution.
// ---------------------------------------------------------------------------

inline void apply_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    if (j.contains("scene")) {
        const auto& s = j.at("scene");
        SceneConfig& sc = cfg.scene;
        if (s.contains("area_x_m")) sc.area_x_m = s.at("area_x_m").get<double>();
        if (s.contains("area_y_m")) sc.area_y_m = s.at("area_y_m").get<double>();
        if (s.contains("n_tx")) sc.n_tx = s.at("n_tx").get<int>();
        if (s.contains("n_users")) sc.n_users = s.at("n_users").get<int>();
        if (s.contains("n_scatterers")) sc.n_scatterers = s.at("n_scatterers").get<int>();
        if (s.contains("n_obstacles")) sc.n_obstacles = s.at("n_obstacles").get<int>();
        if (s.contains("carrier_hz")) sc.carrier_hz = s.at("carrier_hz").get<double>();
        if (s.contains("bandwidth_hz")) sc.bandwidth_hz = s.at("bandwidth_hz").get<double>();
        if (s.contains("n_subcarriers")) sc.n_subcarriers = s.at("n_subcarriers").get<int>();
        if (s.contains("shadow_sigma_db")) sc.shadow_sigma_db = s.at("shadow_sigma_db").get<double>();
        if (s.contains("pathloss_exponent"))
            sc.pathloss_exponent = s.at("pathloss_exponent").get<double>();
        if (s.contains("seed")) sc.seed = s.at("seed").get<std::uint64_t>();
    }
    if (j.contains("rho_db")) cfg.rho_db = j.at("rho_db").get<double>();
    if (j.contains("users")) cfg.users_grid = j.at("users").get<std::vector<int>>();
    if (j.contains("tokens")) cfg.tokens_grid = j.at("tokens").get<std::vector<int>>();
    if (j.contains("algorithms"))
        cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("k_race")) cfg.k_race = j.at("k_race").get<int>();
    if (j.contains("toroid_rows")) cfg.toroid_rows = j.at("toroid_rows").get<int>();
    if (j.contains("csi_errors")) cfg.csi_error_grid = j.at("csi_errors").get<std::vector<double>>();
    if (j.contains("subcarrier_fractions"))
        cfg.subcarrier_fraction_grid = j.at("subcarrier_fractions").get<std::vector<double>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("n_seeds")) {
        const int n = j.at("n_seeds").get<int>();
        cfg.seeds.clear();
        for (int i = 1; i <= n; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    if (j.contains("nn_iterations")) cfg.nn_iterations = j.at("nn_iterations").get<int>();
    if (j.contains("nn_neighbourhood")) cfg.nn_neighbourhood = j.at("nn_neighbourhood").get<int>();
    if (j.contains("rpn_max_passes")) cfg.rpn_max_passes = j.at("rpn_max_passes").get<int>();
    if (j.contains("flops_n_grid")) cfg.flops_n_grid = j.at("flops_n_grid").get<std::vector<int>>();
    if (j.contains("scaling_nt_grid"))
        cfg.scaling_nt_grid = j.at("scaling_nt_grid").get<std::vector<int>>();
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config file not found: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed config " + path + ": " + e.what());
    }
    ExperimentConfig cfg;
    try {
        apply_json(j, cfg);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed config " + path + ": " + e.what());
    }
    return cfg;
}

// RPNSEL_OUT_DIR, when set, prefixes relative output paths.
inline std::string resolve_out_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("RPNSEL_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return path;
    std::string d(dir);
    if (d.back() != '/') d += '/';
    return d + path;
}

}  // namespace rpnsel
