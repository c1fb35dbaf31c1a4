// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Batch-mode CLI. Exit codes: 0 success, 1 runtime failure, 2 usage or
// configuration error.

#include "rpnsel/rpnsel.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<int> users;
    std::vector<int> tokens;
    std::string out;
    std::string format;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON experiment config file");
    cmd->add_option("--seed", args.seed, "run a single seed instead of the configured list")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--users", args.users, "override the user-count grid");
    cmd->add_option("--tokens", args.tokens, "override the selected-count grid");
    cmd->add_option("--out", args.out, "output file path");
    cmd->add_option("--format", args.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

rpnsel::ExperimentConfig build_config(const CommonArgs& args) {
    rpnsel::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = rpnsel::load_config(args.config_path);
    if (args.seed_set) cfg.seeds = {args.seed};
    if (!args.users.empty()) cfg.users_grid = args.users;
    if (!args.tokens.empty()) cfg.tokens_grid = args.tokens;
    if (!args.out.empty()) cfg.out_path = args.out;
    if (!args.format.empty()) cfg.format = args.format;
    return cfg;
}

void write_records(const std::vector<rpnsel::ResultRecord>& records,
                   const rpnsel::ExperimentConfig& cfg) {
    const std::string path = rpnsel::resolve_out_path(cfg.out_path);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    if (cfg.format == "json") rpnsel::write_records_json(records, cfg, os);
    else rpnsel::write_records_csv(records, cfg, os);
    std::cout << "wrote " << records.size() << " records to " << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rpnsel: distributed antenna selection experiments"};
    app.require_subcommand(1);

    CommonArgs sum_args, csi_args, flops_args;
    CLI::App* sum = app.add_subcommand("sumrate", "sum-rate sweep over users and selected counts");
    add_common(sum, sum_args);
    CLI::App* csi = app.add_subcommand("csi", "degraded-CSI sweep: select on the perturbed "
                                              "channel, evaluate on the true one");
    add_common(csi, csi_args);
    CLI::App* flops = app.add_subcommand("flops", "computational-load table and scaling fit");
    add_common(flops, flops_args);

    int topo_rows = 4, topo_cols = 16;
    std::string topo_path;
    CLI::App* vtopo = app.add_subcommand("validate-topology", "check a topology's invariants");
    vtopo->add_option("--rows", topo_rows, "toroid rows (ignored with --topology)");
    vtopo->add_option("--cols", topo_cols, "toroid cols (ignored with --topology)");
    vtopo->add_option("--topology", topo_path, "topology text file to validate");

    CommonArgs gen_args;
    bool gen_raw = false;
    CLI::App* gen = app.add_subcommand("gen-channel", "generate a channel tensor file "
                                                      "(.csv for text, anything else binary)");
    add_common(gen, gen_args);
    gen->add_flag("--raw", gen_raw, "skip unit-energy normalisation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sum->parsed()) {
            rpnsel::ExperimentConfig cfg = build_config(sum_args);
            cfg.check();
            write_records(rpnsel::run_sumrate_experiment(cfg), cfg);
        } else if (csi->parsed()) {
            rpnsel::ExperimentConfig cfg = build_config(csi_args);
            if (csi_args.config_path.empty()) {
                if (csi_args.users.empty()) cfg.users_grid = {12};
                if (csi_args.tokens.empty()) cfg.tokens_grid = {16};
            }
            if (cfg.csi_error_grid == std::vector<double>{0.0} &&
                cfg.subcarrier_fraction_grid == std::vector<double>{1.0}) {
                cfg.csi_error_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
                cfg.subcarrier_fraction_grid = {1.0 / 64.0, 0.125, 0.25, 0.5, 1.0};
            }
            cfg.check();
            write_records(rpnsel::run_csi_experiment(cfg), cfg);
        } else if (flops->parsed()) {
            rpnsel::ExperimentConfig cfg = build_config(flops_args);
            if (flops_args.config_path.empty()) {
                cfg.scene.n_users = 8;
                cfg.scene.n_subcarriers = 4;
                cfg.seeds = {1, 2};
            }
            const rpnsel::FlopsExperimentReport report = rpnsel::run_flops_experiment(cfg);
            const std::string path = rpnsel::resolve_out_path(cfg.out_path);
            std::ofstream os(path);
            if (!os) throw std::runtime_error("cannot open output file " + path);
            if (cfg.format == "json") rpnsel::write_flops_report_json(report, os);
            else rpnsel::write_flops_report_csv(report, os);
            std::cout << "wrote flops report to " << path << '\n';
        } else if (vtopo->parsed()) {
            const rpnsel::RpnTopology topo = topo_path.empty()
                                                 ? rpnsel::build_toroid(topo_rows, topo_cols)
                                                 : rpnsel::load_topology(topo_path);
            const std::vector<std::string> violations = rpnsel::validate(topo);
            if (violations.empty()) {
                std::cout << "OK\n";
            } else {
                for (const std::string& v : violations) std::cerr << "violation: " << v << '\n';
                return 1;
            }
        } else if (gen->parsed()) {
            rpnsel::ExperimentConfig cfg = build_config(gen_args);
            rpnsel::SceneConfig scene = cfg.scene;
            if (gen_args.seed_set) scene.seed = gen_args.seed;
            if (!gen_args.users.empty()) scene.n_users = gen_args.users.front();
            scene.check();
            rpnsel::ChannelTensor h = rpnsel::generate_channel(scene);
            if (!gen_raw) h = rpnsel::normalize_channel(h);
            const std::string path = rpnsel::resolve_out_path(
                cfg.out_path == "results.csv" ? std::string("channel.bin") : cfg.out_path);
            rpnsel::save_channel(h, path);
            std::cout << "wrote channel (" << h.n_subcarriers() << " x " << h.n_tx() << " x "
                      << h.n_users() << ") to " << path << '\n';
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
