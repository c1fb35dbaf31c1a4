// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// End-to-end checks of the installed CLI binary (path injected by CMake).

#include "rpnsel/channel.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_command(const std::string& cmd) {
    const std::string out_file = "/tmp/rpnsel_cli_out.txt";
    const int status = std::system((cmd + " > " + out_file + " 2>&1").c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream is(out_file);
    std::stringstream ss;
    ss << is.rdbuf();
    result.output = ss.str();
    return result;
}

const std::string kCli = RPNSEL_CLI_PATH;

std::string write_tiny_config() {
    const std::string path = "/tmp/rpnsel_cli_config.json";
    std::ofstream os(path);
    os << R"({"scene": {"n_tx": 8, "n_users": 2, "n_scatterers": 5, "n_subcarriers": 2},
              "toroid_rows": 2, "users": [2], "tokens": [4],
              "algorithms": ["random", "rpn"], "k_race": 2, "seeds": [1, 2]})";
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate-topology accepts the built-in toroid") {
    const CommandResult r = run_command(kCli + " validate-topology");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("OK") != std::string::npos);
}

TEST_CASE("validate-topology checks files from disk") {
    const std::string path = "/tmp/rpnsel_cli_topo.txt";
    {
        std::ofstream os(path);
        os << "places 2\nedge 0 1 : 0 1\n";
    }
    REQUIRE(run_command(kCli + " validate-topology --topology " + path).exit_code == 0);
    {
        std::ofstream os(path);
        os << "places 3\nedge 0 1 : 0 1\n";  // place 2 unreachable
    }
    const CommandResult r = run_command(kCli + " validate-topology --topology " + path);
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.output.find("not connected") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("a missing config file exits 2 and names the path") {
    const CommandResult r = run_command(kCli + " sumrate --config /tmp/nope_rpnsel.json");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.output.find("/tmp/nope_rpnsel.json") != std::string::npos);
}

TEST_CASE("unknown flags exit 2") {
    REQUIRE(run_command(kCli + " sumrate --frobnicate").exit_code == 2);
    REQUIRE(run_command(kCli + " not-a-subcommand").exit_code == 2);
}

TEST_CASE("sumrate produces deterministic csv output") {
    const std::string config = write_tiny_config();
    const std::string out_a = "/tmp/rpnsel_cli_a.csv";
    const std::string out_b = "/tmp/rpnsel_cli_b.csv";
    const CommandResult ra =
        run_command(kCli + " sumrate --config " + config + " --seed 7 --out " + out_a);
    REQUIRE(ra.exit_code == 0);
    const CommandResult rb =
        run_command(kCli + " sumrate --config " + config + " --seed 7 --out " + out_b);
    REQUIRE(rb.exit_code == 0);

    const std::string a = slurp(out_a);
    REQUIRE(a.find("algorithm,seed,n_users,n_selected,objective_bits") != std::string::npos);
    REQUIRE(a.find("rpn-best,7,") != std::string::npos);
    REQUIRE(a == slurp(out_b));
    std::remove(config.c_str());
    std::remove(out_a.c_str());
    std::remove(out_b.c_str());
}

TEST_CASE("gen-channel writes a loadable tensor") {
    const std::string config = write_tiny_config();
    const std::string out = "/tmp/rpnsel_cli_chan.bin";
    const CommandResult r =
        run_command(kCli + " gen-channel --config " + config + " --seed 3 --out " + out);
    REQUIRE(r.exit_code == 0);
    const rpnsel::ChannelTensor h = rpnsel::load_channel(out);
    REQUIRE(h.n_tx() == 8);
    REQUIRE(h.n_users() == 2);
    REQUIRE(h.mean_energy() == Catch::Approx(1.0).margin(1e-9));

    REQUIRE(run_command(kCli + " gen-channel --config " + config + " --seed 3 --raw --out " + out)
                .exit_code == 0);
    const rpnsel::ChannelTensor raw = rpnsel::load_channel(out);
    REQUIRE(raw.mean_energy() != Catch::Approx(1.0).margin(1e-6));
    std::remove(config.c_str());
    std::remove(out.c_str());
}

TEST_CASE("flops subcommand writes the combined report") {
    const std::string config = "/tmp/rpnsel_cli_flops.json";
    {
        std::ofstream os(config);
        os << R"({"scene": {"n_tx": 16, "n_users": 2, "n_scatterers": 5, "n_subcarriers": 2},
                  "toroid_rows": 2, "seeds": [1], "nn_iterations": 3,
                  "flops_n_grid": [4, 8], "scaling_nt_grid": [16, 36, 64]})";
    }
    const std::string out = "/tmp/rpnsel_cli_flops.csv";
    const CommandResult r = run_command(kCli + " flops --config " + config + " --out " + out);
    REQUIRE(r.exit_code == 0);
    const std::string body = slurp(out);
    REQUIRE(body.find("fig_table,4,") != std::string::npos);
    REQUIRE(body.find("fig_table,8,") != std::string::npos);
    REQUIRE(body.find("slope_rpn") != std::string::npos);
    REQUIRE(body.find("slope_nn") != std::string::npos);
    std::remove(config.c_str());
    std::remove(out.c_str());
}

TEST_CASE("csi subcommand emits degradation columns") {
    const std::string config = write_tiny_config();
    const std::string out = "/tmp/rpnsel_cli_csi.csv";
    const CommandResult r = run_command(kCli + " csi --config " + config + " --seed 2 --out " + out);
    REQUIRE(r.exit_code == 0);
    const std::string body = slurp(out);
    REQUIRE(body.find(",0.3,") != std::string::npos);  // default epsilon sweep
    std::remove(config.c_str());
    std::remove(out.c_str());
}
