#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "bcfw/experiments.hpp"
#include "bcfw/schedule.hpp"

// Command-line front end.
//
//   bcfw exp1 | exp2   run a built-in benchmark family
//   bcfw solve         same, configured by a key=value file
//   bcfw validate-schedule   check an activation schedule's coverage window
//   bcfw plot          render *_avg.csv traces as SVG panels
//
// Exit codes: 0 success, 2 configuration error, 1 runtime failure.

namespace bcfw {
namespace detail {

inline std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_config_u64(const std::string& value, const std::string& key) {
    std::uint64_t v{};
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc() || r.ptr != value.data() + value.size())
        throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
    return v;
}

inline double parse_config_double(const std::string& value, const std::string& key) {
    double v{};
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc() || r.ptr != value.data() + value.size())
        throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
    return v;
}

// Reads a plain-text `key=value` config (one pair per line, `#` comments).
// Keys mirror the exp1/exp2 flags, plus `experiment=exp1|exp2`.
inline std::pair<std::string, ExperimentConfig> load_solve_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("solve: cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    cfg.strategies.clear();
    std::string experiment;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim_ws(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim_ws(line.substr(0, eq));
        const std::string value = trim_ws(line.substr(eq + 1));
        if (key == "experiment") experiment = value;
        else if (key == "n") cfg.n = parse_config_u64(value, key);
        else if (key == "iters") cfg.iterations = parse_config_u64(value, key);
        else if (key == "instances") cfg.instances = parse_config_u64(value, key);
        else if (key == "seed") cfg.seed = parse_config_u64(value, key);
        else if (key == "strategy") cfg.strategies.push_back(value);
        else if (key == "step") cfg.step = value;
        else if (key == "m0") cfg.m0 = parse_config_double(value, key);
        else if (key == "eta") cfg.eta = parse_config_double(value, key);
        else if (key == "tau") cfg.tau = parse_config_double(value, key);
        else if (key == "trace-every") cfg.trace_every = parse_config_u64(value, key);
        else if (key == "store-every") cfg.store_every = parse_config_u64(value, key);
        else if (key == "out") cfg.out_dir = value;
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    if (cfg.strategies.empty()) cfg.strategies = {"full"};
    if (experiment != "exp1" && experiment != "exp2")
        throw std::invalid_argument("config: experiment must be 'exp1' or 'exp2'");
    if (cfg.out_dir.empty()) throw std::invalid_argument("config: out is required");
    return {experiment, cfg};
}

inline void add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--n", cfg.n, "problem size")->capture_default_str();
    cmd->add_option("--iters", cfg.iterations, "iterations per run")->capture_default_str();
    cmd->add_option("--instances", cfg.instances, "independent instances to average")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    cmd->add_option("--strategy", cfg.strategies,
                    "activation schedule: full | cyclic | pcyclic | qlazy:<q> | "
                    "pqlazy:<p>,<q> (repeatable)");
    cmd->add_option("--step", cfg.step, "step rule: short | adaptive")->capture_default_str();
    cmd->add_option("--m0", cfg.m0, "adaptive: initial smoothness guess")
        ->capture_default_str();
    cmd->add_option("--eta", cfg.eta, "adaptive: per-iteration decrease factor in (0,1]")
        ->capture_default_str();
    cmd->add_option("--tau", cfg.tau, "adaptive: backtracking growth factor > 1")
        ->capture_default_str();
    cmd->add_option("--trace-every", cfg.trace_every, "CSV row cadence")
        ->capture_default_str();
    cmd->add_option("--store-every", cfg.store_every,
                    "iterate snapshot cadence (0 = the schedule's coverage window)")
        ->capture_default_str();
    cmd->add_option("--out", cfg.out_dir, "output directory for CSV files")->required();
}

inline void print_written_files(const ExperimentResult& result) {
    for (const auto& sr : result.strategies)
        for (const auto& f : sr.files) std::cout << f << "\n";
}

}  // namespace detail

// Entry point; args excludes the program name. Kept callable in-process so
// tests can drive the full pipeline without spawning binaries.
inline int cli_main(std::vector<std::string> args) {
    CLI::App app{"block-coordinate Frank-Wolfe benchmark suite", "bcfw"};
    app.require_subcommand(1);

    ExperimentConfig cfg1;
    CLI::App* exp1 = app.add_subcommand(
        "exp1", "feasibility of a box/spectraplex intersection (known optimum)");
    detail::add_experiment_flags(exp1, cfg1);

    ExperimentConfig cfg2;
    CLI::App* exp2 = app.add_subcommand(
        "exp2", "indefinite collated quadratic over ball constraints");
    detail::add_experiment_flags(exp2, cfg2);

    std::string config_path;
    CLI::App* solve = app.add_subcommand("solve", "run an experiment from a key=value file");
    solve->add_option("config", config_path, "config file path")->required();

    std::string vs_strategy;
    std::size_t vs_m = 0, vs_k = 0, vs_horizon = 10000;
    CLI::App* vs = app.add_subcommand("validate-schedule",
                                      "verify a schedule's block coverage empirically");
    vs->add_option("--strategy", vs_strategy, "schedule spec string")->required();
    vs->add_option("--m", vs_m, "number of blocks")->required();
    vs->add_option("--k", vs_k, "window to check (0 = the schedule's declared window)")
        ->capture_default_str();
    vs->add_option("--horizon", vs_horizon, "iterations to generate")->capture_default_str();

    std::string plot_in, plot_out;
    CLI::App* plot = app.add_subcommand("plot", "render *_avg.csv files as SVG panels");
    plot->add_option("--in", plot_in, "directory containing *_avg.csv")->required();
    plot->add_option("--out", plot_out, "directory for SVG output")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*exp1) {
            detail::print_written_files(run_experiment_intersect(cfg1));
            return 0;
        }
        if (*exp2) {
            detail::print_written_files(run_experiment_dcquad(cfg2));
            return 0;
        }
        if (*solve) {
            auto [experiment, cfg] = detail::load_solve_config(config_path);
            detail::print_written_files(experiment == "exp1" ? run_experiment_intersect(cfg)
                                                             : run_experiment_dcquad(cfg));
            return 0;
        }
        if (*vs) {
            const ScheduleSpec spec = parse_schedule_spec(vs_strategy);
            Schedule schedule = make_schedule(spec, vs_m, /*seed=*/0);
            const std::size_t window = vs_k ? vs_k : schedule.coverage_window();
            std::vector<BlockIndexSet> sets;
            sets.reserve(vs_horizon);
            for (std::size_t t = 0; t < vs_horizon; ++t) sets.push_back(schedule.next(t));
            const CoverageReport report = verify_coverage(sets, window, vs_m);
            if (report.ok) {
                std::cout << "coverage ok: " << vs_strategy << " activates all " << vs_m
                          << " blocks in every window of " << window << " over "
                          << vs_horizon << " iterations\n";
                return 0;
            }
            std::cout << "coverage violated at t=" << report.first_violation_t << ": block "
                      << report.missing_block << " missing from window ["
                      << report.first_violation_t << ", "
                      << report.first_violation_t + window << ")\n";
            return 1;
        }
        if (*plot) {
            for (const auto& f : emit_plots(plot_in, plot_out)) std::cout << f << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "bcfw: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "bcfw: " << e.what() << "\n";
        return 1;
    }
    return 2;  // unreachable given require_subcommand(1)
}

}  // namespace bcfw
