#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bcfw/block_vector.hpp"
#include "bcfw/constraints.hpp"
#include "bcfw/objective.hpp"
#include "bcfw/rng.hpp"
#include "bcfw/schedule.hpp"
#include "bcfw/solver.hpp"
#include "bcfw/svg.hpp"
#include "bcfw/trace.hpp"

// Benchmark harness: the two built-in experiment families, trace assembly,
// instance averaging, CSV emission, and plots.
//
//   intersect: find a point in the intersection of a box and the spectraplex
//              by minimizing f(x) = 1/2 ||x^1 - x^2||^2 (f* = 0, L = 2).
//   dcquad:    indefinite collated quadratic over n infinity-norm-ball rows
//              and one nuclear-ball block (f* unknown; traces report the
//              post-hoc running minimum of the full Frank-Wolfe gap).

namespace bcfw {

struct ExperimentConfig {
    std::string experiment;  // "intersect" or "dcquad"
    std::size_t n = 10;
    std::size_t iterations = 1000;
    std::size_t instances = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> strategies = {"full"};
    std::string step = "short";  // "short" or "adaptive"
    double m0 = 1.0;
    double eta = 0.9;
    double tau = 2.0;
    std::size_t trace_every = 1;
    std::size_t store_every = 0;  // 0 -> the schedule's coverage window
    std::string out_dir;          // empty -> no files written
};

inline void validate_experiment_config(const ExperimentConfig& cfg) {
    if (cfg.experiment != "intersect" && cfg.experiment != "dcquad")
        throw std::invalid_argument("config: experiment must be 'intersect' or 'dcquad'");
    if (cfg.n == 0) throw std::invalid_argument("config: n must be positive");
    if (cfg.instances == 0) throw std::invalid_argument("config: instances must be positive");
    if (cfg.trace_every == 0) throw std::invalid_argument("config: trace-every must be positive");
    if (cfg.strategies.empty()) throw std::invalid_argument("config: at least one strategy");
    for (const auto& s : cfg.strategies) parse_schedule_spec(s);  // throws on bad spec
    if (cfg.step != "short" && cfg.step != "adaptive")
        throw std::invalid_argument("config: step must be 'short' or 'adaptive'");
    if (cfg.step == "adaptive") {
        if (!(cfg.m0 > 0.0)) throw std::invalid_argument("config: m0 must be positive");
        if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
            throw std::invalid_argument("config: eta must lie in (0, 1]");
        if (!(cfg.tau > 1.0)) throw std::invalid_argument("config: tau must exceed 1");
    }
}

// Box [-1, 1/n]^{n x n} times the n-spectraplex.
inline ProductDomain intersect_domain(std::size_t n) {
    std::vector<ConstraintSet> sets;
    sets.push_back(ConstraintSet::box(matrix_shape(n, n), -1.0, 1.0 / static_cast<double>(n)));
    sets.push_back(ConstraintSet::spectraplex(n));
    return ProductDomain(std::move(sets));
}

// n infinity-norm balls of radius 1 in R^n (the rows) plus one n x n
// nuclear-norm ball of radius 1 (the collated bottom half).
inline ProductDomain dcquad_domain(std::size_t n) {
    std::vector<ConstraintSet> sets;
    for (std::size_t i = 0; i < n; ++i)
        sets.push_back(ConstraintSet::linf_ball(vector_shape(n), 1.0));
    sets.push_back(ConstraintSet::nuclear_ball(n, n, 1.0));
    return ProductDomain(std::move(sets));
}

// Random feasible start: per block, x0_i = lmo_i(c_i) for a standard-normal
// objective c drawn from the repo PRNG. These oracle calls are initialization,
// not solver work, and are not counted.
inline BlockVector init_x0(const ProductDomain& domain, std::uint64_t seed) {
    Rng rng(seed);
    BlockVector x(domain.shapes());
    std::vector<double> c;
    for (std::size_t i = 0; i < domain.num_sets(); ++i) {
        auto xb = x.block(i);
        c.resize(xb.size());
        for (double& v : c) v = rng.next_normal();
        std::vector<double> vertex = domain.set(i).lmo(c);
        for (std::size_t k = 0; k < xb.size(); ++k) xb[k] = vertex[k];
    }
    return x;
}

// One dcquad problem instance: M = A - B with A, B independent PSD
// projections of standard normal matrices; draws are rejected until M is
// indefinite with ||M||_F >= 1e-8, up to 20 attempts.
struct DcquadInstance {
    CollatedQuadraticDifference objective;
    double lambda_min_estimate = 0.0;  // lambda_min(M) from the dense eigensolver
};

inline DcquadInstance make_dcquad_instance(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 20; ++attempt) {
        std::vector<double> w(n * n);
        for (double& v : w) v = rng.next_normal();
        std::vector<double> a = psd_project(w, n);
        for (double& v : w) v = rng.next_normal();
        std::vector<double> b = psd_project(w, n);
        std::vector<double> m(n * n);
        double frob_sq = 0.0;
        for (std::size_t k = 0; k < n * n; ++k) {
            m[k] = a[k] - b[k];
            frob_sq += m[k] * m[k];
        }
        if (std::sqrt(frob_sq) < 1e-8) continue;
        const double lo = min_eigenpair(m, n).value;
        const double hi = max_eigenpair(m, n).value;
        if (!(lo < -1e-10 && hi > 1e-10)) continue;  // need an indefinite M
        return {CollatedQuadraticDifference(n, std::move(a), std::move(b)), lo};
    }
    throw std::runtime_error(
        "make_dcquad_instance: 20 consecutive draws produced no usable instance (n=" +
        std::to_string(n) + ")");
}

// Assembles trace rows from a run. Row `iter = t` describes iterate x_t and
// the cumulative cost of reaching it; rows are emitted at multiples of
// trace_every plus the final iterate. gap_samples are (t, full FW gap at the
// stored iterate x_t); the dmin column carries their running minimum and is
// blank on rows without a sample.
inline std::vector<TraceRow> build_trace_rows(
    const RunResult& run, std::size_t iterations, std::size_t trace_every,
    std::optional<double> f_star,
    const std::vector<std::pair<std::size_t, double>>& gap_samples,
    std::optional<double> m_at_zero) {
    if (trace_every == 0) throw std::invalid_argument("build_trace_rows: trace_every == 0");
    // Running minimum of the sampled gaps, keyed by sample iteration.
    std::map<std::size_t, double> dmin_at;
    double running = std::numeric_limits<double>::infinity();
    for (const auto& [t, gap] : gap_samples) {
        running = std::min(running, gap);
        dmin_at[t] = running;
    }

    const std::size_t num_oracles =
        run.records.empty() ? run.final_x.num_blocks() : run.records.front().lmo_calls.size();
    std::vector<TraceRow> rows;
    for (std::size_t t = 0;; t += trace_every) {
        const bool last = t >= iterations;
        const std::size_t iter = last ? iterations : t;
        TraceRow row;
        row.iter = iter;
        if (iter == 0) {
            row.f = run.records.empty() ? run.final_f : run.records.front().f_value;
            row.lmo.assign(num_oracles, 0.0);
            row.m_value = m_at_zero;
        } else {
            const IterationRecord& prev = run.records.at(iter - 1);
            row.f = (iter < run.records.size()) ? run.records[iter].f_value : run.final_f;
            row.time_s = prev.wall_time;
            row.lmo.assign(prev.lmo_calls.begin(), prev.lmo_calls.end());
            row.f_evals = static_cast<double>(prev.f_evals);
            row.grad_evals = static_cast<double>(prev.grad_evals);
            row.m_value = prev.m_value;
        }
        if (f_star) row.primal = row.f - *f_star;
        if (auto it = dmin_at.find(iter); it != dmin_at.end()) row.dmin = it->second;
        rows.push_back(std::move(row));
        if (last) break;
    }
    return rows;
}

// Pointwise mean over instances; optional fields average only when present in
// every instance at that row.
inline std::vector<TraceRow> average_traces(const std::vector<std::vector<TraceRow>>& traces) {
    if (traces.empty()) throw std::invalid_argument("average_traces: no traces");
    const std::size_t rows = traces.front().size();
    for (const auto& t : traces)
        if (t.size() != rows)
            throw std::invalid_argument("average_traces: trace lengths differ");
    // Sum first and divide once: means of identical inputs (oracle-call
    // counts in particular are integers) come out exact.
    const double count = static_cast<double>(traces.size());
    std::vector<TraceRow> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        TraceRow& row = out[r];
        row.iter = traces.front()[r].iter;
        row.lmo.assign(traces.front()[r].lmo.size(), 0.0);
        bool primal_everywhere = true, dmin_everywhere = true, m_everywhere = true;
        double primal = 0.0, dmin = 0.0, m_value = 0.0;
        for (const auto& t : traces) {
            const TraceRow& src = t[r];
            if (src.iter != row.iter || src.lmo.size() != row.lmo.size())
                throw std::invalid_argument("average_traces: row layouts differ");
            row.time_s += src.time_s;
            row.f += src.f;
            row.f_evals += src.f_evals;
            row.grad_evals += src.grad_evals;
            for (std::size_t i = 0; i < row.lmo.size(); ++i) row.lmo[i] += src.lmo[i];
            if (src.primal) primal += *src.primal; else primal_everywhere = false;
            if (src.dmin) dmin += *src.dmin; else dmin_everywhere = false;
            if (src.m_value) m_value += *src.m_value; else m_everywhere = false;
        }
        row.time_s /= count;
        row.f /= count;
        row.f_evals /= count;
        row.grad_evals /= count;
        for (double& v : row.lmo) v /= count;
        if (primal_everywhere) row.primal = primal / count;
        if (dmin_everywhere) row.dmin = dmin / count;
        if (m_everywhere) row.m_value = m_value / count;
    }
    return out;
}

struct StrategyResult {
    std::string strategy;
    std::size_t coverage_window = 0;
    std::vector<std::vector<TraceRow>> instance_traces;
    std::vector<TraceRow> averaged;
    std::vector<std::string> files;
};

struct ExperimentResult {
    std::vector<std::uint64_t> instance_seeds;
    std::size_t num_oracles = 0;
    std::vector<StrategyResult> strategies;
};

namespace detail {

// Runs fn(0..count-1) on a small thread pool; instances are independent and
// results land in index-keyed slots, so parallel execution stays deterministic.
inline void for_each_instance(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(count, hw ? hw : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::string sanitize_strategy(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ':' || c == ',') c = '-';
    return out;
}

inline std::vector<std::string> experiment_metadata(const ExperimentConfig& cfg,
                                                    const std::string& strategy,
                                                    std::size_t coverage_window,
                                                    const std::vector<std::uint64_t>& seeds,
                                                    const std::string& kind) {
    std::vector<std::string> md;
    md.push_back("experiment=" + cfg.experiment);
    md.push_back("n=" + std::to_string(cfg.n));
    md.push_back("iterations=" + std::to_string(cfg.iterations));
    md.push_back("instances=" + std::to_string(cfg.instances));
    md.push_back("seed=" + std::to_string(cfg.seed));
    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        seed_list += (i ? "," : "") + std::to_string(seeds[i]);
    md.push_back("instance_seeds=" + seed_list);
    md.push_back("strategy=" + strategy);
    md.push_back("coverage_window=" + std::to_string(coverage_window));
    if (cfg.step == "adaptive")
        md.push_back("step=adaptive m0=" + format_double(cfg.m0) +
                     " eta=" + format_double(cfg.eta) + " tau=" + format_double(cfg.tau));
    else
        md.push_back("step=short");
    md.push_back("trace_every=" + std::to_string(cfg.trace_every));
    md.push_back("store_every=" + std::to_string(cfg.store_every ? cfg.store_every
                                                                 : coverage_window));
    md.push_back("kind=" + kind);
    return md;
}

// Shared experiment driver. make_objective(i) builds instance i's objective;
// the domain factory is shared across instances (counters are per-copy).
template <class MakeObjective>
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& file_prefix,
                                const std::function<ProductDomain()>& make_domain,
                                const MakeObjective& make_objective,
                                std::optional<double> f_star) {
    validate_experiment_config(cfg);
    ExperimentResult result;
    result.instance_seeds.resize(cfg.instances);
    for (std::size_t i = 0; i < cfg.instances; ++i)
        result.instance_seeds[i] = derive_seed(cfg.seed, i);
    result.num_oracles = make_domain().num_sets();

    for (const auto& strategy_text : cfg.strategies) {
        const ScheduleSpec spec = parse_schedule_spec(strategy_text);
        StrategyResult sr;
        sr.strategy = strategy_text;
        sr.instance_traces.resize(cfg.instances);

        std::atomic<std::size_t> window_out{0};
        for_each_instance(cfg.instances, [&](std::size_t i) {
            const std::uint64_t inst_seed = result.instance_seeds[i];
            ProductDomain domain = make_domain();
            auto objective = make_objective(derive_seed(inst_seed, 2));
            BlockVector x0 = init_x0(domain, derive_seed(inst_seed, 0));
            Schedule schedule = make_schedule(spec, domain.num_sets(),
                                              derive_seed(inst_seed, 1));
            window_out.store(schedule.coverage_window());

            SolverOptions options;
            options.store_every = cfg.store_every;
            RunResult run =
                cfg.step == "adaptive"
                    ? run_adaptive(objective, domain, std::move(schedule), x0,
                                   cfg.iterations, cfg.m0, cfg.eta, cfg.tau, options)
                    : run_short_step(objective, domain, std::move(schedule), x0,
                                     cfg.iterations, options);
            run.seed = inst_seed;

            // Post-hoc full-gap samples at the stored iterates (uncounted).
            std::vector<std::pair<std::size_t, double>> gap_samples;
            gap_samples.reserve(run.stored_iterates.size());
            BlockVector g(x0.shapes());
            for (const auto& [t, xt] : run.stored_iterates) {
                objective.gradient(xt, g);
                gap_samples.emplace_back(t, fw_gap(g, xt, domain, /*count=*/false));
            }
            sr.instance_traces[i] = build_trace_rows(
                run, cfg.iterations, cfg.trace_every, f_star, gap_samples,
                cfg.step == "adaptive" ? std::optional<double>(cfg.m0) : std::nullopt);
        });

        sr.coverage_window = window_out.load();
        sr.averaged = average_traces(sr.instance_traces);

        if (!cfg.out_dir.empty()) {
            std::filesystem::create_directories(cfg.out_dir);
            const std::string base =
                (std::filesystem::path(cfg.out_dir) /
                 (file_prefix + "_" + sanitize_strategy(strategy_text)))
                    .string();
            const std::string trace_path = base + "_trace.csv";
            write_trace_csv(trace_path, sr.instance_traces.front(), result.num_oracles,
                            experiment_metadata(cfg, strategy_text, sr.coverage_window,
                                                result.instance_seeds, "trace instance=0"));
            sr.files.push_back(trace_path);
            const std::string avg_path = base + "_avg.csv";
            write_trace_csv(avg_path, sr.averaged, result.num_oracles,
                            experiment_metadata(cfg, strategy_text, sr.coverage_window,
                                                result.instance_seeds, "average"));
            sr.files.push_back(avg_path);
        }
        result.strategies.push_back(std::move(sr));
    }
    return result;
}

}  // namespace detail

inline ExperimentResult run_experiment_intersect(ExperimentConfig cfg) {
    cfg.experiment = "intersect";
    return detail::run_experiment(
        cfg, "exp1", [n = cfg.n] { return intersect_domain(n); },
        [](std::uint64_t) { return QuadraticDistance(); }, 0.0);
}

inline ExperimentResult run_experiment_dcquad(ExperimentConfig cfg) {
    cfg.experiment = "dcquad";
    return detail::run_experiment(
        cfg, "exp2", [n = cfg.n] { return dcquad_domain(n); },
        [n = cfg.n](std::uint64_t data_seed) {
            return make_dcquad_instance(n, data_seed).objective;
        },
        std::nullopt);
}

// Renders the *_avg.csv files of a directory into per-experiment SVG panels:
// the quality column (primal when present, else dmin) against iterations,
// wall time, and calls to the most expensive oracle (the last lmo column).
inline std::vector<std::string> emit_plots(const std::string& in_dir,
                                           const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::map<std::string, std::vector<fs::path>> groups;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in_dir))
        if (entry.is_regular_file() && entry.path().filename().string().ends_with("_avg.csv"))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        const std::string name = p.filename().string();
        groups[name.substr(0, name.find('_'))].push_back(p);
    }
    if (groups.empty())
        throw std::runtime_error("emit_plots: no *_avg.csv files in " + in_dir);

    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (const auto& [group, paths] : groups) {
        struct Axis {
            const char* suffix;
            const char* label;
        };
        const Axis axes[] = {{"iterations", "iterations"},
                             {"time", "wall time (s)"},
                             {"lmo", "expensive oracle calls"}};
        for (int a = 0; a < 3; ++a) {
            std::vector<PlotSeries> series;
            bool any_primal = false;
            for (const auto& path : paths) {
                TraceFile tf = read_trace_csv(path.string());
                PlotSeries s;
                s.label = path.filename().string();
                for (const auto& line : tf.metadata)
                    if (line.rfind("strategy=", 0) == 0) s.label = line.substr(9);
                for (const auto& row : tf.rows) {
                    const std::optional<double>& y = row.primal ? row.primal : row.dmin;
                    if (row.primal) any_primal = true;
                    if (!y) continue;
                    double x = 0.0;
                    if (a == 0) x = static_cast<double>(row.iter);
                    else if (a == 1) x = row.time_s;
                    else x = row.lmo.empty() ? 0.0 : row.lmo.back();
                    s.points.emplace_back(x, *y);
                }
                series.push_back(std::move(s));
            }
            const std::string y_label = any_primal ? "primal gap" : "min FW gap";
            const std::string out_path =
                (fs::path(out_dir) / (group + "_" + (any_primal ? "primal" : "dmin") +
                                      "_vs_" + axes[a].suffix + ".svg"))
                    .string();
            write_svg_line_plot(out_path, group + ": " + y_label + " vs " + axes[a].label,
                                axes[a].label, y_label, series, /*log_y=*/true);
            written.push_back(out_path);
        }
    }
    return written;
}

}  // namespace bcfw
