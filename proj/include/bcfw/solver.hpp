#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bcfw/block_vector.hpp"
#include "bcfw/constraints.hpp"
#include "bcfw/objective.hpp"
#include "bcfw/schedule.hpp"

// Block-coordinate Frank-Wolfe engines. Each iteration activates a set of
// blocks, queries one linear minimization oracle per active block, and blends
// every active block toward its oracle vertex with a projection-free step.

namespace bcfw {

// Raised when the adaptive engine's sufficient-decrease loop exceeds its cap.
struct AdaptiveBacktrackError : std::runtime_error {
    AdaptiveBacktrackError(const std::string& msg, double last_m_)
        : std::runtime_error(msg), last_m(last_m_) {}
    double last_m;
};

// Raised when a per-block gap is negative beyond floating-point noise, which
// means the oracle or gradient is broken.
struct NegativeGapError : std::runtime_error {
    NegativeGapError(std::size_t block_, double gap_)
        : std::runtime_error("per-block gap " + std::to_string(gap_) + " on block " +
                             std::to_string(block_) + " is below -1e-6"),
          block(block_), gap(gap_) {}
    std::size_t block;
    double gap;
};

namespace detail {

// Gaps within [-1e-6, 0) are floating-point noise and are clipped to zero;
// anything lower aborts.
inline double clip_gap(double gap, std::size_t block) {
    if (gap >= 0.0) return gap;
    if (gap < -1e-6) throw NegativeGapError(block, gap);
    return 0.0;
}

}  // namespace detail

// Per-block vertices and gaps for the active set J at the point x with
// gradient g: gap_i = <g_i, x_i - v_i> >= 0 up to rounding.
struct PartialGap {
    double total = 0.0;
    BlockIndexSet indices;
    std::vector<std::vector<double>> vertices;  // aligned with indices
    std::vector<double> gaps;                   // clipped at zero
    std::vector<double> dist_sq;                // ||x_i - v_i||^2
};

inline PartialGap partial_gap(const BlockVector& gradient, const BlockVector& x,
                              const BlockIndexSet& J, const ProductDomain& domain,
                              bool count = true) {
    require_same_shape(gradient, x, "partial_gap");
    PartialGap result;
    result.indices = J;
    result.vertices = lmo_product(domain, gradient, J, count);
    result.gaps.resize(J.size());
    result.dist_sq.resize(J.size());
    for (std::size_t k = 0; k < J.size(); ++k) {
        const std::size_t i = J[k];
        auto gb = gradient.block(i);
        auto xb = x.block(i);
        const auto& vb = result.vertices[k];
        double gap = 0.0, dist = 0.0;
        for (std::size_t e = 0; e < gb.size(); ++e) {
            const double diff = xb[e] - vb[e];
            gap += gb[e] * diff;
            dist += diff * diff;
        }
        result.gaps[k] = detail::clip_gap(gap, i);
        result.dist_sq[k] = dist;
        result.total += result.gaps[k];
    }
    return result;
}

// Full Frank-Wolfe gap: the partial gap over all blocks. For convex f it
// upper-bounds f(x) - f*.
inline double fw_gap(const BlockVector& gradient, const BlockVector& x,
                     const ProductDomain& domain, bool count = true) {
    return partial_gap(gradient, x, BlockIndexSet::all(domain.num_sets()), domain, count)
        .total;
}

// Short step for one block: gamma = min{1, gap / (L * ||x_i - v_i||^2)},
// zero when the block gap (or the distance) vanishes.
inline double short_step_gamma(double gap, double smoothness, double dist_sq) {
    if (!(smoothness > 0.0))
        throw std::invalid_argument("short_step_gamma: smoothness must be positive");
    if (gap <= 0.0 || dist_sq <= 0.0) return 0.0;
    return std::min(1.0, gap / (smoothness * dist_sq));
}

// One iteration's record. f_value is f at the iterate the iteration started
// from; lmo_calls / f_evals / grad_evals are cumulative within the run;
// m_value is the accepted smoothness estimate (adaptive engine only).
struct IterationRecord {
    std::size_t t = 0;
    double f_value = 0.0;
    BlockIndexSet activated;
    std::vector<double> gaps;    // aligned with activated
    std::vector<double> gammas;  // aligned with activated
    std::optional<double> m_value;
    std::vector<std::uint64_t> lmo_calls;
    std::uint64_t f_evals = 0;
    std::uint64_t grad_evals = 0;
    double wall_time = 0.0;
};

struct RunResult {
    BlockVector final_x;
    double final_f = 0.0;
    std::vector<IterationRecord> records;
    // (t, x_t) snapshots on the storage cadence, including t = 0 and, when the
    // cadence divides T, t = T.
    std::vector<std::pair<std::size_t, BlockVector>> stored_iterates;
    std::uint64_t seed = 0;      // filled by the harness
    std::string config_echo;     // filled by the harness
};

struct SolverOptions {
    // Overrides the objective's own smoothness estimate when set.
    std::optional<double> lipschitz;
    bool store_iterates = true;
    // Snapshot cadence; 0 means "the schedule's coverage window".
    std::size_t store_every = 0;
    // Cap on sufficient-decrease retries per iteration (adaptive engine).
    std::size_t while_cap = 100;
};

namespace detail {

template <SmoothObjective F>
double resolve_smoothness(const F& f, const SolverOptions& options) {
    if (options.lipschitz) {
        if (!(*options.lipschitz > 0.0))
            throw std::invalid_argument("SolverOptions: smoothness must be positive");
        return *options.lipschitz;
    }
    if (auto est = f.lipschitz_estimate()) return *est;
    throw std::invalid_argument(
        "solver: objective has no smoothness estimate and none was supplied");
}

inline void validate_run_inputs(const ProductDomain& domain, Schedule& schedule,
                                const BlockVector& x0) {
    if (schedule.num_blocks() != domain.num_sets())
        throw std::invalid_argument("solver: schedule and domain block counts differ");
    if (x0.shapes() != domain.shapes())
        throw std::invalid_argument("solver: x0 shape does not match domain");
    if (!x0.all_finite()) throw std::invalid_argument("solver: x0 has non-finite entries");
    if (!domain.contains(x0, 1e-8))
        throw std::invalid_argument("solver: x0 is infeasible");
}

struct RunInstrumentation {
    explicit RunInstrumentation(const ProductDomain& domain, const SolverOptions& options,
                                std::size_t coverage_window, std::size_t horizon)
        : domain_(domain),
          base_lmo_(domain.lmo_call_counts()),
          cadence_(options.store_iterates
                       ? (options.store_every ? options.store_every : coverage_window)
                       : 0),
          start_(std::chrono::steady_clock::now()) {
        result.records.reserve(horizon);
    }

    void maybe_store(std::size_t t, const BlockVector& x) {
        if (cadence_ && t % cadence_ == 0) result.stored_iterates.emplace_back(t, x);
    }

    void push_record(std::size_t t, double f_value, BlockIndexSet activated,
                     std::vector<double> gaps, std::vector<double> gammas,
                     std::optional<double> m_value, std::uint64_t f_evals,
                     std::uint64_t grad_evals) {
        IterationRecord rec;
        rec.t = t;
        rec.f_value = f_value;
        rec.activated = std::move(activated);
        rec.gaps = std::move(gaps);
        rec.gammas = std::move(gammas);
        rec.m_value = m_value;
        rec.lmo_calls = domain_.lmo_call_counts();
        for (std::size_t i = 0; i < rec.lmo_calls.size(); ++i)
            rec.lmo_calls[i] -= base_lmo_[i];
        rec.f_evals = f_evals;
        rec.grad_evals = grad_evals;
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      start_)
                            .count();
        result.records.push_back(std::move(rec));
    }

    RunResult result;

  private:
    const ProductDomain& domain_;
    std::vector<std::uint64_t> base_lmo_;
    std::size_t cadence_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Short-step engine: one gradient and |I_t| oracle calls per iteration, no
// objective evaluations required by the rule itself (the recorded objective
// values are diagnostics and are not counted in f_evals).
template <SmoothObjective F>
RunResult run_short_step(const F& f, const ProductDomain& domain, Schedule schedule,
                         const BlockVector& x0, std::size_t iterations,
                         const SolverOptions& options = {}) {
    detail::validate_run_inputs(domain, schedule, x0);
    const double smoothness = detail::resolve_smoothness(f, options);

    detail::RunInstrumentation run(domain, options, schedule.coverage_window(), iterations);
    BlockVector x = x0;
    BlockVector g(x.shapes());
    std::uint64_t grad_evals = 0;

    for (std::size_t t = 0; t < iterations; ++t) {
        run.maybe_store(t, x);
        const BlockIndexSet active = schedule.next(t);
        const double f_here = f.value(x);  // diagnostic
        f.gradient(x, g);
        ++grad_evals;
        PartialGap pg = partial_gap(g, x, active, domain);
        std::vector<double> gammas(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) {
            gammas[k] = short_step_gamma(pg.gaps[k], smoothness, pg.dist_sq[k]);
            blend_block(x, active[k], pg.vertices[k], gammas[k]);
        }
        run.push_record(t, f_here, std::move(pg.indices), std::move(pg.gaps),
                        std::move(gammas), std::nullopt, 0, grad_evals);
    }
    run.maybe_store(iterations, x);
    run.result.final_f = f.value(x);
    run.result.final_x = std::move(x);
    return run.result;
}

// Adaptive engine: per iteration the oracle vertices are computed once from
// the current gradient and cached; the smoothness estimate starts at
// eta * M_t and is multiplied by tau until the trial point passes the
// sufficient-decrease test
//     f(x_t) - f(x~) - <grad f(x~), x_t - x~>  >=  ||g_t - grad f(x~)||^2 / (2 M~).
// The test tolerates an absolute deficit of 1e-10 so that objectives which
// meet it with exact equality do not trigger spurious backtracks through
// rounding. f and grad f at the accepted trial are reused as the next
// iteration's values, so each iteration costs one evaluation plus one per
// backtrack.
template <SmoothObjective F>
RunResult run_adaptive(const F& f, const ProductDomain& domain, Schedule schedule,
                       const BlockVector& x0, std::size_t iterations, double m0,
                       double eta, double tau, const SolverOptions& options = {}) {
    if (!(m0 > 0.0)) throw std::invalid_argument("run_adaptive: m0 must be positive");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("run_adaptive: eta must lie in (0, 1]");
    if (!(tau > 1.0)) throw std::invalid_argument("run_adaptive: tau must exceed 1");
    detail::validate_run_inputs(domain, schedule, x0);
    constexpr double kDecreaseSlack = 1e-10;

    detail::RunInstrumentation run(domain, options, schedule.coverage_window(), iterations);
    BlockVector x = x0;
    BlockVector g(x.shapes());
    BlockVector g_trial(x.shapes());
    double f_x = f.value(x);
    f.gradient(x, g);
    std::uint64_t f_evals = 1, grad_evals = 1;
    double m_current = m0;

    BlockVector x_trial = x;
    for (std::size_t t = 0; t < iterations; ++t) {
        run.maybe_store(t, x);
        const BlockIndexSet active = schedule.next(t);
        PartialGap pg = partial_gap(g, x, active, domain);

        double m_trial = eta * m_current;
        std::vector<double> gammas(active.size());
        double f_trial = 0.0;
        std::size_t backtracks = 0;
        for (;;) {
            for (std::size_t k = 0; k < active.size(); ++k) {
                const std::size_t i = active[k];
                auto src = x.block(i);
                auto dst = x_trial.block(i);
                for (std::size_t e = 0; e < src.size(); ++e) dst[e] = src[e];
                gammas[k] = short_step_gamma(pg.gaps[k], m_trial, pg.dist_sq[k]);
                blend_block(x_trial, i, pg.vertices[k], gammas[k]);
            }
            f_trial = f.value(x_trial);
            f.gradient(x_trial, g_trial);
            ++f_evals;
            ++grad_evals;

            double lhs = f_x - f_trial;
            for (std::size_t i : active) {
                auto gb = g_trial.block(i);
                auto xb = x.block(i);
                auto tb = x_trial.block(i);
                for (std::size_t e = 0; e < gb.size(); ++e) lhs -= gb[e] * (xb[e] - tb[e]);
            }
            double grad_diff_sq = 0.0;
            for (std::size_t i = 0; i < x.num_blocks(); ++i) {
                auto ga = g.block(i);
                auto gb = g_trial.block(i);
                for (std::size_t e = 0; e < ga.size(); ++e) {
                    const double d = ga[e] - gb[e];
                    grad_diff_sq += d * d;
                }
            }
            const double rhs = grad_diff_sq / (2.0 * m_trial);
            if (lhs >= rhs - kDecreaseSlack) break;
            m_trial *= tau;
            if (++backtracks > options.while_cap)
                throw AdaptiveBacktrackError(
                    "run_adaptive: sufficient-decrease loop exceeded its cap of " +
                        std::to_string(options.while_cap) + " retries at iteration " +
                        std::to_string(t),
                    m_trial);
        }

        const double f_before = f_x;
        for (std::size_t i : active) {
            auto src = x_trial.block(i);
            auto dst = x.block(i);
            for (std::size_t e = 0; e < src.size(); ++e) dst[e] = src[e];
        }
        f_x = f_trial;
        std::swap(g, g_trial);
        m_current = m_trial;
        run.push_record(t, f_before, std::move(pg.indices), std::move(pg.gaps),
                        std::move(gammas), m_current, f_evals, grad_evals);
    }
    run.maybe_store(iterations, x);
    run.result.final_f = f_x;
    run.result.final_x = std::move(x);
    return run.result;
}

// Exact line-search step for one block of an objective that is quadratic
// along segments, from one directional derivative and one curvature
// evaluation. Supported as a diagnostic oracle, not a production step rule.
template <SmoothObjective F>
double componentwise_linesearch_gamma(const F& f, const BlockVector& x, std::size_t i,
                                      std::span<const double> v) {
    BlockVector g(x.shapes());
    f.gradient(x, g);
    auto gb = g.block(i);
    auto xb = x.block(i);
    if (v.size() != xb.size())
        throw std::invalid_argument("componentwise_linesearch_gamma: vertex size mismatch");
    double slope = 0.0;
    for (std::size_t e = 0; e < v.size(); ++e) slope += gb[e] * (v[e] - xb[e]);
    if (slope >= 0.0) return 0.0;
    const double f0 = f.value(x);
    const double f1 = f.value(blended(x, i, v, 1.0));
    const double curvature = 2.0 * (f1 - f0 - slope);
    if (curvature <= 0.0) return 1.0;  // descending and concave along the segment
    return std::clamp(-slope / curvature, 0.0, 1.0);
}

// Perspective-smoothed absolute value: |x| - b/2 for |x| >= b, else x^2/(2b).
// Convex and 1-Lipschitz in x, non-decreasing on [0, inf), non-increasing
// in b, and never larger than |x|.
inline double huber_perspective(double x, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("huber_perspective: b must be positive");
    const double ax = std::abs(x);
    return ax >= b ? ax - 0.5 * b : (x * x) / (2.0 * b);
}

// Reactivation gap of one coverage window: given the activation sets
// I_t, ..., I_{t+K-1} and the iterates x_{t+1}, ..., x_{t+K-1},
//   A_t = sum_{k=1}^{K-1} gap over I_{t+k-1} n (I_{t+k} u ... u I_{t+K-1})
// evaluated at x_{t+k}. Oracle calls made here are diagnostics and are not
// counted. Empty intersections contribute zero.
template <SmoothObjective F>
double extra_gap_A(const F& f, std::span<const BlockVector> window_iterates,
                   std::span<const BlockIndexSet> window_sets,
                   const ProductDomain& domain) {
    const std::size_t window = window_sets.size();
    if (window == 0) throw std::invalid_argument("extra_gap_A: empty window");
    if (window_iterates.size() + 1 != window)
        throw std::invalid_argument(
            "extra_gap_A: need exactly window-1 iterates (x_{t+1}..x_{t+K-1})");
    if (window == 1) return 0.0;

    // suffix_union[k] = I_{t+k} u ... u I_{t+K-1}
    std::vector<BlockIndexSet> suffix_union(window);
    suffix_union[window - 1] = window_sets[window - 1];
    for (std::size_t k = window - 1; k-- > 0;)
        suffix_union[k] = window_sets[k].set_union(suffix_union[k + 1]);

    double total = 0.0;
    BlockVector g;
    for (std::size_t k = 1; k < window; ++k) {
        const BlockIndexSet overlap = window_sets[k - 1].set_intersection(suffix_union[k]);
        if (overlap.empty()) continue;
        const BlockVector& x = window_iterates[k - 1];
        if (g.num_blocks() == 0) g = BlockVector(x.shapes());
        f.gradient(x, g);
        total += partial_gap(g, x, overlap, domain, /*count=*/false).total;
    }
    return total;
}

// Primal-gap bound for convex objectives after n complete coverage windows:
//   n == 1:  K L D^2 / 2 - A_0
//   n >= 2:  2 K L D^2 / (n - 1 + sum_{p=1}^{n} [2 A_{pK}/h1 + (A_{pK}/h1)^2])
// where h1 is the primal gap at iterate K. a_terms[p] holds the reactivation
// gap of window p (missing entries count as zero); when h1 <= 0 the
// reactivation refinement is dropped and the denominator is n - 1.
inline double convex_rate_bound(std::size_t n, std::size_t coverage_window,
                                double smoothness, double diameter,
                                std::span<const double> a_terms = {},
                                double primal_gap_at_window = 0.0) {
    if (n == 0) throw std::invalid_argument("convex_rate_bound: n must be >= 1");
    if (coverage_window == 0 || !(smoothness > 0.0) || !(diameter >= 0.0))
        throw std::invalid_argument("convex_rate_bound: bad parameters");
    const double kld2 =
        static_cast<double>(coverage_window) * smoothness * diameter * diameter;
    if (n == 1) {
        const double a0 = a_terms.empty() ? 0.0 : a_terms[0];
        return 0.5 * kld2 - a0;
    }
    double denom = static_cast<double>(n - 1);
    if (primal_gap_at_window > 0.0) {
        for (std::size_t p = 1; p <= n && p < a_terms.size(); ++p) {
            const double ratio = a_terms[p] / primal_gap_at_window;
            denom += 2.0 * ratio + ratio * ratio;
        }
    }
    return 2.0 * kld2 / denom;
}

// Bound on the smallest full Frank-Wolfe gap seen in the first n coverage
// windows of a (possibly nonconvex) run with initial level H0:
//   2 H0 / n + K L D^2 / 2   when n <= 2 H0 / (K L D^2),
//   2 D sqrt(H0 K L / n)     otherwise.
inline double nonconvex_rate_bound(std::size_t n, std::size_t coverage_window,
                                   double smoothness, double diameter, double h0) {
    if (n == 0) throw std::invalid_argument("nonconvex_rate_bound: n must be >= 1");
    if (coverage_window == 0 || !(smoothness > 0.0) || !(diameter >= 0.0) || !(h0 >= 0.0))
        throw std::invalid_argument("nonconvex_rate_bound: bad parameters");
    const double kld2 =
        static_cast<double>(coverage_window) * smoothness * diameter * diameter;
    const double nn = static_cast<double>(n);
    if (kld2 > 0.0 && nn <= 2.0 * h0 / kld2) return 2.0 * h0 / nn + 0.5 * kld2;
    return 2.0 * diameter *
           std::sqrt(h0 * static_cast<double>(coverage_window) * smoothness / nn);
}

}  // namespace bcfw
