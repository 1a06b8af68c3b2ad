#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bcfw/block_vector.hpp"
#include "bcfw/spectral.hpp"

// Smooth objectives over block vectors. An objective reports its value,
// writes its gradient block-structured into a preallocated BlockVector, and
// may advertise a smoothness constant.

namespace bcfw {

template <class F>
concept SmoothObjective = requires(const F& f, const BlockVector& x, BlockVector& g) {
    { f.value(x) } -> std::convertible_to<double>;
    { f.gradient(x, g) } -> std::same_as<void>;
    { f.lipschitz_estimate() } -> std::same_as<std::optional<double>>;
};

// f(x) = 1/2 ||x^1 - x^2||^2 over two equally shaped blocks; gradient is
// (x^1 - x^2, x^2 - x^1). Smoothness constant 2 (Hessian eigenvalues {0, 2}).
class QuadraticDistance {
  public:
    double value(const BlockVector& x) const {
        check(x);
        auto a = x.block(0);
        auto b = x.block(1);
        double acc = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double d = a[k] - b[k];
            acc += d * d;
        }
        return 0.5 * acc;
    }

    void gradient(const BlockVector& x, BlockVector& g) const {
        check(x);
        require_same_shape(x, g, "QuadraticDistance::gradient");
        auto a = x.block(0);
        auto b = x.block(1);
        auto ga = g.block(0);
        auto gb = g.block(1);
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double d = a[k] - b[k];
            ga[k] = d;
            gb[k] = -d;
        }
    }

    std::optional<double> lipschitz_estimate() const { return 2.0; }

  private:
    static void check(const BlockVector& x) {
        if (x.num_blocks() != 2 || !(x.shape(0) == x.shape(1)))
            throw std::invalid_argument(
                "QuadraticDistance: expects two blocks of equal shape");
    }
};

// Difference-of-convex quadratic over a collated variable. Blocks 0..n-1 are
// the rows of the top n x n submatrix of X and block n is the bottom n x n
// submatrix; X is the collated 2n x n matrix. With M = A - B symmetric,
//   f(x) = 1/2 <X, X M>_F,   grad f(X) = X M  (de-collated the same way).
class CollatedQuadraticDifference {
  public:
    CollatedQuadraticDifference(std::size_t n, std::vector<double> a, std::vector<double> b)
        : n_(n), m_(n * n) {
        if (n == 0) throw std::invalid_argument("CollatedQuadraticDifference: n == 0");
        if (a.size() != n * n || b.size() != n * n)
            throw std::invalid_argument("CollatedQuadraticDifference: A, B must be n x n");
        for (std::size_t k = 0; k < n * n; ++k) m_[k] = a[k] - b[k];
        // Build from PSD summands; symmetry of M is inherited, but guard the
        // contract anyway since all formulas below assume it.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::abs(m_[i * n + j] - m_[j * n + i]) >
                    1e-9 * (1.0 + std::abs(m_[i * n + j])))
                    throw std::invalid_argument(
                        "CollatedQuadraticDifference: A - B must be symmetric");
        a_ = std::move(a);
        b_ = std::move(b);
    }

    std::size_t n() const { return n_; }
    std::span<const double> difference_matrix() const { return m_; }
    std::span<const double> psd_part_a() const { return a_; }
    std::span<const double> psd_part_b() const { return b_; }

    // Expected block layout: n vector blocks of length n, then one n x n block.
    static std::vector<BlockShape> block_shapes(std::size_t n) {
        std::vector<BlockShape> shapes(n, vector_shape(n));
        shapes.push_back(matrix_shape(n, n));
        return shapes;
    }

    double value(const BlockVector& x) const {
        check(x);
        // 1/2 sum_r <X_r, (X M)_r> over the 2n rows of the collated matrix.
        double acc = 0.0;
        std::vector<double> xm(n_);
        for (std::size_t r = 0; r < 2 * n_; ++r) {
            std::span<const double> row = collated_row(x, r);
            row_times_m(row, xm);
            for (std::size_t j = 0; j < n_; ++j) acc += row[j] * xm[j];
        }
        return 0.5 * acc;
    }

    void gradient(const BlockVector& x, BlockVector& g) const {
        check(x);
        require_same_shape(x, g, "CollatedQuadraticDifference::gradient");
        std::vector<double> xm(n_);
        for (std::size_t r = 0; r < 2 * n_; ++r) {
            row_times_m(collated_row(x, r), xm);
            std::span<double> grow =
                (r < n_) ? g.block(r)
                         : g.block(n_).subspan((r - n_) * n_, n_);
            for (std::size_t j = 0; j < n_; ++j) grow[j] = xm[j];
        }
    }

    // ||M||_F, a valid smoothness constant since ||M||_2 <= ||M||_F.
    std::optional<double> lipschitz_estimate() const {
        double acc = 0.0;
        for (double v : m_) acc += v * v;
        return std::sqrt(acc);
    }

  private:
    void check(const BlockVector& x) const {
        if (x.num_blocks() != n_ + 1)
            throw std::invalid_argument("CollatedQuadraticDifference: expects n+1 blocks");
        for (std::size_t i = 0; i < n_; ++i)
            if (!(x.shape(i) == vector_shape(n_)))
                throw std::invalid_argument(
                    "CollatedQuadraticDifference: row blocks must be length-n vectors");
        if (!(x.shape(n_) == matrix_shape(n_, n_)))
            throw std::invalid_argument(
                "CollatedQuadraticDifference: last block must be n x n");
    }

    std::span<const double> collated_row(const BlockVector& x, std::size_t r) const {
        return (r < n_) ? x.block(r) : x.block(n_).subspan((r - n_) * n_, n_);
    }

    void row_times_m(std::span<const double> row, std::vector<double>& out) const {
        for (std::size_t j = 0; j < n_; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n_; ++k) acc += row[k] * m_[k * n_ + j];
            out[j] = acc;
        }
    }

    std::size_t n_;
    std::vector<double> m_;
    std::vector<double> a_;
    std::vector<double> b_;
};

// Central-difference gradient check: max over all coordinates of the
// relative discrepancy |fd - grad| / max(1, ||grad||_inf).
template <SmoothObjective F>
double finite_diff_check(const F& f, const BlockVector& x, double h = 1e-5) {
    BlockVector g(x.shapes());
    f.gradient(x, g);
    double gmax = 0.0;
    for (std::size_t i = 0; i < g.num_blocks(); ++i)
        for (double v : g.block(i)) gmax = std::max(gmax, std::abs(v));
    const double denom = std::max(1.0, gmax);

    BlockVector probe = x;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
        auto pb = probe.block(i);
        auto gb = g.block(i);
        for (std::size_t k = 0; k < pb.size(); ++k) {
            const double saved = pb[k];
            pb[k] = saved + h;
            const double fp = f.value(probe);
            pb[k] = saved - h;
            const double fm = f.value(probe);
            pb[k] = saved;
            const double fd = (fp - fm) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - gb[k]) / denom);
        }
    }
    return worst;
}

// Nearest PSD matrix in Frobenius norm: symmetrize, eigendecompose, clip
// negative eigenvalues to zero, reassemble.
inline std::vector<double> psd_project(std::span<const double> w, std::size_t n) {
    if (w.size() != n * n) throw std::invalid_argument("psd_project: size mismatch");
    std::vector<double> sym(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sym[i * n + j] = 0.5 * (w[i * n + j] + w[j * n + i]);
    EigenDecomposition d = jacobi_eigh(sym, n);
    std::vector<double> out(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = d.values[k];
        if (lam <= 0.0) continue;
        const double* u = d.vectors.data() + k * n;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += lam * u[i] * u[j];
    }
    return out;
}

}  // namespace bcfw
