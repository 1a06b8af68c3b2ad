#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bcfw/block_vector.hpp"
#include "bcfw/spectral.hpp"

// Built-in constraint sets and their linear minimization oracles. Each oracle
// returns argmin_{v in S} <c, v> as a dense tensor matching the set's shape.
// Ties are broken deterministically so runs are bit-reproducible.

namespace bcfw {

// Entrywise box [lower, upper]: pick lower where c > 0, upper where c < 0,
// lower on exact zeros.
inline std::vector<double> lmo_box(std::span<const double> c,
                                   std::span<const double> lower,
                                   std::span<const double> upper) {
    if (c.size() != lower.size() || c.size() != upper.size())
        throw std::invalid_argument("lmo_box: size mismatch");
    std::vector<double> v(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        v[k] = (c[k] < 0.0) ? upper[k] : lower[k];
    return v;
}

// Infinity-norm ball of radius r: v_k = -r * sign(c_k), with sign(0) := +1.
inline std::vector<double> lmo_linf_ball(std::span<const double> c, double radius) {
    std::vector<double> v(c.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        v[k] = (c[k] < 0.0) ? radius : -radius;
    return v;
}

// Spectraplex {X symmetric PSD, tr X = 1}: minimizing <c, X> over X gives the
// rank-one matrix u u^T built from the smallest eigenvector of the symmetric
// part (c + c^T)/2; the optimal value is that smallest eigenvalue.
inline std::vector<double> lmo_spectraplex(std::span<const double> c, std::size_t n) {
    if (c.size() != n * n) throw std::invalid_argument("lmo_spectraplex: size mismatch");
    std::vector<double> sym(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sym[i * n + j] = 0.5 * (c[i * n + j] + c[j * n + i]);
    EigenPair p = min_eigenpair(sym, n);
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            v[i * n + j] = p.vector[i] * p.vector[j];
    return v;
}

// Nuclear-norm ball of radius r: -r * u1 v1^T from the top singular triple;
// the zero matrix when c == 0.
inline std::vector<double> lmo_nuclear_ball(std::span<const double> c, double radius,
                                            std::size_t rows, std::size_t cols) {
    if (c.size() != rows * cols)
        throw std::invalid_argument("lmo_nuclear_ball: size mismatch");
    bool all_zero = true;
    for (double x : c)
        if (x != 0.0) { all_zero = false; break; }
    std::vector<double> v(rows * cols, 0.0);
    if (all_zero) return v;
    SingularTriple t = top_singular_triple(c, rows, cols);
    if (t.sigma == 0.0) return v;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            v[i * cols + j] = -radius * t.u[i] * t.v[j];
    return v;
}

// One factor of the product domain.
class ConstraintSet {
  public:
    enum class Kind { box, linf_ball, spectraplex, nuclear_ball };

    static ConstraintSet box(BlockShape shape, double lower, double upper) {
        return box(shape, std::vector<double>(shape.size(), lower),
                   std::vector<double>(shape.size(), upper));
    }

    static ConstraintSet box(BlockShape shape, std::vector<double> lower,
                             std::vector<double> upper) {
        if (lower.size() != shape.size() || upper.size() != shape.size())
            throw std::invalid_argument("ConstraintSet::box: bound size mismatch");
        for (std::size_t k = 0; k < lower.size(); ++k)
            if (!(lower[k] <= upper[k]) || !std::isfinite(lower[k]) ||
                !std::isfinite(upper[k]))
                throw std::invalid_argument(
                    "ConstraintSet::box: bounds must be finite with lower <= upper");
        ConstraintSet s(Kind::box, shape);
        s.lower_ = std::move(lower);
        s.upper_ = std::move(upper);
        return s;
    }

    static ConstraintSet linf_ball(BlockShape shape, double radius) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("ConstraintSet::linf_ball: radius must be positive");
        ConstraintSet s(Kind::linf_ball, shape);
        s.radius_ = radius;
        return s;
    }

    static ConstraintSet spectraplex(std::size_t n) {
        if (n == 0) throw std::invalid_argument("ConstraintSet::spectraplex: n must be positive");
        return ConstraintSet(Kind::spectraplex, matrix_shape(n, n));
    }

    static ConstraintSet nuclear_ball(std::size_t rows, std::size_t cols, double radius) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("ConstraintSet::nuclear_ball: empty shape");
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("ConstraintSet::nuclear_ball: radius must be positive");
        ConstraintSet s(Kind::nuclear_ball, matrix_shape(rows, cols));
        s.radius_ = radius;
        return s;
    }

    Kind kind() const { return kind_; }
    const BlockShape& shape() const { return shape_; }
    double radius() const { return radius_; }
    std::span<const double> lower() const { return lower_; }
    std::span<const double> upper() const { return upper_; }

    std::vector<double> lmo(std::span<const double> c) const {
        if (c.size() != shape_.size())
            throw std::invalid_argument("ConstraintSet::lmo: objective size mismatch");
        switch (kind_) {
            case Kind::box: return lmo_box(c, lower_, upper_);
            case Kind::linf_ball: return lmo_linf_ball(c, radius_);
            case Kind::spectraplex: return lmo_spectraplex(c, shape_.rows);
            case Kind::nuclear_ball:
                return lmo_nuclear_ball(c, radius_, shape_.rows, shape_.cols);
        }
        throw std::logic_error("ConstraintSet::lmo: unreachable");
    }

    // Euclidean diameter of the set.
    double diameter() const {
        switch (kind_) {
            case Kind::box: {
                double acc = 0.0;
                for (std::size_t k = 0; k < lower_.size(); ++k) {
                    const double d = upper_[k] - lower_[k];
                    acc += d * d;
                }
                return std::sqrt(acc);
            }
            case Kind::linf_ball:
                return 2.0 * radius_ * std::sqrt(static_cast<double>(shape_.size()));
            case Kind::spectraplex:
                // ||u u^T - v v^T||_F maximized at orthogonal u, v.
                return std::sqrt(2.0);
            case Kind::nuclear_ball:
                return 2.0 * radius_;
        }
        throw std::logic_error("ConstraintSet::diameter: unreachable");
    }

    bool contains(std::span<const double> x, double tol = 1e-9) const {
        if (x.size() != shape_.size())
            throw std::invalid_argument("ConstraintSet::contains: size mismatch");
        switch (kind_) {
            case Kind::box:
                for (std::size_t k = 0; k < x.size(); ++k)
                    if (x[k] < lower_[k] - tol || x[k] > upper_[k] + tol) return false;
                return true;
            case Kind::linf_ball:
                for (double v : x)
                    if (std::abs(v) > radius_ + tol) return false;
                return true;
            case Kind::spectraplex: {
                const std::size_t n = shape_.rows;
                double trace = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    trace += x[i * n + i];
                    for (std::size_t j = i + 1; j < n; ++j)
                        if (std::abs(x[i * n + j] - x[j * n + i]) > tol) return false;
                }
                if (std::abs(trace - 1.0) > tol) return false;
                std::vector<double> sym(n * n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        sym[i * n + j] = 0.5 * (x[i * n + j] + x[j * n + i]);
                return min_eigenpair(sym, n).value >= -tol;
            }
            case Kind::nuclear_ball: {
                // Eigenvalues of the symmetric embedding [[0, X], [X^T, 0]] are
                // +/- the singular values of X, so the nuclear norm is half the
                // sum of their magnitudes. (Going through X^T X instead would
                // square-root the eigensolver noise, ~1e-13 -> ~3e-7, and break
                // membership checks at tighter tolerances than that.)
                const std::size_t rows = shape_.rows, cols = shape_.cols;
                const std::size_t n = rows + cols;
                std::vector<double> emb(n * n, 0.0);
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < cols; ++j) {
                        emb[i * n + (rows + j)] = x[i * cols + j];
                        emb[(rows + j) * n + i] = x[i * cols + j];
                    }
                EigenDecomposition d = jacobi_eigh(emb, n);
                double nuclear = 0.0;
                for (double lam : d.values) nuclear += 0.5 * std::abs(lam);
                return nuclear <= radius_ + tol;
            }
        }
        throw std::logic_error("ConstraintSet::contains: unreachable");
    }

  private:
    ConstraintSet(Kind kind, BlockShape shape) : kind_(kind), shape_(shape) {}

    Kind kind_;
    BlockShape shape_;
    double radius_ = 0.0;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

// Cartesian product of constraint sets. Owns the per-set oracle call
// counters; increments are atomic so the per-block oracles of one iteration
// may run concurrently.
class ProductDomain {
  public:
    explicit ProductDomain(std::vector<ConstraintSet> sets) : sets_(std::move(sets)) {
        if (sets_.empty())
            throw std::invalid_argument("ProductDomain: needs at least one set");
        counters_ = std::vector<std::atomic<std::uint64_t>>(sets_.size());
    }

    ProductDomain(const ProductDomain& other) : sets_(other.sets_) {
        counters_ = std::vector<std::atomic<std::uint64_t>>(sets_.size());
        for (std::size_t i = 0; i < sets_.size(); ++i)
            counters_[i].store(other.counters_[i].load());
    }

    ProductDomain& operator=(const ProductDomain& other) {
        if (this != &other) {
            sets_ = other.sets_;
            counters_ = std::vector<std::atomic<std::uint64_t>>(sets_.size());
            for (std::size_t i = 0; i < sets_.size(); ++i)
                counters_[i].store(other.counters_[i].load());
        }
        return *this;
    }

    std::size_t num_sets() const { return sets_.size(); }
    const ConstraintSet& set(std::size_t i) const { return sets_.at(i); }

    std::vector<BlockShape> shapes() const {
        std::vector<BlockShape> s;
        s.reserve(sets_.size());
        for (const auto& c : sets_) s.push_back(c.shape());
        return s;
    }

    BlockVector zero_vector() const { return BlockVector(shapes()); }

    // Sum of squared per-set diameters (squared diameter of the product).
    double diameter_sq() const {
        double acc = 0.0;
        for (const auto& s : sets_) {
            const double d = s.diameter();
            acc += d * d;
        }
        return acc;
    }

    // Counted oracle call for set i.
    std::vector<double> lmo(std::size_t i, std::span<const double> c,
                            bool count = true) const {
        if (i >= sets_.size()) throw std::out_of_range("ProductDomain::lmo: bad index");
        if (count) counters_[i].fetch_add(1, std::memory_order_relaxed);
        return sets_[i].lmo(c);
    }

    std::uint64_t lmo_calls(std::size_t i) const { return counters_.at(i).load(); }

    std::vector<std::uint64_t> lmo_call_counts() const {
        std::vector<std::uint64_t> out(sets_.size());
        for (std::size_t i = 0; i < sets_.size(); ++i) out[i] = counters_[i].load();
        return out;
    }

    void reset_lmo_counts() const {
        for (auto& c : counters_) c.store(0);
    }

    bool contains(const BlockVector& x, double tol = 1e-9) const {
        if (x.num_blocks() != sets_.size()) return false;
        for (std::size_t i = 0; i < sets_.size(); ++i) {
            if (!(x.shape(i) == sets_[i].shape())) return false;
            if (!sets_[i].contains(x.block(i), tol)) return false;
        }
        return true;
    }

  private:
    std::vector<ConstraintSet> sets_;
    mutable std::vector<std::atomic<std::uint64_t>> counters_;
};

// Oracles for the blocks in J against the matching blocks of c; result k
// pairs with J[k]. Each call increments that set's counter once.
inline std::vector<std::vector<double>> lmo_product(const ProductDomain& domain,
                                                    const BlockVector& c,
                                                    const BlockIndexSet& J,
                                                    bool count = true) {
    if (J.empty()) throw std::invalid_argument("lmo_product: empty index set");
    std::vector<std::vector<double>> out;
    out.reserve(J.size());
    for (std::size_t i : J) out.push_back(domain.lmo(i, c.block(i), count));
    return out;
}

}  // namespace bcfw
