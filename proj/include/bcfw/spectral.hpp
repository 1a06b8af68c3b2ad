#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

// Dense symmetric eigen-solvers used by the linear minimization oracles and
// feasibility checks. All routines are deterministic: fixed sweep order, fixed
// sign convention, no hidden global state. Matrices are row-major spans;
// symmetric inputs are the caller's responsibility.

namespace bcfw {

// max_i sum_j |A_ij|, the infinity norm; also a Gershgorin bound on |lambda|.
inline double inf_norm(std::span<const double> a, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
        best = std::max(best, row);
    }
    return best;
}

// Gershgorin upper bound: every eigenvalue of symmetric S is <= this value.
inline double gershgorin_upper(std::span<const double> s, std::size_t n) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) radius += std::abs(s[i * n + j]);
        best = std::max(best, s[i * n + i] + radius);
    }
    return best;
}

struct EigenDecomposition {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row k = unit eigenvector of values[k]
};

// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Deterministic sweep order; converges quadratically, so the sweep cap is
// generous. This is the single spectral workhorse, including for the
// per-iteration oracles: at the dense sizes this library targets it costs
// about the same as an iterative method, and unlike one it cannot settle on
// a sub-dominant eigenpair. (A power method was tried and removed: with any
// fixed deterministic start, the solver's own iterates can feed the start
// direction back into subsequent gradients, making it an exact eigenvector
// of the wrong eigenvalue. The residual then vanishes and every stopping
// test certifies a confidently wrong answer.)
inline EigenDecomposition jacobi_eigh(std::span<const double> s_mat, std::size_t n) {
    if (n == 0) throw std::invalid_argument("jacobi_eigh: empty matrix");
    std::vector<double> a(s_mat.begin(), s_mat.end());
    std::vector<double> vmat(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vmat[i * n + i] = 1.0;

    double frob = 0.0;
    for (double x : a) frob += x * x;
    frob = std::sqrt(frob);
    const double tol = 1e-13 * std::max(1.0, frob);

    const std::size_t max_sweeps = 64;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        off = std::sqrt(2.0 * off);
        if (off <= tol) {
            EigenDecomposition d;
            d.values.resize(n);
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return a[x * n + x] < a[y * n + y];
            });
            d.vectors.resize(n * n);
            for (std::size_t k = 0; k < n; ++k) {
                d.values[k] = a[order[k] * n + order[k]];
                for (std::size_t i = 0; i < n; ++i)
                    d.vectors[k * n + i] = vmat[i * n + order[k]];
            }
            return d;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vmat[k * n + p];
                    const double vkq = vmat[k * n + q];
                    vmat[k * n + p] = c * vkp - s * vkq;
                    vmat[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    throw std::runtime_error("jacobi_eigh: did not converge");
}

struct EigenPair {
    std::vector<double> vector;  // unit eigenvector
    double value = 0.0;
};

namespace detail {

// Copies eigenvector k out of a decomposition with a deterministic sign:
// the largest-magnitude entry (first such index on ties) is made positive,
// so repeated calls and refactors of the decomposition agree bit-for-bit.
inline EigenPair oriented_pair(const EigenDecomposition& d, std::size_t n, std::size_t k) {
    EigenPair p;
    p.value = d.values[k];
    p.vector.assign(d.vectors.begin() + static_cast<std::ptrdiff_t>(k * n),
                    d.vectors.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    std::size_t lead = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(p.vector[i]) > std::abs(p.vector[lead])) lead = i;
    if (p.vector[lead] < 0.0)
        for (double& x : p.vector) x = -x;
    return p;
}

}  // namespace detail

// Smallest eigenpair of symmetric S.
inline EigenPair min_eigenpair(std::span<const double> s_mat, std::size_t n) {
    if (n == 0) throw std::invalid_argument("min_eigenpair: empty matrix");
    if (n == 1) return {{1.0}, s_mat[0]};
    return detail::oriented_pair(jacobi_eigh(s_mat, n), n, 0);
}

// Largest eigenpair of symmetric S.
inline EigenPair max_eigenpair(std::span<const double> s_mat, std::size_t n) {
    if (n == 0) throw std::invalid_argument("max_eigenpair: empty matrix");
    if (n == 1) return {{1.0}, s_mat[0]};
    return detail::oriented_pair(jacobi_eigh(s_mat, n), n, n - 1);
}

struct SingularTriple {
    std::vector<double> u;  // left singular vector, length rows
    std::vector<double> v;  // right singular vector, length cols
    double sigma = 0.0;
};

// Top singular triple of a dense rows x cols matrix: the dominant eigenpair
// of the Gram matrix A^T A gives v1, then u1 = A v1 / ||A v1||.
inline SingularTriple top_singular_triple(std::span<const double> a, std::size_t rows,
                                          std::size_t cols) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("top_singular_triple: empty matrix");
    std::vector<double> gram(cols * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double aij = a[i * cols + j];
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < cols; ++k)
                gram[j * cols + k] += aij * a[i * cols + k];
        }
    SingularTriple t;
    if (inf_norm(gram, cols) == 0.0) {
        t.u.assign(rows, 0.0);
        t.v.assign(cols, 0.0);
        t.sigma = 0.0;
        return t;
    }
    EigenPair p = max_eigenpair(gram, cols);
    t.v = std::move(p.vector);
    t.sigma = std::sqrt(std::max(p.value, 0.0));
    t.u.assign(rows, 0.0);
    double nu = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += a[i * cols + j] * t.v[j];
        t.u[i] = acc;
        nu += acc * acc;
    }
    nu = std::sqrt(nu);
    if (nu <= 0.0) {
        // sigma == 0 exactly; keep u at zero, callers treat this as A == 0.
        t.sigma = 0.0;
        return t;
    }
    for (double& x : t.u) x /= nu;
    return t;
}

}  // namespace bcfw
