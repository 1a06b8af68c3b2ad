#pragma once

// Independent reference implementations used to cross-check the library:
// dense eigen/SVD computations via Eigen, a straight-line single-set
// Frank-Wolfe, golden-section line search, and feasible-point samplers driven
// by std::mt19937_64 (deliberately not the library PRNG).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline Eigen::MatrixXd to_matrix(std::span<const double> a, std::size_t rows,
                                 std::size_t cols) {
    if (a.size() != rows * cols) throw std::invalid_argument("to_matrix: size mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = a[i * cols + j];
    return m;
}

inline std::vector<double> from_matrix(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
    return out;
}

// Ascending eigenvalues of a (symmetrized) square matrix.
inline std::vector<double> sym_eigenvalues(std::span<const double> a, std::size_t n) {
    Eigen::MatrixXd m = to_matrix(a, n, n);
    Eigen::MatrixXd s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = es.eigenvalues()(static_cast<long>(i));
    return vals;
}

inline double lambda_min(std::span<const double> a, std::size_t n) {
    return sym_eigenvalues(a, n).front();
}

inline double lambda_max(std::span<const double> a, std::size_t n) {
    return sym_eigenvalues(a, n).back();
}

// Descending singular values.
inline std::vector<double> singular_values(std::span<const double> a, std::size_t rows,
                                           std::size_t cols) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_matrix(a, rows, cols));
    std::vector<double> vals(static_cast<std::size_t>(svd.singularValues().size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = svd.singularValues()(static_cast<long>(i));
    return vals;
}

inline double sigma_max(std::span<const double> a, std::size_t rows, std::size_t cols) {
    return singular_values(a, rows, cols).front();
}

inline double nuclear_norm(std::span<const double> a, std::size_t rows, std::size_t cols) {
    const auto vals = singular_values(a, rows, cols);
    double sum = 0.0;
    for (double v : vals) sum += v;
    return sum;
}

inline double spectral_norm_sym(std::span<const double> a, std::size_t n) {
    const auto vals = sym_eigenvalues(a, n);
    return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

// Nearest PSD matrix in Frobenius norm: symmetrize, clip negative eigenvalues.
inline std::vector<double> nearest_psd(std::span<const double> w, std::size_t n) {
    Eigen::MatrixXd m = to_matrix(w, n, n);
    Eigen::MatrixXd s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd out =
        es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    return from_matrix(out);
}

// Golden-section search for the minimum of a unimodal function on [lo, hi].
inline double golden_section_min(const std::function<double(double)>& f, double lo,
                                 double hi, double tol = 1e-10) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Upper bound on h_t for sequences obeying h_t - h_{t+1} >= rho(h_t + a_t, b):
//   t = 1:   b/2 - a_0
//   t >= 2:  2b / (t - 1 + 2b/h_1 + sum_{k=1}^{t-1} [2 a_k/h_1 + (a_k/h_1)^2])
inline double recursion_lemma_bound(std::size_t t, double h1, double b,
                                    std::span<const double> a) {
    if (t == 0) throw std::invalid_argument("recursion_lemma_bound: t >= 1");
    if (t == 1) return 0.5 * b - (a.empty() ? 0.0 : a[0]);
    if (!(h1 > 0.0)) throw std::invalid_argument("recursion_lemma_bound: h1 must be > 0");
    double denom = static_cast<double>(t - 1) + 2.0 * b / h1;
    for (std::size_t k = 1; k < t && k < a.size(); ++k) {
        const double r = a[k] / h1;
        denom += 2.0 * r + r * r;
    }
    return 2.0 * b / denom;
}

// Straight-line short-step Frank-Wolfe over a single set, written against
// flat vectors with callable oracles; returns x_0, ..., x_T.
template <class Grad, class Lmo>
std::vector<std::vector<double>> reference_short_step_fw(const Grad& grad, const Lmo& lmo,
                                                         std::vector<double> x0, double L,
                                                         std::size_t T) {
    std::vector<std::vector<double>> iterates{x0};
    std::vector<double> x = std::move(x0);
    for (std::size_t t = 0; t < T; ++t) {
        const std::vector<double> g = grad(x);
        const std::vector<double> v = lmo(g);
        double gap = 0.0, dist_sq = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            gap += g[k] * (x[k] - v[k]);
            dist_sq += (x[k] - v[k]) * (x[k] - v[k]);
        }
        if (gap < 0.0) gap = 0.0;
        const double gamma =
            (gap <= 0.0 || dist_sq <= 0.0) ? 0.0 : std::min(1.0, gap / (L * dist_sq));
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += gamma * (v[k] - x[k]);
        iterates.push_back(x);
    }
    return iterates;
}

// ---- feasible-point samplers (reference RNG, not the library's) ----

inline std::vector<double> sample_box(std::mt19937_64& rng, std::span<const double> lower,
                                      std::span<const double> upper) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(lower.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = lower[k] + u(rng) * (upper[k] - lower[k]);
    return x;
}

inline std::vector<double> sample_linf(std::mt19937_64& rng, std::size_t d, double r) {
    std::uniform_real_distribution<double> u(-r, r);
    std::vector<double> x(d);
    for (double& v : x) v = u(rng);
    return x;
}

inline std::vector<double> sample_spectraplex(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) G(i, j) = g(rng);
    Eigen::MatrixXd s = G * G.transpose();
    s /= s.trace();
    return from_matrix(s);
}

inline std::vector<double> sample_nuclear(std::mt19937_64& rng, std::size_t rows,
                                          std::size_t cols, double r) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(rows * cols);
    for (double& v : x) v = g(rng);
    const double scale = u(rng) * r / std::max(nuclear_norm(x, rows, cols), 1e-300);
    for (double& v : x) v *= scale;
    return x;
}

}  // namespace oracle
