#ifndef EIGENSPOT_SVD_HPP
#define EIGENSPOT_SVD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eigenspot/errors.hpp"
#include "eigenspot/matrix.hpp"

namespace eigenspot {

/// Dominant singular triple of a count matrix.
///
/// `spatial` is the principal left singular vector (one entry per region),
/// `temporal` the principal right one (one entry per period). Both are unit
/// vectors, sign-normalized so that sum(spatial) >= 0 with the same flip
/// applied to `temporal`; for nonnegative matrices this picks the
/// entrywise-nonnegative Perron representative.
struct SingularPair {
    double sigma = 0.0;
    std::vector<double> spatial;
    std::vector<double> temporal;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

inline void scale(std::vector<double>& v, double k) {
    for (double& x : v) x *= k;
}

// y = M * x, row-major n x m
inline void matvec(const CountMatrix& m, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = m.n_regions(), p = m.n_periods();
    const double* a = m.values().data();
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = a + i * p;
        for (std::size_t j = 0; j < p; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

// y = M^T * x
inline void matvec_t(const CountMatrix& m, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = m.n_regions(), p = m.n_periods();
    const double* a = m.values().data();
    y.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double* row = a + i * p;
        for (std::size_t j = 0; j < p; ++j) y[j] += row[j] * xi;
    }
}

inline void apply_sign_convention(SingularPair& sp) {
    double s = 0.0;
    for (double x : sp.spatial) s += x;
    if (s < 0.0) {
        for (double& x : sp.spatial) x = -x;
        for (double& x : sp.temporal) x = -x;
    }
}

// Cyclic Jacobi eigen-decomposition of a symmetric k x k matrix (row-major).
// Returns eigenvalues in `eval` and eigenvectors as columns of `evec`.
// The iteration runs on a max-norm-scaled copy so the 1e-12 off-diagonal
// target is meaningful regardless of input magnitude.
inline void jacobi_eigen(std::vector<double> a, std::size_t k, std::vector<double>& eval,
                         std::vector<double>& evec) {
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::abs(v));
    if (amax == 0.0) amax = 1.0;
    for (double& v : a) v /= amax;

    evec.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) evec[i * k + i] = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) off += 2.0 * a[i * k + j] * a[i * k + j];
        if (std::sqrt(off) < 1e-12) break;

        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = a[p * k + q];
                if (apq == 0.0) continue;
                const double app = a[p * k + p];
                const double aqq = a[q * k + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < k; ++i) {
                    const double aip = a[i * k + p];
                    const double aiq = a[i * k + q];
                    a[i * k + p] = c * aip - s * aiq;
                    a[i * k + q] = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < k; ++j) {
                    const double apj = a[p * k + j];
                    const double aqj = a[q * k + j];
                    a[p * k + j] = c * apj - s * aqj;
                    a[q * k + j] = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    const double vip = evec[i * k + p];
                    const double viq = evec[i * k + q];
                    evec[i * k + p] = c * vip - s * viq;
                    evec[i * k + q] = s * vip + c * viq;
                }
            }
        }
    }

    eval.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) eval[i] = a[i * k + i] * amax;
}

}  // namespace detail

/// Dominant singular triple by alternating power iteration.
///
/// Starts from the normalized row-sum vector (never orthogonal to the Perron
/// vector of a nonnegative matrix) and stops once both the relative change in
/// sigma and the max-norm change of the temporal vector drop below `tol`.
/// `converged == false` after max_iter signals a near-degenerate top of the
/// spectrum rather than an error.
inline SingularPair rank1_svd(const CountMatrix& m, double tol = 1e-10, int max_iter = 10000) {
    if (tol <= 0.0) throw ConfigError("rank1_svd: tol must be positive");
    if (max_iter <= 0) throw ConfigError("rank1_svd: max_iter must be positive");
    if (m.all_zero()) throw AllZeroMatrixError("rank1_svd: all-zero matrix");

    const std::size_t n = m.n_regions(), p = m.n_periods();
    SingularPair sp;
    sp.spatial.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += m(i, j);
        sp.spatial[i] = s;
    }
    detail::scale(sp.spatial, 1.0 / detail::norm2(sp.spatial));

    std::vector<double> v, v_prev, w;
    double sigma = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        detail::matvec_t(m, sp.spatial, v);
        const double vn = detail::norm2(v);
        if (vn == 0.0) throw AllZeroMatrixError("rank1_svd: degenerate projection");
        detail::scale(v, 1.0 / vn);

        detail::matvec(m, v, w);
        const double sigma_new = detail::norm2(w);
        sp.spatial = w;
        detail::scale(sp.spatial, 1.0 / sigma_new);
        sp.iterations = it;

        double dv = 0.0;
        if (!v_prev.empty()) {
            for (std::size_t j = 0; j < p; ++j) dv = std::max(dv, std::abs(v[j] - v_prev[j]));
        }
        if (it > 1 && std::abs(sigma_new - sigma) < tol * std::max(1.0, sigma_new) && dv < tol) {
            sigma = sigma_new;
            sp.converged = true;
            break;
        }
        sigma = sigma_new;
        v_prev = v;
    }
    sp.sigma = sigma;
    sp.temporal = v;
    detail::apply_sign_convention(sp);
    return sp;
}

/// Dense test oracle: dominant triple via Jacobi eigen-decomposition of the
/// smaller Gram matrix. Guarded to test-scale inputs (min(n, m) <= 64).
inline SingularPair svd_oracle(const CountMatrix& m) {
    const std::size_t n = m.n_regions(), p = m.n_periods();
    if (std::min(n, p) > 64) {
        throw OracleSizeExceededError("svd_oracle: min(n, m) exceeds 64");
    }
    if (m.all_zero()) throw AllZeroMatrixError("svd_oracle: all-zero matrix");

    const bool use_cols = p <= n;  // Gram side: M^T M (p x p) or M M^T (n x n)
    const std::size_t k = use_cols ? p : n;
    std::vector<double> gram(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            if (use_cols) {
                for (std::size_t i = 0; i < n; ++i) s += m(i, a) * m(i, b);
            } else {
                for (std::size_t j = 0; j < p; ++j) s += m(a, j) * m(b, j);
            }
            gram[a * k + b] = s;
            gram[b * k + a] = s;
        }
    }

    std::vector<double> eval, evec;
    detail::jacobi_eigen(std::move(gram), k, eval, evec);
    std::size_t best = 0;
    for (std::size_t i = 1; i < k; ++i) {
        if (eval[i] > eval[best]) best = i;
    }

    SingularPair sp;
    sp.sigma = std::sqrt(std::max(eval[best], 0.0));
    sp.converged = true;
    std::vector<double> g(k);
    for (std::size_t i = 0; i < k; ++i) g[i] = evec[i * k + best];
    if (use_cols) {
        sp.temporal = g;
        detail::matvec(m, sp.temporal, sp.spatial);
        detail::scale(sp.spatial, 1.0 / sp.sigma);
    } else {
        sp.spatial = g;
        detail::matvec_t(m, sp.spatial, sp.temporal);
        detail::scale(sp.temporal, 1.0 / sp.sigma);
    }
    // the Gram route loses a little orthogonality at sqrt scale; renormalize
    detail::scale(sp.spatial, 1.0 / detail::norm2(sp.spatial));
    detail::scale(sp.temporal, 1.0 / detail::norm2(sp.temporal));
    detail::apply_sign_convention(sp);
    return sp;
}

/// Angle between two vectors in radians. Diagnostic only; the detection
/// pipeline never computes it.
inline double vector_angle(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw LengthMismatchError("vector_angle: length mismatch");
    const double na = detail::norm2(a), nb = detail::norm2(b);
    if (na == 0.0 || nb == 0.0) throw ZeroVectorError("vector_angle: zero vector");
    const double c = detail::dot(a, b) / (na * nb);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace eigenspot

#endif
