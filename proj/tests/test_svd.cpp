#include "eigenspot/svd.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "eigenspot/matrix.hpp"
#include "testutil.hpp"

using namespace eigenspot;

namespace {

double frobenius(const CountMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

double reconstruction_error(const CountMatrix& m, const SingularPair& sp) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n_regions(); ++i) {
        for (std::size_t j = 0; j < m.n_periods(); ++j) {
            const double d = m(i, j) - sp.sigma * sp.spatial[i] * sp.temporal[j];
            s += d * d;
        }
    }
    return std::sqrt(s);
}

}  // namespace

TEST(Rank1Svd, DiagonalDominantAxis) {
    const CountMatrix m(2, 2, {2, 0, 0, 1});
    const auto sp = rank1_svd(m);
    EXPECT_TRUE(sp.converged);
    EXPECT_NEAR(sp.sigma, 2.0, 1e-12);
    EXPECT_NEAR(sp.spatial[0], 1.0, 1e-9);
    EXPECT_NEAR(sp.spatial[1], 0.0, 1e-9);
    EXPECT_NEAR(sp.temporal[0], 1.0, 1e-9);
    EXPECT_NEAR(sp.temporal[1], 0.0, 1e-9);
}

TEST(Rank1Svd, ExactRankOneOuterProduct) {
    // [[3,6],[4,8]] = [3,4]^T [1,2]
    const CountMatrix m(2, 2, {3, 6, 4, 8});
    const auto sp = rank1_svd(m);
    EXPECT_NEAR(sp.sigma, 5.0 * std::sqrt(5.0), 1e-9);
    EXPECT_NEAR(sp.spatial[0], 0.6, 1e-9);
    EXPECT_NEAR(sp.spatial[1], 0.8, 1e-9);
    EXPECT_NEAR(sp.temporal[0], 1.0 / std::sqrt(5.0), 1e-9);
    EXPECT_NEAR(sp.temporal[1], 2.0 / std::sqrt(5.0), 1e-9);
}

TEST(Rank1Svd, AgreesWithOracleOnSeededMatrix) {
    const auto m = testutil::random_matrix_seeded(5, 7, 20240501);
    const auto power = rank1_svd(m);
    const auto oracle = svd_oracle(m);
    EXPECT_NEAR(power.sigma, oracle.sigma, 1e-8 * oracle.sigma);
    EXPECT_GE(testutil::abs_dot(power.spatial, oracle.spatial), 1.0 - 1e-8);
    EXPECT_GE(testutil::abs_dot(power.temporal, oracle.temporal), 1.0 - 1e-8);
}

TEST(Rank1Svd, NearDegenerateSpectrumFlagsNonConvergence) {
    // top two singular values split by 1e-6: the temporal vector keeps
    // drifting by ~1e-7 per step, so max_iter is hit and reported as
    // converged=false rather than an error; sigma itself is still accurate
    const CountMatrix m(2, 2, {2.0, 0.0, 0.0, 2.0 - 1e-6});
    const auto sp = rank1_svd(m, 1e-10, 500);
    EXPECT_FALSE(sp.converged);
    EXPECT_EQ(sp.iterations, 500);
    EXPECT_NEAR(sp.sigma, 2.0, 1e-5);
}

TEST(Rank1Svd, ArgumentValidation) {
    const CountMatrix m(2, 2, {1, 2, 3, 4});
    EXPECT_THROW(rank1_svd(m, 0.0), ConfigError);
    EXPECT_THROW(rank1_svd(m, 1e-10, 0), ConfigError);
}

TEST(Rank1Svd, RejectsAllZero) {
    const CountMatrix m(2, 3, std::vector<double>(6, 0.0));
    EXPECT_THROW(rank1_svd(m), AllZeroMatrixError);
    EXPECT_THROW(svd_oracle(m), AllZeroMatrixError);
}

TEST(Rank1Svd, UnitNormAndSignConvention) {
    Xoshiro256PlusPlus rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + rng.next_below(12);
        const std::size_t m = 1 + rng.next_below(12);
        const auto mat = testutil::random_matrix(n, m, rng);
        const auto sp = rank1_svd(mat);
        EXPECT_NEAR(detail::norm2(sp.spatial), 1.0, 1e-9);
        EXPECT_NEAR(detail::norm2(sp.temporal), 1.0, 1e-9);
        EXPECT_GE(std::accumulate(sp.spatial.begin(), sp.spatial.end(), 0.0), 0.0);
        // Perron representative: entrywise nonnegative for nonnegative input
        for (double v : sp.spatial) EXPECT_GE(v, -1e-9);
        for (double v : sp.temporal) EXPECT_GE(v, -1e-9);
        EXPECT_GE(sp.sigma, 0.0);
    }
}

TEST(Rank1Svd, ScaleEquivariance) {
    Xoshiro256PlusPlus rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto mat = testutil::random_matrix(6, 9, rng);
        const double k = 0.25 + 4.0 * rng.next_double();
        std::vector<double> scaled(mat.values());
        for (double& v : scaled) v *= k;
        const CountMatrix mk(6, 9, std::move(scaled));

        const auto a = rank1_svd(mat);
        const auto b = rank1_svd(mk);
        EXPECT_NEAR(b.sigma, k * a.sigma, 1e-9 * b.sigma);
        for (std::size_t i = 0; i < a.spatial.size(); ++i) {
            EXPECT_NEAR(a.spatial[i], b.spatial[i], 1e-9);
        }
        for (std::size_t j = 0; j < a.temporal.size(); ++j) {
            EXPECT_NEAR(a.temporal[j], b.temporal[j], 1e-9);
        }
    }
}

TEST(Rank1Svd, PermutationEquivariance) {
    Xoshiro256PlusPlus rng(13);
    const std::size_t n = 7, m = 5;
    const auto mat = testutil::random_matrix(n, m, rng);

    // rotate rows by 3: row i of the permuted matrix is row (i+3) mod n
    std::vector<double> perm(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) perm[i * m + j] = mat((i + 3) % n, j);
    }
    const CountMatrix permuted(n, m, std::move(perm));

    const auto a = rank1_svd(mat);
    const auto b = rank1_svd(permuted);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(b.spatial[i], a.spatial[(i + 3) % n], 1e-9);
    }
    for (std::size_t j = 0; j < m; ++j) {
        EXPECT_NEAR(b.temporal[j], a.temporal[j], 1e-9);
    }
}

TEST(Rank1Svd, ReconstructionBound) {
    Xoshiro256PlusPlus rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.next_below(10);
        const std::size_t m = 2 + rng.next_below(10);
        const auto mat = testutil::random_matrix(n, m, rng);
        const auto sp = rank1_svd(mat);
        EXPECT_LE(reconstruction_error(mat, sp), frobenius(mat) + 1e-9);
    }
}

TEST(SvdOracle, DiagonalAndScalar) {
    EXPECT_NEAR(svd_oracle(CountMatrix(2, 2, {2, 0, 0, 1})).sigma, 2.0, 1e-12);
    const auto sp = svd_oracle(CountMatrix(1, 1, {5}));
    EXPECT_NEAR(sp.sigma, 5.0, 1e-12);
    EXPECT_NEAR(sp.spatial[0], 1.0, 1e-12);
    EXPECT_NEAR(sp.temporal[0], 1.0, 1e-12);
}

TEST(SvdOracle, SymmetricPositiveMatrixSigmaIsTopEigenvalue) {
    // For a symmetric positive matrix the dominant singular value equals the
    // dominant eigenvalue; check against a direct Jacobi eigen-solve of M.
    Xoshiro256PlusPlus rng(23);
    std::vector<double> v(36);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = i; j < 6; ++j) {
            const double x = 0.5 + rng.next_double() * 5.0;
            v[i * 6 + j] = x;
            v[j * 6 + i] = x;
        }
    }
    const CountMatrix m(6, 6, std::vector<double>(v));

    std::vector<double> eval, evec;
    detail::jacobi_eigen(v, 6, eval, evec);
    double top = eval[0];
    for (double e : eval) top = std::max(top, e);

    EXPECT_NEAR(svd_oracle(m).sigma, top, 1e-9 * top);
}

TEST(SvdOracle, SizeGuard) {
    const CountMatrix big(65, 65, std::vector<double>(65 * 65, 1.0));
    EXPECT_THROW(svd_oracle(big), OracleSizeExceededError);
    // guard is on the smaller dimension; a thin 100x8 matrix is fine
    std::vector<double> thin(100 * 8, 1.0);
    thin[3] = 2.0;
    EXPECT_NO_THROW(svd_oracle(CountMatrix(100, 8, std::move(thin))));
}

TEST(OracleAgreement, RandomMatricesUpTo20x20) {
    Xoshiro256PlusPlus rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 1 + rng.next_below(20);
        const std::size_t m = 1 + rng.next_below(20);
        const auto mat = testutil::random_matrix(n, m, rng);
        const auto power = rank1_svd(mat);
        const auto oracle = svd_oracle(mat);
        ASSERT_NEAR(power.sigma, oracle.sigma, 1e-8 * oracle.sigma)
            << "shape " << n << "x" << m << " rep " << rep;
        ASSERT_GE(testutil::abs_dot(power.spatial, oracle.spatial), 1.0 - 1e-8)
            << "shape " << n << "x" << m << " rep " << rep;
        ASSERT_GE(testutil::abs_dot(power.temporal, oracle.temporal), 1.0 - 1e-8)
            << "shape " << n << "x" << m << " rep " << rep;
    }
}

TEST(VectorAngle, OrthogonalAndParallel) {
    EXPECT_NEAR(vector_angle({1, 0}, {0, 1}), 1.5707963267948966, 1e-12);
    EXPECT_NEAR(vector_angle({1, 2, 3}, {2, 4, 6}), 0.0, 1e-7);
}

TEST(VectorAngle, WorkedThreeElementExample) {
    // independent arccos(dot/(|a||b|)) recomputation: 0.705 / sqrt(0.665 * 0.7525)
    const double expected = std::acos(0.705 / std::sqrt(0.665 * 0.7525));
    EXPECT_NEAR(expected, 0.082369567292363524, 1e-15);
    EXPECT_NEAR(vector_angle({0.25, 0.75, 0.20}, {0.30, 0.80, 0.15}), expected, 1e-12);
}

TEST(VectorAngle, Errors) {
    EXPECT_THROW(vector_angle({0, 0}, {1, 0}), ZeroVectorError);
    EXPECT_THROW(vector_angle({1, 0}, {1, 0, 0}), LengthMismatchError);
}

TEST(CountMatrix, ValidatesInvariants) {
    EXPECT_THROW(CountMatrix(0, 2, {}), ShapeMismatchError);
    EXPECT_THROW(CountMatrix(1, 2, {1.0}), ShapeMismatchError);
    EXPECT_THROW(CountMatrix(1, 2, {1.0, -0.5}), Error);
    EXPECT_THROW(CountMatrix(1, 2, {1.0, std::nan("")}), Error);
    EXPECT_THROW(CountMatrix(1, 2, {1.0, 2.0}, {"a", "b"}, {}), ShapeMismatchError);
    const CountMatrix ok(1, 2, {1.0, 2.0}, {"r"}, {"t1", "t2"});
    EXPECT_EQ(ok.region_label(0), "r");
    EXPECT_EQ(ok.period_label(1), "t2");
    const CountMatrix unlabeled(1, 2, {1.0, 2.0});
    EXPECT_EQ(unlabeled.region_label(0), "R1");
    EXPECT_EQ(unlabeled.period_label(1), "T2");
}
