#include "eigenspot/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "eigenspot/rng.hpp"
#include "testutil.hpp"

using namespace eigenspot;

namespace {

double poisson_pmf(std::int64_t k, double lambda) {
    return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

SimulationConfig default_config(std::uint64_t seed, std::size_t h = 0, double impact = 1.0) {
    SimulationConfig c;
    c.n_regions = 32;
    c.n_periods = 19;
    c.hotspot_size = h;
    c.hotspot_impact = impact;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(EstimateLambda, MeanOfFirstPeriod) {
    const CountMatrix m(3, 2, {2, 9, 4, 9, 6, 9});
    EXPECT_DOUBLE_EQ(estimate_lambda(m), 4.0);
    const CountMatrix c(3, 1, {7, 7, 7});
    EXPECT_DOUBLE_EQ(estimate_lambda(c), 7.0);
}

TEST(EstimateLambda, RecomputedIndependently) {
    const auto b = synthesize_baseline(32, 19, 0.012, 7);
    // separate summation route: Kahan accumulation over column 0
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < b.n_regions(); ++i) {
        const double y = b(i, 0) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    EXPECT_NEAR(estimate_lambda(b), sum / 32.0, 1e-9);
}

TEST(EstimateLambda, EmptyFirstPeriod) {
    const CountMatrix m(2, 2, {0, 1, 0, 2});
    EXPECT_THROW(estimate_lambda(m), EmptyFirstPeriodError);
}

TEST(SynthesizeBaseline, ZeroGrowthRowsConstant) {
    const auto b = synthesize_baseline(5, 8, 0.0, 3);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 1; j < 8; ++j) EXPECT_EQ(b(i, j), b(i, 0));
    }
}

TEST(SynthesizeBaseline, ShapeBoundsAndDeterminism) {
    const auto a = synthesize_baseline(32, 19, 0.012, 1);
    EXPECT_EQ(a.n_regions(), 32u);
    EXPECT_EQ(a.n_periods(), 19u);
    for (double v : a.values()) {
        EXPECT_GE(v, 1e3);  // scale floor times nonnegative growth
        EXPECT_LE(v, 1e6 * std::pow(1.012, 18) + 1.0);
    }
    const auto b = synthesize_baseline(32, 19, 0.012, 1);
    EXPECT_EQ(a.values(), b.values());
    const auto c = synthesize_baseline(32, 19, 0.012, 2);
    EXPECT_NE(a.values(), c.values());
    EXPECT_EQ(a.region_label(0), "R1");
    EXPECT_EQ(a.period_label(18), "T19");
}

TEST(Generate, NoInjectionMaskAllFalse) {
    const auto ds = generate(default_config(11));
    EXPECT_EQ(ds.injection_mask.count(), 0u);
    EXPECT_FALSE(ds.origin_used.has_value());
    for (double v : ds.cases.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_EQ(v, std::floor(v));  // integer counts
    }
}

TEST(Generate, MaskHasHSquaredCells) {
    const auto ds = generate(default_config(42, 3, 2.5));
    EXPECT_EQ(ds.injection_mask.count(), 9u);
    ASSERT_TRUE(ds.origin_used.has_value());
    const auto [r0, t0] = *ds.origin_used;
    EXPECT_LE(r0 + 3, 32u);
    EXPECT_LE(t0 + 3, 19u);
}

TEST(Generate, UnitImpactIsBitwiseNoOp) {
    const auto plain = generate(default_config(99));
    const auto injected = generate(default_config(99, 4, 1.0));
    EXPECT_EQ(injected.injection_mask.count(), 16u);
    EXPECT_EQ(plain.cases.values(), injected.cases.values());
}

TEST(Generate, InjectionLocalityOutsideWindow) {
    const auto plain = generate(default_config(1234));
    const auto injected = generate(default_config(1234, 3, 3.0));
    for (std::size_t i = 0; i < 32; ++i) {
        for (std::size_t j = 0; j < 19; ++j) {
            if (!injected.injection_mask.at(i, j)) {
                EXPECT_EQ(injected.cases(i, j), plain.cases(i, j));
            }
        }
    }
}

TEST(Generate, MaskConsistencyRoundTrip) {
    // dividing an injected count by I and rounding recovers the raw draw
    const auto plain = generate(default_config(555));
    for (const double impact : {1.5, 2.0, 2.5, 3.0}) {
        const auto injected = generate(default_config(555, 3, impact));
        for (std::size_t i = 0; i < 32; ++i) {
            for (std::size_t j = 0; j < 19; ++j) {
                if (injected.injection_mask.at(i, j)) {
                    const double raw = plain.cases(i, j);
                    EXPECT_EQ(std::llround(injected.cases(i, j) / impact),
                              static_cast<long long>(raw));
                    EXPECT_EQ(injected.cases(i, j), std::floor(injected.cases(i, j)));
                }
            }
        }
    }
}

TEST(Generate, DeterministicAndRowMajorStreamOrder) {
    const auto a = generate(default_config(2718));
    const auto b = generate(default_config(2718));
    EXPECT_EQ(a.cases.values(), b.cases.values());
    EXPECT_EQ(a.baseline.values(), b.baseline.values());

    // replay the documented stream contract by hand: row-major Poisson draws
    // from a fresh generator with the same seed
    const double lambda = estimate_lambda(a.baseline);
    Xoshiro256PlusPlus rng(2718);
    for (std::size_t i = 0; i < 32; ++i) {
        for (std::size_t j = 0; j < 19; ++j) {
            const double rate = lambda * std::pow(1.012, static_cast<double>(j));
            ASSERT_EQ(a.cases(i, j), static_cast<double>(sample_poisson(rate, rng)));
        }
    }
}

TEST(Generate, FixedOriginRespected) {
    auto cfg = default_config(10, 2, 2.0);
    cfg.hotspot_origin = Cell{5, 7};
    const auto ds = generate(cfg);
    EXPECT_TRUE(ds.injection_mask.at(5, 7));
    EXPECT_TRUE(ds.injection_mask.at(6, 8));
    EXPECT_FALSE(ds.injection_mask.at(4, 7));
    EXPECT_FALSE(ds.injection_mask.at(7, 9));
}

TEST(Generate, ConfigValidation) {
    auto too_big = default_config(1, 20, 2.0);
    EXPECT_THROW(generate(too_big), ConfigError);

    auto off_grid = default_config(1, 3, 2.0);
    off_grid.hotspot_origin = Cell{30, 17};
    EXPECT_THROW(generate(off_grid), ConfigError);

    auto weak = default_config(1, 2, 0.5);
    EXPECT_THROW(generate(weak), ConfigError);

    auto shrink = default_config(1);
    shrink.growth_rate = -1.5;
    EXPECT_THROW(generate(shrink), ConfigError);
}

TEST(Generate, GrowthLawAcrossSeeds) {
    // E[column t mean] / E[column t-1 mean] -> 1 + growth over 200 seeds
    const std::size_t n = 32, m = 6;
    std::vector<double> col_mean(m, 0.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        SimulationConfig cfg;
        cfg.n_regions = n;
        cfg.n_periods = m;
        cfg.seed = replicate_seed(909, s);
        const auto ds = generate(cfg);
        for (std::size_t j = 0; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += ds.cases(i, j);
            col_mean[j] += sum / static_cast<double>(n);
        }
    }
    for (std::size_t j = 1; j < m; ++j) {
        EXPECT_NEAR(col_mean[j] / col_mean[j - 1], 1.012, 0.01);
    }
}

TEST(Generate, PerRegionLambdaMode) {
    auto cfg = default_config(31415);
    cfg.per_region_lambda = true;
    const auto ds = generate(cfg);
    // row means should track each region's own baseline scale, not the grid
    // average; spot-check the largest vs smallest baseline rows
    std::size_t big = 0, small = 0;
    for (std::size_t i = 1; i < 32; ++i) {
        if (ds.baseline(i, 0) > ds.baseline(big, 0)) big = i;
        if (ds.baseline(i, 0) < ds.baseline(small, 0)) small = i;
    }
    double big_mean = 0.0, small_mean = 0.0;
    for (std::size_t j = 0; j < 19; ++j) {
        big_mean += ds.cases(big, j);
        small_mean += ds.cases(small, j);
    }
    EXPECT_GT(big_mean, 10.0 * small_mean);
}

TEST(Generate, ExternalBaselineKeepsLabelsAndShape) {
    const CountMatrix external(3, 4,
                               {1000, 1010, 1020, 1030,  //
                                2000, 2020, 2040, 2060,  //
                                4000, 4040, 4080, 4120},
                               {"north", "mid", "south"}, {"1990", "1991", "1992", "1993"});
    SimulationConfig cfg;
    cfg.n_regions = 3;
    cfg.n_periods = 4;
    cfg.external_baseline = external;
    cfg.seed = 5;
    const auto ds = generate(cfg);
    EXPECT_EQ(ds.baseline.values(), external.values());
    EXPECT_EQ(ds.cases.region_labels(), external.region_labels());
    EXPECT_EQ(ds.cases.period_labels(), external.period_labels());
    EXPECT_DOUBLE_EQ(ds.lambda_hat, (1000.0 + 2000.0 + 4000.0) / 3.0);
}

TEST(Generate, PerRegionLambdaNeedsPositiveFirstPeriod) {
    std::vector<double> v(2 * 3, 5.0);
    v[1 * 3 + 0] = 0.0;
    SimulationConfig cfg;
    cfg.n_regions = 2;
    cfg.n_periods = 3;
    cfg.external_baseline = CountMatrix(2, 3, std::move(v));
    cfg.per_region_lambda = true;
    cfg.seed = 1;
    EXPECT_THROW(generate(cfg), ConfigError);
    cfg.per_region_lambda = false;
    EXPECT_NO_THROW(generate(cfg));
}

TEST(ReplicateSeed, MatchesSplitMixStreamAndIsOrderFree) {
    SplitMix64 sm(777);
    std::vector<std::uint64_t> stream;
    for (int i = 0; i < 10; ++i) stream.push_back(sm.next());
    for (std::uint64_t r = 0; r < 10; ++r) {
        EXPECT_EQ(replicate_seed(777, r), stream[r]);
    }
    // distinct replicates get distinct seeds
    EXPECT_NE(replicate_seed(777, 3), replicate_seed(777, 4));
    EXPECT_NE(replicate_seed(777, 3), replicate_seed(778, 3));
}

TEST(SamplePoisson, VanishingRate) {
    Xoshiro256PlusPlus rng(1);
    std::int64_t nonzero = 0;
    for (int i = 0; i < 1000000; ++i) {
        nonzero += sample_poisson(1e-9, rng) != 0;
    }
    EXPECT_LE(nonzero, 3);
    EXPECT_THROW(sample_poisson(0.0, rng), NonPositiveLambdaError);
    EXPECT_THROW(sample_poisson(-2.0, rng), NonPositiveLambdaError);
}

TEST(SamplePoisson, PmfMatchAtLambda4) {
    Xoshiro256PlusPlus rng(4242);
    constexpr int kDraws = 1000000;
    std::vector<std::int64_t> hist(64, 0);
    for (int i = 0; i < kDraws; ++i) {
        const auto k = sample_poisson(4.0, rng);
        if (k < 64) ++hist[k];
    }
    for (std::int64_t k = 0; k <= 12; ++k) {
        const double p = poisson_pmf(k, 4.0);
        const double se = std::sqrt(p * (1.0 - p) / kDraws);
        EXPECT_NEAR(static_cast<double>(hist[k]) / kDraws, p, 3.0 * se) << "k=" << k;
    }
}

TEST(SamplePoisson, PmfMatchAtLambda25InverseBranch) {
    Xoshiro256PlusPlus rng(2525);
    constexpr int kDraws = 300000;
    std::vector<std::int64_t> hist(128, 0);
    for (int i = 0; i < kDraws; ++i) {
        const auto k = sample_poisson(25.0, rng);
        if (k < 128) ++hist[k];
    }
    for (std::int64_t k = 10; k <= 40; ++k) {
        const double p = poisson_pmf(k, 25.0);
        const double se = std::sqrt(p * (1.0 - p) / kDraws);
        EXPECT_NEAR(static_cast<double>(hist[k]) / kDraws, p, 3.0 * se) << "k=" << k;
    }
}

TEST(SamplePoisson, PmfMatchJustAboveBranchBoundary) {
    // lambda=32 exercises the rejection branch at its weakest point, right
    // above the 30 cutover
    Xoshiro256PlusPlus rng(3232);
    constexpr int kDraws = 300000;
    std::vector<std::int64_t> hist(128, 0);
    for (int i = 0; i < kDraws; ++i) {
        const auto k = sample_poisson(32.0, rng);
        if (k < 128) ++hist[k];
    }
    for (std::int64_t k = 15; k <= 52; ++k) {
        const double p = poisson_pmf(k, 32.0);
        const double se = std::sqrt(p * (1.0 - p) / kDraws);
        EXPECT_NEAR(static_cast<double>(hist[k]) / kDraws, p, 3.0 * se) << "k=" << k;
    }
}

TEST(SamplePoisson, ChiSquareGoodnessOfFitAtLambda250) {
    // rejection branch; bins 200..300 plus pooled tails, df = 102,
    // chi-square critical value at p = 0.01 is 138.134471
    Xoshiro256PlusPlus rng(250250);
    constexpr int kDraws = 100000;
    constexpr std::int64_t kLo = 200, kHi = 300;
    std::vector<std::int64_t> hist(kHi - kLo + 1, 0);
    std::int64_t below = 0, above = 0;
    for (int i = 0; i < kDraws; ++i) {
        const auto k = sample_poisson(250.0, rng);
        if (k < kLo) ++below;
        else if (k > kHi) ++above;
        else ++hist[k - kLo];
    }
    double tail_lo_p = 0.0, tail_hi_p = 1.0;
    for (std::int64_t k = 0; k < kLo; ++k) tail_lo_p += poisson_pmf(k, 250.0);
    double mid = 0.0;
    for (std::int64_t k = kLo; k <= kHi; ++k) mid += poisson_pmf(k, 250.0);
    tail_hi_p -= tail_lo_p + mid;

    double chi2 = 0.0;
    const auto add = [&](double observed, double p) {
        const double expected = p * kDraws;
        chi2 += (observed - expected) * (observed - expected) / expected;
    };
    add(static_cast<double>(below), tail_lo_p);
    add(static_cast<double>(above), tail_hi_p);
    for (std::int64_t k = kLo; k <= kHi; ++k) {
        add(static_cast<double>(hist[k - kLo]), poisson_pmf(k, 250.0));
    }
    EXPECT_LT(chi2, 138.13447114967263);
}

TEST(SamplePoisson, MomentsAtLargeLambda) {
    Xoshiro256PlusPlus rng(808);
    constexpr int kDraws = 10000;
    const double lambda = 1000.0;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double k = static_cast<double>(sample_poisson(lambda, rng));
        sum += k;
        sum2 += k * k;
    }
    const double mean = sum / kDraws;
    const double var = sum2 / kDraws - mean * mean;
    EXPECT_NEAR(mean, lambda, 3.0 * std::sqrt(lambda / kDraws));
    EXPECT_GT(var / mean, 0.95);
    EXPECT_LT(var / mean, 1.05);
}
