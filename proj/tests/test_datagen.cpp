#include <gtest/gtest.h>

#include <map>

#include <fahtp/datagen.hpp>

using namespace fahtp;

namespace {

ScenarioConfig small(Index n, Index p, Index s)
{
    ScenarioConfig c;
    c.n = n;
    c.p = p;
    c.s_star = s;
    c.seed = 42;
    return c;
}

double unit(const ScenarioConfig& c, double sigma)
{
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(c.p)) / static_cast<double>(c.n));
}

} // namespace

TEST(Rng, CounterAddressable)
{
    CounterRng a(123, {1, 2});
    CounterRng b(a.key());
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_NE(CounterRng(123, {1, 2}).next_u64(), CounterRng(123, {2, 1}).next_u64());
    // splitmix64 reference output for seed 0 (first value of the public reference implementation)
    CounterRng ref(0);
    EXPECT_EQ(ref.next_u64(), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, UniformIndexInRange)
{
    CounterRng r(9, {});
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[r.uniform_index(7)];
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Design, IndependentColumnsWhenRhoZero)
{
    auto c = small(10000, 2, 1);
    c.design = Ar1{0.0};
    const auto d = gen_design(c);
    const Matrix g = d.x().transpose() * d.x() / static_cast<double>(c.n);
    EXPECT_LT(std::abs(g(0, 1)), 0.05);
    EXPECT_TRUE(d.normalized());
}

TEST(Design, Ar1Correlation)
{
    auto c = small(10000, 3, 1);
    c.design = Ar1{0.5};
    const Matrix x = gen_design_raw(c);
    const Vector a = x.col(0).array() - x.col(0).mean();
    const Vector b = x.col(1).array() - x.col(1).mean();
    EXPECT_NEAR(a.dot(b) / (a.norm() * b.norm()), 0.5, 0.05);
    const Vector e = x.col(2).array() - x.col(2).mean();
    EXPECT_NEAR(a.dot(e) / (a.norm() * e.norm()), 0.25, 0.05);
}

TEST(Design, SeedDeterminism)
{
    auto c = small(50, 30, 3);
    EXPECT_EQ(gen_design(c).x(), gen_design(c).x());
    auto c2 = c;
    c2.seed = 43;
    EXPECT_NE(gen_design(c).x(), gen_design(c2).x());
}

TEST(Coefficients, DegenerateInterval)
{
    auto c = small(300, 2000, 30);
    c.coef_law = ThresholdUniform{4.0, 4.0};
    const auto t = gen_coefficients(c, 1.0);
    EXPECT_EQ(t.sparsity(), 30);
    for (Index j : t.support_star) EXPECT_DOUBLE_EQ(t.beta_star(j), 4.0 * unit(c, 1.0));
    EXPECT_GE(t.beta_min, 4.0 * unit(c, 1.0) * (1 - 1e-15));
}

TEST(Coefficients, ThresholdLawBounds)
{
    auto c = small(300, 1000, 10);
    c.coef_law = ThresholdUniform{2.0, 10.0};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        c.seed = seed;
        const auto t = gen_coefficients(c, 1.0);
        EXPECT_EQ(t.sparsity(), 10);
        for (Index j : t.support_star) {
            EXPECT_GE(t.beta_star(j), 2.0 * unit(c, 1.0));
            EXPECT_LE(t.beta_star(j), 10.0 * unit(c, 1.0));
        }
    }
}

TEST(Coefficients, MeanMagnitudeOfUniformOneToFive)
{
    auto c = small(100000, 100000, 100000);
    c.coef_law = TwoSidedUniform{1.0, 5.0, true};
    const auto t = gen_coefficients(c, 1.0);
    EXPECT_NEAR(t.beta_star.cwiseAbs().mean(), 3.0, 0.02);
    const double positive = static_cast<double>((t.beta_star.array() > 0).count()) / 100000.0;
    EXPECT_NEAR(positive, 0.5, 0.01);
}

TEST(Coefficients, TwoPointLaw)
{
    auto c = small(100, 100, 40);
    c.coef_law = TwoSidedUniform{1.0, 5.0, false};
    c.two_point = true;
    const auto t = gen_coefficients(c, 1.0);
    for (Index j : t.support_star) EXPECT_TRUE(t.beta_star(j) == 1.0 || t.beta_star(j) == 5.0);
}

TEST(Coefficients, InvalidIntervals)
{
    auto c = small(100, 100, 5);
    c.coef_law = TwoSidedUniform{5.0, 5.0, true};
    EXPECT_THROW(gen_coefficients(c, 1.0), Error);
    c.coef_law = ThresholdUniform{17.0 / 4.0, 4.0};
    EXPECT_THROW(gen_coefficients(c, 1.0), Error);
}

TEST(Coefficients, SupportUniformOverSubsets)
{
    // Chi-square goodness of fit over the 10 subsets of size 2 from 5; 9 dof, 0.1% critical value 27.88.
    auto c = small(10, 5, 2);
    std::map<Support, int> counts;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        c.seed = static_cast<std::uint64_t>(i);
        ++counts[gen_coefficients(c, 1.0).support_star];
    }
    ASSERT_EQ(counts.size(), 10u);
    double chi2 = 0.0;
    const double expected = draws / 10.0;
    for (const auto& [sup, k] : counts) chi2 += (k - expected) * (k - expected) / expected;
    EXPECT_LT(chi2, 27.88);
}

TEST(Snr, Formula)
{
    Vector b = Vector::Zero(6);
    b(0) = 1.0;
    b(3) = 3.0; // ||b||^2 = 10
    EXPECT_DOUBLE_EQ(snr_to_sigma(TrueModel(b, 1.0), IidGaussian{}, 10.0), 1.0);

    Vector a = Vector::Zero(6);
    a(2) = 1.0;
    a(3) = 1.0;
    // 1 + 1 + 2 * 0.5 over SNR 10
    EXPECT_NEAR(snr_to_sigma(TrueModel(a, 1.0), Ar1{0.5}, 10.0), std::sqrt(0.3), 1e-15);
    EXPECT_NEAR(snr_to_sigma(TrueModel(2.5 * a, 1.0), Ar1{0.5}, 10.0), 2.5 * std::sqrt(0.3), 1e-14);
    EXPECT_THROW(snr_to_sigma(TrueModel(Vector::Zero(6), 1.0), IidGaussian{}, 10.0), Error);
}

TEST(Noise, Basics)
{
    EXPECT_EQ(gen_noise(10, 0.0, 1), Vector::Zero(10));
    const Vector xi = gen_noise(100000, 1.0, 77);
    const double mean = xi.mean();
    const double sd = std::sqrt((xi.array() - mean).square().sum() / (xi.size() - 1));
    EXPECT_NEAR(sd, 1.0, 0.01);
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_EQ(gen_noise(50, 2.0, 5), gen_noise(50, 2.0, 5));
}

TEST(Scenario, SnrCalibratedNoise)
{
    auto c = small(200, 400, 30);
    c.design = Ar1{0.5};
    c.coef_law = TwoSidedUniform{1.0, 5.0, true};
    c.noise = SnrCalibrated{10.0};
    const auto sc = generate_scenario(c);
    EXPECT_NEAR(sc.truth.sigma, snr_to_sigma(sc.truth, c.design, 10.0), 0.0);
    EXPECT_GT(sc.truth.sigma, 0.0);
    const auto again = generate_scenario(c);
    EXPECT_EQ(sc.data.y(), again.data.y());
    EXPECT_EQ(sc.data.x(), again.data.x());
}
