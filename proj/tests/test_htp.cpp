#include <gtest/gtest.h>

#include <random>

#include <fahtp/htp.hpp>

#include "test_util.hpp"

using namespace fahtp;

namespace {

HtpConfig config(Index s, bool trace = true)
{
    HtpConfig c;
    c.s = s;
    c.trace = trace;
    return c;
}

/// Exhaustive best-subset RSS over all size-s supports.
double best_subset_rss(const Dataset& d, Index s)
{
    const Index p = d.p();
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
        if (__builtin_popcount(mask) != s) continue;
        Support sup;
        for (Index j = 0; j < p; ++j)
            if (mask & (1u << j)) sup.push_back(j);
        best = std::min(best, ols_on_support(d, sup).rss);
    }
    return best;
}

} // namespace

TEST(Htp, OrthogonalNoiselessRecoversInOneStep)
{
    std::mt19937_64 gen(1);
    const Index n = 16;
    const Matrix x = test_util::orthogonal_design(n, gen);
    const Vector beta = test_util::sparse_vector(n, 4, gen);
    const Dataset d(x, x * beta);
    const auto r = htp_run(d, config(4));
    EXPECT_EQ(r.trace.stop_reason, StopReason::support_stable);
    EXPECT_TRUE(r.trace.converged);
    ASSERT_GE(r.trace.iterations.size(), 2u);
    EXPECT_LT((r.trace.iterations[1].coefficients - beta).norm(), 1e-10);
    EXPECT_LT((r.estimate.coefficients - beta).norm(), 1e-10);
}

TEST(Htp, ZeroResponse)
{
    std::mt19937_64 gen(2);
    const Dataset d(test_util::gaussian_matrix(8, 5, gen), Vector::Zero(8));
    const auto r = htp_run(d, config(3));
    EXPECT_EQ(r.estimate.coefficients, Vector::Zero(5));
    EXPECT_EQ(r.estimate.rss, 0.0);
    EXPECT_EQ(r.trace.steps, 1);
    EXPECT_EQ(r.trace.stop_reason, StopReason::support_stable);
}

TEST(Htp, RejectsBadModelSize)
{
    const Dataset d(Matrix::Identity(4, 6), Vector::Ones(4));
    EXPECT_THROW(htp_run(d, config(5)), Error);
    EXPECT_THROW(htp_run(d, config(0)), Error);
    HtpConfig c = config(2);
    c.max_iter = 0;
    EXPECT_THROW(htp_run(d, c), Error);
}

TEST(Htp, NearOrthogonalMatchesBestSubset)
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 6;
        Matrix x = test_util::orthogonal_design(n, gen) + 0.05 * test_util::gaussian_matrix(n, n, gen);
        const auto nd = normalize_columns(Dataset(x, Vector::Zero(n)));
        const Vector beta = test_util::sparse_vector(n, 2, gen);
        const Dataset d = nd.data.with_response(nd.data.x() * beta + 0.1 * test_util::gaussian_vector(n, gen));
        const auto r = htp_run(d, config(2));
        EXPECT_LE(r.estimate.rss, 1.01 * best_subset_rss(d, 2) + 1e-12);
    }
}

TEST(Htp, TraceInvariants)
{
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 40, p = 80, s = 5;
        const auto nd = normalize_columns(Dataset(test_util::gaussian_matrix(n, p, gen), Vector::Zero(n)));
        const Vector beta = test_util::sparse_vector(p, s, gen);
        const Dataset d = nd.data.with_response(nd.data.x() * beta + 0.5 * test_util::gaussian_vector(n, gen));
        const auto r = htp_run(d, config(s));
        const auto& recs = r.trace.iterations;
        ASSERT_FALSE(recs.empty());
        for (std::size_t t = 1; t < recs.size(); ++t) {
            EXPECT_LE(recs[t].support.size(), static_cast<std::size_t>(s));
            // loss equals the least-squares loss on that support
            const double ols_loss = ols_on_support(d, recs[t].support).rss / (2.0 * n);
            EXPECT_NEAR(recs[t].loss, ols_loss, 1e-8 * std::max(1.0, ols_loss));
            // the refit never loses to the thresholded gradient step
            const Vector& prev = recs[t - 1].coefficients;
            const Vector step = prev + d.x().transpose() * (d.y() - d.x() * prev) / static_cast<double>(n);
            const Vector thresholded = hard_threshold(step, s);
            EXPECT_LE(recs[t].loss, residual_ss(d, thresholded) / (2.0 * n) + 1e-12);
        }
        if (r.trace.stop_reason == StopReason::support_stable) {
            EXPECT_EQ(recs[recs.size() - 1].support, recs[recs.size() - 2].support);
            // fixed point: the s largest entries of |beta + gradient| are the support
            const Vector step = r.estimate.coefficients + r.gradient_residual;
            EXPECT_EQ(threshold_support(step, s), r.estimate.support);
        }
    }
}

TEST(Htp, Deterministic)
{
    std::mt19937_64 gen(5);
    const Dataset d(test_util::gaussian_matrix(30, 50, gen), test_util::gaussian_vector(30, gen));
    const auto a = htp_run(d, config(6));
    const auto b = htp_run(d, config(6));
    ASSERT_EQ(a.trace.iterations.size(), b.trace.iterations.size());
    for (std::size_t t = 0; t < a.trace.iterations.size(); ++t) {
        EXPECT_EQ(a.trace.iterations[t].support, b.trace.iterations[t].support);
        EXPECT_EQ(a.trace.iterations[t].coefficients, b.trace.iterations[t].coefficients);
        EXPECT_EQ(a.trace.iterations[t].loss, b.trace.iterations[t].loss);
    }
    EXPECT_EQ(a.estimate.coefficients, b.estimate.coefficients);
}

TEST(Htp, WarmStartAtTruthIsFixedPoint)
{
    std::mt19937_64 gen(6);
    const Index n = 50, p = 100, s = 4;
    const auto nd = normalize_columns(Dataset(test_util::gaussian_matrix(n, p, gen), Vector::Zero(n)));
    const Vector beta = test_util::sparse_vector(p, s, gen);
    const Dataset d = nd.data.with_response(nd.data.x() * beta);
    HtpConfig c = config(s);
    c.warm_start = ols_on_support(d, TrueModel(beta, 1.0).support_star);
    const auto r = htp_run(d, c);
    ASSERT_EQ(r.trace.iterations.size(), 2u);
    EXPECT_EQ(r.trace.iterations[0].support, r.trace.iterations[1].support);
    EXPECT_EQ(r.estimate.support, TrueModel(beta, 1.0).support_star);
    EXPECT_EQ(r.trace.stop_reason, StopReason::support_stable);
}

TEST(Htp, MaxIterAndFixedIterations)
{
    std::mt19937_64 gen(7);
    const Index n = 30, p = 60;
    const auto nd = normalize_columns(Dataset(test_util::gaussian_matrix(n, p, gen), Vector::Zero(n)));
    const Dataset d = nd.data.with_response(test_util::gaussian_vector(n, gen));

    HtpConfig c = config(8);
    c.max_iter = 1;
    const auto one = htp_run(d, c);
    EXPECT_EQ(one.trace.steps, 1);
    EXPECT_EQ(one.trace.stop_reason, StopReason::max_iter);
    EXPECT_FALSE(one.trace.converged);

    c.max_iter = 20;
    c.fixed_iterations = true;
    const auto fixed = htp_run(d, c);
    EXPECT_EQ(fixed.trace.steps, 20);
    EXPECT_EQ(fixed.trace.iterations.size(), 21u);
    EXPECT_EQ(fixed.trace.stop_reason, StopReason::max_iter);
    EXPECT_EQ(fixed.estimate.coefficients, fixed.trace.iterations.back().coefficients);
}

TEST(Htp, CycleReturnsSmallestLossIterate)
{
    // Search small coherent designs for a run that revisits an earlier support.
    std::mt19937_64 gen(8);
    int cycles = 0;
    for (int trial = 0; trial < 4000 && cycles < 5; ++trial) {
        const Index n = 6, p = 10;
        Matrix x = test_util::gaussian_matrix(n, p, gen);
        x.rightCols(5) = x.leftCols(5) + 0.4 * test_util::gaussian_matrix(n, 5, gen);
        const auto nd = normalize_columns(Dataset(x, Vector::Zero(n)));
        const Dataset d = nd.data.with_response(test_util::gaussian_vector(n, gen));
        const auto r = htp_run(d, config(3));
        if (r.trace.stop_reason != StopReason::cycle_detected) continue;
        ++cycles;
        EXPECT_FALSE(r.trace.converged);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 1; t < r.trace.iterations.size(); ++t) best = std::min(best, r.trace.iterations[t].loss);
        EXPECT_DOUBLE_EQ(r.estimate.rss / (2.0 * n), best);
    }
    EXPECT_GT(cycles, 0);
}

TEST(Diagnose, NoiselessAndOrthogonalCases)
{
    std::mt19937_64 gen(9);
    const Index n = 20, p = 30;
    const auto nd = normalize_columns(Dataset(test_util::gaussian_matrix(n, p, gen), Vector::Zero(n)));
    const Vector beta = test_util::sparse_vector(p, 3, gen);
    const Dataset d = nd.data.with_response(nd.data.x() * beta);
    const auto diag = diagnose(htp_run(d, config(3)), TrueModel(beta, 1.0), d);
    for (const auto& e : diag) EXPECT_NEAR(e.stat_error, 0.0, 1e-12);

    const Matrix q = test_util::orthogonal_design(12, gen);
    const Vector b2 = test_util::sparse_vector(12, 3, gen);
    const Dataset o(q, q * b2 + test_util::gaussian_vector(12, gen));
    for (const auto& e : diagnose(htp_run(o, config(3)), TrueModel(b2, 1.0), o)) EXPECT_NEAR(e.opt_error, 0.0, 1e-12);
}

TEST(Diagnose, MatchesExplicitMatrices)
{
    std::mt19937_64 gen(10);
    const Matrix x = test_util::gaussian_matrix(4, 4, gen);
    Vector beta = Vector::Zero(4);
    beta(1) = 2.0;
    beta(3) = -1.0;
    const Vector noise = 0.3 * test_util::gaussian_vector(4, gen);
    const Dataset d(x, x * beta + noise);
    const auto result = htp_run(d, config(2));
    const auto diag = diagnose(result, TrueModel(beta, 1.0), d);

    const Matrix phi = x.transpose() * x / 4.0 - Matrix::Identity(4, 4);
    const double xi = (x.transpose() * noise / 4.0).norm();
    ASSERT_EQ(diag.size(), result.trace.iterations.size());
    for (std::size_t t = 0; t < diag.size(); ++t) {
        EXPECT_NEAR(diag[t].opt_error, (phi * (beta - result.trace.iterations[t].coefficients)).norm(), 1e-10);
        EXPECT_NEAR(diag[t].stat_error, xi, 1e-12);
    }
}

TEST(Diagnose, RequiresTrace)
{
    const Dataset d(Matrix::Identity(3, 3), Vector::Ones(3));
    try {
        diagnose(htp_run(d, config(1, false)), TrueModel(Vector::Ones(3), 1.0), d);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_trace);
    }
}
