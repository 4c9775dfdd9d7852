#include <gtest/gtest.h>

#include <random>

#include <fahtp/metrics.hpp>

using namespace fahtp;

namespace {

SparseEstimate on_support(Index p, const Support& s)
{
    SparseEstimate e{Vector::Zero(p), s, 0.0};
    for (Index j : s) e.coefficients(j) = 1.0;
    return e;
}

TrueModel truth_on(Index p, const Support& s)
{
    Vector b = Vector::Zero(p);
    for (Index j : s) b(j) = 1.0;
    return TrueModel(b, 1.0);
}

} // namespace

TEST(Evaluate, PerfectRecovery)
{
    const auto r = evaluate(on_support(10, {1, 4}), truth_on(10, {1, 4}));
    EXPECT_EQ(r.tpr, 1.0);
    EXPECT_EQ(r.fpr, 0.0);
    EXPECT_EQ(r.mcc, 1.0);
    EXPECT_EQ(r.se, 0);
    EXPECT_EQ(r.ee, 0.0);
}

TEST(Evaluate, HandComputedConfusion)
{
    // S* = {1,2,3}, S_hat = {1,2,4} (1-based) over p = 10: tp 2, fp 1, fn 1, tn 6, mcc 11/21
    const auto r = evaluate(on_support(10, {0, 1, 3}), truth_on(10, {0, 1, 2}));
    EXPECT_EQ(r.tp, 2);
    EXPECT_EQ(r.fp, 1);
    EXPECT_EQ(r.fn, 1);
    EXPECT_EQ(r.tn, 6);
    EXPECT_NEAR(r.mcc, 11.0 / 21.0, 1e-15);
    EXPECT_NEAR(r.ee, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(r.tpr, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.fpr, 1.0 / 7.0, 1e-15);
}

TEST(Evaluate, EmptyPrediction)
{
    const auto r = evaluate(on_support(8, {}), truth_on(8, {2, 5}));
    EXPECT_EQ(r.tpr, 0.0);
    EXPECT_EQ(r.fpr, 0.0);
    EXPECT_EQ(r.mcc, 0.0);
    EXPECT_EQ(r.se, -2);
}

TEST(Evaluate, MccComplementInvariantAndBounded)
{
    std::mt19937_64 gen(1);
    const Index p = 9;
    for (int trial = 0; trial < 2000; ++trial) {
        const unsigned a = gen() % 512, b = gen() % 512;
        Support sa, sb, ca, cb;
        for (Index j = 0; j < p; ++j) {
            ((a >> j) & 1u ? sa : ca).push_back(j);
            ((b >> j) & 1u ? sb : cb).push_back(j);
        }
        const auto r = confusion(sa, sb, p);
        const auto rc = confusion(ca, cb, p);
        EXPECT_NEAR(r.mcc, rc.mcc, 1e-15);
        EXPECT_GE(r.mcc, -1.0);
        EXPECT_LE(r.mcc, 1.0);
        EXPECT_GE(r.tpr, 0.0);
        EXPECT_LE(r.fpr, 1.0);
        EXPECT_EQ(r.tp + r.fn, static_cast<Index>(sb.size()));
        EXPECT_EQ(r.fp + r.tn, p - static_cast<Index>(sb.size()));
        const bool proper = !sb.empty() && static_cast<Index>(sb.size()) < p;
        if (proper) {
            EXPECT_EQ(r.mcc == 1.0, sa == sb);
        }
    }
}

TEST(Aggregate, SingleReport)
{
    EvalReport r;
    r.ee = 1.5;
    r.se = 2;
    const auto s = aggregate({r});
    EXPECT_EQ(s.ee.mean, 1.5);
    EXPECT_EQ(s.ee.median, 1.5);
    EXPECT_EQ(s.ee.sd, 0.0);
    EXPECT_EQ(s.correct_size, 0.0);
}

TEST(Aggregate, SampleStandardDeviation)
{
    EvalReport a, b;
    a.ee = 1.0;
    b.ee = 3.0;
    const auto s = aggregate({a, b});
    EXPECT_DOUBLE_EQ(s.ee.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.ee.median, 2.0);
    EXPECT_DOUBLE_EQ(s.ee.sd, std::sqrt(2.0));
}

TEST(Aggregate, SuccessFractions)
{
    const auto perfect = evaluate(on_support(6, {0, 1}), truth_on(6, {0, 1}));
    const auto s = aggregate(std::vector<EvalReport>(100, perfect));
    EXPECT_EQ(s.exact_recovery, 1.0);
    EXPECT_EQ(s.correct_size, 1.0);
    EXPECT_THROW(aggregate({}), Error);
}
