#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace fahtp {

struct EvalReport {
    double ee = 0.0; ///< ||beta_hat - beta*||_2
    Index se = 0;    ///< |S_hat| - |S*|
    double tpr = 0.0;
    double fpr = 0.0;
    double mcc = 0.0;
    Index tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Matthews correlation coefficient; 0 when any marginal count is 0.
inline double matthews(Index tp, Index fp, Index tn, Index fn)
{
    const double a = static_cast<double>(tp + fp);
    const double b = static_cast<double>(tp + fn);
    const double c = static_cast<double>(tn + fp);
    const double d = static_cast<double>(tn + fn);
    if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) return 0.0;
    const double num = static_cast<double>(tp) * static_cast<double>(tn) -
                       static_cast<double>(fp) * static_cast<double>(fn);
    return std::clamp(num / std::sqrt(a * b * c * d), -1.0, 1.0);
}

/// Confusion counts from two supports over [0, p).
inline EvalReport confusion(const Support& selected, const Support& truth, Index p)
{
    EvalReport r;
    std::vector<char> in_truth(static_cast<std::size_t>(p), 0);
    for (Index j : truth) in_truth[static_cast<std::size_t>(j)] = 1;
    for (Index j : selected) {
        if (in_truth[static_cast<std::size_t>(j)]) ++r.tp;
        else ++r.fp;
    }
    const auto s_true = static_cast<Index>(truth.size());
    r.fn = s_true - r.tp;
    r.tn = p - s_true - r.fp;
    r.se = static_cast<Index>(selected.size()) - s_true;
    r.tpr = s_true > 0 ? static_cast<double>(r.tp) / static_cast<double>(s_true) : 0.0;
    r.fpr = p > s_true ? static_cast<double>(r.fp) / static_cast<double>(p - s_true) : 0.0;
    r.mcc = matthews(r.tp, r.fp, r.tn, r.fn);
    return r;
}

inline EvalReport evaluate(const SparseEstimate& estimate, const TrueModel& truth)
{
    const Index p = truth.beta_star.size();
    if (estimate.coefficients.size() != p) {
        detail::fail(ErrorCode::dimension_mismatch, "estimate and truth differ in dimension");
    }
    EvalReport r = confusion(estimate.support, truth.support_star, p);
    r.ee = (estimate.coefficients - truth.beta_star).norm();
    return r;
}

struct MetricSummary {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0; ///< sample standard deviation, 0 for a single value
};

inline MetricSummary summarize(std::vector<double> values)
{
    detail::require(!values.empty(), "cannot summarize an empty sample");
    MetricSummary m;
    const auto count = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.sd = std::sqrt(ss / (count - 1.0));
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    m.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return m;
}

struct EvalSummary {
    std::size_t count = 0;
    MetricSummary ee, se, tpr, fpr, mcc;
    /// Fraction of reports with tpr == 1 and fpr == 0.
    double exact_recovery = 0.0;
    /// Fraction of reports with se == 0.
    double correct_size = 0.0;
};

inline EvalSummary aggregate(const std::vector<EvalReport>& reports)
{
    detail::require(!reports.empty(), "cannot aggregate an empty list of reports");
    auto column = [&](auto get) {
        std::vector<double> v;
        v.reserve(reports.size());
        for (const auto& r : reports) v.push_back(static_cast<double>(get(r)));
        return summarize(std::move(v));
    };
    EvalSummary s;
    s.count = reports.size();
    s.ee = column([](const EvalReport& r) { return r.ee; });
    s.se = column([](const EvalReport& r) { return r.se; });
    s.tpr = column([](const EvalReport& r) { return r.tpr; });
    s.fpr = column([](const EvalReport& r) { return r.fpr; });
    s.mcc = column([](const EvalReport& r) { return r.mcc; });
    std::size_t exact = 0;
    std::size_t sized = 0;
    for (const auto& r : reports) {
        exact += (r.tpr == 1.0 && r.fpr == 0.0) ? 1 : 0;
        sized += r.se == 0 ? 1 : 0;
    }
    s.exact_recovery = static_cast<double>(exact) / static_cast<double>(reports.size());
    s.correct_size = static_cast<double>(sized) / static_cast<double>(reports.size());
    return s;
}

} // namespace fahtp
