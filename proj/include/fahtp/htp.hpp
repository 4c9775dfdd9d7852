#pragma once

#include <optional>
#include <set>
#include <vector>

#include "core.hpp"

namespace fahtp {

struct HtpConfig {
    Index s = 1;
    int max_iter = 100;
    /// Starting point; zero vector when empty.
    std::optional<SparseEstimate> warm_start;
    /// Keep per-iteration records, including the coefficient vectors.
    bool trace = false;
    /// Run exactly max_iter steps and return the last iterate, ignoring the stopping rule.
    bool fixed_iterations = false;
};

enum class StopReason { support_stable, max_iter, cycle_detected };

inline const char* to_string(StopReason r)
{
    switch (r) {
        case StopReason::support_stable: return "support_stable";
        case StopReason::max_iter: return "max_iter";
        case StopReason::cycle_detected: return "cycle_detected";
    }
    return "?";
}

struct HtpRecord {
    int t = 0;
    Support support;
    /// ||y - X beta^t||^2 / (2n)
    double loss = 0.0;
    /// Smallest nonzero |beta^t_i|.
    double min_signal = 0.0;
    Vector coefficients;
};

struct HtpTrace {
    /// Record t = 0 is the starting point; one record per gradient step after that.
    std::vector<HtpRecord> iterations;
    /// Number of gradient steps taken.
    int steps = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::max_iter;
};

struct HtpResult {
    SparseEstimate estimate;
    HtpTrace trace;
    /// X^T (y - X beta_hat) / n at the returned estimate.
    Vector gradient_residual;
};

namespace detail {

inline HtpRecord make_record(int t, const SparseEstimate& est, Index n, bool keep_coefficients)
{
    HtpRecord r;
    r.t = t;
    r.support = est.support;
    r.loss = est.rss / (2.0 * static_cast<double>(n));
    r.min_signal = min_signal(est);
    if (keep_coefficients) r.coefficients = est.coefficients;
    return r;
}

} // namespace detail

/// Hard Thresholding Pursuit: gradient step with unit step size, keep the s largest
/// entries, refit by least squares on that support; stop once the support repeats.
///
/// A support that recurs other than as the immediate predecessor means the iteration
/// has entered a cycle; the run stops and returns the visited iterate of smallest loss.
/// The same smallest-loss iterate is returned when max_iter is exhausted, unless
/// fixed_iterations is set, in which case the final iterate is returned.
inline HtpResult htp_run(const Dataset& data, const HtpConfig& config)
{
    const Index n = data.n();
    const Index p = data.p();
    if (config.s < 1 || config.s > std::min(n, p)) {
        detail::fail(ErrorCode::invalid_argument, "model size " + std::to_string(config.s) +
                                                      " outside [1, min(n, p)]");
    }
    detail::require(config.max_iter >= 1, "max_iter must be at least 1");

    SparseEstimate current;
    if (config.warm_start) {
        current = *config.warm_start;
        detail::require(current.coefficients.size() == p, "warm start has wrong dimension");
        detail::check_support(current.support, p);
        current.rss = residual_ss(data, current.coefficients);
    } else {
        current = zero_estimate(data);
    }

    HtpResult result;
    HtpTrace& trace = result.trace;
    if (config.trace) trace.iterations.push_back(detail::make_record(0, current, n, true));

    std::set<Support> visited{current.support};
    std::optional<SparseEstimate> best;
    bool stopped = false;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (int t = 1; t <= config.max_iter; ++t) {
        const Vector step = current.coefficients + data.x().transpose() * (data.y() - data.x() * current.coefficients) * inv_n;
        Support next = threshold_support(step, config.s);
        trace.steps = t;

        const bool repeated = (next == current.support);
        if (!config.fixed_iterations) {
            if (repeated) {
                if (config.trace) trace.iterations.push_back(detail::make_record(t, current, n, true));
                trace.converged = true;
                trace.stop_reason = StopReason::support_stable;
                stopped = true;
                break;
            }
            if (visited.count(next) != 0) {
                trace.stop_reason = StopReason::cycle_detected;
                stopped = true;
                break;
            }
        }

        if (!repeated) current = ols_on_support(data, next);
        if (config.trace) trace.iterations.push_back(detail::make_record(t, current, n, true));
        visited.insert(current.support);
        if (!best || current.rss < best->rss) best = current;
        trace.converged = repeated;
    }

    if (!stopped) trace.stop_reason = StopReason::max_iter;

    if (trace.stop_reason == StopReason::support_stable || config.fixed_iterations || !best) {
        result.estimate = std::move(current);
    } else {
        result.estimate = std::move(*best);
    }
    result.gradient_residual =
        data.x().transpose() * (data.y() - data.x() * result.estimate.coefficients) * inv_n;
    return result;
}

/// Per-iteration split of the gradient-step error into its two sources.
struct ErrorDecomposition {
    int t = 0;
    /// ||(X^T X / n - I)(beta* - beta^t)||_2
    double opt_error = 0.0;
    /// ||X^T xi / n||_2 with xi = y - X beta*
    double stat_error = 0.0;
};

inline std::vector<ErrorDecomposition> diagnose(const HtpResult& result, const TrueModel& truth,
                                                const Dataset& data)
{
    if (result.trace.iterations.empty() || result.trace.iterations.front().coefficients.size() == 0) {
        detail::fail(ErrorCode::no_trace, "run htp_run with trace enabled");
    }
    if (truth.beta_star.size() != data.p()) {
        detail::fail(ErrorCode::dimension_mismatch, "true coefficients do not match the design");
    }
    const double inv_n = 1.0 / static_cast<double>(data.n());
    const Vector noise = data.y() - data.x() * truth.beta_star;
    const double stat = (data.x().transpose() * noise * inv_n).norm();

    std::vector<ErrorDecomposition> out;
    out.reserve(result.trace.iterations.size());
    for (const auto& rec : result.trace.iterations) {
        const Vector diff = truth.beta_star - rec.coefficients;
        const Vector phi_diff = data.x().transpose() * (data.x() * diff) * inv_n - diff;
        out.push_back({rec.t, phi_diff.norm(), stat});
    }
    return out;
}

} // namespace fahtp
