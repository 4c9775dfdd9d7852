#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "core.hpp"
#include "htp.hpp"
#include "parallel.hpp"

namespace fahtp {

inline constexpr double default_k_const = 3.0;
inline constexpr double default_kappa = 2.0;
inline constexpr double default_safeguard_const = 5.0;

/// IC(s) = log(rss / 2n) + K (s/n) log(p/s). A perfect fit (rss == 0) gives -infinity.
inline double ic_value(double rss, Index n, Index p, Index s, double k_const)
{
    detail::require(n >= 1, "n must be at least 1");
    detail::require(s >= 1 && s <= p, "model size must lie in [1, p]");
    detail::require(rss >= 0.0, "rss must be nonnegative");
    if (rss == 0.0) return -std::numeric_limits<double>::infinity();
    const double nd = static_cast<double>(n);
    const double sd = static_cast<double>(s);
    return std::log(rss / (2.0 * nd)) + k_const * (sd / nd) * std::log(static_cast<double>(p) / sd);
}

/// Upper bound on the model size from n >= C0 s_max log(p / s_max) with C0 = 2:
/// floor(n / (2 log(max(p/n, 2)))), capped at min(n/2, p) and at least 1.
inline Index default_s_max(Index n, Index p)
{
    const double ratio = std::max(static_cast<double>(p) / static_cast<double>(n), 2.0);
    auto s = static_cast<Index>(std::floor(static_cast<double>(n) / (2.0 * std::log(ratio))));
    s = std::min({s, n / 2, p});
    return std::max<Index>(s, 1);
}

struct PathOptions {
    int max_iter = 100;
    bool fixed_iterations = false;
    /// Keep per-iteration records of every HTP run.
    bool trace = false;
    unsigned jobs = 1;
    /// rss <= perfect_fit_tol * ||y||^2 is treated as an exact fit.
    double perfect_fit_tol = 1e-20;
};

struct PathEntry {
    Index s = 0;
    SparseEstimate estimate;
    double ic = std::numeric_limits<double>::infinity();
    double lambda_min = 0.0;
    bool failed = false;
    bool perfect_fit = false;
    HtpTrace trace;
};

struct SolutionPath {
    std::vector<PathEntry> entries;
    Index s_max = 0;
    double k_const = default_k_const;
    Index n = 0;
    Index p = 0;

    const PathEntry& at(Index s) const { return entries.at(static_cast<std::size_t>(s - 1)); }
};

/// Runs HTP from zero for every s in 1..s_max. Rank-deficient sizes are marked failed.
inline SolutionPath build_path(const Dataset& data, Index s_max, double k_const = default_k_const,
                               const PathOptions& opts = {})
{
    if (s_max < 1 || s_max > std::min(data.n(), data.p())) {
        detail::fail(ErrorCode::invalid_argument,
                     "s_max " + std::to_string(s_max) + " outside [1, min(n, p)]");
    }
    SolutionPath path;
    path.s_max = s_max;
    path.k_const = k_const;
    path.n = data.n();
    path.p = data.p();
    path.entries.resize(static_cast<std::size_t>(s_max));
    const double perfect = opts.perfect_fit_tol * data.y().squaredNorm();

    parallel_for(static_cast<std::size_t>(s_max), opts.jobs, [&](std::size_t i) {
        PathEntry& e = path.entries[i];
        e.s = static_cast<Index>(i) + 1;
        HtpConfig cfg;
        cfg.s = e.s;
        cfg.max_iter = opts.max_iter;
        cfg.fixed_iterations = opts.fixed_iterations;
        cfg.trace = opts.trace;
        try {
            HtpResult r = htp_run(data, cfg);
            e.estimate = std::move(r.estimate);
            e.trace = std::move(r.trace);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::rank_deficient) throw;
            e.failed = true;
            e.estimate = zero_estimate(data);
            return;
        }
        e.lambda_min = min_signal(e.estimate);
        e.perfect_fit = e.estimate.rss <= perfect;
        e.ic = e.perfect_fit ? -std::numeric_limits<double>::infinity()
                             : ic_value(e.estimate.rss, data.n(), data.p(), e.s, k_const);
    });
    return path;
}

/// The first s_max entries of a path. Each entry is fit independently, so this equals
/// a path built with the smaller bound.
inline SolutionPath truncate_path(const SolutionPath& path, Index s_max)
{
    detail::require(s_max >= 1 && s_max <= path.s_max, "truncation bound outside the path");
    SolutionPath out;
    out.entries.assign(path.entries.begin(), path.entries.begin() + s_max);
    out.s_max = s_max;
    out.k_const = path.k_const;
    out.n = path.n;
    out.p = path.p;
    return out;
}

/// sigma_hat = ||y - X beta||_2 / sqrt(n)
inline double sigma_plugin(const Dataset& data, const SparseEstimate& estimate)
{
    detail::require(estimate.coefficients.size() == data.p(), "estimate does not match the design");
    return std::sqrt(estimate.rss / static_cast<double>(data.n()));
}

struct FahtpOptions {
    Index s_max = 0; ///< 0 selects default_s_max(n, p)
    double kappa = default_kappa;
    double k_const = default_k_const;
    double safeguard_const = default_safeguard_const;
    PathOptions path;
};

struct FahtpSelection {
    Index s_hat = 0;
    double sigma_hat = 0.0;
    std::optional<Index> s_tilde;
    Index final_s = 0;
    SparseEstimate final_estimate;
    /// True when no candidate passed both the ratio and the proximity test.
    bool used_safeguard = true;
    double kappa = default_kappa;
};

/// Index of the IC minimizer; ties and perfect fits resolve to the smallest s.
inline Index ic_argmin(const SolutionPath& path)
{
    Index best = 0;
    double best_ic = std::numeric_limits<double>::infinity();
    for (const auto& e : path.entries) {
        if (e.failed) continue;
        if (best == 0 || e.ic < best_ic) {
            best = e.s;
            best_ic = e.ic;
        }
    }
    if (best == 0) detail::fail(ErrorCode::unfittable, "every model size on the path is rank deficient");
    return best;
}

/// Two-stage selection on a computed path: IC minimizer s_hat, then a descending scan of
/// s from min(2 s_hat, s_max - 1) to max(ceil(s_hat / 2), 1) for the first size whose
/// minimum-signal ratio lambda(s) / lambda(s + 1) reaches kappa and whose estimate lies
/// within C sigma_hat^2 s_hat log(p / s_hat) / n (squared distance) of the IC estimate.
inline FahtpSelection select_from_path(const SolutionPath& path, const Dataset& data,
                                       double kappa = default_kappa,
                                       double safeguard_const = default_safeguard_const)
{
    detail::require(kappa > 1.0, "kappa must exceed 1");
    FahtpSelection sel;
    sel.kappa = kappa;
    sel.s_hat = ic_argmin(path);
    const PathEntry& hat = path.at(sel.s_hat);
    sel.sigma_hat = hat.perfect_fit ? 0.0 : sigma_plugin(data, hat.estimate);

    const double sh = static_cast<double>(sel.s_hat);
    const double radius = safeguard_const * sel.sigma_hat * sel.sigma_hat * sh *
                          std::log(static_cast<double>(path.p) / sh) / static_cast<double>(path.n);
    const Index hi = std::min(2 * sel.s_hat, path.s_max - 1);
    const Index lo = std::max<Index>((sel.s_hat + 1) / 2, 1);

    for (Index s = hi; s >= lo; --s) {
        const PathEntry& cand = path.at(s);
        const PathEntry& above = path.at(s + 1);
        if (cand.failed || above.failed) continue;
        const double ratio = above.lambda_min == 0.0 ? std::numeric_limits<double>::infinity()
                                                     : cand.lambda_min / above.lambda_min;
        if (ratio < kappa) continue;
        if ((hat.estimate.coefficients - cand.estimate.coefficients).squaredNorm() > radius) continue;
        sel.s_tilde = s;
        sel.used_safeguard = false;
        break;
    }

    sel.final_s = sel.s_tilde.value_or(sel.s_hat);
    sel.final_estimate = path.at(sel.final_s).estimate;
    return sel;
}

inline FahtpSelection run_fahtp(const Dataset& data, const FahtpOptions& opts = {})
{
    const Index s_max = opts.s_max == 0 ? default_s_max(data.n(), data.p()) : opts.s_max;
    detail::require(s_max >= 1, "s_max must be at least 1");
    detail::require(opts.kappa > 1.0, "kappa must exceed 1");
    const SolutionPath path = build_path(data, s_max, opts.k_const, opts.path);
    return select_from_path(path, data, opts.kappa, opts.safeguard_const);
}

/// Least squares on the true support.
inline SparseEstimate oracle_estimator(const Dataset& data, const TrueModel& truth)
{
    if (truth.beta_star.size() != data.p()) {
        detail::fail(ErrorCode::dimension_mismatch, "true coefficients do not match the design");
    }
    return ols_on_support(data, truth.support_star);
}

} // namespace fahtp
