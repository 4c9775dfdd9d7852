#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "datagen.hpp"
#include "io/csv.hpp"
#include "selection.hpp"

namespace fahtp {

struct FitOptions {
    Index s_max = 0; ///< 0 selects default_s_max on the training rows
    double kappa = default_kappa;
    double k_const = default_k_const;
    int max_iter = 100;
    bool fixed_iterations = false;
    bool normalize = true;
    /// Fraction of rows held out for testing, in (0, 1).
    std::optional<double> test_fraction;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct FitReport {
    Index n_train = 0;
    Index n_test = 0;
    Index p = 0;
    Index s_max = 0;
    FahtpSelection selection;
    /// Coefficients on the scale of the input columns.
    Vector coefficients;
    Support support;
    std::optional<double> test_mse;
};

/// Row indices of the held-out set, sorted; the remaining rows train the model.
inline std::vector<Index> test_rows(Index n, double fraction, std::uint64_t seed)
{
    detail::require(fraction > 0.0 && fraction < 1.0, "split fraction must lie in (0, 1)");
    detail::require(n >= 2, "a split needs at least two rows");
    const auto n_test = std::clamp<Index>(static_cast<Index>(std::lround(fraction * static_cast<double>(n))), 1, n - 1);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    CounterRng rng(seed, {stream::split});
    for (Index k = 0; k < n_test; ++k) {
        const auto j = k + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - k)));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> out(perm.begin(), perm.begin() + n_test);
    std::sort(out.begin(), out.end());
    return out;
}

inline FitReport fit_dataset(const Matrix& x, const Vector& y, const FitOptions& opts)
{
    if (y.size() != x.rows()) {
        detail::fail(ErrorCode::dimension_mismatch, "X has " + std::to_string(x.rows()) + " rows, y has " +
                                                        std::to_string(y.size()));
    }
    Matrix x_train = x, x_test;
    Vector y_train = y, y_test;
    if (opts.test_fraction) {
        const auto held = test_rows(x.rows(), *opts.test_fraction, opts.seed);
        std::vector<bool> is_test(static_cast<std::size_t>(x.rows()), false);
        for (Index i : held) is_test[static_cast<std::size_t>(i)] = true;
        x_train.resize(x.rows() - static_cast<Index>(held.size()), x.cols());
        y_train.resize(x_train.rows());
        x_test.resize(static_cast<Index>(held.size()), x.cols());
        y_test.resize(x_test.rows());
        Index a = 0, b = 0;
        for (Index i = 0; i < x.rows(); ++i) {
            if (is_test[static_cast<std::size_t>(i)]) {
                x_test.row(b) = x.row(i);
                y_test(b++) = y(i);
            } else {
                x_train.row(a) = x.row(i);
                y_train(a++) = y(i);
            }
        }
    }

    Dataset train(std::move(x_train), std::move(y_train));
    Vector scale = Vector::Ones(train.p());
    if (opts.normalize) {
        auto nd = normalize_columns(train);
        train = std::move(nd.data);
        scale = std::move(nd.scale);
    }

    FitReport report;
    report.n_train = train.n();
    report.n_test = x_test.rows();
    report.p = train.p();
    report.s_max = opts.s_max == 0 ? default_s_max(train.n(), train.p()) : opts.s_max;

    FahtpOptions fo;
    fo.s_max = report.s_max;
    fo.kappa = opts.kappa;
    fo.k_const = opts.k_const;
    fo.path.max_iter = opts.max_iter;
    fo.path.fixed_iterations = opts.fixed_iterations;
    fo.path.jobs = opts.jobs;
    report.selection = run_fahtp(train, fo);
    report.support = report.selection.final_estimate.support;
    report.coefficients = to_original_scale(report.selection.final_estimate.coefficients, scale);
    if (opts.test_fraction) {
        report.test_mse = (y_test - x_test * report.coefficients).squaredNorm() / static_cast<double>(y_test.size());
    }
    return report;
}

/// Reads X (n x p) and y (n x 1) from CSV files and fits.
inline FitReport fit_csv(const std::string& x_path, const std::string& y_path, bool header, const FitOptions& opts)
{
    const auto x = io::read_csv(x_path, header);
    const auto y = io::read_csv(y_path, header);
    if (y.values.cols() != 1) {
        detail::fail(ErrorCode::dimension_mismatch,
                     y_path + " has " + std::to_string(y.values.cols()) + " columns, expected 1");
    }
    if (y.values.rows() != x.values.rows()) {
        detail::fail(ErrorCode::dimension_mismatch, x_path + " has " + std::to_string(x.values.rows()) +
                                                        " rows, " + y_path + " has " +
                                                        std::to_string(y.values.rows()));
    }
    return fit_dataset(x.values, y.values.col(0), opts);
}

/// Report columns: name,index,value. Column indices are 1-based; absent values are empty.
inline void write_fit_report(const std::string& path, const FitReport& r)
{
    io::CsvWriter w(path);
    w.row({"name", "index", "value"});
    w.row({"n_train", "", std::to_string(r.n_train)});
    w.row({"n_test", "", std::to_string(r.n_test)});
    w.row({"p", "", std::to_string(r.p)});
    w.row({"s_max", "", std::to_string(r.s_max)});
    w.row({"s_hat", "", std::to_string(r.selection.s_hat)});
    w.row({"s_tilde", "", r.selection.s_tilde ? std::to_string(*r.selection.s_tilde) : ""});
    w.row({"final_s", "", std::to_string(r.selection.final_s)});
    w.row({"sigma_hat", "", io::format_double(r.selection.sigma_hat)});
    w.row({"used_safeguard", "", r.selection.used_safeguard ? "1" : "0"});
    w.row({"test_mse", "", r.test_mse ? io::format_double(*r.test_mse) : ""});
    for (Index j : r.support) w.row({"coefficient", std::to_string(j + 1), io::format_double(r.coefficients(j))});
}

} // namespace fahtp
