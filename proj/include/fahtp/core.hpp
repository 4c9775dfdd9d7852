#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace fahtp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Column indices, strictly increasing.
using Support = std::vector<Index>;

/// Design matrix and response of a linear model y = X beta + noise.
class Dataset {
public:
    Dataset() = default;

    Dataset(Matrix x, Vector y, bool normalized = false)
        : x_(std::move(x)), y_(std::move(y)), normalized_(normalized)
    {
        detail::require(x_.rows() >= 1 && x_.cols() >= 1, "design must have n >= 1 and p >= 1");
        if (y_.size() != x_.rows()) {
            detail::fail(ErrorCode::dimension_mismatch,
                         "response has " + std::to_string(y_.size()) + " rows, design has " +
                             std::to_string(x_.rows()));
        }
        if (normalized_) {
            const double target = std::sqrt(static_cast<double>(n()));
            for (Index j = 0; j < p(); ++j) {
                detail::require(std::abs(x_.col(j).norm() - target) <= 1e-8 * target,
                                "column " + std::to_string(j) + " is not normalized to sqrt(n)");
            }
        }
    }

    const Matrix& x() const noexcept { return x_; }
    const Vector& y() const noexcept { return y_; }
    bool normalized() const noexcept { return normalized_; }
    Index n() const noexcept { return x_.rows(); }
    Index p() const noexcept { return x_.cols(); }

    /// Same design, different response.
    Dataset with_response(Vector y) const { return Dataset(x_, std::move(y), normalized_); }

private:
    Matrix x_;
    Vector y_;
    bool normalized_ = false;
};

/// Coefficient vector with an explicit support. Entries off the support are zero.
struct SparseEstimate {
    Vector coefficients;
    Support support;
    double rss = 0.0;

    Index size() const noexcept { return static_cast<Index>(support.size()); }
};

/// Smallest absolute nonzero coefficient on the support, 0 if there is none.
inline double min_signal(const SparseEstimate& est)
{
    double best = 0.0;
    for (Index j : est.support) {
        const double a = std::abs(est.coefficients(j));
        if (a != 0.0 && (best == 0.0 || a < best)) best = a;
    }
    return best;
}

inline SparseEstimate zero_estimate(const Dataset& data)
{
    return SparseEstimate{Vector::Zero(data.p()), {}, data.y().squaredNorm()};
}

/// Ground truth for simulated data.
struct TrueModel {
    Vector beta_star;
    Support support_star;
    double sigma = 1.0;
    double beta_min = 0.0;

    TrueModel() = default;

    TrueModel(Vector beta, double noise_sigma) : beta_star(std::move(beta)), sigma(noise_sigma)
    {
        for (Index j = 0; j < beta_star.size(); ++j) {
            if (beta_star(j) != 0.0) {
                support_star.push_back(j);
                const double a = std::abs(beta_star(j));
                beta_min = (support_star.size() == 1) ? a : std::min(beta_min, a);
            }
        }
    }

    Index sparsity() const noexcept { return static_cast<Index>(support_star.size()); }
};

namespace detail {

inline void check_support(const Support& support, Index p)
{
    for (std::size_t k = 0; k < support.size(); ++k) {
        require(support[k] >= 0 && support[k] < p,
                "support index " + std::to_string(support[k]) + " outside [0, p)");
        require(k == 0 || support[k - 1] < support[k], "support must be strictly increasing");
    }
}

/// Order used by the threshold operator: larger magnitude first, then smaller index.
template <class Derived>
auto magnitude_order(const Eigen::DenseBase<Derived>& v)
{
    return [&v](Index a, Index b) {
        const double fa = std::abs(v(a));
        const double fb = std::abs(v(b));
        return fa > fb || (fa == fb && a < b);
    };
}

} // namespace detail

/// Indices of the s largest-magnitude entries of v that are nonzero, ascending.
/// Ties in magnitude go to the smaller index.
template <class Derived>
Support threshold_support(const Eigen::DenseBase<Derived>& v, Index s)
{
    const Index p = v.size();
    if (s < 0 || s > p) {
        detail::fail(ErrorCode::invalid_argument,
                     "threshold size " + std::to_string(s) + " outside [0, " + std::to_string(p) + "]");
    }
    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    auto keep_end = idx.begin() + s;
    std::nth_element(idx.begin(), keep_end, idx.end(), detail::magnitude_order(v));

    Support out;
    out.reserve(static_cast<std::size_t>(s));
    for (auto it = idx.begin(); it != keep_end; ++it) {
        if (v(*it) != 0.0) out.push_back(*it);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Keeps the s entries of largest magnitude and zeroes the rest.
template <class Derived>
Vector hard_threshold(const Eigen::DenseBase<Derived>& v, Index s)
{
    Vector out = Vector::Zero(v.size());
    for (Index j : threshold_support(v, s)) out(j) = v(j);
    return out;
}

/// Relative threshold on |R_kk| below which a column subset is declared rank deficient.
inline constexpr double rank_tolerance = 1e-10;

/// Least squares restricted to the columns in `support`, solved by column-pivoted QR.
inline SparseEstimate ols_on_support(const Dataset& data, const Support& support)
{
    detail::check_support(support, data.p());
    const auto k = static_cast<Index>(support.size());
    if (k > data.n()) {
        detail::fail(ErrorCode::overdetermined_support,
                     "|S| = " + std::to_string(k) + " exceeds n = " + std::to_string(data.n()));
    }
    if (k == 0) return zero_estimate(data);

    Matrix xs(data.n(), k);
    for (Index c = 0; c < k; ++c) xs.col(c) = data.x().col(support[static_cast<std::size_t>(c)]);

    Eigen::ColPivHouseholderQR<Matrix> qr(xs);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double largest = diag.maxCoeff();
    if (!(largest > 0.0) || diag.minCoeff() < rank_tolerance * largest) {
        detail::fail(ErrorCode::rank_deficient,
                     "support of size " + std::to_string(k) + " has numerically dependent columns");
    }
    const Vector u = qr.solve(data.y());

    SparseEstimate est;
    est.coefficients = Vector::Zero(data.p());
    for (Index c = 0; c < k; ++c) est.coefficients(support[static_cast<std::size_t>(c)]) = u(c);
    est.support = support;
    est.rss = (data.y() - xs * u).squaredNorm();
    return est;
}

/// Residual sum of squares of an arbitrary coefficient vector.
inline double residual_ss(const Dataset& data, const Vector& beta)
{
    return (data.y() - data.x() * beta).squaredNorm();
}

struct NormalizedDataset {
    Dataset data;
    /// x_normalized.col(j) = x.col(j) * scale(j); map coefficients back with to_original_scale.
    Vector scale;
};

/// Rescales every column to Euclidean norm sqrt(n).
inline NormalizedDataset normalize_columns(const Dataset& data)
{
    const double target = std::sqrt(static_cast<double>(data.n()));
    Matrix x = data.x();
    Vector scale(data.p());
    for (Index j = 0; j < data.p(); ++j) {
        const double norm = x.col(j).norm();
        if (!(norm > 0.0)) {
            detail::fail(ErrorCode::degenerate_column, "column " + std::to_string(j) + " has zero norm");
        }
        scale(j) = (norm == target) ? 1.0 : target / norm;
        if (scale(j) != 1.0) x.col(j) *= scale(j);
    }
    return NormalizedDataset{Dataset(std::move(x), data.y(), true), std::move(scale)};
}

inline Vector to_original_scale(const Vector& coefficients, const Vector& scale)
{
    return coefficients.cwiseProduct(scale);
}

/// Number of size-k subsets of p items, saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t p, std::uint64_t k)
{
    if (k > p) return 0;
    k = std::min(k, p - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (p - k + i) / i;
        if (acc > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(acc);
}

inline constexpr std::uint64_t rip_enumeration_limit = 1'000'000;

/// Restricted isometry constant delta_s of X/sqrt(n), by enumerating column subsets.
/// Returns the largest deviation from 1 of the Gram spectrum over all |S| <= s.
/// Eigenvalues of a principal submatrix interlace those of the full matrix,
/// so subsets of size exactly min(s, p) attain the maximum.
inline double rip_constant_exhaustive(const Dataset& data, Index s)
{
    detail::require(s >= 0, "s must be nonnegative");
    const Index k = std::min(s, data.p());
    if (k == 0) return 0.0;
    const auto count = binomial(static_cast<std::uint64_t>(data.p()), static_cast<std::uint64_t>(k));
    if (count > rip_enumeration_limit) {
        detail::fail(ErrorCode::too_large, "C(" + std::to_string(data.p()) + ", " + std::to_string(k) +
                                               ") subsets exceeds the enumeration limit");
    }

    const Matrix gram = data.x().transpose() * data.x() / static_cast<double>(data.n());
    std::vector<Index> comb(static_cast<std::size_t>(k));
    std::iota(comb.begin(), comb.end(), Index{0});
    Matrix sub(k, k);
    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    double delta = 0.0;
    for (;;) {
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b)
                sub(a, b) = gram(comb[static_cast<std::size_t>(a)], comb[static_cast<std::size_t>(b)]);
        eig.compute(sub, Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        delta = std::max({delta, std::abs(ev(k - 1) - 1.0), std::abs(ev(0) - 1.0)});

        // next combination in lexicographic order
        Index i = k - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == data.p() - k + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
    return delta;
}

/// Contraction factor 2 delta sqrt((1 + delta) / (1 - delta)) of the HTP error recursion.
inline double gamma_from_delta(double delta)
{
    detail::require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
    return 2.0 * delta * std::sqrt((1.0 + delta) / (1.0 - delta));
}

} // namespace fahtp
