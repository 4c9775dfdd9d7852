#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <variant>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace fahtp {

struct IidGaussian {};

/// Rows drawn from N(0, Sigma) with Sigma_ij = rho^|i-j|.
struct Ar1 {
    double rho = 0.5;
};

using DesignLaw = std::variant<IidGaussian, Ar1>;

/// Magnitudes uniform on [lo, hi], optionally with a random sign.
struct TwoSidedUniform {
    double lo = 1.0;
    double hi = 5.0;
    bool random_sign = true;
};

/// Magnitudes uniform on [k_lo u, k_hi u] with u = sigma sqrt(2 log p / n). Positive.
struct ThresholdUniform {
    double k_lo = 2.0;
    double k_hi = 10.0;
};

using CoefLaw = std::variant<TwoSidedUniform, ThresholdUniform>;

struct GaussianNoise {
    double sigma = 1.0;
};

/// sigma chosen so that beta*^T Sigma beta* / sigma^2 = snr.
struct SnrCalibrated {
    double snr = 10.0;
};

using NoiseLaw = std::variant<GaussianNoise, SnrCalibrated>;

struct ScenarioConfig {
    Index n = 300;
    Index p = 1000;
    Index s_star = 10;
    DesignLaw design = IidGaussian{};
    CoefLaw coef_law = ThresholdUniform{};
    /// Draw each magnitude from the two interval endpoints instead of the interval.
    bool two_point = false;
    NoiseLaw noise = GaussianNoise{};
    std::uint64_t seed = 0;
};

/// Stream identifiers mixed into the seed so that each kind of draw is independent.
namespace stream {
inline constexpr std::uint64_t design = 1;
inline constexpr std::uint64_t coefficients = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t split = 4;
} // namespace stream

inline void validate(const ScenarioConfig& c)
{
    detail::require(c.n >= 1 && c.p >= 1, "n and p must be positive");
    detail::require(c.s_star >= 1 && c.s_star <= std::min(c.n, c.p), "s_star must lie in [1, min(n, p)]");
    if (const auto* ar = std::get_if<Ar1>(&c.design)) {
        detail::require(ar->rho > -1.0 && ar->rho < 1.0, "ar1 rho must lie in (-1, 1)");
    }
    if (const auto* law = std::get_if<TwoSidedUniform>(&c.coef_law)) {
        detail::require(law->lo < law->hi, "coefficient interval needs lo < hi");
        detail::require(law->lo >= 0.0, "coefficient magnitudes must be nonnegative");
    } else {
        const auto& t = std::get<ThresholdUniform>(c.coef_law);
        detail::require(t.k_lo >= 0.0, "threshold multipliers must be nonnegative");
        detail::require(t.k_lo <= t.k_hi, "threshold interval needs k_lo <= k_hi");
    }
    if (const auto* g = std::get_if<GaussianNoise>(&c.noise)) {
        detail::require(g->sigma >= 0.0, "sigma must be nonnegative");
    } else {
        detail::require(std::get<SnrCalibrated>(c.noise).snr > 0.0, "snr must be positive");
    }
}

/// Design before column normalization; unit-variance columns.
inline Matrix gen_design_raw(const ScenarioConfig& c)
{
    validate(c);
    CounterRng rng(c.seed, {stream::design});
    Matrix x(c.n, c.p);
    const double rho = std::holds_alternative<Ar1>(c.design) ? std::get<Ar1>(c.design).rho : 0.0;
    const double innov = std::sqrt(1.0 - rho * rho);
    for (Index i = 0; i < c.n; ++i) {
        x(i, 0) = rng.normal();
        for (Index j = 1; j < c.p; ++j) x(i, j) = rho * x(i, j - 1) + innov * rng.normal();
    }
    return x;
}

/// Gaussian design with columns scaled to norm sqrt(n). The response is left at zero.
inline Dataset gen_design(const ScenarioConfig& c)
{
    return normalize_columns(Dataset(gen_design_raw(c), Vector::Zero(c.n))).data;
}

/// Support uniform over size-s_star subsets; magnitudes per the coefficient law.
inline TrueModel gen_coefficients(const ScenarioConfig& c, double sigma_for_units)
{
    validate(c);
    double lo = 0.0;
    double hi = 0.0;
    bool random_sign = false;
    if (const auto* law = std::get_if<TwoSidedUniform>(&c.coef_law)) {
        lo = law->lo;
        hi = law->hi;
        random_sign = law->random_sign;
    } else {
        detail::require(sigma_for_units > 0.0, "threshold law needs a positive sigma");
        const auto& t = std::get<ThresholdUniform>(c.coef_law);
        const double unit = sigma_for_units * std::sqrt(2.0 * std::log(static_cast<double>(c.p)) /
                                                        static_cast<double>(c.n));
        lo = t.k_lo * unit;
        hi = t.k_hi * unit;
    }

    CounterRng rng(c.seed, {stream::coefficients});
    std::vector<Index> perm(static_cast<std::size_t>(c.p));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index k = 0; k < c.s_star; ++k) {
        const auto j = k + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(c.p - k)));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> support(perm.begin(), perm.begin() + c.s_star);
    std::sort(support.begin(), support.end());

    Vector beta = Vector::Zero(c.p);
    for (Index j : support) {
        double mag = c.two_point ? (rng.coin() ? hi : lo) : rng.uniform(lo, hi);
        if (random_sign && rng.coin()) mag = -mag;
        beta(j) = mag;
    }
    return TrueModel(std::move(beta), sigma_for_units);
}

/// Population covariance entry of the design law.
inline double design_covariance(const DesignLaw& design, Index i, Index j)
{
    if (const auto* ar = std::get_if<Ar1>(&design)) {
        return std::pow(ar->rho, static_cast<double>(std::abs(i - j)));
    }
    return i == j ? 1.0 : 0.0;
}

/// sigma = sqrt(beta*^T Sigma beta* / snr).
inline double snr_to_sigma(const TrueModel& truth, const DesignLaw& design, double snr)
{
    detail::require(snr > 0.0, "snr must be positive");
    detail::require(!truth.support_star.empty(), "snr is undefined for a zero coefficient vector");
    double quad = 0.0;
    for (Index a : truth.support_star)
        for (Index b : truth.support_star)
            quad += truth.beta_star(a) * design_covariance(design, a, b) * truth.beta_star(b);
    return std::sqrt(quad / snr);
}

inline Vector gen_noise(Index n, double sigma, std::uint64_t seed)
{
    detail::require(sigma >= 0.0, "sigma must be nonnegative");
    Vector xi(n);
    if (sigma == 0.0) return xi.setZero();
    CounterRng rng(seed, {stream::noise});
    for (Index i = 0; i < n; ++i) xi(i) = sigma * rng.normal();
    return xi;
}

struct Scenario {
    Dataset data;
    TrueModel truth;
};

/// Design, coefficients and noise for one replication. Threshold laws are expressed in
/// units of the Gaussian noise sigma, or of sigma = 1 when the noise is SNR-calibrated.
inline Scenario generate_scenario(const ScenarioConfig& c)
{
    validate(c);
    Dataset design = gen_design(c);
    const auto* g = std::get_if<GaussianNoise>(&c.noise);
    const double units = (g != nullptr && g->sigma > 0.0) ? g->sigma : 1.0;
    TrueModel truth = gen_coefficients(c, units);
    truth.sigma = g != nullptr ? g->sigma : snr_to_sigma(truth, c.design, std::get<SnrCalibrated>(c.noise).snr);
    Vector y = design.x() * truth.beta_star + gen_noise(c.n, truth.sigma, c.seed);
    return Scenario{design.with_response(std::move(y)), std::move(truth)};
}

} // namespace fahtp
