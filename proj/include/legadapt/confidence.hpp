#ifndef LEGADAPT_CONFIDENCE_HPP
#define LEGADAPT_CONFIDENCE_HPP

#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>

namespace legadapt
{

enum class Degeneracy
{
    none,
    scan_too_short,    // no block size with 4M <= floor(n/3)
    flat_blocks,       // tau(2M) - 2 tau(M) vanishes to rounding
    gamma_out_of_range,
    nonpositive_ratio, // tau(2M) - 2 tau(M) and 3 tau(2M) - 2 tau(M) - tau(4M) disagree in sign
};

inline std::string_view to_string(Degeneracy d)
{
    switch (d)
    {
    case Degeneracy::none: return "none";
    case Degeneracy::scan_too_short: return "scan_too_short";
    case Degeneracy::flat_blocks: return "flat_blocks";
    case Degeneracy::gamma_out_of_range: return "gamma_out_of_range";
    case Degeneracy::nonpositive_ratio: return "nonpositive_ratio";
    }
    return "unknown";
}

/// gamma^ values outside this open interval are not used to build intervals.
inline constexpr double gamma_usable_min = 0.001;
inline constexpr double gamma_usable_max = 0.95;

struct BlockSize
{
    std::size_t M = 0;        // 0 when no admissible block exists
    std::size_t unclamped = 0;
    bool clamped = false;
};

/// M(n) = floor(exp(sqrt(ln n))), reduced if needed so that 4M <= floor(n/3).
inline BlockSize block_size(std::size_t n)
{
    require(n >= min_sample_size, "block_size: n must be >= 16");
    BlockSize b;
    b.unclamped = std::size_t(std::floor(std::exp(std::sqrt(std::log(double(n))))));
    const std::size_t cap = max_truncation(n) / 4;
    b.M = std::min(b.unclamped, cap);
    b.clamped = b.M < b.unclamped;
    return b;
}

struct GammaEstimate
{
    double value = std::numeric_limits<double>::quiet_NaN();
    Degeneracy degeneracy = Degeneracy::none;

    bool usable() const { return degeneracy == Degeneracy::none; }
};

/// gamma^ = (tau(4M) - 2 tau(2M)) / (tau(2M) - 2 tau(M)) from three raw block values.
inline GammaEstimate gamma_hat(double tau_m, double tau_2m, double tau_4m)
{
    GammaEstimate g;
    const double denom = tau_2m - 2.0 * tau_m;
    const double scale = std::abs(tau_2m) + 2.0 * std::abs(tau_m);
    if (!(std::abs(denom) > 64.0 * std::numeric_limits<double>::epsilon() * scale))
    {
        g.degeneracy = Degeneracy::flat_blocks;
        return g;
    }
    g.value = (tau_4m - 2.0 * tau_2m) / denom;
    if (!(g.value > gamma_usable_min && g.value < gamma_usable_max))
        g.degeneracy = Degeneracy::gamma_out_of_range;
    return g;
}

inline GammaEstimate gamma_hat(const TauScan& scan, std::size_t M)
{
    if (M == 0 || 4 * M > scan.max_n())
        return {std::numeric_limits<double>::quiet_NaN(), Degeneracy::scan_too_short};
    return gamma_hat(scan.at(M), scan.at(2 * M), scan.at(4 * M));
}

struct ConfidenceReport
{
    std::size_t n = 0;
    std::size_t M = 0;
    bool block_clamped = false;
    double tau_m = 0.0, tau_2m = 0.0, tau_4m = 0.0;
    double gamma_hat = std::numeric_limits<double>::quiet_NaN();
    double tau_star = 0.0;
    std::optional<double> radius; // bound on ||f^ - f||^2, absent when degenerate
    Degeneracy degeneracy = Degeneracy::none;
    std::optional<double> delta;
    std::optional<double> u_delta;

    bool degenerate() const { return degeneracy != Degeneracy::none; }
};

/** Adaptive confidence bound on the integrated squared error,
 *
 *    ||f^ - f||^2 <= tau* (tau(2M) - 2 tau(M)) / (3 tau(2M) - 2 tau(M) - tau(4M)),
 *
 *  which is tau* / (1 - gamma^) written without the division by the gamma^
 *  denominator.  The ratio must be positive; otherwise the report is degenerate.
 */
inline ConfidenceReport aci_radius(const TauScan& scan, std::size_t M, bool block_clamped = false)
{
    ConfidenceReport r;
    r.n = scan.n;
    r.M = M;
    r.block_clamped = block_clamped;
    r.tau_star = scan.tau_star;

    if (M == 0 || 4 * M > scan.max_n())
    {
        r.degeneracy = Degeneracy::scan_too_short;
        return r;
    }
    r.tau_m = scan.at(M);
    r.tau_2m = scan.at(2 * M);
    r.tau_4m = scan.at(4 * M);

    const auto g = gamma_hat(r.tau_m, r.tau_2m, r.tau_4m);
    r.gamma_hat = g.value;
    if (!g.usable())
    {
        r.degeneracy = g.degeneracy;
        return r;
    }

    const double num = r.tau_2m - 2.0 * r.tau_m;
    const double den = 3.0 * r.tau_2m - 2.0 * r.tau_m - r.tau_4m;
    const double ratio = num / den;
    if (!(ratio > 0.0) || !std::isfinite(ratio))
    {
        r.degeneracy = Degeneracy::nonpositive_ratio;
        return r;
    }
    r.radius = r.tau_star * ratio;

    const double direct = r.tau_star / (1.0 - r.gamma_hat);
    if (std::abs(*r.radius - direct) > 1e-10 * std::max(std::abs(direct), std::numeric_limits<double>::min()))
        throw NumericFailure("aci_radius: interval disagrees with tau*/(1 - gamma^)");
    return r;
}

/// Block size from n, then the interval.
inline ConfidenceReport aci_radius(const TauScan& scan)
{
    const auto b = block_size(scan.n);
    return aci_radius(scan, b.M, b.clamped);
}

struct DensityProblem
{
};

/// Tail exponent r(q): 2q/(q+4) for q in (0, 2), q/(q+1) for q >= 2.
inline double tail_exponent(double q)
{
    require(q > 0.0, "tail_exponent: q must be positive");
    return q < 2.0 ? 2.0 * q / (q + 4.0) : q / (q + 1.0);
}

/// r = 1 for density estimation.
inline double tail_exponent(DensityProblem)
{
    return 1.0;
}

/// Tail model behind the refined interval: P(|zeta| > u) <= 2 exp(-C_tail u^{r/2}).
struct TailModel
{
    double r = 1.0;
    double C_tail = 1.0;
    double Q = 1.0;

    static TailModel regression(double q, double C_tail, double Q = 1.0) { return {tail_exponent(q), C_tail, Q}; }
    static TailModel density(double C_tail) { return {tail_exponent(DensityProblem{}), C_tail, 1.0}; }
};

/// u(delta) solving 2 exp(-C_tail u^{r/2}) = delta.
inline double tail_quantile(const TailModel& tail, double delta)
{
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    require(tail.C_tail > 0.0, "C_tail must be positive");
    return std::pow(std::log(2.0 / delta) / tail.C_tail, 2.0 / tail.r);
}

/** tau* / (1 - gamma^) + tau* u(delta), or the cruder tau* u(delta) when
 *  include_gamma_term is false.  Empty when the report is degenerate and the
 *  gamma^ term is requested.
 */
inline std::optional<double> refined_radius(const ConfidenceReport& report, const TailModel& tail, double delta,
                                             bool include_gamma_term = true)
{
    const double u = tail_quantile(tail, delta);
    if (!include_gamma_term)
        return report.tau_star * u;
    if (report.degenerate())
        return std::nullopt;
    return report.tau_star / (1.0 - report.gamma_hat) + report.tau_star * u;
}

} // namespace legadapt

#endif // LEGADAPT_CONFIDENCE_HPP
