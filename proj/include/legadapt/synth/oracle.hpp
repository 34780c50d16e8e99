#ifndef LEGADAPT_SYNTH_ORACLE_HPP
#define LEGADAPT_SYNTH_ORACLE_HPP

#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/quadrature.hpp"
#include "legadapt/summation.hpp"
#include "legadapt/synth/truth.hpp"

#include <cstddef>
#include <vector>

namespace legadapt::synth
{

/** Oracle risk profiles that need the truth.
 *
 *  B(n, N) = sum_{k=N+1}^{2N} (c_k(n)^2 + v_k) is the exact expectation of
 *  tau(n, N): c_k(n) is the noiseless value of c^_k (the design Riemann sum for
 *  regression, c_k itself for density) and v_k = Var c^_k.  A(n, N) = rho(N) +
 *  sum_{k=1}^{N} v_k.  Both minimizers use the largest-index tie rule.
 */
struct OracleRisk
{
    std::vector<double> B;  // index N = 1..floor(n/3); B[0] unused
    std::vector<double> A;
    std::vector<double> mean_coeffs; // c_k(n), k = 0..2 floor(n/3)
    std::vector<double> coeff_var;   // v_k
    std::size_t N0 = 0;   // argmin B
    std::size_t N0_A = 0; // argmin A
    double B_n = 0.0;
    double A_n = 0.0;
    double sigma2 = 0.0;
};

namespace detail
{

inline void finish_oracle(OracleRisk& o, const SyntheticModel& truth, std::size_t n)
{
    const std::size_t n_max = max_truncation(n);
    o.B.assign(n_max + 1, 0.0);
    o.A.assign(n_max + 1, 0.0);
    double var_prefix = 0.0;
    for (std::size_t N = 1; N <= n_max; ++N)
    {
        double b = 0.0;
        for (std::size_t k = N + 1; k <= 2 * N; ++k)
            b += o.mean_coeffs[k] * o.mean_coeffs[k] + o.coeff_var[k];
        o.B[N] = b;
        var_prefix += o.coeff_var[N];
        o.A[N] = truth.rho(N) + var_prefix;
    }
    o.N0 = select_truncation(o.B);
    o.N0_A = select_truncation(o.A);
    o.B_n = o.B[o.N0];
    o.A_n = o.A[o.N0_A];
}

} // namespace detail

/// Regression: noise variance sigma2, uniform design of size n.
inline OracleRisk oracle_risk_regression(const SyntheticModel& truth, std::size_t n, double sigma2,
                                         std::span<const double> design_values = {})
{
    require(n >= min_sample_size, "oracle_risk: n must be >= 16");
    const std::size_t j_max = scan_coefficient_count(n);
    std::vector<double> fx;
    if (design_values.empty())
    {
        fx = truth.design_values(n);
        design_values = fx;
    }
    require(design_values.size() == n, "oracle_risk: design values have the wrong length");

    OracleRisk o;
    o.sigma2 = sigma2;
    o.mean_coeffs = estimate_coeffs_regression(RegressionSample(std::vector<double>(design_values.begin(),
                                                                                    design_values.end())),
                                               j_max)
                        .coeffs;
    // Var c^_k = (2/n)^2 sigma2 sum_i L_k(x_i)^2
    const auto x = design_grid(n);
    std::vector<double> p_prev(n, 1.0), p_cur(x), sq(n);
    o.coeff_var.assign(j_max + 1, 0.0);
    auto fill = [&](const std::vector<double>& p, std::size_t k) {
        for (std::size_t i = 0; i < n; ++i)
            sq[i] = p[i] * p[i];
        const double s = pairwise_sum(sq) * (double(k) + 0.5);
        o.coeff_var[k] = 4.0 * sigma2 * s / (double(n) * double(n));
    };
    fill(p_prev, 0);
    if (j_max >= 1)
        fill(p_cur, 1);
    for (std::size_t k = 1; k < j_max; ++k)
    {
        const double a = double(2 * k + 1) / double(k + 1);
        const double b = double(k) / double(k + 1);
        for (std::size_t i = 0; i < n; ++i)
            p_prev[i] = a * x[i] * p_cur[i] - b * p_prev[i];
        std::swap(p_prev, p_cur);
        fill(p_cur, k + 1);
    }
    detail::finish_oracle(o, truth, n);
    return o;
}

/// Density: v_k = (E L_k(xi)^2 - c_k^2) / n, with E L_k^2 by Gauss-Legendre quadrature.
inline OracleRisk oracle_risk_density(const SyntheticModel& truth, std::size_t n)
{
    require(n >= min_sample_size, "oracle_risk: n must be >= 16");
    const std::size_t j_max = scan_coefficient_count(n);
    const auto c = truth.coeffs();

    OracleRisk o;
    o.sigma2 = 1.0;
    o.mean_coeffs.assign(j_max + 1, 0.0);
    for (std::size_t k = 0; k <= j_max && k < c.size(); ++k)
        o.mean_coeffs[k] = c[k];

    // integrand L_k^2 f has degree 2 j_max + J
    const auto rule = gauss_legendre_rule(j_max + truth.J() / 2 + 2);
    std::vector<double> second(j_max + 1, 0.0), row(j_max + 1);
    for (std::size_t i = 0; i < rule.order; ++i)
    {
        const double wf = rule.weights[i] * truth(rule.nodes[i]);
        legendre_p_row<double>(j_max, rule.nodes[i], row);
        for (std::size_t k = 0; k <= j_max; ++k)
            second[k] += wf * row[k] * row[k];
    }
    o.coeff_var.assign(j_max + 1, 0.0);
    for (std::size_t k = 1; k <= j_max; ++k)
        o.coeff_var[k] = std::max(0.0, second[k] * (double(k) + 0.5) - o.mean_coeffs[k] * o.mean_coeffs[k]) /
                         double(n);
    detail::finish_oracle(o, truth, n);
    return o;
}

inline OracleRisk oracle_risk(const SyntheticModel& truth, std::size_t n, double sigma2, Problem problem)
{
    return problem == Problem::regression ? oracle_risk_regression(truth, n, sigma2) : oracle_risk_density(truth, n);
}

} // namespace legadapt::synth

#endif // LEGADAPT_SYNTH_ORACLE_HPP
