#ifndef LEGADAPT_ESTIMATORS_HPP
#define LEGADAPT_ESTIMATORS_HPP

#include "legadapt/errors.hpp"
#include "legadapt/legendre.hpp"
#include "legadapt/summation.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace legadapt
{

enum class Problem
{
    regression,
    density
};

inline std::string_view to_string(Problem p)
{
    return p == Problem::regression ? "R" : "D";
}

inline constexpr std::size_t min_sample_size = 16;

/// Largest truncation index scanned by tau: floor(n / 3).
inline std::size_t max_truncation(std::size_t n)
{
    return n / 3;
}

/// Number of coefficients needed by a full scan: indices 0..2 floor(n / 3).
inline std::size_t scan_coefficient_count(std::size_t n)
{
    return 2 * max_truncation(n);
}

/// Abscissa of the i-th design point, x_i = -1 + 2 i / n, i = 1..n.
inline double design_point(std::size_t i, std::size_t n)
{
    return -1.0 + 2.0 * double(i) / double(n);
}

inline std::vector<double> design_grid(std::size_t n)
{
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = design_point(i + 1, n);
    return x;
}

/// Observations y_i = f(x_i) + noise on the implicit uniform design.
class RegressionSample
{
public:
    explicit RegressionSample(std::vector<double> y) : y_(std::move(y))
    {
        require(y_.size() >= min_sample_size,
                "regression sample needs n >= 16, got n = " + std::to_string(y_.size()));
        for (std::size_t i = 0; i < y_.size(); ++i)
            require(std::isfinite(y_[i]), "regression sample: y[" + std::to_string(i + 1) + "] is not finite");
    }

    std::size_t size() const { return y_.size(); }
    std::span<const double> y() const { return y_; }

private:
    std::vector<double> y_;
};

/// i.i.d. draws on [-1, 1] whose density is to be estimated.
class DensitySample
{
public:
    explicit DensitySample(std::vector<double> xi) : xi_(std::move(xi))
    {
        require(xi_.size() >= min_sample_size,
                "density sample needs n >= 16, got n = " + std::to_string(xi_.size()));
        for (std::size_t i = 0; i < xi_.size(); ++i)
            require(xi_[i] >= -1.0 && xi_[i] <= 1.0,
                    "density sample: xi[" + std::to_string(i + 1) + "] outside [-1, 1]");
    }

    std::size_t size() const { return xi_.size(); }
    std::span<const double> xi() const { return xi_; }

private:
    std::vector<double> xi_;
};

/// Empirical Fourier-Legendre coefficients c^_0..c^_{j_max}.
struct CoeffTable
{
    Problem problem = Problem::regression;
    std::size_t n = 0;
    std::vector<double> coeffs;

    std::size_t j_max() const { return coeffs.size() - 1; }
};

/// tau(n, N) for N = 1..floor(n/3); tau[0] is unused and kept at zero.
struct TauScan
{
    std::size_t n = 0;
    std::vector<double> tau;
    std::size_t n_selected = 0;
    double tau_star = 0.0;

    std::size_t max_n() const { return tau.size() - 1; }
    double at(std::size_t N) const
    {
        require(N >= 1 && N <= max_n(), "tau index out of range");
        return tau[N];
    }
};

/// Truncated series sum_{j <= n_selected} c^_j L_j(x).
struct AdaptiveFit
{
    Problem problem = Problem::regression;
    std::size_t n = 0;
    std::size_t n_selected = 0;
    std::vector<double> coeffs;
    std::optional<double> sigma2_hat;
};

namespace detail
{

/** (numer * sum_i w_i P_j(t_i) / denom) * sqrt(j + 1/2) for j = 0..j_max.
 *
 *  The recurrence runs over j with the whole point set as a vector, and every
 *  coefficient is reduced with pairwise summation in ascending i.  Pass an empty
 *  weight span for unit weights.
 */
inline std::vector<double> legendre_projection(std::span<const double> t, std::span<const double> w,
                                               double numer, double denom, std::size_t j_max)
{
    const std::size_t n = t.size();
    std::vector<double> out(j_max + 1);
    std::vector<double> p_prev(n, 1.0), p_cur(t.begin(), t.end()), terms(n);

    auto reduce = [&](const std::vector<double>& p, std::size_t j) {
        if (w.empty())
            out[j] = pairwise_sum(p);
        else
        {
            for (std::size_t i = 0; i < n; ++i)
                terms[i] = w[i] * p[i];
            out[j] = pairwise_sum(terms);
        }
        out[j] = (numer * out[j] / denom) * legendre_norm<double>(j);
    };

    reduce(p_prev, 0);
    if (j_max == 0)
        return out;
    reduce(p_cur, 1);
    for (std::size_t j = 1; j < j_max; ++j)
    {
        const double a = double(2 * j + 1) / double(j + 1);
        const double b = double(j) / double(j + 1);
        for (std::size_t i = 0; i < n; ++i)
            p_prev[i] = a * t[i] * p_cur[i] - b * p_prev[i];
        std::swap(p_prev, p_cur);
        reduce(p_cur, j + 1);
    }
    return out;
}

} // namespace detail

/// c^_j = (2/n) sum_i y_i L_j(x_i) on the uniform design; a Riemann sum for the integral of f L_j.
inline CoeffTable estimate_coeffs_regression(const RegressionSample& sample, std::size_t j_max)
{
    const std::size_t n = sample.size();
    require(j_max <= scan_coefficient_count(n),
            "j_max = " + std::to_string(j_max) + " exceeds 2 floor(n/3) = " +
                std::to_string(scan_coefficient_count(n)));
    const auto x = design_grid(n);
    return {Problem::regression, n, detail::legendre_projection(x, sample.y(), 2.0, double(n), j_max)};
}

/// c^_j = (1/n) sum_i L_j(xi_i); c^_0 is exactly 1/sqrt(2).
inline CoeffTable estimate_coeffs_density(const DensitySample& sample, std::size_t j_max)
{
    const std::size_t n = sample.size();
    require(j_max <= scan_coefficient_count(n),
            "j_max = " + std::to_string(j_max) + " exceeds 2 floor(n/3) = " +
                std::to_string(scan_coefficient_count(n)));
    // sum_i P_0 = n exactly, so c_0 = (n / n) sqrt(1/2) with no rounding
    return {Problem::density, n, detail::legendre_projection(sample.xi(), {}, 1.0, double(n), j_max)};
}

/// Largest index attaining the minimum of tau[1..]; ties go to the larger N.
inline std::size_t select_truncation(std::span<const double> tau)
{
    require(tau.size() >= 2, "select_truncation: empty scan");
    std::size_t best = 1;
    for (std::size_t N = 2; N < tau.size(); ++N)
        if (tau[N] <= tau[best])
            best = N;
    return best;
}

/// tau(n, N) = sum_{k=N+1}^{2N} c^_k^2 for N = 1..floor(n/3), and the selected N(n).
inline TauScan tau_scan(const CoeffTable& coeffs)
{
    const std::size_t n_max = max_truncation(coeffs.n);
    require(n_max >= 1, "tau_scan: n too small");
    require(coeffs.coeffs.size() > 2 * n_max,
            "tau_scan: need coefficients up to index " + std::to_string(2 * n_max) + ", have " +
                std::to_string(coeffs.coeffs.size() - 1));

    TauScan scan;
    scan.n = coeffs.n;
    scan.tau.assign(n_max + 1, 0.0);
    for (std::size_t N = 1; N <= n_max; ++N)
    {
        double s = 0.0;
        for (std::size_t k = N + 1; k <= 2 * N; ++k)
            s += coeffs.coeffs[k] * coeffs.coeffs[k];
        scan.tau[N] = s;
    }
    scan.n_selected = select_truncation(scan.tau);
    scan.tau_star = scan.tau[scan.n_selected];
    return scan;
}

/// Non-adaptive projection estimator with fixed truncation N.
inline AdaptiveFit fit_projection(const CoeffTable& coeffs, std::size_t N)
{
    require(N <= coeffs.j_max(), "fit_projection: N = " + std::to_string(N) + " exceeds j_max = " +
                                     std::to_string(coeffs.j_max()));
    AdaptiveFit fit;
    fit.problem = coeffs.problem;
    fit.n = coeffs.n;
    fit.n_selected = N;
    fit.coeffs.assign(coeffs.coeffs.begin(), coeffs.coeffs.begin() + std::ptrdiff_t(N + 1));
    return fit;
}

inline double evaluate(const AdaptiveFit& fit, double x)
{
    require(x >= -1.0 && x <= 1.0, "evaluate: x outside [-1, 1]");
    const auto row = legendre_l_row(fit.n_selected, x);
    double s = 0.0;
    for (std::size_t j = 0; j <= fit.n_selected; ++j)
        s += fit.coeffs[j] * row[j];
    return s;
}

/// First-difference noise variance, sum (y_i - y_{i-1})^2 / (2 (n - 1)).
inline double estimate_sigma2(const RegressionSample& sample)
{
    const auto y = sample.y();
    require(y.size() >= 17, "estimate_sigma2 needs n >= 17");
    std::vector<double> d(y.size() - 1);
    for (std::size_t i = 1; i < y.size(); ++i)
        d[i - 1] = (y[i] - y[i - 1]) * (y[i] - y[i - 1]);
    return pairwise_sum(d) / (2.0 * double(y.size() - 1));
}

struct FitResult
{
    AdaptiveFit fit;
    TauScan scan;
    CoeffTable coeffs;
};

/// Coefficients up to 2 floor(n/3), the tau scan, and the projection at N(n).
inline FitResult fit_adaptive(const RegressionSample& sample)
{
    auto coeffs = estimate_coeffs_regression(sample, scan_coefficient_count(sample.size()));
    auto scan = tau_scan(coeffs);
    auto fit = fit_projection(coeffs, scan.n_selected);
    if (sample.size() >= 17)
        fit.sigma2_hat = estimate_sigma2(sample);
    return {std::move(fit), std::move(scan), std::move(coeffs)};
}

inline FitResult fit_adaptive(const DensitySample& sample)
{
    auto coeffs = estimate_coeffs_density(sample, scan_coefficient_count(sample.size()));
    auto scan = tau_scan(coeffs);
    auto fit = fit_projection(coeffs, scan.n_selected);
    return {std::move(fit), std::move(scan), std::move(coeffs)};
}

/** Integrated squared error against a truth given in coefficient space.
 *
 *  sum_{j <= N}(c^_j - c_j)^2 + sum_{N < j <= J} c_j^2 + tail, where tail is the
 *  residual energy of the truth beyond its last listed coefficient J.
 */
inline double ise_parseval(const AdaptiveFit& fit, std::span<const double> truth, double tail = 0.0)
{
    require(truth.size() > fit.n_selected, "ise_parseval: truth has fewer coefficients than the fit");
    double s = 0.0;
    for (std::size_t j = 0; j <= fit.n_selected; ++j)
    {
        const double d = fit.coeffs[j] - truth[j];
        s += d * d;
    }
    for (std::size_t j = fit.n_selected + 1; j < truth.size(); ++j)
        s += truth[j] * truth[j];
    return s + tail;
}

} // namespace legadapt

#endif // LEGADAPT_ESTIMATORS_HPP
