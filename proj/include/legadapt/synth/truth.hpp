#ifndef LEGADAPT_SYNTH_TRUTH_HPP
#define LEGADAPT_SYNTH_TRUTH_HPP

#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/legendre.hpp"
#include "legadapt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace legadapt::synth
{

enum class TruthClass
{
    W,        // rho(N) ~ C N^{-2 beta} (log N)^alpha
    Z,        // rho(N) ~ alpha beta^N
    explicit_ // finitely many user-given coefficients
};

inline std::string_view to_string(TruthClass c)
{
    switch (c)
    {
    case TruthClass::W: return "W";
    case TruthClass::Z: return "Z";
    case TruthClass::explicit_: return "explicit";
    }
    return "unknown";
}

struct ClassSpec
{
    TruthClass kind = TruthClass::W;
    double C = 1.0;     // W only
    double alpha = 0.0; // log exponent for W, amplitude for Z
    double beta = 1.0;  // decay exponent for W, ratio for Z
    double c0 = 0.0;    // regression mean coefficient; density truths force 1/sqrt(2)
    std::vector<double> coeffs; // explicit only, c_0..c_J

    static ClassSpec w(double C, double alpha, double beta) { return {TruthClass::W, C, alpha, beta, 0.0, {}}; }
    static ClassSpec z(double alpha, double beta) { return {TruthClass::Z, 1.0, alpha, beta, 0.0, {}}; }
    static ClassSpec from_coeffs(std::vector<double> c)
    {
        return {TruthClass::explicit_, 1.0, 0.0, 0.0, 0.0, std::move(c)};
    }
};

/** Ground truth f = sum_j c_j L_j specified in coefficient space.
 *
 *  For generated classes c_k^2 = rho(k-1) - rho(k), so the energy beyond any
 *  index N is rho(N) exactly and the integrated squared error of a fit can be
 *  computed in closed form.
 */
class SyntheticModel
{
public:
    SyntheticModel() = default;

    TruthClass kind() const { return spec_.kind; }
    const ClassSpec& spec() const { return spec_; }
    std::span<const double> coeffs() const { return coeffs_; }
    std::size_t J() const { return coeffs_.size() - 1; }
    double scale() const { return scale_; }

    /// lim rho(2N)/rho(N): 2^{-2 beta} for W, 0 for Z and explicit truths.
    double gamma_true() const { return spec_.kind == TruthClass::W ? std::pow(2.0, -2.0 * spec_.beta) : 0.0; }

    /// Residual energy sum_{j > N} c_j^2 of the class (not truncated at J).
    double rho(std::size_t N) const
    {
        switch (spec_.kind)
        {
        case TruthClass::W:
        {
            const double r1 = w_profile(1);
            if (N == 0)
                return scale_ * r1 * std::pow(2.0, 2.0 * spec_.beta);
            return scale_ * w_profile(double(N));
        }
        case TruthClass::Z: return scale_ * spec_.alpha * std::pow(spec_.beta, double(N));
        case TruthClass::explicit_:
        {
            double s = 0.0;
            for (std::size_t j = N + 1; j < coeffs_.size(); ++j)
                s += coeffs_[j] * coeffs_[j];
            return s;
        }
        }
        return 0.0;
    }

    /// Energy beyond the listed coefficients, rho(J).
    double tail() const { return spec_.kind == TruthClass::explicit_ ? 0.0 : rho(J()); }

    double operator()(double x) const
    {
        const auto row = legendre_l_row(J(), x);
        double s = 0.0;
        for (std::size_t j = 0; j <= J(); ++j)
            s += coeffs_[j] * row[j];
        return s;
    }

    /// f(x_i) on the design grid x_i = -1 + 2i/n.
    std::vector<double> design_values(std::size_t n) const
    {
        std::vector<double> out(n);
        std::vector<double> row(J() + 1);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double x = design_point(i + 1, n);
            legendre_p_row<double>(J(), x, row);
            double s = 0.0;
            for (std::size_t j = 0; j <= J(); ++j)
                s += coeffs_[j] * row[j] * legendre_norm<double>(j);
            out[i] = s;
        }
        return out;
    }

    /// Multiplies every non-constant coefficient by lambda (and rho by lambda^2).
    void shrink(double lambda)
    {
        for (std::size_t j = 1; j < coeffs_.size(); ++j)
            coeffs_[j] *= lambda;
        scale_ *= lambda * lambda;
    }

    friend SyntheticModel make_truth(const ClassSpec&, std::size_t, Problem);

private:
    double w_profile(double N) const
    {
        return spec_.C * std::pow(N, -2.0 * spec_.beta) * std::pow(1.0 + std::log(N), spec_.alpha);
    }

    ClassSpec spec_;
    std::vector<double> coeffs_;
    double scale_ = 1.0;
};

/** Coefficients c_0..c_J for a W, Z or explicit class.
 *
 *  |c_k| = sqrt(rho(k-1) - rho(k)) with signs in the period-4 pattern + - - +
 *  (k = 1, 2, 3, 4, ...).  Plain alternation would make f(-1) = sum c_k L_k(-1)
 *  diverge for slowly decaying classes; this pattern keeps both endpoint sums
 *  convergent, and puts the larger one at x = -1, away from the last design
 *  point.  For W the profile is
 *  C N^{-2 beta} (1 + ln N)^alpha for N >= 1, which is asymptotic to the class
 *  definition, and rho(0) = 2^{2 beta} rho(1).  Regression truths require
 *  beta > 1/2 for W.
 */
inline SyntheticModel make_truth(const ClassSpec& spec, std::size_t J, Problem problem = Problem::regression)
{
    SyntheticModel m;
    m.spec_ = spec;
    switch (spec.kind)
    {
    case TruthClass::W:
        if (!(spec.C > 0.0 && spec.beta > 0.0))
            throw ConfigError("class W needs C > 0 and beta > 0");
        if (problem == Problem::regression && !(spec.beta > 0.5))
            throw ConfigError("class W for regression needs beta > 1/2 (adaptive rates are not available "
                              "below it); got beta = " +
                              std::to_string(spec.beta));
        break;
    case TruthClass::Z:
        if (!(spec.alpha > 0.0 && spec.beta > 0.0 && spec.beta < 1.0))
            throw ConfigError("class Z needs alpha > 0 and beta in (0, 1)");
        break;
    case TruthClass::explicit_:
        if (spec.coeffs.empty())
            throw ConfigError("explicit truth needs at least one coefficient");
        m.coeffs_ = spec.coeffs;
        if (problem == Problem::density)
            m.coeffs_[0] = std::numbers::sqrt2 / 2.0;
        return m;
    }

    require(J >= 1, "make_truth: J must be >= 1");
    m.coeffs_.assign(J + 1, 0.0);
    m.coeffs_[0] = problem == Problem::density ? std::numbers::sqrt2 / 2.0 : spec.c0;
    for (std::size_t k = 1; k <= J; ++k)
    {
        const double mag = std::sqrt(std::max(0.0, m.rho(k - 1) - m.rho(k)));
        m.coeffs_[k] = (k % 4 == 1 || k % 4 == 0) ? mag : -mag;
    }
    return m;
}

/// Shrinks the non-constant part until min over a 10^4-point grid of f is at least floor.
inline SyntheticModel make_density_truth(const ClassSpec& spec, std::size_t J, double floor = 0.01)
{
    auto m = make_truth(spec, J, Problem::density);
    constexpr std::size_t grid = 10000;
    double min_dev = 0.0; // min of f - 1/2
    for (std::size_t i = 0; i < grid; ++i)
    {
        const double x = -1.0 + 2.0 * double(i) / double(grid - 1);
        min_dev = std::min(min_dev, m(x) - 0.5);
    }
    if (min_dev < 0.0)
    {
        const double lambda = std::min(1.0, (0.5 - floor) / -min_dev);
        if (lambda < 1.0)
            m.shrink(lambda);
    }
    return m;
}

/// c_j = integral of f L_j over [-1, 1] by Gauss-Legendre quadrature of order >= J + 50.
template <typename F>
std::vector<double> quadrature_coeffs(F&& f, std::size_t J, std::size_t order = 0)
{
    order = std::max(order, J + 50);
    const auto rule = gauss_legendre_rule(order);
    std::vector<double> c(J + 1, 0.0);
    std::vector<double> row(J + 1);
    for (std::size_t i = 0; i < rule.order; ++i)
    {
        const double wf = rule.weights[i] * f(rule.nodes[i]);
        legendre_p_row<double>(J, rule.nodes[i], row);
        for (std::size_t j = 0; j <= J; ++j)
            c[j] += wf * row[j];
    }
    for (std::size_t j = 0; j <= J; ++j)
        c[j] *= legendre_norm<double>(j);
    return c;
}

} // namespace legadapt::synth

#endif // LEGADAPT_SYNTH_TRUTH_HPP
