#ifndef LEGADAPT_QUADRATURE_HPP
#define LEGADAPT_QUADRATURE_HPP

#include "legadapt/errors.hpp"
#include "legadapt/legendre.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace legadapt
{

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree <= 2 order - 1.
struct QuadratureRule
{
    std::vector<double> nodes;   // strictly increasing
    std::vector<double> weights; // positive, summing to 2
    std::size_t order = 0;

    template <typename F>
    double integrate(F&& f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < order; ++i)
            s += weights[i] * f(nodes[i]);
        return s;
    }
};

/** Gauss-Legendre nodes and weights of the given order.
 *
 *  Roots of P_order are found by Newton iteration started from the Chebyshev-type
 *  guess cos(pi (i - 1/4) / (order + 1/2)); iteration stops once the step drops
 *  below 1e-15 and gives up after 100 steps.  Weights are 2 / ((1 - x^2) P'(x)^2).
 *  Only the non-negative half is solved; the rest follows by symmetry.
 */
inline QuadratureRule gauss_legendre_rule(std::size_t order)
{
    require(order >= 1, "gauss_legendre_rule: order must be >= 1");
    constexpr int max_iterations = 100;
    constexpr double tolerance = 1e-15;

    QuadratureRule rule;
    rule.order = order;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);

    const std::size_t half = (order + 1) / 2;
    for (std::size_t i = 1; i <= half; ++i)
    {
        double x = std::cos(std::numbers::pi * (double(i) - 0.25) / (double(order) + 0.5));
        LegendreValueDeriv<double> pd{};
        bool converged = false;
        for (int it = 0; it < max_iterations; ++it)
        {
            pd = legendre_p_with_deriv(order, x);
            const double step = pd.value / pd.deriv;
            x -= step;
            if (std::abs(step) <= tolerance)
            {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericFailure("gauss_legendre_rule: Newton iteration did not converge for order " +
                                 std::to_string(order));
        if (order % 2 == 1 && i == half)
            x = 0.0;
        pd = legendre_p_with_deriv(order, x);
        const double w = 2.0 / ((1.0 - x * x) * pd.deriv * pd.deriv);
        // i-th largest root goes to the upper end
        rule.nodes[order - i] = x;
        rule.weights[order - i] = w;
        rule.nodes[i - 1] = -x;
        rule.weights[i - 1] = w;
    }
    return rule;
}

} // namespace legadapt

#endif // LEGADAPT_QUADRATURE_HPP
