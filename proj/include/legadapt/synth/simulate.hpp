#ifndef LEGADAPT_SYNTH_SIMULATE_HPP
#define LEGADAPT_SYNTH_SIMULATE_HPP

#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/synth/random.hpp"
#include "legadapt/synth/truth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace legadapt::synth
{

// Stream purposes so that noise and density draws never share a key.
inline constexpr std::uint64_t stream_regression_noise = 1;
inline constexpr std::uint64_t stream_density_draws = 2;

/// y_i = f(x_i) + xi_i given precomputed f(x_i); deterministic per (seed, trial).
inline RegressionSample simulate_regression(std::span<const double> design_values, const NoiseModel& noise,
                                            std::uint64_t seed, std::uint64_t trial = 0)
{
    const std::size_t n = design_values.size();
    require(n >= min_sample_size, "simulate_regression: n must be >= 16");
    auto rng = CounterRng::stream(seed, trial, stream_regression_noise, n);
    std::vector<double> y(design_values.begin(), design_values.end());
    for (double& v : y)
        v += noise.draw(rng);
    return RegressionSample(std::move(y));
}

inline RegressionSample simulate_regression(const SyntheticModel& truth, const NoiseModel& noise, std::size_t n,
                                            std::uint64_t seed, std::uint64_t trial = 0)
{
    require(n >= min_sample_size, "simulate_regression: n must be >= 16");
    return simulate_regression(truth.design_values(n), noise, seed, trial);
}

/** Rejection sampler for a density given by its Legendre coefficients.
 *
 *  Construction checks f >= 0 on a 10^4-point grid and takes the uniform
 *  envelope max_grid f (1 + 1e-3).  An expected acceptance rate below 1% is
 *  rejected as unusable.
 */
class DensitySampler
{
public:
    explicit DensitySampler(const SyntheticModel& truth) : truth_(truth)
    {
        if (std::abs(truth.coeffs()[0] - std::numbers::sqrt2 / 2.0) > 1e-12)
            throw DataError("density truth must have c_0 = 1/sqrt(2)");
        constexpr std::size_t grid = 10000;
        double fmax = 0.0;
        for (std::size_t i = 0; i < grid; ++i)
        {
            const double x = -1.0 + 2.0 * double(i) / double(grid - 1);
            const double f = truth(x);
            if (f < 0.0)
                throw DataError("density truth is negative at x = " + std::to_string(x));
            fmax = std::max(fmax, f);
        }
        envelope_ = fmax * (1.0 + 1e-3);
        // acceptance = integral f / (2 envelope) = 1 / (2 envelope)
        if (1.0 / (2.0 * envelope_) < 0.01)
            throw DataError("density envelope too loose: acceptance rate below 1%");
    }

    double envelope() const { return envelope_; }

    DensitySample draw(std::size_t n, std::uint64_t seed, std::uint64_t trial = 0) const
    {
        require(n >= min_sample_size, "simulate_density: n must be >= 16");
        auto rng = CounterRng::stream(seed, trial, stream_density_draws, n);
        std::vector<double> xi;
        xi.reserve(n);
        std::vector<double> row(truth_.J() + 1);
        const auto c = truth_.coeffs();
        while (xi.size() < n)
        {
            const double x = 2.0 * rng.uniform() - 1.0;
            const double u = rng.uniform() * envelope_;
            legendre_p_row<double>(truth_.J(), x, row);
            double f = 0.0;
            for (std::size_t j = 0; j <= truth_.J(); ++j)
                f += c[j] * row[j] * legendre_norm<double>(j);
            if (u < f)
                xi.push_back(x);
        }
        return DensitySample(std::move(xi));
    }

private:
    SyntheticModel truth_;
    double envelope_ = 0.0;
};

inline DensitySample simulate_density(const SyntheticModel& truth, std::size_t n, std::uint64_t seed,
                                      std::uint64_t trial = 0)
{
    return DensitySampler(truth).draw(n, seed, trial);
}

} // namespace legadapt::synth

#endif // LEGADAPT_SYNTH_SIMULATE_HPP
