#ifndef LEGADAPT_SYNTH_RANDOM_HPP
#define LEGADAPT_SYNTH_RANDOM_HPP

#include "legadapt/errors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace legadapt::synth
{

inline constexpr std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/** Counter-based generator: output k is a bijective mix of (key, k).
 *
 *  Streams are keyed by (seed, trial, purpose, ...), so each trial draws the same
 *  numbers regardless of which thread runs it or in what order.  Satisfies
 *  UniformRandomBitGenerator.
 */
class CounterRng
{
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}

    static CounterRng stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose = 0,
                             std::uint64_t extra = 0)
    {
        std::uint64_t k = splitmix64(seed);
        k = splitmix64(k ^ trial);
        k = splitmix64(k ^ (purpose * 0xd1342543de82ef95ULL));
        k = splitmix64(k ^ (extra * 0xa0761d6478bd642fULL));
        return CounterRng(k);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() { return (double((*this)() >> 12) + 0.5) * 0x1.0p-52; }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return rad * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class NoiseKind
{
    gaussian, // q = 2
    laplace,  // q = 1
    bounded,  // uniform on [-a, a]
};

inline std::string_view to_string(NoiseKind k)
{
    switch (k)
    {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::laplace: return "laplace";
    case NoiseKind::bounded: return "bounded";
    }
    return "unknown";
}

/** Zero-mean noise with variance sigma^2 and declared tail P(|xi| > x) <= exp(-(x/Q)^q).
 *
 *  gaussian: Q = sigma sqrt(2), q = 2 (erfc(t) <= exp(-t^2)).
 *  laplace:  scale b = sigma / sqrt(2), tail exp(-x/b) exactly, so Q = b, q = 1.
 *  bounded:  uniform on [-sigma sqrt(3), sigma sqrt(3)], Q = sigma sqrt(3), q = 2.
 */
struct NoiseModel
{
    NoiseKind kind = NoiseKind::gaussian;
    double sigma = 0.0;

    NoiseModel() = default;
    NoiseModel(NoiseKind k, double s) : kind(k), sigma(s)
    {
        require(s >= 0.0 && std::isfinite(s), "noise sigma must be finite and >= 0");
    }

    double q() const { return kind == NoiseKind::laplace ? 1.0 : 2.0; }

    double Q() const
    {
        switch (kind)
        {
        case NoiseKind::gaussian: return sigma * std::numbers::sqrt2;
        case NoiseKind::laplace: return sigma / std::numbers::sqrt2;
        case NoiseKind::bounded: return sigma * std::numbers::sqrt3;
        }
        return sigma;
    }

    double variance() const { return sigma * sigma; }

    double draw(CounterRng& rng) const
    {
        if (sigma == 0.0)
            return 0.0;
        switch (kind)
        {
        case NoiseKind::gaussian: return sigma * rng.normal();
        case NoiseKind::laplace:
        {
            const double b = sigma / std::numbers::sqrt2;
            const double u = rng.uniform_open() - 0.5;
            return u < 0.0 ? b * std::log1p(2.0 * u) : -b * std::log1p(-2.0 * u);
        }
        case NoiseKind::bounded: return sigma * std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
        }
        return 0.0;
    }
};

} // namespace legadapt::synth

#endif // LEGADAPT_SYNTH_RANDOM_HPP
