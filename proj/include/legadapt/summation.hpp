#ifndef LEGADAPT_SUMMATION_HPP
#define LEGADAPT_SUMMATION_HPP

#include <cstddef>
#include <span>

namespace legadapt
{

/// Pairwise (cascade) summation; rounding error grows as O(log n) ulp.
inline double pairwise_sum(std::span<const double> v)
{
    constexpr std::size_t block = 128;
    if (v.size() <= block)
    {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

} // namespace legadapt

#endif // LEGADAPT_SUMMATION_HPP
