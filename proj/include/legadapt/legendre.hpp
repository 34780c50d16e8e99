#ifndef LEGADAPT_LEGENDRE_HPP
#define LEGADAPT_LEGENDRE_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace legadapt
{

/** Legendre polynomial of the first kind, P_k(x).
 *
 *  Evaluated with the forward three-term recurrence
 *
 *    (k+1) P_{k+1}(x) = (2k+1) x P_k(x) - k P_{k-1}(x),  P_0 = 1, P_1 = x,
 *
 *  which is stable on [-1, 1] and costs O(k) per point.
 */
template <std::floating_point T>
T legendre_p(std::size_t k, T x)
{
    if (k == 0)
        return T(1);

    T pm1 = T(1);
    T p = x;
    for (std::size_t m = 1; m < k; ++m)
    {
        const T next = (T(2 * m + 1) * x * p - T(m) * pm1) / T(m + 1);
        pm1 = p;
        p = next;
    }
    return p;
}

/// Fills out[0..k_max] with P_0(x)..P_{k_max}(x) in a single recurrence pass.
template <std::floating_point T>
void legendre_p_row(std::size_t k_max, T x, std::span<T> out)
{
    out[0] = T(1);
    if (k_max == 0)
        return;
    out[1] = x;
    for (std::size_t m = 1; m < k_max; ++m)
        out[m + 1] = (T(2 * m + 1) * x * out[m] - T(m) * out[m - 1]) / T(m + 1);
}

/// Normalization factor sqrt(k + 1/2) turning P_k into the orthonormal L_k.
template <std::floating_point T>
inline T legendre_norm(std::size_t k)
{
    return std::sqrt(T(k) + T(0.5));
}

/// Normalized Legendre polynomial L_k(x) = P_k(x) sqrt(k + 1/2).
template <std::floating_point T>
T legendre_l(std::size_t k, T x)
{
    return legendre_p(k, x) * legendre_norm<T>(k);
}

/// (L_0(x), ..., L_{k_max}(x)) computed in one pass.
template <std::floating_point T>
std::vector<T> legendre_l_row(std::size_t k_max, T x)
{
    std::vector<T> row(k_max + 1);
    legendre_p_row<T>(k_max, x, row);
    for (std::size_t k = 0; k <= k_max; ++k)
        row[k] *= legendre_norm<T>(k);
    return row;
}

/// Value and first derivative of P_k at one point.
template <std::floating_point T>
struct LegendreValueDeriv
{
    T value;
    T deriv;
};

/** P_k(x) together with P'_k(x).
 *
 *  The derivative follows the companion recurrence P'_{m+1} = x P'_m + (m+1) P_m,
 *  which satisfies (1 - x^2) P'_k = k [P_{k-1} - x P_k] and reproduces the
 *  endpoint limit P'_k(+-1) = (+-1)^{k-1} k(k+1)/2 without dividing by 1 - x^2.
 */
template <std::floating_point T>
LegendreValueDeriv<T> legendre_p_with_deriv(std::size_t k, T x)
{
    if (k == 0)
        return {T(1), T(0)};

    T pm1 = T(1);
    T p = x;
    T dp = T(1);
    for (std::size_t m = 1; m < k; ++m)
    {
        const T next = (T(2 * m + 1) * x * p - T(m) * pm1) / T(m + 1);
        dp = x * dp + T(m + 1) * p;
        pm1 = p;
        p = next;
    }
    return {p, dp};
}

template <std::floating_point T>
T legendre_p_deriv(std::size_t k, T x)
{
    if (x == T(1) || x == T(-1))
    {
        if (k == 0)
            return T(0);
        const T mag = T(k) * T(k + 1) / T(2);
        return (x < T(0) && (k - 1) % 2 == 1) ? -mag : mag;
    }
    return legendre_p_with_deriv(k, x).deriv;
}

namespace detail
{

template <std::floating_point T>
struct LegendrePair
{
    T pk, pk1;   // P_k, P_{k+1}
    T dk, dk1;   // P'_k, P'_{k+1}
};

template <std::floating_point T>
LegendrePair<T> legendre_pair(std::size_t k, T x)
{
    const auto a = legendre_p_with_deriv(k, x);
    const auto b = legendre_p_with_deriv(k + 1, x);
    return {a.value, b.value, a.deriv, b.deriv};
}

} // namespace detail

/// Relative separation below which cd_kernel switches to the diagonal form.
inline constexpr double cd_diagonal_threshold = 1e-7;

/** Christoffel-Darboux kernel G_k(x, y) = sum_{m=0}^{k} L_m(x) L_m(y).
 *
 *  Off the diagonal the two-term ratio form
 *
 *    G_k(x, y) = (k+1)/2 [P_{k+1}(x) P_k(y) - P_k(x) P_{k+1}(y)] / (x - y)
 *
 *  is used.  When |x - y| <= 1e-7 (1 + |x| + |y|) the ratio cancels badly, so the
 *  kernel is taken as the diagonal value at the midpoint,
 *
 *    G_k(m, m) = (k+1)/2 [P_k(m) P'_{k+1}(m) - P_{k+1}(m) P'_k(m)],
 *
 *  which is symmetric in (x, y) and therefore first-order exact around m.
 */
template <std::floating_point T>
T cd_kernel(std::size_t k, T x, T y)
{
    // Just above the switch the numerator cancels to ~|x - y|; extended precision
    // keeps the ratio accurate to ~1e-12 there for double arguments.
    using W = std::conditional_t<(sizeof(long double) > sizeof(T)), long double, T>;
    const W half_k1 = W(k + 1) / W(2);
    const W gap = W(x) - W(y);
    if (std::abs(gap) <= W(cd_diagonal_threshold) * (W(1) + std::abs(W(x)) + std::abs(W(y))))
    {
        const W mid = (W(x) + W(y)) / W(2);
        const auto p = detail::legendre_pair(k, mid);
        return T(half_k1 * (p.pk * p.dk1 - p.pk1 * p.dk));
    }

    // Single pass over both abscissae.
    W px_prev = W(1), px = x;
    W py_prev = W(1), py = y;
    if (k == 0)
        return T(half_k1 * (px * py_prev - px_prev * py) / gap);
    for (std::size_t m = 1; m <= k; ++m)
    {
        const W cx = (W(2 * m + 1) * W(x) * px - W(m) * px_prev) / W(m + 1);
        const W cy = (W(2 * m + 1) * W(y) * py - W(m) * py_prev) / W(m + 1);
        px_prev = px;
        px = cx;
        py_prev = py;
        py = cy;
    }
    // px = P_{k+1}(x), px_prev = P_k(x)
    return T(half_k1 * (px * py_prev - px_prev * py) / gap);
}

} // namespace legadapt

#endif // LEGADAPT_LEGENDRE_HPP
