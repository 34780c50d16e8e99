#ifndef LEGADAPT_IO_NUMBER_HPP
#define LEGADAPT_IO_NUMBER_HPP

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace legadapt::io
{

/// Shortest decimal text that parses back to the same double ("nan", "inf", "-inf" otherwise).
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Locale-independent parse of the whole token; nullopt when it is not a finite number.
inline std::optional<double> parse_number(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

} // namespace legadapt::io

#endif // LEGADAPT_IO_NUMBER_HPP
