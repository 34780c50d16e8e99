#ifndef LEGADAPT_IO_REPORT_HPP
#define LEGADAPT_IO_REPORT_HPP

#include "legadapt/confidence.hpp"
#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/io/number.hpp"
#include "legadapt/quadrature.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace legadapt::io
{

using json = nlohmann::ordered_json;

inline constexpr std::string_view tool_name = "legadapt";
inline constexpr std::string_view tool_version = "0.1.0";

struct FitReport
{
    std::string version{tool_version};
    Problem problem = Problem::regression;
    std::size_t n = 0;
    std::size_t n_selected = 0;
    double tau_star = 0.0;
    std::size_t M = 0;
    bool block_clamped = false;
    std::optional<double> gamma_hat;
    std::optional<double> ci_radius;
    std::string degeneracy{"none"};
    std::optional<double> sigma2_hat; // regression only
    std::optional<double> integral;   // density only
    std::vector<double> coefficients;
    std::vector<double> grid_x;
    std::vector<double> grid_f;
    json config = json::object();

    bool operator==(const FitReport&) const = default;
};

/// K equispaced points -1 = x_0 < ... < x_{K-1} = 1.
inline std::vector<double> evaluation_grid(std::size_t K)
{
    require(K >= 2, "evaluation grid needs at least 2 points");
    std::vector<double> x(K);
    for (std::size_t k = 0; k < K; ++k)
        x[k] = -1.0 + 2.0 * double(k) / double(K - 1);
    x.back() = 1.0;
    return x;
}

/// Integral of the fitted series by a Gauss rule exact for its degree.
inline double integrate_fit(const AdaptiveFit& fit)
{
    const auto rule = gauss_legendre_rule(fit.n_selected / 2 + 1);
    return rule.integrate([&](double x) { return evaluate(fit, x); });
}

inline FitReport make_fit_report(const FitResult& fr, const ConfidenceReport& conf, std::size_t grid_points,
                                 json config = json::object())
{
    FitReport r;
    r.problem = fr.fit.problem;
    r.n = fr.fit.n;
    r.n_selected = fr.fit.n_selected;
    r.tau_star = fr.scan.tau_star;
    r.M = conf.M;
    r.block_clamped = conf.block_clamped;
    if (std::isfinite(conf.gamma_hat))
        r.gamma_hat = conf.gamma_hat;
    r.ci_radius = conf.radius;
    r.degeneracy = std::string(to_string(conf.degeneracy));
    r.sigma2_hat = fr.fit.sigma2_hat;
    if (fr.fit.problem == Problem::density)
        r.integral = integrate_fit(fr.fit);
    r.coefficients = fr.fit.coeffs;
    r.grid_x = evaluation_grid(grid_points);
    r.grid_f.reserve(grid_points);
    for (double x : r.grid_x)
        r.grid_f.push_back(evaluate(fr.fit, x));
    r.config = std::move(config);
    return r;
}

namespace detail
{

template <typename T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<T>();
}

inline Problem problem_from(std::string_view s)
{
    if (s == "R")
        return Problem::regression;
    if (s == "D")
        return Problem::density;
    throw DataError("unknown problem tag '" + std::string(s) + "' (expected R or D)");
}

} // namespace detail

inline json to_json(const FitReport& r)
{
    json j;
    j["tool"] = tool_name;
    j["version"] = r.version;
    j["problem"] = to_string(r.problem);
    j["n"] = r.n;
    j["n_selected"] = r.n_selected;
    j["tau_star"] = r.tau_star;
    j["confidence"] = {{"M", r.M},
                       {"block_clamped", r.block_clamped},
                       {"gamma_hat", detail::optional_json(r.gamma_hat)},
                       {"radius", detail::optional_json(r.ci_radius)},
                       {"degeneracy", r.degeneracy}};
    if (r.problem == Problem::regression)
        j["sigma2_hat"] = detail::optional_json(r.sigma2_hat);
    else
        j["integral"] = detail::optional_json(r.integral);
    j["coefficients"] = r.coefficients;
    j["grid"] = {{"x", r.grid_x}, {"f", r.grid_f}};
    j["config"] = r.config;
    return j;
}

inline FitReport fit_report_from_json(const json& j)
{
    try
    {
        FitReport r;
        r.version = j.at("version").get<std::string>();
        r.problem = detail::problem_from(j.at("problem").get<std::string>());
        r.n = j.at("n").get<std::size_t>();
        r.n_selected = j.at("n_selected").get<std::size_t>();
        r.tau_star = j.at("tau_star").get<double>();
        const auto& c = j.at("confidence");
        r.M = c.at("M").get<std::size_t>();
        r.block_clamped = c.at("block_clamped").get<bool>();
        r.gamma_hat = detail::optional_from<double>(c, "gamma_hat");
        r.ci_radius = detail::optional_from<double>(c, "radius");
        r.degeneracy = c.at("degeneracy").get<std::string>();
        r.sigma2_hat = detail::optional_from<double>(j, "sigma2_hat");
        r.integral = detail::optional_from<double>(j, "integral");
        r.coefficients = j.at("coefficients").get<std::vector<double>>();
        r.grid_x = j.at("grid").at("x").get<std::vector<double>>();
        r.grid_f = j.at("grid").at("f").get<std::vector<double>>();
        r.config = j.at("config");
        return r;
    }
    catch (const json::exception& e)
    {
        throw DataError(std::string("malformed fit report: ") + e.what());
    }
}

/// Two-space indented JSON with a trailing newline.
inline std::string serialize(const json& j)
{
    return j.dump(2) + "\n";
}

inline std::string serialize(const FitReport& r)
{
    return serialize(to_json(r));
}

inline FitReport parse_fit_report(std::string_view text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw DataError(std::string("fit report is not valid JSON: ") + e.what());
    }
    return fit_report_from_json(j);
}

inline void write_fit_csv(std::ostream& out, const FitReport& r)
{
    out << "x,f_hat\n";
    for (std::size_t k = 0; k < r.grid_x.size(); ++k)
        out << format_number(r.grid_x[k]) << ',' << format_number(r.grid_f[k]) << '\n';
}

inline void write_scan_csv(std::ostream& out, const TauScan& scan)
{
    out << "N,tau\n";
    for (std::size_t N = 1; N <= scan.max_n(); ++N)
        out << N << ',' << format_number(scan.tau[N]) << '\n';
}

/// Scan summary: the tau table plus the selected truncation and the confidence blocks.
inline json scan_to_json(const TauScan& scan, const ConfidenceReport& conf, json config = json::object())
{
    json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["n"] = scan.n;
    j["n_selected"] = scan.n_selected;
    j["tau_star"] = scan.tau_star;
    j["confidence"] = {{"M", conf.M},
                       {"block_clamped", conf.block_clamped},
                       {"tau_m", conf.tau_m},
                       {"tau_2m", conf.tau_2m},
                       {"tau_4m", conf.tau_4m},
                       {"gamma_hat", std::isfinite(conf.gamma_hat) ? json(conf.gamma_hat) : json(nullptr)},
                       {"radius", detail::optional_json(conf.radius)},
                       {"degeneracy", to_string(conf.degeneracy)}};
    j["tau"] = std::vector<double>(scan.tau.begin() + 1, scan.tau.end());
    j["config"] = std::move(config);
    return j;
}

} // namespace legadapt::io

#endif // LEGADAPT_IO_REPORT_HPP
