#ifndef LEGADAPT_IO_CAMPAIGN_IO_HPP
#define LEGADAPT_IO_CAMPAIGN_IO_HPP

#include "legadapt/errors.hpp"
#include "legadapt/io/number.hpp"
#include "legadapt/io/report.hpp"
#include "legadapt/synth/campaign.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace legadapt::io
{

/// Pre-run that fits C_tail from an independent set of trials.
struct CalibrationSpec
{
    std::size_t n = 2048;
    std::size_t trials = 200;
    std::uint64_t seed = 0; // 0: campaign seed + 1
};

struct CampaignFile
{
    synth::CampaignConfig campaign;
    std::optional<CalibrationSpec> calibration;
};

namespace detail
{

inline std::string join(std::initializer_list<std::string_view> keys)
{
    std::string s;
    for (auto k : keys)
        s += (s.empty() ? "" : ", ") + std::string(k);
    return s;
}

inline void check_keys(const YAML::Node& node, std::string_view where, std::initializer_list<std::string_view> allowed)
{
    if (!node.IsMap())
        throw ConfigError(std::string(where) + " must be a mapping");
    for (const auto& kv : node)
    {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (auto a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ConfigError("unknown key '" + key + "' in " + std::string(where) + " (allowed: " + join(allowed) + ")");
    }
}

template <typename T>
T scalar(const YAML::Node& node, std::string_view key)
{
    try
    {
        return node.as<T>();
    }
    catch (const YAML::Exception&)
    {
        throw ConfigError("bad value for '" + std::string(key) + "'");
    }
}

template <typename T>
void read_opt(const YAML::Node& parent, const char* key, std::optional<T>& out)
{
    if (parent[key])
        out = scalar<T>(parent[key], key);
}

template <typename T>
void read_into(const YAML::Node& parent, const char* key, T& out)
{
    if (parent[key])
        out = scalar<T>(parent[key], key);
}

inline synth::ClassSpec read_truth(const YAML::Node& t)
{
    check_keys(t, "truth", {"class", "C", "alpha", "beta", "c0", "coeffs"});
    const auto cls = t["class"] ? scalar<std::string>(t["class"], "class") : std::string("W");
    synth::ClassSpec spec;
    if (cls == "W")
        spec = synth::ClassSpec::w(1.0, 0.0, 1.0);
    else if (cls == "Z")
        spec = synth::ClassSpec::z(1.0, 0.5);
    else if (cls == "explicit")
        spec = synth::ClassSpec::from_coeffs({});
    else
        throw ConfigError("unknown truth class '" + cls + "' (allowed: W, Z, explicit)");
    read_into(t, "C", spec.C);
    read_into(t, "alpha", spec.alpha);
    read_into(t, "beta", spec.beta);
    read_into(t, "c0", spec.c0);
    if (t["coeffs"])
    {
        if (spec.kind != synth::TruthClass::explicit_)
            throw ConfigError("'coeffs' is only valid for class explicit");
        spec.coeffs = scalar<std::vector<double>>(t["coeffs"], "coeffs");
    }
    return spec;
}

inline synth::NoiseModel read_noise(const YAML::Node& nz)
{
    check_keys(nz, "noise", {"kind", "sigma"});
    const auto kind = nz["kind"] ? scalar<std::string>(nz["kind"], "kind") : std::string("gaussian");
    const double sigma = nz["sigma"] ? scalar<double>(nz["sigma"], "sigma") : 0.3;
    if (!(sigma >= 0.0))
        throw ConfigError("noise sigma must be >= 0");
    if (kind == "gaussian")
        return {synth::NoiseKind::gaussian, sigma};
    if (kind == "laplace")
        return {synth::NoiseKind::laplace, sigma};
    if (kind == "bounded")
        return {synth::NoiseKind::bounded, sigma};
    throw ConfigError("unknown noise kind '" + kind + "' (allowed: gaussian, laplace, bounded)");
}

inline synth::AcceptanceThresholds read_acceptance(const YAML::Node& a)
{
    check_keys(a, "acceptance",
               {"ratio_p95_max", "ratio_p95_nonincreasing", "ise_shrink_min", "ise_shrink_max",
                "selection_error_final_max", "selection_error_nonincreasing", "tau_error_final_max",
                "tau_error_nonincreasing", "gamma_median_min", "gamma_median_max", "coverage_final_min",
                "coverage_drop_max", "refined_coverage_min"});
    synth::AcceptanceThresholds t;
    read_opt(a, "ratio_p95_max", t.ratio_p95_max);
    read_opt(a, "ratio_p95_nonincreasing", t.ratio_p95_nonincreasing);
    read_opt(a, "ise_shrink_min", t.ise_shrink_min);
    read_opt(a, "ise_shrink_max", t.ise_shrink_max);
    read_opt(a, "selection_error_final_max", t.selection_error_final_max);
    read_opt(a, "selection_error_nonincreasing", t.selection_error_nonincreasing);
    read_opt(a, "tau_error_final_max", t.tau_error_final_max);
    read_opt(a, "tau_error_nonincreasing", t.tau_error_nonincreasing);
    read_opt(a, "gamma_median_min", t.gamma_median_min);
    read_opt(a, "gamma_median_max", t.gamma_median_max);
    read_opt(a, "coverage_final_min", t.coverage_final_min);
    read_opt(a, "coverage_drop_max", t.coverage_drop_max);
    read_opt(a, "refined_coverage_min", t.refined_coverage_min);
    return t;
}

} // namespace detail

/** Campaign description in YAML.
 *
 *    problem: regression | density
 *    truth: {class: W | Z | explicit, C, alpha, beta, c0, coeffs}
 *    J, n_grid, trials, seed, delta, C_tail, threads
 *    noise: {kind: gaussian | laplace | bounded, sigma}
 *    calibration: {n, trials, seed}
 *    acceptance: {...thresholds...}
 *
 *  Unknown keys are rejected with the list of allowed ones.
 */
inline CampaignFile parse_campaign_config(const YAML::Node& root)
{
    detail::check_keys(root, "campaign config",
                       {"problem", "truth", "J", "noise", "n_grid", "trials", "seed", "delta", "C_tail", "threads",
                        "calibration", "acceptance"});
    CampaignFile f;
    auto& c = f.campaign;
    if (root["problem"])
    {
        const auto p = detail::scalar<std::string>(root["problem"], "problem");
        if (p == "regression" || p == "R")
            c.problem = Problem::regression;
        else if (p == "density" || p == "D")
            c.problem = Problem::density;
        else
            throw ConfigError("unknown problem '" + p + "' (allowed: regression, density)");
    }
    if (root["truth"])
        c.truth = detail::read_truth(root["truth"]);
    if (root["noise"])
        c.noise = detail::read_noise(root["noise"]);
    detail::read_into(root, "J", c.J);
    detail::read_into(root, "n_grid", c.n_grid);
    detail::read_into(root, "trials", c.trials);
    detail::read_into(root, "seed", c.seed);
    detail::read_into(root, "delta", c.delta);
    detail::read_opt(root, "C_tail", c.C_tail);
    detail::read_into(root, "threads", c.threads);
    if (!(c.delta > 0.0 && c.delta < 1.0))
        throw ConfigError("delta must lie in (0, 1)");
    if (c.C_tail && !(*c.C_tail > 0.0))
        throw ConfigError("C_tail must be > 0");
    if (root["calibration"])
    {
        const auto& cal = root["calibration"];
        detail::check_keys(cal, "calibration", {"n", "trials", "seed"});
        CalibrationSpec spec;
        detail::read_into(cal, "n", spec.n);
        detail::read_into(cal, "trials", spec.trials);
        detail::read_into(cal, "seed", spec.seed);
        f.calibration = spec;
    }
    if (root["acceptance"])
        c.acceptance = detail::read_acceptance(root["acceptance"]);
    return f;
}

inline CampaignFile load_campaign_config(const std::filesystem::path& path)
{
    YAML::Node root;
    try
    {
        root = YAML::LoadFile(path.string());
    }
    catch (const YAML::BadFile&)
    {
        throw ConfigError("cannot open config file " + path.string());
    }
    catch (const YAML::Exception& e)
    {
        throw ConfigError("config " + path.string() + " is not valid YAML: " + e.what());
    }
    if (root.IsNull())
        root = YAML::Node(YAML::NodeType::Map);
    return parse_campaign_config(root);
}

/// Runs the calibration pre-campaign if configured and stores C_tail in the campaign.
inline void apply_calibration(CampaignFile& f)
{
    if (!f.calibration || f.campaign.C_tail)
        return;
    auto pre = f.campaign;
    pre.n_grid = {f.calibration->n};
    pre.trials = f.calibration->trials;
    pre.seed = f.calibration->seed != 0 ? f.calibration->seed : f.campaign.seed + 1;
    pre.acceptance = {};
    const auto r = synth::run_campaign(pre);
    f.campaign.C_tail = synth::calibrate_tail_constant(r.trials, synth::campaign_tail_exponent(pre), pre.delta);
    if (!f.campaign.C_tail)
        throw ConfigError("tail calibration failed: no non-degenerate trials at n = " + std::to_string(f.calibration->n));
}

inline json config_to_json(const synth::CampaignConfig& c)
{
    json truth;
    truth["class"] = synth::to_string(c.truth.kind);
    if (c.truth.kind == synth::TruthClass::explicit_)
        truth["coeffs"] = c.truth.coeffs;
    else
    {
        truth["C"] = c.truth.C;
        truth["alpha"] = c.truth.alpha;
        truth["beta"] = c.truth.beta;
        truth["c0"] = c.truth.c0;
    }
    json j;
    j["problem"] = c.problem == Problem::regression ? "regression" : "density";
    j["truth"] = truth;
    j["J"] = c.J;
    j["noise"] = {{"kind", synth::to_string(c.noise.kind)}, {"sigma", c.noise.sigma}};
    j["n_grid"] = c.n_grid;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["delta"] = c.delta;
    j["C_tail"] = c.C_tail ? json(*c.C_tail) : json(nullptr);
    return j;
}

namespace detail
{

inline json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace detail

inline json summary_to_json(const synth::CampaignConfig& cfg, const synth::CampaignSummary& s)
{
    json grid = json::array();
    for (const auto& g : s.grid)
    {
        json e;
        e["n"] = g.n;
        e["trials_ok"] = g.trials_ok;
        e["failures"] = g.failures;
        e["B_n"] = g.B_n;
        e["A_n"] = g.A_n;
        e["N0"] = g.N0;
        e["median_ise"] = detail::finite_or_null(g.median_ise);
        e["median_ratio"] = detail::finite_or_null(g.median_ratio);
        e["p95_ratio"] = detail::finite_or_null(g.p95_ratio);
        e["median_n_selected"] = detail::finite_or_null(g.median_n_selected);
        e["median_selection_error"] = detail::finite_or_null(g.median_selection_error);
        e["median_tau_error"] = detail::finite_or_null(g.median_tau_error);
        e["median_gamma_hat"] = detail::finite_or_null(g.median_gamma_hat);
        e["coverage"] = g.coverage;
        e["conditional_coverage"] = detail::finite_or_null(g.conditional_coverage);
        e["degenerate_fraction"] = g.degenerate_fraction;
        e["refined_coverage"] = g.refined_coverage ? json(*g.refined_coverage) : json(nullptr);
        grid.push_back(std::move(e));
    }
    json checks = json::array();
    for (const auto& c : s.checks)
        checks.push_back(
            {{"name", c.name}, {"value", detail::finite_or_null(c.value)}, {"bound", c.bound}, {"passed", c.passed}});
    json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["config"] = config_to_json(cfg);
    j["grid"] = std::move(grid);
    j["ise_shrink"] = s.ise_shrink;
    j["checks"] = std::move(checks);
    j["all_passed"] = s.all_passed();
    return j;
}

inline void write_trials_csv(std::ostream& out, const std::vector<synth::TrialReport>& trials)
{
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    out << "seed,trial,n,ise,B_n,ratio,n_selected,N0,tau_star,gamma_hat,ci_radius,covered,refined_radius,"
           "refined_covered,degeneracy,error\n";
    for (const auto& t : trials)
    {
        std::string err = t.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n' || ch == '\r')
                ch = ' ';
        out << t.seed << ',' << t.trial << ',' << t.n << ',' << format_number(t.ise) << ',' << format_number(t.B_n)
            << ',' << format_number(t.ratio) << ',' << t.n_selected << ',' << t.N0 << ','
            << format_number(t.tau_star) << ',' << format_number(t.gamma_hat) << ',' << opt(t.ci_radius) << ','
            << int(t.covered) << ',' << opt(t.refined_radius) << ',' << int(t.refined_covered) << ','
            << to_string(t.degeneracy) << ',' << err << '\n';
    }
}

} // namespace legadapt::io

#endif // LEGADAPT_IO_CAMPAIGN_IO_HPP
