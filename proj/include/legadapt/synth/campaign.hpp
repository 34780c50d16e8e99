#ifndef LEGADAPT_SYNTH_CAMPAIGN_HPP
#define LEGADAPT_SYNTH_CAMPAIGN_HPP

#include "legadapt/confidence.hpp"
#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/synth/oracle.hpp"
#include "legadapt/synth/random.hpp"
#include "legadapt/synth/simulate.hpp"
#include "legadapt/synth/truth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace legadapt::synth
{

/// Thresholds a campaign summary is checked against; unset entries are skipped.
struct AcceptanceThresholds
{
    std::optional<double> ratio_p95_max;          // ISE/B(n) 95th percentile, every n
    std::optional<bool> ratio_p95_nonincreasing;  // last n vs first n
    std::optional<double> ise_shrink_min;         // median ISE(n_i) / median ISE(n_{i+1})
    std::optional<double> ise_shrink_max;
    std::optional<double> selection_error_final_max; // median |N(n)/N0 - 1| at the largest n
    std::optional<bool> selection_error_nonincreasing;
    std::optional<double> tau_error_final_max;       // median |tau*/B(n) - 1| at the largest n
    std::optional<bool> tau_error_nonincreasing;     // last n vs first n
    std::optional<double> gamma_median_min;          // at the largest n
    std::optional<double> gamma_median_max;
    std::optional<double> coverage_final_min;        // P(ISE <= radius) at the largest n
    std::optional<double> coverage_drop_max;         // coverage(last) >= coverage(first) - drop
    std::optional<double> refined_coverage_min;      // every n, needs C_tail
};

struct CampaignConfig
{
    Problem problem = Problem::regression;
    ClassSpec truth = ClassSpec::w(1.0, 0.0, 1.0);
    std::size_t J = 0; // 0: 2 floor(n_max/3) for regression, 256 for density
    NoiseModel noise{NoiseKind::gaussian, 0.3};
    std::vector<std::size_t> n_grid{512, 2048, 8192};
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::optional<double> C_tail;
    double delta = 0.1;
    unsigned threads = 0; // 0: LEGADAPT_THREADS or hardware concurrency
    AcceptanceThresholds acceptance;
};

struct TrialReport
{
    std::uint64_t seed = 0;
    std::size_t trial = 0;
    std::size_t n = 0;
    double ise = std::numeric_limits<double>::quiet_NaN();
    double B_n = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_selected = 0;
    std::size_t N0 = 0;
    double tau_star = std::numeric_limits<double>::quiet_NaN();
    double gamma_hat = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> ci_radius;
    bool covered = false;
    std::optional<double> refined_radius;
    bool refined_covered = false;
    Degeneracy degeneracy = Degeneracy::none;
    std::string error; // non-empty when the trial failed

    bool ok() const { return error.empty(); }
};

struct GridSummary
{
    std::size_t n = 0;
    std::size_t trials_ok = 0;
    std::size_t failures = 0;
    double B_n = 0.0;
    double A_n = 0.0;
    std::size_t N0 = 0;
    double median_ise = 0.0;
    double median_ratio = 0.0;
    double p95_ratio = 0.0;
    double median_n_selected = 0.0;
    double median_selection_error = 0.0; // |N(n)/N0 - 1|
    double median_tau_error = 0.0;       // |tau*/B(n) - 1|
    double median_gamma_hat = std::numeric_limits<double>::quiet_NaN();
    double coverage = 0.0;               // degenerate intervals count as misses
    double conditional_coverage = std::numeric_limits<double>::quiet_NaN(); // over issued intervals
    double degenerate_fraction = 0.0;
    std::optional<double> refined_coverage;
};

struct CheckResult
{
    std::string name;
    double value = 0.0;
    std::string bound;
    bool passed = false;
};

struct CampaignSummary
{
    std::vector<GridSummary> grid;
    std::vector<double> ise_shrink; // median ISE(n_i) / median ISE(n_{i+1})
    std::vector<CheckResult> checks;
    std::optional<double> C_tail;

    bool all_passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

struct CampaignResult
{
    std::vector<TrialReport> trials; // ordered by (n, trial)
    CampaignSummary summary;
};

/// Empirical quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double p)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = p * double(v.size() - 1);
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v)
{
    return quantile(std::move(v), 0.5);
}

/// Worker count: explicit value, else LEGADAPT_THREADS, else hardware concurrency (0 means auto).
inline unsigned resolve_threads(unsigned requested)
{
    unsigned t = requested;
    if (t == 0)
        if (const char* env = std::getenv("LEGADAPT_THREADS"))
            t = unsigned(std::strtoul(env, nullptr, 10));
    if (t == 0)
        t = std::max(1u, std::thread::hardware_concurrency());
    return t;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    threads = unsigned(std::min<std::size_t>(threads, count));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                body(i);
        });
}

/** Fits C_tail so that u(delta) equals the empirical (1 - delta) quantile of
 *  the excess ISE/tau* - 1/(1 - gamma^) over non-degenerate trials.
 */
inline std::optional<double> calibrate_tail_constant(const std::vector<TrialReport>& trials, double r, double delta)
{
    std::vector<double> excess;
    for (const auto& t : trials)
        if (t.ok() && t.ci_radius && t.tau_star > 0.0)
            excess.push_back(std::max(0.0, (t.ise - *t.ci_radius) / t.tau_star));
    if (excess.empty())
        return std::nullopt;
    const double q = std::max(quantile(excess, 1.0 - delta), 1e-12);
    return std::log(2.0 / delta) / std::pow(q, r / 2.0);
}

inline double campaign_tail_exponent(const CampaignConfig& cfg)
{
    return cfg.problem == Problem::density ? tail_exponent(DensityProblem{}) : tail_exponent(cfg.noise.q());
}

namespace detail
{

struct GridContext
{
    std::size_t n = 0;
    std::vector<double> design_values; // regression only
    OracleRisk oracle;
};

inline SyntheticModel build_truth(const CampaignConfig& cfg)
{
    std::size_t J = cfg.J;
    if (J == 0)
    {
        if (cfg.problem == Problem::regression)
        {
            std::size_t n_max = 0;
            for (auto n : cfg.n_grid)
                n_max = std::max(n_max, n);
            J = std::max<std::size_t>(scan_coefficient_count(n_max), 1);
        }
        else
            J = 256;
    }
    return cfg.problem == Problem::density ? make_density_truth(cfg.truth, J) : make_truth(cfg.truth, J);
}

inline std::vector<double> padded_truth(const SyntheticModel& truth, std::size_t length)
{
    std::vector<double> c(truth.coeffs().begin(), truth.coeffs().end());
    if (c.size() < length)
        c.resize(length, 0.0);
    return c;
}

inline void summarize(const CampaignConfig& cfg, const std::vector<GridContext>& ctx,
                      const std::vector<TrialReport>& trials, CampaignSummary& s)
{
    for (const auto& g : ctx)
    {
        GridSummary gs;
        gs.n = g.n;
        gs.B_n = g.oracle.B_n;
        gs.A_n = g.oracle.A_n;
        gs.N0 = g.oracle.N0;
        std::vector<double> ise, ratio, nsel, sel_err, tau_err, gam;
        std::size_t covered = 0, refined = 0, degenerate = 0;
        for (const auto& t : trials)
        {
            if (t.n != g.n)
                continue;
            if (!t.ok())
            {
                ++gs.failures;
                continue;
            }
            ++gs.trials_ok;
            ise.push_back(t.ise);
            ratio.push_back(t.ratio);
            nsel.push_back(double(t.n_selected));
            sel_err.push_back(std::abs(double(t.n_selected) / double(t.N0) - 1.0));
            tau_err.push_back(std::abs(t.tau_star / t.B_n - 1.0));
            if (std::isfinite(t.gamma_hat))
                gam.push_back(t.gamma_hat);
            covered += t.covered;
            refined += t.refined_covered;
            degenerate += t.degeneracy != Degeneracy::none;
        }
        if (gs.trials_ok > 0)
        {
            const double k = double(gs.trials_ok);
            gs.median_ise = median(ise);
            gs.median_ratio = median(ratio);
            gs.p95_ratio = quantile(ratio, 0.95);
            gs.median_n_selected = median(nsel);
            gs.median_selection_error = median(sel_err);
            gs.median_tau_error = median(tau_err);
            gs.median_gamma_hat = median(gam);
            gs.coverage = double(covered) / k;
            gs.degenerate_fraction = double(degenerate) / k;
            if (degenerate < gs.trials_ok)
                gs.conditional_coverage = double(covered) / double(gs.trials_ok - degenerate);
            if (s.C_tail)
                gs.refined_coverage = double(refined) / k;
        }
        s.grid.push_back(gs);
    }
    for (std::size_t i = 0; i + 1 < s.grid.size(); ++i)
        s.ise_shrink.push_back(s.grid[i].median_ise / s.grid[i + 1].median_ise);

    // checks
    const auto& a = cfg.acceptance;
    if (s.grid.empty())
        return;
    const auto& first = s.grid.front();
    const auto& last = s.grid.back();
    auto add = [&](std::string name, double value, std::string bound, bool ok) {
        s.checks.push_back({std::move(name), value, std::move(bound), ok});
    };
    auto fmt = [](double v) {
        std::string str = std::to_string(v);
        str.erase(str.find_last_not_of('0') + 1);
        if (!str.empty() && str.back() == '.')
            str.pop_back();
        return str;
    };
    const std::string at_last = "@n=" + std::to_string(last.n);

    if (a.ratio_p95_max)
        for (const auto& g : s.grid)
            add("ratio_p95@n=" + std::to_string(g.n), g.p95_ratio, "<= " + fmt(*a.ratio_p95_max),
                g.p95_ratio <= *a.ratio_p95_max);
    if (a.ratio_p95_nonincreasing && *a.ratio_p95_nonincreasing)
        add("ratio_p95_last_minus_first", last.p95_ratio - first.p95_ratio, "<= 0", last.p95_ratio <= first.p95_ratio);
    if (a.ise_shrink_min || a.ise_shrink_max)
        for (std::size_t i = 0; i < s.ise_shrink.size(); ++i)
        {
            const double v = s.ise_shrink[i];
            const bool ok = (!a.ise_shrink_min || v >= *a.ise_shrink_min) && (!a.ise_shrink_max || v <= *a.ise_shrink_max);
            add("ise_shrink@" + std::to_string(s.grid[i].n) + "->" + std::to_string(s.grid[i + 1].n), v,
                "in [" + fmt(a.ise_shrink_min.value_or(0.0)) + ", " +
                    fmt(a.ise_shrink_max.value_or(std::numeric_limits<double>::infinity())) + "]",
                ok);
        }
    if (a.selection_error_nonincreasing && *a.selection_error_nonincreasing)
        for (std::size_t i = 0; i + 1 < s.grid.size(); ++i)
        {
            const double d = s.grid[i + 1].median_selection_error - s.grid[i].median_selection_error;
            add("selection_error_step@" + std::to_string(s.grid[i].n) + "->" + std::to_string(s.grid[i + 1].n), d,
                "<= 0", d <= 0.0);
        }
    if (a.selection_error_final_max)
        add("selection_error" + at_last, last.median_selection_error, "<= " + fmt(*a.selection_error_final_max),
            last.median_selection_error <= *a.selection_error_final_max);
    if (a.tau_error_nonincreasing && *a.tau_error_nonincreasing)
        add("tau_error_last_minus_first", last.median_tau_error - first.median_tau_error, "<= 0",
            last.median_tau_error <= first.median_tau_error);
    if (a.tau_error_final_max)
        add("tau_error" + at_last, last.median_tau_error, "<= " + fmt(*a.tau_error_final_max),
            last.median_tau_error <= *a.tau_error_final_max);
    if (a.gamma_median_min || a.gamma_median_max)
    {
        const double v = last.median_gamma_hat;
        const bool ok = std::isfinite(v) && (!a.gamma_median_min || v >= *a.gamma_median_min) &&
                        (!a.gamma_median_max || v <= *a.gamma_median_max);
        add("gamma_median" + at_last, v,
            "in [" + fmt(a.gamma_median_min.value_or(0.0)) + ", " + fmt(a.gamma_median_max.value_or(1.0)) + "]", ok);
    }
    if (a.coverage_final_min)
        add("coverage" + at_last, last.coverage, ">= " + fmt(*a.coverage_final_min),
            last.coverage >= *a.coverage_final_min);
    if (a.coverage_drop_max)
        add("coverage_last_minus_first", last.coverage - first.coverage, ">= -" + fmt(*a.coverage_drop_max),
            last.coverage >= first.coverage - *a.coverage_drop_max);
    if (a.refined_coverage_min)
        for (const auto& g : s.grid)
        {
            const double v = g.refined_coverage.value_or(std::numeric_limits<double>::quiet_NaN());
            add("refined_coverage@n=" + std::to_string(g.n), v, ">= " + fmt(*a.refined_coverage_min),
                g.refined_coverage && v >= *a.refined_coverage_min);
        }
}

} // namespace detail

/** Monte Carlo campaign: for every n in the grid and every trial index, simulate,
 *  fit adaptively, score against the truth, and build the confidence interval.
 *
 *  Trials are keyed by (seed, trial, n), so results do not depend on the thread
 *  count or scheduling.  A failing trial is recorded with its error message and
 *  excluded from the statistics.
 */
inline CampaignResult run_campaign(const CampaignConfig& cfg)
{
    if (cfg.n_grid.empty())
        throw ConfigError("campaign needs at least one sample size");
    for (auto n : cfg.n_grid)
        if (n < min_sample_size)
            throw ConfigError("campaign sample sizes must be >= 16, got " + std::to_string(n));
    if (cfg.trials == 0)
        throw ConfigError("campaign needs at least one trial");

    const SyntheticModel truth = detail::build_truth(cfg);
    std::optional<DensitySampler> sampler;
    if (cfg.problem == Problem::density)
        sampler.emplace(truth);

    const unsigned threads = resolve_threads(cfg.threads);
    const double r = campaign_tail_exponent(cfg);
    std::optional<TailModel> tail;
    if (cfg.C_tail)
        tail = TailModel{r, *cfg.C_tail, cfg.noise.Q()};

    std::vector<detail::GridContext> ctx;
    for (auto n : cfg.n_grid)
    {
        detail::GridContext g;
        g.n = n;
        if (cfg.problem == Problem::regression)
        {
            g.design_values = truth.design_values(n);
            g.oracle = oracle_risk_regression(truth, n, cfg.noise.variance(), g.design_values);
        }
        else
            g.oracle = oracle_risk_density(truth, n);
        ctx.push_back(std::move(g));
    }

    CampaignResult result;
    result.trials.resize(cfg.n_grid.size() * cfg.trials);
    for (std::size_t gi = 0; gi < ctx.size(); ++gi)
    {
        const auto& g = ctx[gi];
        const auto truth_c = detail::padded_truth(truth, scan_coefficient_count(g.n) + 1);
        parallel_for(cfg.trials, threads, [&](std::size_t t) {
            TrialReport& rep = result.trials[gi * cfg.trials + t];
            rep.seed = cfg.seed;
            rep.trial = t;
            rep.n = g.n;
            rep.B_n = g.oracle.B_n;
            rep.N0 = g.oracle.N0;
            try
            {
                const FitResult fr = cfg.problem == Problem::regression
                                         ? fit_adaptive(simulate_regression(g.design_values, cfg.noise, cfg.seed, t))
                                         : fit_adaptive(sampler->draw(g.n, cfg.seed, t));
                rep.ise = ise_parseval(fr.fit, truth_c, truth.tail());
                rep.ratio = rep.ise / rep.B_n;
                rep.n_selected = fr.fit.n_selected;
                rep.tau_star = fr.scan.tau_star;
                const auto conf = aci_radius(fr.scan);
                rep.gamma_hat = conf.gamma_hat;
                rep.degeneracy = conf.degeneracy;
                rep.ci_radius = conf.radius;
                rep.covered = conf.radius && rep.ise <= *conf.radius;
                if (tail)
                {
                    rep.refined_radius = refined_radius(conf, *tail, cfg.delta);
                    rep.refined_covered = rep.refined_radius && rep.ise <= *rep.refined_radius;
                }
            }
            catch (const std::exception& e)
            {
                rep.error = e.what();
                if (rep.error.empty())
                    rep.error = "unknown failure";
            }
        });
    }

    result.summary.C_tail = cfg.C_tail;
    detail::summarize(cfg, ctx, result.trials, result.summary);
    return result;
}

} // namespace legadapt::synth

#endif // LEGADAPT_SYNTH_CAMPAIGN_HPP
