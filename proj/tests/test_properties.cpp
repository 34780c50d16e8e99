// Monte Carlo properties of the adaptive estimator on synthetic truths.
#include "legadapt/synth/campaign.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

using namespace legadapt;
using namespace legadapt::synth;

namespace
{

CampaignConfig w_beta1(Problem problem, std::uint64_t seed)
{
    CampaignConfig cfg;
    cfg.problem = problem;
    cfg.truth = ClassSpec::w(1.0, 0.0, 1.0);
    cfg.noise = NoiseModel{NoiseKind::gaussian, 0.3};
    cfg.n_grid = {512, 2048, 8192};
    cfg.trials = 200;
    cfg.seed = seed;
    return cfg;
}

const GridSummary& at(const CampaignResult& r, std::size_t n)
{
    for (const auto& g : r.summary.grid)
        if (g.n == n)
            return g;
    throw std::out_of_range("n not in grid");
}

class RegressionCampaign : public ::testing::Test
{
protected:
    static void SetUpTestSuite() { result = std::make_unique<CampaignResult>(run_campaign(w_beta1(Problem::regression, 101))); }
    static void TearDownTestSuite() { result.reset(); }
    static inline std::unique_ptr<CampaignResult> result;
};

class DensityCampaign : public ::testing::Test
{
protected:
    static void SetUpTestSuite() { result = std::make_unique<CampaignResult>(run_campaign(w_beta1(Problem::density, 202))); }
    static void TearDownTestSuite() { result.reset(); }
    static inline std::unique_ptr<CampaignResult> result;
};

} // namespace

TEST_F(RegressionCampaign, NoTrialFails)
{
    for (const auto& g : result->summary.grid)
        EXPECT_EQ(g.failures, 0u) << g.n;
}

TEST_F(RegressionCampaign, RatioBounded)
{
    EXPECT_LE(at(*result, 2048).p95_ratio, 20.0);
    EXPECT_LE(at(*result, 8192).p95_ratio, at(*result, 512).p95_ratio);
}

TEST_F(RegressionCampaign, SelectedTruncationTracksOracle)
{
    std::vector<double> ratio;
    for (const auto& t : result->trials)
        if (t.n == 2048)
            ratio.push_back(double(t.n_selected) / double(t.N0));
    const double m = median(ratio);
    EXPECT_GE(m, 0.5);
    EXPECT_LE(m, 2.0);

    for (std::size_t i = 0; i + 1 < result->summary.grid.size(); ++i)
        EXPECT_LE(result->summary.grid[i + 1].median_selection_error, result->summary.grid[i].median_selection_error);
}

TEST_F(RegressionCampaign, TauStarTracksOracleRisk)
{
    EXPECT_LE(at(*result, 8192).median_tau_error, at(*result, 512).median_tau_error);
}

TEST_F(DensityCampaign, RatioBounded)
{
    for (const auto& g : result->summary.grid)
        EXPECT_EQ(g.failures, 0u) << g.n;
    EXPECT_LE(at(*result, 2048).p95_ratio, 20.0);
    EXPECT_LE(at(*result, 8192).p95_ratio, at(*result, 512).p95_ratio);
}

TEST(TauScanBand, StaysNearOracleRiskWhileGridResolvesBasis)
{
    // |tau(n, N) - B(n, N)| <= 3 sqrt(B(n, N)/n) log log n in >= 95% of trials.
    // Checked for N <= sqrt(n): beyond degree ~ pi sqrt(n) the uniform grid stops
    // resolving L_k near the endpoints, the c^_k noise becomes strongly correlated
    // and tau fluctuates by more than the band (asserted below).
    const std::size_t n = 2048, trials = 200;
    const auto truth = make_truth(ClassSpec::w(1.0, 0.0, 1.0), scan_coefficient_count(8192));
    const NoiseModel noise{NoiseKind::gaussian, 0.3};
    const auto fx = truth.design_values(n);
    const auto o = oracle_risk_regression(truth, n, noise.variance(), fx);
    const double loglog = std::log(std::log(double(n)));
    const auto band = [&](std::size_t N) { return 3.0 * std::sqrt(o.B[N] / double(n)) * loglog; };
    const auto n_resolved = std::size_t(std::sqrt(double(n)));
    std::size_t inside = 0, top_outside = 0;
    for (std::size_t t = 0; t < trials; ++t)
    {
        const auto scan =
            tau_scan(estimate_coeffs_regression(simulate_regression(fx, noise, 303, t), scan_coefficient_count(n)));
        bool ok = true;
        for (std::size_t N = 1; N <= n_resolved; ++N)
            ok = ok && std::abs(scan.tau[N] - o.B[N]) <= band(N);
        inside += ok;
        const std::size_t top = scan.max_n();
        top_outside += std::abs(scan.tau[top] - o.B[top]) > band(top);
    }
    EXPECT_GE(double(inside) / double(trials), 0.95);
    EXPECT_GT(double(top_outside) / double(trials), 0.05);
}

TEST(TailCalibration, HeldOutCoverage)
{
    // fit C_tail on one set of trials, then check the refined interval on fresh seeds
    auto cfg = w_beta1(Problem::regression, 404);
    cfg.n_grid = {2048};
    const auto calib = run_campaign(cfg);
    const double r = campaign_tail_exponent(cfg);
    const auto C = calibrate_tail_constant(calib.trials, r, cfg.delta);
    ASSERT_TRUE(C.has_value());
    EXPECT_GT(*C, 0.0);

    cfg.seed = 405;
    cfg.C_tail = C;
    const auto run = run_campaign(cfg);
    std::size_t issued = 0, covered = 0;
    for (const auto& t : run.trials)
        if (t.refined_radius)
        {
            ++issued;
            covered += t.refined_covered;
        }
    ASSERT_GT(issued, 50u);
    const double cov = double(covered) / double(issued);
    EXPECT_GE(cov, 1.0 - cfg.delta - 0.07);
    EXPECT_LE(cov, 1.0);
}
