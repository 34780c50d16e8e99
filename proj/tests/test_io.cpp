#include "legadapt/io/campaign_io.hpp"
#include "legadapt/io/input.hpp"
#include "legadapt/io/number.hpp"
#include "legadapt/io/report.hpp"
#include "legadapt/synth/simulate.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <sstream>

using namespace legadapt;
using namespace legadapt::io;

namespace
{

std::vector<Row> rows_of(const std::string& text)
{
    std::istringstream in(text);
    return read_table(in);
}

std::string column(std::size_t n, auto&& value)
{
    std::string s;
    for (std::size_t i = 1; i <= n; ++i)
        s += format_number(value(i)) + "\n";
    return s;
}

} // namespace

TEST(Number, ShortestRoundTrip)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-2.0), "-2");
    EXPECT_EQ(format_number(1e-300), "1e-300");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");

    std::mt19937_64 gen(3);
    for (int i = 0; i < 20000; ++i)
    {
        double v;
        const auto bits = gen();
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v))
            continue;
        const auto s = format_number(v);
        const auto back = parse_number(s);
        ASSERT_TRUE(back.has_value()) << s;
        ASSERT_EQ(*back, v) << s;
    }
}

TEST(Number, ParseRejectsJunk)
{
    EXPECT_EQ(parse_number("+1.5"), 1.5);
    EXPECT_EQ(parse_number("1e3"), 1000.0);
    EXPECT_EQ(parse_number("-0.25"), -0.25);
    for (const char* bad : {"", "abc", "1,0", "1.0x", "nan", "inf", "1e999", " 1"})
        EXPECT_FALSE(parse_number(bad).has_value()) << bad;
}

TEST(ReadTable, CommentsBlanksAndDelimiters)
{
    const auto rows = rows_of("# header comment\n\n  # indented comment\n1.5, 2\n3\t4\r\n5;6\n  7   8  \n");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].line, 4u);
    EXPECT_EQ(rows[0].values, (std::vector<double>{1.5, 2.0}));
    EXPECT_EQ(rows[1].values, (std::vector<double>{3.0, 4.0}));
    EXPECT_EQ(rows[2].values, (std::vector<double>{5.0, 6.0}));
    EXPECT_EQ(rows[3].values, (std::vector<double>{7.0, 8.0}));
}

TEST(ReadTable, ErrorsNameTheLine)
{
    try
    {
        rows_of("1\n2\n# c\nthree\n");
        FAIL();
    }
    catch (const DataError& e)
    {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
    try
    {
        rows_of("1 2\n3\n");
        FAIL();
    }
    catch (const DataError& e)
    {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(RegressionInput, OneAndTwoColumns)
{
    const std::size_t n = 32;
    const auto one = regression_from_rows(rows_of(column(n, [](std::size_t i) { return 0.5 * double(i); })));
    EXPECT_EQ(one.size(), n);
    EXPECT_EQ(one.y()[31], 16.0);

    std::string two;
    for (std::size_t i = 1; i <= n; ++i)
        two += format_number(design_point(i, n) + 5e-10) + "," + format_number(double(i)) + "\n";
    const auto s = regression_from_rows(rows_of(two));
    EXPECT_EQ(s.y()[0], 1.0);
}

TEST(RegressionInput, Rejections)
{
    EXPECT_THROW(regression_from_rows(rows_of(column(10, [](std::size_t) { return 1.0; }))), UsageError);

    std::string off;
    for (std::size_t i = 1; i <= 20; ++i)
        off += format_number(design_point(i, 20) + (i == 7 ? 1e-6 : 0.0)) + " 1\n";
    try
    {
        regression_from_rows(rows_of(off));
        FAIL();
    }
    catch (const DataError& e)
    {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 7"), std::string::npos) << msg;
        EXPECT_NE(msg.find("-1 + 2i/n"), std::string::npos) << msg;
    }
    EXPECT_THROW(regression_from_rows(rows_of("1 2 3\n")), UsageError);
}

TEST(DensityInput, RangeAndRescale)
{
    auto text = column(20, [](std::size_t i) { return -1.0 + 0.1 * double(i - 1); });
    text += "1.5\n";
    try
    {
        density_from_rows(rows_of(text));
        FAIL();
    }
    catch (const DataError& e)
    {
        EXPECT_NE(std::string(e.what()).find("line(s) 21"), std::string::npos) << e.what();
    }

    const auto s = density_from_rows(rows_of(column(20, [](std::size_t i) { return i == 1 ? 1.5 : 3.0 * double(i) / 20.0; })),
                                     Rescale{0.0, 3.0});
    EXPECT_EQ(s.xi()[0], 0.0);
    EXPECT_EQ(s.xi()[19], 1.0);
    EXPECT_THROW(density_from_rows(rows_of(column(20, [](std::size_t i) { return double(i); })), Rescale{0.0, 10.0}),
                 DataError);
    EXPECT_THROW(density_from_rows(rows_of(column(20, [](std::size_t) { return 0.0; })), Rescale{1.0, 1.0}),
                 UsageError);
}

TEST(FitReport, RoundTripIsByteIdentical)
{
    const auto truth = synth::make_truth(synth::ClassSpec::w(1.0, 0.0, 1.0), 400);
    const auto sample = synth::simulate_regression(truth, synth::NoiseModel{synth::NoiseKind::gaussian, 0.3}, 600, 1);
    const auto fr = fit_adaptive(sample);
    const auto report = make_fit_report(fr, aci_radius(fr.scan), 41, json{{"command", "test"}, {"x", 0.1}});
    const auto text = serialize(report);
    const auto back = parse_fit_report(text);
    EXPECT_EQ(back, report);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(text.find('\r'), std::string::npos);

    for (std::size_t k = 0; k < report.grid_x.size(); ++k)
        EXPECT_NEAR(back.grid_f[k], evaluate(fr.fit, back.grid_x[k]), 1e-12);
    EXPECT_TRUE(back.sigma2_hat.has_value());
    EXPECT_FALSE(back.integral.has_value());
}

TEST(FitReport, DegenerateFieldsAreNull)
{
    std::vector<double> y(48, 0.0);
    const auto fr = fit_adaptive(RegressionSample(y));
    const auto conf = aci_radius(fr.scan);
    ASSERT_TRUE(conf.degenerate());
    const auto report = make_fit_report(fr, conf, 3);
    const auto j = to_json(report);
    EXPECT_TRUE(j["confidence"]["radius"].is_null());
    EXPECT_NE(j["confidence"]["degeneracy"], "none");
    EXPECT_EQ(serialize(parse_fit_report(serialize(report))), serialize(report));
    EXPECT_THROW(parse_fit_report("{\"version\": 1}"), DataError);
    EXPECT_THROW(parse_fit_report("not json"), DataError);
}

TEST(FitReport, DensityIntegratesToOne)
{
    const auto truth = synth::make_density_truth(synth::ClassSpec::w(1.0, 0.0, 1.0), 64);
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const auto fr = fit_adaptive(synth::simulate_density(truth, 3000, seed));
        const auto report = make_fit_report(fr, aci_radius(fr.scan), 11);
        ASSERT_TRUE(report.integral.has_value());
        EXPECT_NEAR(*report.integral, 1.0, 1e-10);
        const auto back = parse_fit_report(serialize(report));
        EXPECT_EQ(back.integral, report.integral);
    }
}

TEST(FitReport, UniformDensityIsFlat)
{
    const auto uniform = synth::make_truth(synth::ClassSpec::from_coeffs({1.0}), 0, Problem::density);
    const auto fr = fit_adaptive(synth::simulate_density(uniform, 100000, 17));
    const auto report = make_fit_report(fr, aci_radius(fr.scan), 101);
    for (std::size_t k = 0; k < report.grid_x.size(); ++k)
    {
        if (std::abs(report.grid_x[k]) > 0.9)
            continue;
        EXPECT_NEAR(report.grid_f[k], 0.5, 0.05) << report.grid_x[k];
    }
}

TEST(Tables, SingleHeaderRow)
{
    std::vector<double> y(48);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = design_point(i + 1, y.size());
    const auto fr = fit_adaptive(RegressionSample(y));
    std::ostringstream fit_csv, scan_csv;
    write_fit_csv(fit_csv, make_fit_report(fr, aci_radius(fr.scan), 5));
    write_scan_csv(scan_csv, fr.scan);
    const auto fit_text = fit_csv.str(), scan_text = scan_csv.str();
    EXPECT_EQ(fit_text.substr(0, 8), "x,f_hat\n");
    EXPECT_EQ(std::count(fit_text.begin(), fit_text.end(), '\n'), 6);
    EXPECT_EQ(scan_text.substr(0, 6), "N,tau\n");
    EXPECT_EQ(std::count(scan_text.begin(), scan_text.end(), '\n'), long(fr.scan.max_n() + 1));

    std::ostringstream trials;
    synth::TrialReport t;
    t.error = "a,b\nc";
    write_trials_csv(trials, {t});
    const auto text = trials.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_EQ(std::count(text.begin(), text.end(), ','), 2 * 15);
}

TEST(CampaignConfig, ParsesAndValidates)
{
    const auto f = parse_campaign_config(YAML::Load(R"(
problem: density
truth: {class: Z, alpha: 2, beta: 0.3}
noise: {kind: laplace, sigma: 0.2}
n_grid: [64, 128]
trials: 7
seed: 99
calibration: {n: 256, trials: 20}
acceptance: {ratio_p95_max: 20, coverage_drop_max: 0.05}
)"));
    EXPECT_EQ(f.campaign.problem, Problem::density);
    EXPECT_EQ(f.campaign.truth.kind, synth::TruthClass::Z);
    EXPECT_EQ(f.campaign.truth.alpha, 2.0);
    EXPECT_EQ(f.campaign.noise.kind, synth::NoiseKind::laplace);
    EXPECT_EQ(f.campaign.n_grid, (std::vector<std::size_t>{64, 128}));
    EXPECT_EQ(f.campaign.trials, 7u);
    EXPECT_EQ(f.campaign.seed, 99u);
    ASSERT_TRUE(f.calibration.has_value());
    EXPECT_EQ(f.calibration->n, 256u);
    EXPECT_EQ(f.campaign.acceptance.ratio_p95_max, 20.0);
    EXPECT_FALSE(f.campaign.acceptance.gamma_median_min.has_value());

    const auto echo = config_to_json(f.campaign);
    EXPECT_EQ(echo["truth"]["class"], "Z");
    EXPECT_EQ(echo["noise"]["kind"], "laplace");
}

TEST(CampaignConfig, ErrorsNameKeyAndAllowedValues)
{
    auto message = [](const char* text) {
        try
        {
            parse_campaign_config(YAML::Load(text));
        }
        catch (const ConfigError& e)
        {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("trialz: 3").find("'trialz'"), std::string::npos);
    EXPECT_NE(message("trialz: 3").find("trials"), std::string::npos);
    EXPECT_NE(message("truth: {class: Q}").find("W, Z, explicit"), std::string::npos);
    EXPECT_NE(message("noise: {kind: cauchy}").find("gaussian, laplace, bounded"), std::string::npos);
    EXPECT_NE(message("acceptance: {coverage: 1}").find("'coverage'"), std::string::npos);
    EXPECT_NE(message("trials: many").find("'trials'"), std::string::npos);
    EXPECT_NE(message("delta: 2").find("delta"), std::string::npos);
    EXPECT_NE(message("truth: {class: W, coeffs: [1]}").find("explicit"), std::string::npos);
}

TEST(CampaignConfig, BundledConfigsLoad)
{
    for (const char* name : {"w_beta1.acceptance", "w_beta1_density.yaml", "z_half_laplace.yaml"})
    {
        const auto f = load_campaign_config(std::filesystem::path(LEGADAPT_SOURCE_DIR) / "configs" / name);
        EXPECT_EQ(f.campaign.n_grid, (std::vector<std::size_t>{512, 2048, 8192})) << name;
    }
    const auto acc = load_campaign_config(std::filesystem::path(LEGADAPT_SOURCE_DIR) / "configs/w_beta1.acceptance");
    EXPECT_EQ(acc.campaign.acceptance.coverage_final_min, 0.80);
    EXPECT_EQ(acc.campaign.noise.sigma, 0.3);
    EXPECT_THROW(load_campaign_config("/nonexistent/config.yaml"), ConfigError);
}

TEST(CampaignSummary, JsonRoundTrip)
{
    synth::CampaignConfig cfg;
    cfg.n_grid = {64, 128};
    cfg.trials = 4;
    cfg.acceptance.ratio_p95_max = 20.0;
    const auto r = synth::run_campaign(cfg);
    const auto text = serialize(summary_to_json(cfg, r.summary));
    EXPECT_EQ(serialize(json::parse(text)), text);
    EXPECT_EQ(json::parse(text)["grid"].size(), 2u);
}
