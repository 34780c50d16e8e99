#include "legadapt/cli/app.hpp"
#include "legadapt/synth/truth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace legadapt;
namespace fs = std::filesystem;

namespace
{

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("legadapt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string file(const std::string& name, const std::string& text)
    {
        const auto p = dir / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    int run(std::vector<std::string> args)
    {
        out.str("");
        err.str("");
        return cli::run_cli(args, out, err);
    }

    std::string column(std::size_t n, auto&& value)
    {
        std::string s = "# generated\n";
        for (std::size_t i = 1; i <= n; ++i)
            s += io::format_number(value(i)) + "\n";
        return s;
    }

    fs::path dir;
    std::ostringstream out, err;
};

} // namespace

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"bogus"}), 1);
    EXPECT_EQ(run({"fit-reg"}), 1);
    EXPECT_EQ(run({"fit-reg", "x.txt", "--grid", "1"}), 1);
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_NE(out.str().find("fit-reg"), std::string::npos);

    const auto small = file("small.txt", column(10, [](std::size_t) { return 1.0; }));
    EXPECT_EQ(run({"fit-reg", small}), 1);
    EXPECT_NE(err.str().find("n >= 16"), std::string::npos);
    EXPECT_EQ(run({"fit-den", small}), 1);
}

TEST_F(Cli, DataErrors)
{
    EXPECT_EQ(run({"fit-reg", (dir / "missing.txt").string()}), 2);

    auto text = column(20, [](std::size_t i) { return double(i); });
    text += "oops\n";
    EXPECT_EQ(run({"fit-reg", file("bad.txt", text)}), 2);
    EXPECT_NE(err.str().find("line 22"), std::string::npos) << err.str();

    const auto d = file("d.txt", column(20, [](std::size_t i) { return i == 5 ? 1.5 : 0.0; }));
    EXPECT_EQ(run({"fit-den", d}), 2);
    EXPECT_NE(err.str().find("6"), std::string::npos) << err.str();
    EXPECT_EQ(run({"fit-den", d, "--rescale", "0", "3"}), 0);
    EXPECT_EQ(run({"fit-reg", d, "--rescale", "0", "3"}), 1);
}

TEST_F(Cli, RescaleIsRecorded)
{
    const auto d = file("d.txt", column(40, [](std::size_t i) { return 3.0 * double(i) / 41.0; }));
    ASSERT_EQ(run({"fit-den", d, "--rescale", "0", "3", "--grid", "3"}), 0) << err.str();
    const auto report = io::parse_fit_report(out.str());
    EXPECT_EQ(report.config["rescale"]["min"], 0.0);
    EXPECT_EQ(report.config["rescale"]["max"], 3.0);
    EXPECT_EQ(report.problem, Problem::density);
    EXPECT_NEAR(*report.integral, 1.0, 1e-10);
    EXPECT_EQ(run({"fit-den", d, "--rescale", "-3", "3"}), 0) << err.str();
}

TEST_F(Cli, FitWritesReportAndTables)
{
    const auto truth = synth::make_truth(synth::ClassSpec::from_coeffs({0.0, 0.0, 0.0, 0.0, 0.0, 1.0}), 0);
    const auto y = truth.design_values(2048);
    const auto in = file("l5.txt", column(y.size(), [&](std::size_t i) { return y[i - 1]; }));
    const auto o1 = (dir / "o1").string(), o2 = (dir / "o2").string();
    ASSERT_EQ(run({"fit-reg", in, "--out", o1, "--grid", "11"}), 0) << err.str();
    ASSERT_EQ(run({"fit-reg", in, "--out", o2, "--grid", "11"}), 0);
    for (const char* name : {"report.json", "fit.csv", "scan.csv"})
    {
        ASSERT_TRUE(fs::exists(fs::path(o1) / name)) << name;
        EXPECT_EQ(slurp(fs::path(o1) / name), slurp(fs::path(o2) / name)) << name;
    }
    const auto report = io::parse_fit_report(slurp(fs::path(o1) / "report.json"));
    EXPECT_EQ(report.n, 2048u);
    EXPECT_LE(report.tau_star, 1e-3);
    EXPECT_EQ(report.grid_x.size(), 11u);
    EXPECT_EQ(io::serialize(report), slurp(fs::path(o1) / "report.json"));
}

TEST_F(Cli, TwoColumnInput)
{
    std::string text;
    for (std::size_t i = 1; i <= 64; ++i)
        text += io::format_number(design_point(i, 64)) + "," + io::format_number(0.25 * double(i % 3)) + "\n";
    EXPECT_EQ(run({"fit-reg", file("xy.csv", text)}), 0) << err.str();
    text.replace(0, text.find(','), "0.5");
    EXPECT_EQ(run({"fit-reg", file("xy_bad.csv", text)}), 2);
}

TEST_F(Cli, ScanPrintsTable)
{
    const auto in = file("y.txt", column(60, [](std::size_t i) { return std::sin(double(i)); }));
    ASSERT_EQ(run({"scan", in}), 0);
    const auto table = out.str();
    EXPECT_EQ(table.substr(0, 6), "N,tau\n");
    ASSERT_EQ(run({"scan", in, "--out", (dir / "s").string()}), 0);
    const auto j = io::json::parse(slurp(dir / "s" / "scan.json"));
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), long(j["tau"].size() + 1));
    EXPECT_EQ(slurp(dir / "s" / "scan.csv"), table);
}

TEST_F(Cli, SimulateDeterministicAndChecked)
{
    const auto cfg = file("c.yaml", "n_grid: [64, 128]\ntrials: 3\nacceptance:\n  ratio_p95_max: 1000\n");
    const auto a = (dir / "a").string(), b = (dir / "b").string();
    ASSERT_EQ(run({"simulate", cfg, "--trials", "1", "--seed", "7", "--out", a, "--check"}), 0) << err.str();
    EXPECT_NE(err.str().find("PASS"), std::string::npos);
    ASSERT_EQ(run({"simulate", cfg, "--trials", "1", "--seed", "7", "--out", b}), 0);
    EXPECT_EQ(slurp(fs::path(a) / "summary.json"), slurp(fs::path(b) / "summary.json"));
    EXPECT_EQ(slurp(fs::path(a) / "trials.csv"), slurp(fs::path(b) / "trials.csv"));
    const auto summary = io::json::parse(slurp(fs::path(a) / "summary.json"));
    EXPECT_EQ(summary["config"]["seed"], 7);
    EXPECT_EQ(summary["config"]["trials"], 1);

    const auto strict = file("strict.yaml", "n_grid: [64]\ntrials: 2\nacceptance:\n  ratio_p95_max: 1e-9\n");
    EXPECT_EQ(run({"simulate", strict, "--check"}), 3);
    EXPECT_NE(err.str().find("FAIL"), std::string::npos);
    EXPECT_EQ(run({"simulate", strict}), 0);
}

TEST_F(Cli, SimulateConfigErrors)
{
    EXPECT_EQ(run({"simulate", file("a.yaml", "truth: {class: Q}\n")}), 1);
    EXPECT_NE(err.str().find("W, Z, explicit"), std::string::npos);
    EXPECT_EQ(run({"simulate", file("b.yaml", "n_grid: [8]\n")}), 1);
    EXPECT_EQ(run({"simulate", file("c.yaml", "truth: {class: W, beta: 0.4}\n")}), 1);
    EXPECT_EQ(run({"simulate", file("d.yaml", "[unclosed\n")}), 1);
    EXPECT_EQ(run({"simulate", (dir / "none.yaml").string()}), 1);
}
