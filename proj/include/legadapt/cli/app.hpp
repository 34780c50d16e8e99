#ifndef LEGADAPT_CLI_APP_HPP
#define LEGADAPT_CLI_APP_HPP

#include "legadapt/confidence.hpp"
#include "legadapt/errors.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/io/campaign_io.hpp"
#include "legadapt/io/input.hpp"
#include "legadapt/io/report.hpp"
#include "legadapt/synth/campaign.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace legadapt::cli
{

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int data = 2;
inline constexpr int check_failed = 3;
} // namespace exit_code

struct Options
{
    std::string input;
    std::string out_dir;
    std::size_t grid = 101;
    std::optional<std::uint64_t> seed;
    std::vector<double> rescale;
    bool check = false;
    std::optional<std::size_t> trials;
    bool density = false;
};

namespace detail
{

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot write " + path.string());
    f << text;
    if (!f)
        throw DataError("error writing " + path.string());
}

inline std::filesystem::path prepare_out(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

inline std::optional<io::Rescale> rescale_of(const Options& o)
{
    if (o.rescale.empty())
        return std::nullopt;
    return io::Rescale{o.rescale[0], o.rescale[1]};
}

inline io::json echo(std::string_view command, const Options& o)
{
    io::json j;
    j["command"] = command;
    j["input"] = o.input;
    j["grid"] = o.grid;
    if (const auto r = rescale_of(o))
        j["rescale"] = {{"min", r->min}, {"max", r->max}};
    else
        j["rescale"] = nullptr;
    j["seed"] = o.seed ? io::json(*o.seed) : io::json(nullptr);
    return j;
}

inline FitResult fit_input(const Options& o, Problem problem)
{
    const auto rows = io::read_table(std::filesystem::path(o.input));
    if (problem == Problem::regression)
    {
        if (!o.rescale.empty())
            throw UsageError("--rescale applies to density input only");
        return fit_adaptive(io::regression_from_rows(rows));
    }
    return fit_adaptive(io::density_from_rows(rows, rescale_of(o)));
}

inline int cmd_fit(const Options& o, Problem problem, std::ostream& out)
{
    const auto fr = fit_input(o, problem);
    const auto conf = aci_radius(fr.scan);
    const auto report = io::make_fit_report(fr, conf, o.grid, echo(problem == Problem::regression ? "fit-reg" : "fit-den", o));
    const auto text = io::serialize(report);
    if (o.out_dir.empty())
    {
        out << text;
        return exit_code::ok;
    }
    const auto dir = prepare_out(o.out_dir);
    write_file(dir / "report.json", text);
    std::ostringstream fit_csv, scan_csv;
    io::write_fit_csv(fit_csv, report);
    io::write_scan_csv(scan_csv, fr.scan);
    write_file(dir / "fit.csv", fit_csv.str());
    write_file(dir / "scan.csv", scan_csv.str());
    return exit_code::ok;
}

inline int cmd_scan(const Options& o, std::ostream& out)
{
    const auto problem = o.density ? Problem::density : Problem::regression;
    const auto fr = fit_input(o, problem);
    const auto conf = aci_radius(fr.scan);
    auto cfg = echo("scan", o);
    cfg["problem"] = to_string(problem);
    const auto text = io::serialize(io::scan_to_json(fr.scan, conf, cfg));
    std::ostringstream scan_csv;
    io::write_scan_csv(scan_csv, fr.scan);
    if (o.out_dir.empty())
    {
        out << scan_csv.str();
        return exit_code::ok;
    }
    const auto dir = prepare_out(o.out_dir);
    write_file(dir / "scan.json", text);
    write_file(dir / "scan.csv", scan_csv.str());
    return exit_code::ok;
}

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err)
{
    auto file = io::load_campaign_config(o.input);
    if (o.seed)
        file.campaign.seed = *o.seed;
    if (o.trials)
    {
        if (*o.trials == 0)
            throw UsageError("--trials must be >= 1");
        file.campaign.trials = *o.trials;
    }
    io::apply_calibration(file);
    const auto result = synth::run_campaign(file.campaign);
    const auto summary = io::serialize(io::summary_to_json(file.campaign, result.summary));
    if (o.out_dir.empty())
        out << summary;
    else
    {
        const auto dir = prepare_out(o.out_dir);
        write_file(dir / "summary.json", summary);
        std::ostringstream trials;
        io::write_trials_csv(trials, result.trials);
        write_file(dir / "trials.csv", trials.str());
    }
    if (o.check)
    {
        for (const auto& c : result.summary.checks)
            err << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << io::format_number(c.value) << " (" << c.bound
                << ")\n";
        if (!result.summary.all_passed())
            return exit_code::check_failed;
    }
    return exit_code::ok;
}

} // namespace detail

/** Entry point shared by the executable and the tests; args excludes the program name.
 *
 *  Exit status: 0 success, 1 usage or config error, 2 data error, 3 failed
 *  acceptance check (simulate --check).
 */
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Adaptive Fourier-Legendre regression and density estimation", "legadapt"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::tool_version));

    Options o;
    auto common = [&o](CLI::App* sub, bool with_rescale) {
        sub->add_option("--out", o.out_dir, "Write outputs into this directory (default: stdout)");
        sub->add_option("--grid", o.grid, "Number of evaluation points on [-1, 1]")->check(CLI::Range(2, 1000000));
        sub->add_option("--seed", o.seed, "Seed, recorded in the report");
        if (with_rescale)
            sub->add_option("--rescale", o.rescale, "Map [MIN, MAX] affinely onto [-1, 1]")->expected(2)->allow_extra_args(false);
    };

    auto* fit_reg = app.add_subcommand("fit-reg", "Fit a regression function from y values on the grid x_i = -1 + 2i/n");
    fit_reg->add_option("input", o.input, "One column y, or two columns x,y")->required();
    common(fit_reg, false);

    auto* fit_den = app.add_subcommand("fit-den", "Fit a density from a sample on [-1, 1]");
    fit_den->add_option("input", o.input, "One column of observations")->required();
    common(fit_den, true);

    auto* scan = app.add_subcommand("scan", "Print the tau(n, N) table of a data file");
    scan->add_option("input", o.input, "Regression (default) or density input")->required();
    scan->add_flag("--density", o.density, "Treat input as a density sample");
    common(scan, true);

    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo campaign from a YAML config");
    sim->add_option("config", o.input, "Campaign config")->required();
    sim->add_option("--out", o.out_dir, "Write summary.json and trials.csv into this directory");
    sim->add_option("--seed", o.seed, "Override the config seed");
    sim->add_option("--trials", o.trials, "Override the trial count");
    sim->add_flag("--check", o.check, "Exit with status 3 if an acceptance threshold fails");

    try
    {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    try
    {
        if (fit_reg->parsed())
            return detail::cmd_fit(o, Problem::regression, out);
        if (fit_den->parsed())
            return detail::cmd_fit(o, Problem::density, out);
        if (scan->parsed())
            return detail::cmd_scan(o, out);
        return detail::cmd_simulate(o, out, err);
    }
    catch (const UsageError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    }
    catch (const ConfigError& e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_code::usage;
    }
    catch (const DataError& e)
    {
        err << "data error: " << e.what() << '\n';
        return exit_code::data;
    }
    catch (const ContractViolation& e)
    {
        err << "data error: " << e.what() << '\n';
        return exit_code::data;
    }
    catch (const NumericFailure& e)
    {
        err << "numeric failure: " << e.what() << '\n';
        return exit_code::data;
    }
}

} // namespace legadapt::cli

#endif // LEGADAPT_CLI_APP_HPP
