// aspuavn: run one scenario, sweep a parameter grid, or replay fixtures.
//
// Exit codes: 0 success, 1 configuration error, 2 run failure,
// 3 fixture mismatch.

#include <aspuavn/aspuavn.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace aspuavn;

enum Exit : int
{
    kOk = 0,
    kConfig = 1,
    kRun = 2,
    kFixture = 3,
};

struct Overrides
{
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string defense;
    std::vector<std::size_t> antibodies;
    std::optional<double> malicious;
    std::string attack;
    std::vector<std::string> set;
};

void add_scenario_options(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "INI or JSON scenario file");
    cmd->add_option("--preset", o.preset, "desk, scenario1 .. scenario4");
    cmd->add_option("--seed", o.seed, "run only this seed");
    cmd->add_option("--defense", o.defense, "on, off (sweep also accepts both)")
        ->check(CLI::IsMember({"on", "off", "both"}));
    cmd->add_option("--antibodies", o.antibodies, "detector counts")->delimiter(',');
    cmd->add_option("--malicious", o.malicious, "malicious UAV percentage");
    cmd->add_option("--attack", o.attack, "attack kinds, e.g. SF or WH,SF,SH");
    cmd->add_option("--set", o.set, "extra section.key=value overrides");
}

ScenarioConfig build_config(const Overrides& o)
{
    if (!o.config.empty() && !o.preset.empty())
        throw ConfigError("preset", "use either --config or --preset, not both");
    ScenarioConfig c = !o.config.empty() ? load_config(o.config)
                       : !o.preset.empty() ? preset(o.preset)
                                           : desk_scenario();
    if (o.seed)
        c.seeds = {*o.seed};
    if (o.defense == "on" || o.defense == "both")
        c.defense = true;
    else if (o.defense == "off")
        c.defense = false;
    if (!o.antibodies.empty())
        c.antibodies = o.antibodies;
    if (o.malicious)
        c.malicious = *o.malicious;
    if (!o.attack.empty())
        apply_setting(c, "attack.kinds", o.attack);
    for (const auto& kv : o.set)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError(kv, "expected section.key=value");
        apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
}

std::ofstream open_out(const std::filesystem::path& p)
{
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out)
        throw Error("cannot write '" + p.string() + "'");
    return out;
}

int cmd_run(const Overrides& o, const std::string& out_path, const std::string& trace_path)
{
    const ScenarioConfig c = build_config(o);
    RunSpec spec{c.seeds.front(), c.antibodies.front(), c.defense};
    RunOptions opt;
    opt.keep_trace = !trace_path.empty();
    const RunResult r = run_scenario(c, spec, opt);

    std::ostringstream csv;
    csv << csv_header() << '\n' << csv_row(r) << '\n';
    if (out_path.empty() || out_path == "-")
        std::cout << csv.str();
    else
    {
        auto out = open_out(out_path);
        out << csv.str();
        if (!out)
            throw Error("write failure on '" + out_path + "'");
    }
    if (!trace_path.empty())
    {
        auto out = open_out(trace_path);
        out << r.trace;
        if (!out)
            throw Error("write failure on '" + trace_path + "'");
    }
    std::cerr << "attackers " << r.attackers << ", isolated " << r.isolated << ", sessions " << r.sessions
              << ", pooled PDR " << detail::fmt(r.pooled_pdr) << "%\n";
    return kOk;
}

int cmd_sweep(const Overrides& o, const std::string& out_path, const std::vector<double>& malicious_axis)
{
    ScenarioConfig c = build_config(o);
    SweepAxes axes = default_axes(c);
    if (o.defense == "on")
        axes.defense = {true};
    else if (o.defense == "off")
        axes.defense = {false};
    else
        axes.defense = {true, false};
    if (!malicious_axis.empty())
        axes.malicious = malicious_axis;
    // Defense-off rows still need a positive antibody count to validate.
    c.defense = true;
    const auto rows = run_sweep(c, axes);

    const std::filesystem::path csv_path = out_path.empty() ? std::filesystem::path(c.id + "_sweep.csv") : std::filesystem::path(out_path);
    {
        auto out = open_out(csv_path);
        write_csv(out, rows);
        if (!out)
            throw Error("write failure on '" + csv_path.string() + "'");
    }
    std::filesystem::path stem = csv_path;
    stem.replace_extension();
    std::filesystem::path summary = stem;
    summary += "_summary.csv";
    {
        auto out = open_out(summary);
        write_summary(out, rows);
        if (!out)
            throw Error("write failure on '" + summary.string() + "'");
    }
    write_plot_data(stem, rows);
    write_summary(std::cout, rows);
    std::cerr << rows.size() << " runs written to " << csv_path.string() << '\n';
    return kOk;
}

int cmd_fixture()
{
    int status = kOk;
    for (const auto& c : run_fixtures())
    {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty())
            std::cout << " (" << c.detail << ')';
        std::cout << '\n';
        if (!c.passed)
            status = kFixture;
    }
    return status;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Agent-based self-protective routing simulator for UAV networks"};
    app.require_subcommand(1);

    Overrides run_o;
    std::string run_out, run_trace;
    auto* run = app.add_subcommand("run", "run one scenario with one seed and antibody count");
    add_scenario_options(run, run_o);
    run->add_option("--out", run_out, "CSV output path (default stdout)");
    run->add_option("--trace", run_trace, "write the event trace here");

    Overrides sweep_o;
    std::string sweep_out;
    std::vector<double> sweep_mal;
    auto* sweep = app.add_subcommand("sweep", "run the antibody x malicious x seed x defense grid");
    add_scenario_options(sweep, sweep_o);
    sweep->add_option("--out", sweep_out, "CSV output path; summary and plot data are written beside it");
    sweep->add_option("--malicious-axis", sweep_mal, "sweep these malicious percentages")->delimiter(',');

    app.add_subcommand("fixture", "replay the built-in deterministic fixtures");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try
    {
        if (run->parsed())
            return cmd_run(run_o, run_out, run_trace);
        if (sweep->parsed())
            return cmd_sweep(sweep_o, sweep_out, sweep_mal);
        return cmd_fixture();
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "run failed: " << e.what() << '\n';
        return kRun;
    }
}
