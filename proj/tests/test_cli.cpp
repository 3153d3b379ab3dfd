#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aspuavn;
namespace fs = std::filesystem;

namespace
{

struct Invocation
{
    int rc = -1;
    std::string out;
};

/// Runs the CLI binary with `args`, capturing stdout and the exit status.
Invocation cli(const std::string& args)
{
    const fs::path capture = fs::temp_directory_path() / ("aspuavn_cli_" + std::to_string(::getpid()) + ".out");
    const std::string cmd = std::string("\"") + ASPUAVN_CLI_PATH + "\" " + args + " > \"" + capture.string() +
                            "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    Invocation inv;
    inv.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    inv.out = ss.str();
    fs::remove(capture);
    return inv;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class TempDir
{
public:
    TempDir()
    {
        path_ = fs::temp_directory_path() /
                ("aspuavn_test_" + std::to_string(::getpid()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

ScenarioConfig quick_desk()
{
    ScenarioConfig c = desk_scenario();
    c.sim_time = 40.0;
    c.warmup = 10.0;
    return c;
}

std::string field_of(const ConfigError& e) { return e.field(); }

} // namespace

// ---------------------------------------------------------------------------
// Presets and validation
// ---------------------------------------------------------------------------

TEST(Preset, FirstScenarioParameters)
{
    const auto c = preset("scenario1");
    EXPECT_EQ(c.node_count, 500u);
    EXPECT_DOUBLE_EQ(c.malicious, 5.0);
    EXPECT_DOUBLE_EQ(c.extent.x, 1000.0);
    EXPECT_DOUBLE_EQ(c.extent.y, 1000.0);
    EXPECT_DOUBLE_EQ(c.sim_time, 1000.0);
    EXPECT_DOUBLE_EQ(c.range, 30.0);
    EXPECT_EQ(c.kinds.size(), 3u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Preset, AreaAndMaliciousShareGrowWithScenarioNumber)
{
    for (int n = 1; n <= 4; ++n)
    {
        const auto c = preset("scenario" + std::to_string(n));
        EXPECT_DOUBLE_EQ(c.extent.x, 1000.0 * n);
        EXPECT_DOUBLE_EQ(c.malicious, 5.0 * n);
    }
}

TEST(Preset, FourthScenarioSweepsSevenAntibodyCounts)
{
    EXPECT_EQ(preset("scenario4").antibodies, (std::vector<std::size_t>{50, 100, 150, 200, 250, 300, 350}));
}

TEST(Preset, UnknownNameIsAConfigError)
{
    EXPECT_THROW(preset("scenario9"), ConfigError);
}

TEST(Validate, NegativeRangeNamesTheField)
{
    ScenarioConfig c = desk_scenario();
    c.range = -1.0;
    try
    {
        c.validate();
        FAIL();
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(field_of(e), "topology.range");
    }
}

TEST(Validate, MaliciousShareMustStayBelowHundred)
{
    ScenarioConfig c = desk_scenario();
    c.malicious = 100.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

TEST(ConfigFile, IniOverridesAPreset)
{
    std::istringstream in("[scenario]\nbase = desk\nseeds = 3,4\n[topology]\nrange = 90\n"
                          "[attack]\nkinds = WH,SF\n[defense]\nantibodies = 10, 20\n");
    const auto c = parse_ini(in);
    EXPECT_EQ(c.node_count, 50u);
    EXPECT_DOUBLE_EQ(c.range, 90.0);
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
    EXPECT_EQ(c.antibodies, (std::vector<std::size_t>{10, 20}));
    EXPECT_EQ(c.kinds, (std::set<AttackType>{AttackType::Wormhole, AttackType::SelectiveForwarding}));
}

TEST(ConfigFile, JsonEncodingMatchesIni)
{
    const auto j = parse_json(R"({"scenario": {"base": "desk", "seeds": [3, 4]},
                                  "topology": {"range": 90},
                                  "attack": {"kinds": ["WH", "SF"]},
                                  "defense": {"antibodies": [10, 20], "enabled": false}})");
    EXPECT_DOUBLE_EQ(j.range, 90.0);
    EXPECT_EQ(j.seeds, (std::vector<std::uint64_t>{3, 4}));
    EXPECT_EQ(j.antibodies, (std::vector<std::size_t>{10, 20}));
    EXPECT_FALSE(j.defense);
}

TEST(ConfigFile, UnknownKeyIsNamed)
{
    std::istringstream in("[topology]\nrnage = 30\n");
    try
    {
        parse_ini(in);
        FAIL();
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(field_of(e), "topology.rnage");
    }
}

TEST(ConfigFile, BadValueNamesTheKey)
{
    try
    {
        parse_json(R"({"traffic": {"packet_interval": "soon"}})");
        FAIL();
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(field_of(e), "traffic.packet_interval");
    }
}

TEST(ConfigFile, MalformedJsonIsAConfigError)
{
    EXPECT_THROW(parse_json("{\"topology\": "), ConfigError);
}

TEST(ConfigFile, LoadPicksTheParserByExtension)
{
    TempDir dir;
    std::ofstream(dir.path() / "a.json") << R"({"topology": {"range": 44}})";
    std::ofstream(dir.path() / "a.ini") << "[topology]\nrange = 55\n";
    EXPECT_DOUBLE_EQ(load_config(dir.path() / "a.json").range, 44.0);
    EXPECT_DOUBLE_EQ(load_config(dir.path() / "a.ini").range, 55.0);
    EXPECT_THROW(load_config(dir.path() / "missing.ini"), ConfigError);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

TEST(Sweep, FourthScenarioGridHasSeventyCells)
{
    EXPECT_EQ(sweep_cells(default_axes(preset("scenario4"))).size(), 7u * 5u * 2u);
}

TEST(Sweep, RowCountIsTheProductOfTheAxes)
{
    ScenarioConfig c = quick_desk();
    c.antibodies = {50, 100, 150, 200, 250, 300, 350};
    c.seeds = {1, 2, 3, 4, 5};
    const auto rows = run_sweep(c, default_axes(c));
    ASSERT_EQ(rows.size(), 70u);
    EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const RunResult& r) { return r.spec.defense; }), 35);
    std::ostringstream csv;
    write_csv(csv, rows);
    EXPECT_EQ(lines(csv.str()), 71u);
    std::ostringstream summary;
    write_summary(summary, rows);
    EXPECT_EQ(lines(summary.str()), 1u + 14u);
}

TEST(Sweep, RerunIsByteIdenticalRegardlessOfWorkers)
{
    ScenarioConfig c = quick_desk();
    c.seeds = {1, 2, 3};
    std::ostringstream a, b;
    write_csv(a, run_sweep(c, default_axes(c), 1));
    write_csv(b, run_sweep(c, default_axes(c), 4));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, HeaderAndRowsHaveMatchingColumnCounts)
{
    const auto r = run_scenario(quick_desk(), {1, 50, true});
    auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    EXPECT_EQ(commas(csv_header()), commas(csv_row(r)));
}

// ---------------------------------------------------------------------------
// Command-line binary
// ---------------------------------------------------------------------------

TEST(Cli, FixtureReplayPasses)
{
    const auto inv = cli("fixture");
    EXPECT_EQ(inv.rc, 0);
    EXPECT_EQ(inv.out.find("FAIL"), std::string::npos) << inv.out;
    EXPECT_NE(inv.out.find("PASS"), std::string::npos);
}

TEST(Cli, RunWritesOneCsvRow)
{
    TempDir dir;
    const auto csv = dir.path() / "run.csv";
    const auto trace = dir.path() / "run.trace";
    const auto inv = cli("run --preset desk --seed 3 --antibodies 100 --set scenario.sim_time=40 --out \"" +
                         csv.string() + "\" --trace \"" + trace.string() + "\"");
    ASSERT_EQ(inv.rc, 0);
    const auto text = read_file(csv);
    EXPECT_EQ(lines(text), 2u);
    EXPECT_EQ(text.substr(0, text.find('\n')), csv_header());
    EXPECT_GT(fs::file_size(trace), 0u);
}

TEST(Cli, RunIsDeterministic)
{
    const std::string args = "run --preset desk --seed 5 --antibodies 50 --set scenario.sim_time=40";
    const auto a = cli(args), b = cli(args);
    ASSERT_EQ(a.rc, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, SweepWritesCsvSummaryAndPlotData)
{
    TempDir dir;
    const auto csv = dir.path() / "grid.csv";
    const auto inv = cli("sweep --preset desk --antibodies 50,100 --set scenario.seeds=1,2 "
                         "--set scenario.sim_time=40 --out \"" + csv.string() + "\"");
    ASSERT_EQ(inv.rc, 0);
    EXPECT_EQ(lines(read_file(csv)), 1u + 2u * 2u * 2u);
    EXPECT_TRUE(fs::exists(dir.path() / "grid_summary.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "grid_pdr.dat"));
    EXPECT_NE(inv.out.find("defense,malicious,antibodies"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitWithOne)
{
    EXPECT_EQ(cli("run --set topology.range=-1").rc, 1);
    EXPECT_EQ(cli("run --preset nowhere").rc, 1);
    EXPECT_EQ(cli("run --config /nonexistent/cfg.ini").rc, 1);
    EXPECT_EQ(cli("bogus-command").rc, 1);
}

TEST(Cli, RuntimeFailuresExitWithTwo)
{
    EXPECT_EQ(cli("run --set scenario.sim_time=20 --out /proc/forbidden/run.csv").rc, 2);
}
