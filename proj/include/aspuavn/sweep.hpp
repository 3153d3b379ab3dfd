#pragma once

// Parameter sweeps: the Cartesian product of antibody counts, malicious
// fractions, seeds and defense modes, run on a worker pool. Rows come back in
// cell order regardless of which worker finished first.

#include "experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace aspuavn
{

inline constexpr const char* kWorkersEnv = "ASPUAVN_WORKERS";

/// Worker count from the environment, else the hardware concurrency.
inline std::size_t worker_count()
{
    if (const char* v = std::getenv(kWorkersEnv))
    {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n > 0)
            return static_cast<std::size_t>(n);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

struct SweepAxes
{
    std::vector<std::size_t> antibodies;
    std::vector<double> malicious;
    std::vector<std::uint64_t> seeds;
    std::vector<bool> defense{true, false};
};

inline SweepAxes default_axes(const ScenarioConfig& cfg)
{
    SweepAxes a;
    a.antibodies = cfg.antibodies;
    a.malicious = {cfg.malicious};
    a.seeds = cfg.seeds;
    a.defense = cfg.defense ? std::vector<bool>{true, false} : std::vector<bool>{false};
    return a;
}

struct SweepCell
{
    std::size_t antibodies = 0;
    double malicious = 0.0;
    std::uint64_t seed = 0;
    bool defense = true;
};

inline std::vector<SweepCell> sweep_cells(const SweepAxes& axes)
{
    std::vector<SweepCell> cells;
    for (bool d : axes.defense)
        for (double m : axes.malicious)
            for (auto ab : axes.antibodies)
                for (auto s : axes.seeds)
                    cells.push_back({ab, m, s, d});
    return cells;
}

/// Runs `fn(i)` for i in [0, n) on `workers` threads. The first exception is
/// rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(n);
            }
        }
    };
    if (workers == 1)
        body();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back(body);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
}

inline std::vector<RunResult> run_sweep(const ScenarioConfig& base, const SweepAxes& axes,
                                        std::size_t workers = worker_count())
{
    const auto cells = sweep_cells(axes);
    std::vector<RunResult> results(cells.size());
    ScenarioConfig quiet = base;
    quiet.packet_trace = false;
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        ScenarioConfig cfg = quiet;
        cfg.malicious = cells[i].malicious;
        results[i] = run_scenario(cfg, RunSpec{cells[i].seed, cells[i].antibodies, cells[i].defense});
    });
    return results;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct MeanStd
{
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

/// Sample mean and (n - 1) standard deviation; NaNs are skipped.
inline MeanStd mean_std(const std::vector<double>& xs)
{
    MeanStd m;
    double sum = 0.0;
    for (double x : xs)
    {
        if (std::isnan(x))
            continue;
        sum += x;
        ++m.n;
    }
    if (m.n == 0)
    {
        m.mean = std::nan("");
        return m;
    }
    m.mean = sum / static_cast<double>(m.n);
    if (m.n > 1)
    {
        double ss = 0.0;
        for (double x : xs)
        {
            if (!std::isnan(x))
                ss += (x - m.mean) * (x - m.mean);
        }
        m.stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
    }
    return m;
}

inline double metric_value(const RunResult& r, const std::string& metric)
{
    auto opt = [](const std::optional<double>& v) { return v ? *v : std::nan(""); };
    if (metric == "pdr")
        return r.pdr;
    if (metric == "plr")
        return r.plr;
    if (metric == "pooled_pdr")
        return r.pooled_pdr;
    if (metric == "pooled_plr")
        return 100.0 - r.pooled_pdr;
    if (metric == "fpr")
        return opt(r.rates.fpr);
    if (metric == "fnr")
        return opt(r.rates.fnr);
    if (metric == "dr")
        return opt(r.rates.dr);
    if (metric == "control_msg_count")
        return static_cast<double>(r.control_msg_count);
    throw ContractViolation("unknown metric '" + metric + "'");
}

inline const std::vector<std::string>& summary_metrics()
{
    static const std::vector<std::string> m{"pdr", "plr", "pooled_pdr", "fpr", "fnr", "dr", "control_msg_count"};
    return m;
}

using CellKey = std::tuple<bool, double, std::size_t>; // defense, malicious, antibodies

inline std::map<CellKey, std::vector<const RunResult*>> group_cells(const std::vector<RunResult>& rows)
{
    std::map<CellKey, std::vector<const RunResult*>> g;
    for (const auto& r : rows)
        g[{r.spec.defense, r.malicious, r.spec.antibodies}].push_back(&r);
    return g;
}

inline MeanStd cell_stat(const std::vector<const RunResult*>& runs, const std::string& metric)
{
    std::vector<double> xs;
    for (const auto* r : runs)
        xs.push_back(metric_value(*r, metric));
    return mean_std(xs);
}

inline void write_csv(std::ostream& os, const std::vector<RunResult>& rows)
{
    os << csv_header() << '\n';
    for (const auto& r : rows)
        os << csv_row(r) << '\n';
}

/// Mean and standard deviation of each metric per (defense, malicious, antibodies) cell.
inline void write_summary(std::ostream& os, const std::vector<RunResult>& rows)
{
    os << "defense,malicious,antibodies,runs";
    for (const auto& m : summary_metrics())
        os << ',' << m << "_mean," << m << "_std";
    os << '\n';
    for (const auto& [key, runs] : group_cells(rows))
    {
        const auto& [def, mal, ab] = key;
        os << (def ? "on" : "off") << ',' << detail::fmt(mal) << ',' << ab << ',' << runs.size();
        for (const auto& m : summary_metrics())
        {
            const MeanStd s = cell_stat(runs, m);
            os << ',' << detail::fmt(s.mean) << ',' << detail::fmt(s.stddev);
        }
        os << '\n';
    }
}

/// One whitespace-separated file per metric: x followed by one mean column
/// per defense mode. x is the antibody count when that axis varies, else the
/// malicious percentage.
inline std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& stem,
                                                          const std::vector<RunResult>& rows)
{
    std::set<std::size_t> abs;
    std::set<double> mals;
    for (const auto& r : rows)
    {
        abs.insert(r.spec.antibodies);
        mals.insert(r.malicious);
    }
    const bool by_antibodies = abs.size() > 1 || mals.size() <= 1;
    const auto groups = group_cells(rows);
    std::vector<std::filesystem::path> written;
    for (const auto& metric : summary_metrics())
    {
        std::map<double, std::map<bool, std::vector<const RunResult*>>> series;
        for (const auto& [key, runs] : groups)
        {
            const auto& [def, mal, ab] = key;
            const double x = by_antibodies ? static_cast<double>(ab) : mal;
            auto& bucket = series[x][def];
            bucket.insert(bucket.end(), runs.begin(), runs.end());
        }
        std::filesystem::path p = stem;
        p += "_" + metric + ".dat";
        std::ofstream out(p);
        if (!out)
            throw Error("cannot write plot data '" + p.string() + "'");
        out << "# " << (by_antibodies ? "antibodies" : "malicious") << " defense_on defense_off\n";
        for (const auto& [x, modes] : series)
        {
            out << detail::fmt(x);
            for (bool def : {true, false})
            {
                auto it = modes.find(def);
                out << ' ' << (it == modes.end() ? "NA" : detail::fmt(cell_stat(it->second, metric).mean));
            }
            out << '\n';
        }
        if (!out)
            throw Error("write failure on '" + p.string() + "'");
        written.push_back(p);
    }
    return written;
}

} // namespace aspuavn
