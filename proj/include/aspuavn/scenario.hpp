#pragma once

// Scenario configuration: presets, INI / JSON loading and validation.
//
// Both encodings share one schema of `section.key` settings:
//
//   [scenario]  id, node_count, sim_time, seeds, warmup
//   [topology]  x, y, z, range, hop_delay, k_routes
//   [mobility]  mobile, speed, mean_straight, mean_turn, radius_min, radius_max
//   [attack]    malicious, kinds, sf_drop_probability
//   [defense]   enabled, antibodies, detector_radius, alpha, n_test,
//               intervals, probe_timeout, discovery_timeout
//   [traffic]   packets_per_session, packet_interval, session_gap
//   [output]    packet_trace
//
// List values (seeds, kinds, antibodies) are comma separated in INI and
// arrays in JSON.

#include "adversary.hpp"
#include "engine.hpp"
#include "network.hpp"
#include "protocol.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace aspuavn
{

struct ScenarioConfig
{
    std::string id = "custom";
    std::size_t node_count = 50;
    Vec3 extent{500.0, 500.0, 100.0};
    double sim_time = 100.0;
    double warmup = 15.0; // attack-free self-set collection window
    std::vector<std::uint64_t> seeds{1};

    double range = 30.0;
    double hop_delay = 0.005;
    std::size_t k_routes = kDefaultCandidateRoutes;

    bool mobile = true;
    double speed = 180.0;
    double mean_straight = 3.0;
    double mean_turn = 3.0;
    double radius_min = 100.0;
    double radius_max = 500.0;

    double malicious = 0.0; // percent
    std::set<AttackType> kinds{AttackType::SelectiveForwarding};
    double sf_drop_probability = 1.0;

    bool defense = true;
    std::vector<std::size_t> antibodies{200};
    double detector_radius = 0.15;
    double alpha = 0.5;
    std::uint32_t n_test = 10;
    std::uint32_t intervals = 4;
    double probe_timeout = 0.2;
    double discovery_timeout = 0.2;

    std::size_t packets_per_session = 50;
    double packet_interval = 0.02;
    double session_gap = 0.5;

    bool packet_trace = true;

    void validate() const
    {
        if (id.empty())
            throw ConfigError("scenario.id", "must not be empty");
        if (node_count < 2)
            throw ConfigError("scenario.node_count", "needs at least two UAVs");
        if (!(sim_time > 0.0))
            throw ConfigError("scenario.sim_time", "must be positive");
        if (!(warmup >= 0.0 && warmup < sim_time))
            throw ConfigError("scenario.warmup", "must lie in [0, sim_time)");
        if (seeds.empty())
            throw ConfigError("scenario.seeds", "at least one seed is required");
        if (!(extent.x > 0.0))
            throw ConfigError("topology.x", "must be positive");
        if (!(extent.y > 0.0))
            throw ConfigError("topology.y", "must be positive");
        if (!(extent.z > 0.0))
            throw ConfigError("topology.z", "must be positive");
        if (!(range > 0.0))
            throw ConfigError("topology.range", "must be positive");
        if (!(hop_delay > 0.0))
            throw ConfigError("topology.hop_delay", "must be positive");
        if (k_routes == 0)
            throw ConfigError("topology.k_routes", "must be at least 1");
        if (!(speed > 0.0))
            throw ConfigError("mobility.speed", "must be positive");
        if (!(mean_straight > 0.0))
            throw ConfigError("mobility.mean_straight", "must be positive");
        if (!(mean_turn > 0.0))
            throw ConfigError("mobility.mean_turn", "must be positive");
        if (!(radius_min > 0.0 && radius_max >= radius_min))
            throw ConfigError("mobility.radius_min", "need 0 < radius_min <= radius_max");
        if (!(malicious >= 0.0 && malicious < 100.0))
            throw ConfigError("attack.malicious", "must lie in [0, 100)");
        if (malicious > 0.0 && kinds.empty())
            throw ConfigError("attack.kinds", "malicious UAVs requested but no attack kind given");
        if (!(sf_drop_probability >= 0.0 && sf_drop_probability <= 1.0))
            throw ConfigError("attack.sf_drop_probability", "must lie in [0, 1]");
        if (antibodies.empty())
            throw ConfigError("defense.antibodies", "at least one antibody count is required");
        for (auto a : antibodies)
        {
            if (defense && a == 0)
                throw ConfigError("defense.antibodies", "must be at least 1 when the defense is enabled");
        }
        if (!(detector_radius > 0.0))
            throw ConfigError("defense.detector_radius", "must be positive");
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw ConfigError("defense.alpha", "must lie in (0, 1]");
        if (n_test == 0)
            throw ConfigError("defense.n_test", "must be at least 1");
        if (intervals == 0)
            throw ConfigError("defense.intervals", "must be at least 1");
        if (!(probe_timeout > 0.0))
            throw ConfigError("defense.probe_timeout", "must be positive");
        if (!(discovery_timeout > 0.0))
            throw ConfigError("defense.discovery_timeout", "must be positive");
        if (packets_per_session == 0)
            throw ConfigError("traffic.packets_per_session", "must be at least 1");
        if (!(packet_interval > 0.0))
            throw ConfigError("traffic.packet_interval", "must be positive");
        if (!(session_gap >= 0.0))
            throw ConfigError("traffic.session_gap", "must be non-negative");
    }

    WorldConfig world() const
    {
        WorldConfig w;
        w.bounds = Box{{0.0, 0.0, 0.0}, extent};
        w.range = range;
        w.hop_delay = hop_delay;
        w.mobile = mobile;
        w.packet_trace = packet_trace;
        w.k_routes = k_routes;
        w.mobility.speed = speed;
        w.mobility.mean_straight = mean_straight;
        w.mobility.mean_turn = mean_turn;
        w.mobility.radius_min = radius_min;
        w.mobility.radius_max = radius_max;
        return w;
    }

    NetworkParams network() const
    {
        NetworkParams n;
        n.attack.malicious_fraction = malicious;
        n.attack.kinds_enabled = kinds;
        n.attack.sf_drop_probability = sf_drop_probability;
        n.discovery_timeout = discovery_timeout;
        n.probe_timeout = probe_timeout;
        return n;
    }

    ProtocolParams protocol(std::size_t antibody_count, bool defense_on) const
    {
        ProtocolParams p;
        p.defense = defense_on;
        p.antibodies = antibody_count;
        p.detector_radius = detector_radius;
        p.agents.alpha = alpha;
        p.agents.n_test = n_test;
        p.agents.intervals = intervals;
        p.kb.antigen_collection_time = warmup > 0.0 ? warmup : p.kb.antigen_collection_time;
        p.packets_per_session = packets_per_session;
        p.packet_interval = packet_interval;
        return p;
    }
};

inline std::string kinds_to_string(const std::set<AttackType>& kinds)
{
    std::string s;
    for (auto k : kinds)
    {
        if (!s.empty())
            s += '+';
        s += to_string(k);
    }
    return s.empty() ? "none" : s;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline ScenarioConfig paper_scenario(int n)
{
    ScenarioConfig c;
    c.id = "scenario" + std::to_string(n);
    c.node_count = 500;
    const double side = 1000.0 * n;
    c.extent = {side, side, 100.0};
    c.sim_time = 1000.0;
    c.range = 30.0;
    c.speed = 180.0;
    c.malicious = 5.0 * n;
    c.kinds = {AttackType::Wormhole, AttackType::SelectiveForwarding, AttackType::Sinkhole};
    c.antibodies = n == 4 ? std::vector<std::size_t>{50, 100, 150, 200, 250, 300, 350}
                          : std::vector<std::size_t>{200};
    c.seeds = {1, 2, 3, 4, 5};
    c.packet_trace = false;
    return c;
}

/// Laptop-scale preset: 50 UAVs in 500 x 500 x 100 m for 100 s at 18 m/s.
/// The radio range is widened so the sparser swarm still forms multi-hop paths.
inline ScenarioConfig desk_scenario()
{
    ScenarioConfig c;
    c.id = "desk";
    c.node_count = 50;
    c.extent = {500.0, 500.0, 100.0};
    c.sim_time = 100.0;
    c.range = 120.0;
    c.speed = 18.0;
    c.malicious = 20.0;
    c.kinds = {AttackType::SelectiveForwarding};
    c.antibodies = {50, 100, 200, 350};
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 20; ++s)
        c.seeds.push_back(s);
    return c;
}

inline ScenarioConfig preset(const std::string& name)
{
    if (name == "desk")
        return desk_scenario();
    for (int n = 1; n <= 4; ++n)
    {
        if (name == "scenario" + std::to_string(n))
            return paper_scenario(n);
    }
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

namespace detail
{
inline std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    double out = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
        throw ConfigError(key, "expected a number, got '" + v + "'");
    return out;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    return out;
}

inline bool to_bool(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    if (t == "true" || t == "on" || t == "yes" || t == "1")
        return true;
    if (t == "false" || t == "off" || t == "no" || t == "0")
        return false;
    throw ConfigError(key, "expected a boolean, got '" + v + "'");
}
} // namespace detail

/// Applies one `section.key = value` setting.
inline void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& value)
{
    using namespace detail;
    auto num = [&] { return to_double(key, value); };
    auto uint = [&] { return to_uint(key, value); };
    auto u32 = [&] {
        const auto v = uint();
        if (v > 0xffffffffull)
            throw ConfigError(key, "value too large");
        return static_cast<std::uint32_t>(v);
    };

    if (key == "scenario.id")
        c.id = trim(value);
    else if (key == "scenario.node_count")
        c.node_count = uint();
    else if (key == "scenario.sim_time")
        c.sim_time = num();
    else if (key == "scenario.warmup")
        c.warmup = num();
    else if (key == "scenario.seeds")
    {
        c.seeds.clear();
        for (const auto& s : split_list(value))
            c.seeds.push_back(to_uint(key, s));
    }
    else if (key == "topology.x")
        c.extent.x = num();
    else if (key == "topology.y")
        c.extent.y = num();
    else if (key == "topology.z")
        c.extent.z = num();
    else if (key == "topology.range")
        c.range = num();
    else if (key == "topology.hop_delay")
        c.hop_delay = num();
    else if (key == "topology.k_routes")
        c.k_routes = uint();
    else if (key == "mobility.mobile")
        c.mobile = to_bool(key, value);
    else if (key == "mobility.speed")
        c.speed = num();
    else if (key == "mobility.mean_straight")
        c.mean_straight = num();
    else if (key == "mobility.mean_turn")
        c.mean_turn = num();
    else if (key == "mobility.radius_min")
        c.radius_min = num();
    else if (key == "mobility.radius_max")
        c.radius_max = num();
    else if (key == "attack.malicious")
        c.malicious = num();
    else if (key == "attack.kinds")
    {
        c.kinds.clear();
        for (const auto& k : split_list(value))
        {
            if (k == "none")
                continue;
            try
            {
                c.kinds.insert(parse_attack_type(k));
            }
            catch (const ConfigError&)
            {
                throw ConfigError(key, "unknown attack kind '" + k + "'");
            }
        }
    }
    else if (key == "attack.sf_drop_probability")
        c.sf_drop_probability = num();
    else if (key == "defense.enabled")
        c.defense = to_bool(key, value);
    else if (key == "defense.antibodies")
    {
        c.antibodies.clear();
        for (const auto& s : split_list(value))
            c.antibodies.push_back(to_uint(key, s));
    }
    else if (key == "defense.detector_radius")
        c.detector_radius = num();
    else if (key == "defense.alpha")
        c.alpha = num();
    else if (key == "defense.n_test")
        c.n_test = u32();
    else if (key == "defense.intervals")
        c.intervals = u32();
    else if (key == "defense.probe_timeout")
        c.probe_timeout = num();
    else if (key == "defense.discovery_timeout")
        c.discovery_timeout = num();
    else if (key == "traffic.packets_per_session")
        c.packets_per_session = uint();
    else if (key == "traffic.packet_interval")
        c.packet_interval = num();
    else if (key == "traffic.session_gap")
        c.session_gap = num();
    else if (key == "output.packet_trace")
        c.packet_trace = to_bool(key, value);
    else
        throw ConfigError(key, "unknown setting");
}

/// A `base` key in the top-level / [scenario] section selects a preset to
/// start from; every other setting overrides it.
inline ScenarioConfig config_from_settings(const std::vector<std::pair<std::string, std::string>>& settings)
{
    ScenarioConfig c;
    for (const auto& [k, v] : settings)
    {
        if (k == "scenario.base" || k == "base")
            c = preset(detail::trim(v));
    }
    for (const auto& [k, v] : settings)
    {
        if (k != "scenario.base" && k != "base")
            apply_setting(c, k, v);
    }
    c.validate();
    return c;
}

inline ScenarioConfig parse_ini(std::istream& is)
{
    boost::property_tree::ptree tree;
    try
    {
        boost::property_tree::ini_parser::read_ini(is, tree);
    }
    catch (const boost::property_tree::ini_parser_error& e)
    {
        throw ConfigError("config", std::string("malformed INI: ") + e.what());
    }
    std::vector<std::pair<std::string, std::string>> settings;
    for (const auto& [section, body] : tree)
    {
        if (body.empty())
            settings.emplace_back(section, body.data());
        for (const auto& [key, leaf] : body)
            settings.emplace_back(section + "." + key, leaf.data());
    }
    return config_from_settings(settings);
}

inline ScenarioConfig parse_json(const std::string& text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config", "top level must be an object");
    auto scalar = [](const std::string& key, const nlohmann::json& v) -> std::string {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_boolean())
            return v.get<bool>() ? "true" : "false";
        if (v.is_number())
            return v.dump();
        throw ConfigError(key, "expected a scalar value");
    };
    std::vector<std::pair<std::string, std::string>> settings;
    for (const auto& [section, body] : j.items())
    {
        if (!body.is_object())
        {
            settings.emplace_back(section, scalar(section, body));
            continue;
        }
        for (const auto& [key, v] : body.items())
        {
            const std::string full = section + "." + key;
            if (v.is_array())
            {
                std::string joined;
                for (const auto& e : v)
                {
                    if (!joined.empty())
                        joined += ',';
                    joined += scalar(full, e);
                }
                settings.emplace_back(full, joined);
            }
            else
                settings.emplace_back(full, scalar(full, v));
        }
    }
    return config_from_settings(settings);
}

/// Loads a `.json` file as JSON and anything else as INI.
inline ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open '" + path.string() + "'");
    if (path.extension() == ".json")
    {
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_json(ss.str());
    }
    return parse_ini(in);
}

} // namespace aspuavn
