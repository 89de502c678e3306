#pragma once

// Flat key = value configuration files. '#' starts a comment; unknown keys are errors.

#include "capflow/errors.hpp"
#include "capflow/model_config.hpp"
#include "capflow/simulation.hpp"
#include "capflow/stochastics.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace capflow {

struct Config {
    ModelParams params;
    ShockMoments shocks;
    SimulationOptions sim;
};

inline Config baseline_config() { return {}; }

namespace detail {
inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw Error(Errc::ConfigParse, "bad number for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

inline int parse_int(std::string_view key, std::string_view v) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw Error(Errc::ConfigParse, "bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw Error(Errc::ConfigParse, "bad boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

using Setter = std::function<void(Config&, std::string_view key, std::string_view value)>;
using Getter = std::function<double(const Config&)>;

struct KeyEntry {
    Setter set;
    Getter get;  // empty for non-numeric keys
};

inline const std::map<std::string, KeyEntry, std::less<>>& setters() {
    static const std::map<std::string, KeyEntry, std::less<>> table = [] {
        std::map<std::string, KeyEntry, std::less<>> m;
        auto dbl = [&](const char* k, auto member) {
            m[k] = {[member](Config& c, std::string_view key, std::string_view v) {
                        member(c) = parse_double(key, v);
                    },
                    [member](const Config& c) { return double(member(const_cast<Config&>(c))); }};
        };
        auto integer = [&](const char* k, auto member) {
            m[k] = {[member](Config& c, std::string_view key, std::string_view v) {
                        member(c) = parse_int(key, v);
                    },
                    [member](const Config& c) { return double(member(const_cast<Config&>(c))); }};
        };
        dbl("B_D", [](Config& c) -> double& { return c.params.B_D; });
        dbl("B_U", [](Config& c) -> double& { return c.params.B_U; });
        dbl("gamma", [](Config& c) -> double& { return c.params.gamma; });
        dbl("beta", [](Config& c) -> double& { return c.params.beta; });
        integer("m_D", [](Config& c) -> int& { return c.params.m_D; });
        integer("m_U", [](Config& c) -> int& { return c.params.m_U; });
        dbl("K_D", [](Config& c) -> double& { return c.params.K_D; });
        dbl("K_U", [](Config& c) -> double& { return c.params.K_U; });
        dbl("R_D", [](Config& c) -> double& { return c.params.R_D; });
        dbl("r_D", [](Config& c) -> double& { return c.params.r_D; });
        dbl("R_U", [](Config& c) -> double& { return c.params.R_U; });
        dbl("r_U", [](Config& c) -> double& { return c.params.r_U; });
        dbl("R0_star", [](Config& c) -> double& { return c.params.R0_star; });
        dbl("e0", [](Config& c) -> double& { return c.params.e0; });
        dbl("F0", [](Config& c) -> double& { return c.params.F0; });
        dbl("G0", [](Config& c) -> double& { return c.params.G0; });
        integer("horizon", [](Config& c) -> int& { return c.params.horizon; });
        dbl("eps_mean", [](Config& c) -> double& { return c.shocks.eps_mean; });
        dbl("eps_var", [](Config& c) -> double& { return c.shocks.eps_var; });
        dbl("eta_mean", [](Config& c) -> double& { return c.shocks.eta_mean; });
        dbl("eta_var", [](Config& c) -> double& { return c.shocks.eta_var; });
        dbl("e_ratio_mean", [](Config& c) -> double& { return c.shocks.e_ratio_mean; });
        dbl("e_ratio_var", [](Config& c) -> double& { return c.shocks.e_ratio_var; });
        dbl("N0_lo", [](Config& c) -> double& { return c.shocks.N0_lo; });
        dbl("N0_hi", [](Config& c) -> double& { return c.shocks.N0_hi; });
        dbl("N1_lo", [](Config& c) -> double& { return c.shocks.N1_lo; });
        dbl("N1_hi", [](Config& c) -> double& { return c.shocks.N1_hi; });
        m["mode"].set = [](Config& c, std::string_view key, std::string_view v) {
            if (v == "deterministic-mean") c.sim.mode = RealizationMode::DeterministicMean;
            else if (v == "sampled") c.sim.mode = RealizationMode::Sampled;
            else throw Error(Errc::ConfigParse, "bad value for " + std::string(key) + ": '" + std::string(v) + "'");
        };
        m["e_ratio_source"].set = [](Config& c, std::string_view key, std::string_view v) {
            if (v == "static") c.sim.e_ratio_source = ERatioSource::Static;
            else if (v == "realized") c.sim.e_ratio_source = ERatioSource::Realized;
            else throw Error(Errc::ConfigParse, "bad value for " + std::string(key) + ": '" + std::string(v) + "'");
        };
        m["allow_negative_borrower_funds"].set = [](Config& c, std::string_view key, std::string_view v) {
            c.sim.allow_negative_borrower_funds = parse_bool(key, v);
        };
        return m;
    }();
    return table;
}
} // namespace detail

/// Sets one key; throws ConfigParse for unknown keys or malformed values.
inline void apply_override(Config& cfg, std::string_view key, std::string_view value) {
    key = detail::trim(key);
    value = detail::trim(value);
    const auto& table = detail::setters();
    auto it = table.find(key);
    if (it == table.end()) throw Error(Errc::ConfigParse, "unknown key '" + std::string(key) + "'");
    it->second.set(cfg, key, value);
}

/// Numeric value of a parameter key; throws ConfigParse for unknown or non-numeric keys.
inline double config_value(const Config& cfg, std::string_view key) {
    const auto& table = detail::setters();
    auto it = table.find(key);
    if (it == table.end() || !it->second.get)
        throw Error(Errc::ConfigParse, "no numeric parameter '" + std::string(key) + "'");
    return it->second.get(cfg);
}

/// Applies "key=value".
inline void apply_override(Config& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw Error(Errc::ConfigParse, "expected key=value, got '" + std::string(assignment) + "'");
    apply_override(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

inline Config parse_config(std::istream& in, Config cfg = baseline_config()) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v = line;
        if (auto h = v.find('#'); h != std::string_view::npos) v = v.substr(0, h);
        v = detail::trim(v);
        if (v.empty()) continue;
        try {
            apply_override(cfg, v);
        } catch (const Error& e) {
            throw Error(Errc::ConfigParse, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(Errc::ConfigParse, "cannot open config '" + path + "'");
    return parse_config(f);
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : detail::setters()) keys.push_back(k);
    return keys;
}

} // namespace capflow
