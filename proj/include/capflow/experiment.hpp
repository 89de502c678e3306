#pragma once

// Summary statistics, paired baseline/scenario comparisons, presets and sweeps.

#include "capflow/config.hpp"
#include "capflow/errors.hpp"
#include "capflow/simulation.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace capflow {

struct Stat {
    double mean = 0;
    double sd = 0;
    double cv = 0;
};

/// Mean, sample sd (divisor n-1) and cv. A single value has sd 0.
inline Stat describe(const std::vector<double>& xs) {
    if (xs.empty()) throw Error(Errc::EmptySeries, "cannot summarize an empty series");
    Stat s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean = sum / xs.size();
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (xs.size() - 1));
    }
    s.cv = s.mean != 0 ? s.sd / s.mean : 0.0;
    return s;
}

struct SeriesSummary {
    Stat R_star;
    Stat e;
    Stat inflow;
};

inline SeriesSummary summarize(const SimulationSeries& s) {
    if (s.empty()) throw Error(Errc::EmptySeries, "cannot summarize an empty series");
    return {describe(s.column([](const SeriesRow& r) { return r.R_star; })),
            describe(s.column([](const SeriesRow& r) { return r.e; })),
            describe(s.column([](const SeriesRow& r) { return r.inflow; }))};
}

struct DifferenceRow {
    int t = 0;
    double R_star = 0;
    double e = 0;
    double inflow = 0;
    double mu = 0;
    double lambda = 0;
};

/// Row-wise b - a.
inline std::vector<DifferenceRow> difference_series(const SimulationSeries& a,
                                                    const SimulationSeries& b) {
    if (a.size() != b.size())
        throw Error(Errc::LengthMismatch, "series lengths differ: " + std::to_string(a.size()) +
                                              " vs " + std::to_string(b.size()));
    std::vector<DifferenceRow> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto &x = a.rows[i], &y = b.rows[i];
        out.push_back({x.t, y.R_star - x.R_star, y.e - x.e, y.inflow - x.inflow, y.mu - x.mu,
                       y.lambda - x.lambda});
    }
    return out;
}

enum class ElasticityKind { Arc, LogDifference };

/// Change of one summary mean between baseline and scenario.
struct Effect {
    double base = 0;
    double scenario = 0;
    double pct_change = 0;
    double rate_of_change = 0;  // per unit of the changed parameter; NaN without one
    double elasticity = 0;      // NaN without a changed numeric parameter
};

inline Effect effect(double base, double scen, std::optional<std::pair<double, double>> param,
                     ElasticityKind kind) {
    Effect ef{base, scen, 100 * (scen - base) / base, NAN, NAN};
    if (param && param->second != param->first) {
        const auto [p0, p1] = *param;
        ef.rate_of_change = (scen - base) / (p1 - p0);
        if (kind == ElasticityKind::Arc)
            ef.elasticity = ((scen - base) / (0.5 * (scen + base))) / ((p1 - p0) / (0.5 * (p1 + p0)));
        else
            ef.elasticity = std::log(scen / base) / std::log(p1 / p0);
    }
    return ef;
}

struct ComparativeEffects {
    Effect R_star;
    Effect e;
    Effect inflow;
};

inline ComparativeEffects compare_means(const SeriesSummary& a, const SeriesSummary& b,
                                        std::optional<std::pair<double, double>> param,
                                        ElasticityKind kind) {
    return {effect(a.R_star.mean, b.R_star.mean, param, kind),
            effect(a.e.mean, b.e.mean, param, kind),
            effect(a.inflow.mean, b.inflow.mean, param, kind)};
}

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct ComparativeRun {
    std::string name;
    Overrides overrides;
    std::optional<std::pair<double, double>> param;  // (baseline, scenario) value of the first override
    SimulationSeries baseline_series;
    SimulationSeries scenario_series;
    SeriesSummary baseline;
    SeriesSummary scenario;
    std::vector<DifferenceRow> differences;
    ComparativeEffects effects;
};

inline Config apply_overrides(Config cfg, const Overrides& ov) {
    for (const auto& [k, v] : ov) apply_override(cfg, k, v);
    return cfg;
}

inline std::optional<std::pair<double, double>> changed_param(const Config& base,
                                                              const Config& scen,
                                                              const Overrides& ov) {
    if (ov.empty()) return std::nullopt;
    try {
        return std::pair{config_value(base, ov.front().first), config_value(scen, ov.front().first)};
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Runs baseline and scenario on the same seed. Both arms draw identical N0/N1.
inline ComparativeRun comparative(const std::string& name, const Config& base_cfg,
                                  const Overrides& overrides, std::uint64_t seed,
                                  ElasticityKind kind = ElasticityKind::Arc) {
    ComparativeRun out;
    out.name = name;
    out.overrides = overrides;
    const Config scen_cfg = apply_overrides(base_cfg, overrides);
    out.param = changed_param(base_cfg, scen_cfg, overrides);

    auto arm = [&](const Config& c, const char* label) {
        try {
            return run(c.params, c.shocks, seed, c.sim);
        } catch (Error& e) {
            e.add_context(label);
            throw;
        }
    };
    auto fb = std::async(std::launch::async, [&] { return arm(base_cfg, "baseline"); });
    out.scenario_series = arm(scen_cfg, "scenario");
    out.baseline_series = fb.get();
    if (out.baseline_series.trade_fingerprint != out.scenario_series.trade_fingerprint)
        throw Error(Errc::StreamMismatch, "baseline and scenario consumed different trade shocks");

    out.differences = difference_series(out.baseline_series, out.scenario_series);
    if (!out.baseline_series.empty()) {
        out.baseline = summarize(out.baseline_series);
        out.scenario = summarize(out.scenario_series);
        out.effects = compare_means(out.baseline, out.scenario, out.param, kind);
    }
    return out;
}

/// Comparative runs over many seeds; effects use cross-seed averages of the means.
struct MultiSeedComparison {
    std::vector<ComparativeRun> runs;
    SeriesSummary baseline_avg;  // mean fields averaged over seeds; sd/cv averaged too
    SeriesSummary scenario_avg;
    ComparativeEffects effects;
};

inline SeriesSummary average_summaries(const std::vector<SeriesSummary>& xs) {
    SeriesSummary avg;
    auto acc = [&](Stat& into, const Stat& s) {
        into.mean += s.mean / xs.size();
        into.sd += s.sd / xs.size();
        into.cv += s.cv / xs.size();
    };
    for (const auto& s : xs) {
        acc(avg.R_star, s.R_star);
        acc(avg.e, s.e);
        acc(avg.inflow, s.inflow);
    }
    return avg;
}

inline MultiSeedComparison comparative_seeds(const std::string& name, const Config& base_cfg,
                                             const Overrides& overrides,
                                             const std::vector<std::uint64_t>& seeds,
                                             ElasticityKind kind = ElasticityKind::Arc) {
    if (seeds.empty()) throw Error(Errc::EmptySeries, "no seeds given");
    MultiSeedComparison out;
    std::vector<std::future<ComparativeRun>> jobs;
    for (auto seed : seeds)
        jobs.push_back(std::async(std::launch::async,
                                  [&, seed] { return comparative(name, base_cfg, overrides, seed, kind); }));
    std::vector<SeriesSummary> bs, ss;
    for (auto& j : jobs) {
        out.runs.push_back(j.get());
        bs.push_back(out.runs.back().baseline);
        ss.push_back(out.runs.back().scenario);
    }
    out.baseline_avg = average_summaries(bs);
    out.scenario_avg = average_summaries(ss);
    out.effects = compare_means(out.baseline_avg, out.scenario_avg, out.runs.front().param, kind);
    return out;
}

/// Closed interval used for expected-range metadata.
struct Range {
    double lo = 0;
    double hi = 0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct Preset {
    std::string name;
    Overrides overrides;
    Range inflow_pct;      // expected percent change of mean inflow
    Range R_star_pct;      // expected percent change of mean R*
    double e_pct_abs_max;  // bound on |percent change| of mean e
    double reference_inflow_pct;
    double reference_R_star_pct;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"gamma-shock", {{"gamma", "15"}}, {-30, -5}, {5, 20}, 1.0, -16.12, 10.94},
        {"depreciation-shock", {{"e_ratio_mean", "0.98"}}, {-80, -50}, {-3, 0}, 1.0, -65.92, -0.76},
        {"productivity-shock", {{"eta_mean", "0.70"}}, {-45, -20}, {-2, 0}, 1.0, -33.10, -0.42},
    };
    return list;
}

inline const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

struct SweepRow {
    double value = 0;
    SeriesSummary summary;  // averaged over seeds
};

/// One summary per parameter value, averaged over the given seeds.
inline std::vector<SweepRow> sweep(const Config& base_cfg, const std::string& key,
                                   const std::vector<double>& values,
                                   const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw Error(Errc::EmptySeries, "no seeds given");
    std::vector<SweepRow> out;
    for (double v : values) {
        Config c = base_cfg;
        apply_override(c, key, format_double(v));
        std::vector<SeriesSummary> sums;
        try {
            for (const auto& s : run_batch(c.params, c.shocks, seeds, c.sim)) sums.push_back(summarize(s));
        } catch (Error& e) {
            e.add_context(key + "=" + format_double(v));
            throw;
        }
        out.push_back({v, average_summaries(sums)});
    }
    return out;
}

} // namespace capflow
