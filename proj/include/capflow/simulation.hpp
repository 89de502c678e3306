#pragma once

// Fund evolution and the multi-period simulation driver, plus CSV and plot output.

#include "capflow/equilibrium.hpp"
#include "capflow/errors.hpp"
#include "capflow/model_config.hpp"
#include "capflow/policy.hpp"
#include "capflow/stochastics.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <future>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace capflow {

enum class ERatioSource { Static, Realized };

struct SimulationOptions {
    RealizationMode mode = RealizationMode::DeterministicMean;
    ERatioSource e_ratio_source = ERatioSource::Static;
    bool allow_negative_borrower_funds = true;
    bool record_trace = false;
};

inline double evolve_lender_funds(double F_prev, double mu_prev, double R_prev_star,
                                  double eps, const ModelParams& p) {
    const double F = F_prev * ((1 - mu_prev) * (1 + p.R_D) + mu_prev * (1 + R_prev_star) * eps) -
                     (1 + p.r_D) * p.K_D + p.K_D;
    if (!(F > 0))
        throw Error(Errc::NonPositiveFunds, "lender funds F = " + std::to_string(F));
    return F;
}

inline double evolve_borrower_funds(double G_prev, double lambda_prev, double R_prev_star,
                                    double eta, double e_ratio, const ModelParams& p,
                                    bool strict = true) {
    const double G = eta * (1 + p.R_U) * G_prev -
                     p.K_U * ((1 - lambda_prev) * (1 + p.r_U) + lambda_prev * (1 + R_prev_star) * e_ratio) +
                     p.K_U;
    if (!std::isfinite(G) || (strict && !(G > 0)))
        throw Error(Errc::NonPositiveFunds, "borrower funds G = " + std::to_string(G));
    return G;
}

struct SeriesRow {
    int t = 0;
    double R_star = 0;
    double e = 0;
    double mu = 0;
    double lambda = 0;
    double inflow = 0;
    double F = 0;
    double G = 0;
    double N0 = 0;
    double N1 = 0;
    double eps = 0;
    double eta = 0;
    int iterations = 0;
};

struct TraceRow {
    int t = 0;
    IterationRecord rec;
};

struct SimulationSeries {
    std::vector<SeriesRow> rows;
    std::uint64_t trade_fingerprint = 0;
    std::vector<TraceRow> trace;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    template <class Fn>
    std::vector<double> column(Fn fn) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(fn(r));
        return out;
    }
};

/// Period-0 fractions from (R0*, F0, G0), projected onto [0,1].
inline std::pair<double, double> bootstrap_fractions(const ModelParams& p, const ShockMoments& s) {
    const auto in = make_policy_inputs(p, s, p.R0_star, p.F0, p.G0);
    return {project_unit(mu_star_raw(p, in)), project_unit(lambda_star_raw(p, s, in))};
}

inline SimulationSeries run(const ModelParams& p, const ShockMoments& s, std::uint64_t seed,
                            const SimulationOptions& opt = {}) {
    check_invariants(p, s);
    SimulationSeries out;
    ShockStreams streams(seed, s, opt.mode);

    int t = 0;
    try {
        auto [mu, lambda] = bootstrap_fractions(p, s);
        double F = p.F0, G = p.G0, R = p.R0_star, e = p.e0, e_before = 0;
        for (t = 1; t <= p.horizon; ++t) {
            const ShockDraw d = streams.draw_period();
            double ratio = s.e_ratio_mean;
            if (opt.e_ratio_source == ERatioSource::Realized && e_before > 0) ratio = e / e_before;
            F = evolve_lender_funds(F, mu, R, d.eps, p);
            G = evolve_borrower_funds(G, lambda, R, d.eta, ratio, p, !opt.allow_negative_borrower_funds);
            const auto st = PeriodState::make(p, F, G, e, R, lambda, mu);
            SolveOptions so;
            so.record_trace = opt.record_trace;
            auto sol = solve_period_traced(st, d, p, s, so);
            const auto& r = sol.result;
            for (const auto& rec : sol.trace) out.trace.push_back({t, rec});
            out.rows.push_back({t, r.R_star, r.e, r.mu, r.lambda, r.inflow, F, G, d.N0, d.N1,
                                d.eps, d.eta, r.iterations});
            e_before = e;
            e = r.e;
            R = r.R_star;
            mu = r.mu;
            lambda = r.lambda;
        }
    } catch (Error& err) {
        if (t > 0 && !err.period()) err.set_period(t);
        throw;
    }
    out.trade_fingerprint = streams.trade_fingerprint();
    return out;
}

/// Runs one simulation per seed concurrently; results in seed order.
inline std::vector<SimulationSeries> run_batch(const ModelParams& p, const ShockMoments& s,
                                               const std::vector<std::uint64_t>& seeds,
                                               const SimulationOptions& opt = {}) {
    std::vector<std::future<SimulationSeries>> jobs;
    jobs.reserve(seeds.size());
    for (auto seed : seeds)
        jobs.push_back(std::async(std::launch::async, [=] { return run(p, s, seed, opt); }));
    std::vector<SimulationSeries> out;
    out.reserve(seeds.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// RFC 4180 field quoting.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    q += '"';
    return q;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
    }
    os << "\r\n";
}

inline void write_series_csv(std::ostream& os, const SimulationSeries& s) {
    write_csv_row(os, {"t", "R_star", "e", "mu", "lambda", "inflow", "F", "G", "N0", "N1", "eps",
                       "eta", "iterations"});
    for (const auto& r : s.rows)
        write_csv_row(os, {std::to_string(r.t), format_double(r.R_star), format_double(r.e),
                           format_double(r.mu), format_double(r.lambda), format_double(r.inflow),
                           format_double(r.F), format_double(r.G), format_double(r.N0),
                           format_double(r.N1), format_double(r.eps), format_double(r.eta),
                           std::to_string(r.iterations)});
}

inline void write_draws_csv(std::ostream& os, const SimulationSeries& s) {
    write_csv_row(os, {"period", "eps", "eta", "N0", "N1"});
    for (const auto& r : s.rows)
        write_csv_row(os, {std::to_string(r.t), format_double(r.eps), format_double(r.eta),
                           format_double(r.N0), format_double(r.N1)});
}

inline void write_trace_csv(std::ostream& os, const SimulationSeries& s) {
    write_csv_row(os, {"t", "iteration", "lambda", "e", "R_star", "L1", "L2"});
    for (const auto& tr : s.trace)
        write_csv_row(os, {std::to_string(tr.t), std::to_string(tr.rec.iteration),
                           format_double(tr.rec.lambda), format_double(tr.rec.e),
                           format_double(tr.rec.R_star), format_double(tr.rec.L1),
                           format_double(tr.rec.L2)});
}

/// Gnuplot script drawing R*, e and inflow against t from a series CSV.
inline void write_plot_script(std::ostream& os, std::string_view csv_name,
                              std::string_view png_prefix) {
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 900,500\n"
       << "set xlabel 't'\n";
    const char* cols[][2] = {{"R_star", "2"}, {"e", "3"}, {"inflow", "6"}};
    for (auto& c : cols) {
        os << "set output '" << png_prefix << c[0] << ".png'\n"
           << "set ylabel '" << c[0] << "'\n"
           << "plot '" << csv_name << "' using 1:" << c[1] << " with linespoints\n";
    }
}

} // namespace capflow
