#include "capflow/capflow.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace capflow;

namespace {

constexpr int kExitFeasibility = 2;
constexpr int kExitSolver = 3;

Config load(const std::string& path) { return path.empty() ? baseline_config() : load_config(path); }

void print_report(std::ostream& os, const FeasibilityReport& rep) {
    os << "rate bracket: (" << format_double(rep.rate_bracket.lo) << ", "
       << format_double(rep.rate_bracket.hi) << ")\n";
    for (const auto& c : rep.checks) {
        os << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(26) << c.name
           << " value=" << format_double(c.value) << " lo=" << format_double(c.lo)
           << " hi=" << format_double(c.hi) << "  " << c.note << '\n';
    }
    os << (rep.all_passed() ? "feasible\n" : "infeasible\n");
}

bool preflight(const Config& cfg) {
    check_invariants(cfg.params, cfg.shocks);
    const auto rep = validate(cfg.params, cfg.shocks);
    if (rep.all_passed()) return true;
    print_report(std::cerr, rep);
    return false;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::InvalidParameter, "cannot write " + p.string());
    return f;
}

void write_summary_csv(std::ostream& os, const ComparativeRun& r, const Preset* preset) {
    write_csv_row(os, {"variable", "baseline_mean", "baseline_sd", "baseline_cv", "scenario_mean",
                       "scenario_sd", "scenario_cv", "pct_change", "rate_of_change", "elasticity",
                       "expected_pct_lo", "expected_pct_hi"});
    auto row = [&](const char* name, const Stat& a, const Stat& b, const Effect& ef,
                   const Range* expected) {
        write_csv_row(os, {name, format_double(a.mean), format_double(a.sd), format_double(a.cv),
                           format_double(b.mean), format_double(b.sd), format_double(b.cv),
                           format_double(ef.pct_change), format_double(ef.rate_of_change),
                           format_double(ef.elasticity),
                           expected ? format_double(expected->lo) : "",
                           expected ? format_double(expected->hi) : ""});
    };
    Range e_range{-1, 1};
    if (preset) e_range = {-preset->e_pct_abs_max, preset->e_pct_abs_max};
    row("R_star", r.baseline.R_star, r.scenario.R_star, r.effects.R_star, preset ? &preset->R_star_pct : nullptr);
    row("e", r.baseline.e, r.scenario.e, r.effects.e, preset ? &e_range : nullptr);
    row("inflow", r.baseline.inflow, r.scenario.inflow, r.effects.inflow, preset ? &preset->inflow_pct : nullptr);
}

void write_diff_csv(std::ostream& os, const std::vector<DifferenceRow>& d) {
    write_csv_row(os, {"t", "R_star", "e", "inflow", "mu", "lambda"});
    for (const auto& r : d)
        write_csv_row(os, {std::to_string(r.t), format_double(r.R_star), format_double(r.e),
                           format_double(r.inflow), format_double(r.mu), format_double(r.lambda)});
}

void write_compare_plot(std::ostream& os) {
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 900,500\n"
       << "set xlabel 't'\n";
    const char* cols[][2] = {{"R_star", "2"}, {"e", "3"}, {"inflow", "6"}};
    for (auto& c : cols) {
        os << "set output '" << c[0] << ".png'\n"
           << "set ylabel '" << c[0] << "'\n"
           << "plot 'baseline.csv' using 1:" << c[1] << " with lines title 'baseline', \\\n"
           << "     'scenario.csv' using 1:" << c[1] << " with lines title 'scenario'\n";
    }
    os << "set output 'diff.png'\n"
       << "set ylabel 'scenario - baseline'\n"
       << "plot 'diff.csv' using 1:3 with lines title 'e', 'diff.csv' using 1:4 with lines title 'inflow'\n";
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(first + i);
    return out;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(detail::parse_double("--values", detail::trim(item)));
    if (out.empty()) throw Error(Errc::ConfigParse, "--values is empty");
    return out;
}

void print_coeffs(std::ostream& os, const ModelParams& p, const ShockMoments& s, double R) {
    os << std::setprecision(12);
    os << "R_star = " << R << "\n";
    const auto br = rate_bracket_unchecked(p, s);
    os << "rate bracket = (" << br.lo << ", " << br.hi << ")\n";
    os << "lender concavity threshold = " << lender_concavity_threshold(p, s) << "\n\n";

    const auto q = lender_quadratic(p, s, R);
    os << "lender: Z = " << q.Z << "  A = " << q.A << "  E = " << q.E << "  T = " << q.T
       << "  P = " << q.P << "\n";
    os << "  quadratic q0 q1 q2 = " << q.coeffs[0] << " " << q.coeffs[1] << " " << q.coeffs[2] << "\n";
    os << "  roots =";
    for (double r : poly::quadratic_real_roots(q.coeffs)) os << ' ' << r;
    os << "\n";
    try {
        const auto k = solve_lender(p, s, R);
        os << "  c = " << k.c << "  L = " << k.L << "  b = " << k.b << "  mu_denom = " << k.mu_denom
           << "  B_D L = " << p.B_D * k.L << "  carry = " << k.carry << "\n";
    } catch (const Error& e) {
        os << "  " << e.describe() << "\n";
    }

    const auto cub = borrower_cubic(p, s, R);
    os << "\nborrower: A = " << cub.A << "  H = " << cub.H << "  P = " << cub.P << "  Qv = " << cub.Qv
       << "  Qe = " << cub.Qe << "\n";
    os << "  cubic a0 a1 a2 a3 = " << cub.coeffs[0] << " " << cub.coeffs[1] << " " << cub.coeffs[2]
       << " " << cub.coeffs[3] << "\n";
    os << "  roots =";
    for (double r : poly::cubic_real_roots(cub.coeffs)) os << ' ' << r;
    os << "\n";
    try {
        const auto k = solve_borrower(p, s, R);
        os << "  z = " << k.z << "  J = " << k.J << "  y = " << k.y << "  lambda_denom = " << k.lambda_denom
           << "  B_U J = " << p.B_U * k.J << "  carry = " << k.carry << "\n";
    } catch (const Error& e) {
        os << "  " << e.describe() << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-country bank portfolio and capital-flow simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    int horizon = -1;
    std::string mode;
    std::string out_dir;
    bool want_trace = false, want_draws = false;

    auto* sim = app.add_subcommand("simulate", "run one simulation and write CSV output");
    sim->add_option("--config", config_path, "config file (default: built-in baseline)");
    sim->add_option("--seed", seed, "64-bit seed");
    sim->add_option("--horizon", horizon, "number of periods");
    sim->add_option("--mode", mode, "shock realization")->check(CLI::IsMember({"sampled", "deterministic-mean"}));
    sim->add_option("--out", out_dir, "output directory")->required();
    sim->add_flag("--trace", want_trace, "also write the fixed-point iteration trace");
    sim->add_flag("--draws", want_draws, "also write the realized shock draws");

    auto* val = app.add_subcommand("validate", "print the feasibility report");
    val->add_option("--config", config_path, "config file");

    std::string preset_name;
    std::vector<std::string> overrides;
    bool log_elasticity = false;
    auto* cmp = app.add_subcommand("compare", "paired baseline/scenario run");
    cmp->add_option("--config", config_path, "baseline config file");
    cmp->add_option("--preset", preset_name, "named experiment");
    cmp->add_option("--override", overrides, "scenario override key=value (repeatable)");
    cmp->add_option("--seed", seed, "64-bit seed");
    cmp->add_option("--horizon", horizon, "number of periods");
    cmp->add_option("--out", out_dir, "output directory")->required();
    cmp->add_flag("--log-elasticity", log_elasticity, "log-difference instead of arc elasticity");

    std::string sweep_param, sweep_values;
    int n_seeds = 1;
    auto* swp = app.add_subcommand("sweep", "summary table over parameter values");
    swp->add_option("--config", config_path, "config file");
    swp->add_option("--param", sweep_param, "parameter key")->required();
    swp->add_option("--values", sweep_values, "comma-separated values")->required();
    swp->add_option("--seed", seed, "first seed");
    swp->add_option("--seeds", n_seeds, "number of consecutive seeds averaged")->check(CLI::PositiveNumber);
    swp->add_option("--horizon", horizon, "number of periods");

    double rate = NAN;
    auto* cof = app.add_subcommand("coeffs", "print the value-function coefficient assembly");
    cof->add_option("--config", config_path, "config file");
    cof->add_option("--rate", rate, "international rate R* (default: R0_star)");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = load(config_path);
        if (horizon >= 0) cfg.params.horizon = horizon;
        if (!mode.empty()) apply_override(cfg, "mode", mode);

        if (*val) {
            check_invariants(cfg.params, cfg.shocks);
            const auto rep = validate(cfg.params, cfg.shocks);
            print_report(std::cout, rep);
            return rep.all_passed() ? 0 : kExitFeasibility;
        }

        if (*cof) {
            check_invariants(cfg.params, cfg.shocks);
            print_coeffs(std::cout, cfg.params, cfg.shocks, std::isnan(rate) ? cfg.params.R0_star : rate);
            return 0;
        }

        if (*sim) {
            if (!preflight(cfg)) return kExitFeasibility;
            SimulationOptions opt = cfg.sim;
            opt.record_trace = want_trace;
            const auto series = run(cfg.params, cfg.shocks, seed, opt);
            fs::create_directories(out_dir);
            auto f = open_out(fs::path(out_dir) / "series.csv");
            write_series_csv(f, series);
            auto g = open_out(fs::path(out_dir) / "plot.gp");
            write_plot_script(g, "series.csv", "");
            if (want_draws) {
                auto d = open_out(fs::path(out_dir) / "draws.csv");
                write_draws_csv(d, series);
            }
            if (want_trace) {
                auto t = open_out(fs::path(out_dir) / "trace.csv");
                write_trace_csv(t, series);
            }
            if (!series.empty()) {
                const auto sm = summarize(series);
                std::cout << "periods " << series.size() << "  mean R* " << format_double(sm.R_star.mean)
                          << "  mean e " << format_double(sm.e.mean) << "  mean inflow "
                          << format_double(sm.inflow.mean) << '\n';
            }
            return 0;
        }

        if (*cmp) {
            const Preset* preset = nullptr;
            Overrides ov;
            std::string name = "custom";
            if (!preset_name.empty()) {
                preset = find_preset(preset_name);
                if (!preset) throw Error(Errc::ConfigParse, "unknown preset '" + preset_name + "'");
                ov = preset->overrides;
                name = preset->name;
            }
            for (const auto& o : overrides) {
                const auto eq = o.find('=');
                if (eq == std::string::npos) throw Error(Errc::ConfigParse, "expected key=value, got '" + o + "'");
                ov.emplace_back(o.substr(0, eq), o.substr(eq + 1));
            }
            if (ov.empty()) throw Error(Errc::ConfigParse, "compare needs --preset or --override");
            if (!preflight(cfg) || !preflight(apply_overrides(cfg, ov))) return kExitFeasibility;
            const auto r = comparative(name, cfg, ov, seed,
                                       log_elasticity ? ElasticityKind::LogDifference : ElasticityKind::Arc);
            fs::create_directories(out_dir);
            const fs::path dir(out_dir);
            {
                auto f = open_out(dir / "baseline.csv");
                write_series_csv(f, r.baseline_series);
            }
            {
                auto f = open_out(dir / "scenario.csv");
                write_series_csv(f, r.scenario_series);
            }
            {
                auto f = open_out(dir / "diff.csv");
                write_diff_csv(f, r.differences);
            }
            {
                auto f = open_out(dir / "summary.csv");
                write_summary_csv(f, r, preset);
            }
            {
                auto f = open_out(dir / "plot.gp");
                write_compare_plot(f);
            }
            std::cout << name << ": inflow " << format_double(r.effects.inflow.pct_change) << "%  R* "
                      << format_double(r.effects.R_star.pct_change) << "%  e "
                      << format_double(r.effects.e.pct_change) << "%\n";
            return 0;
        }

        if (*swp) {
            if (!preflight(cfg)) return kExitFeasibility;
            const auto values = parse_values(sweep_values);
            const auto rows = sweep(cfg, sweep_param, values, seed_range(seed, n_seeds));
            write_csv_row(std::cout, {sweep_param, "mean_R_star", "sd_R_star", "mean_e", "sd_e", "cv_e",
                                      "mean_inflow", "sd_inflow"});
            for (const auto& r : rows)
                write_csv_row(std::cout, {format_double(r.value), format_double(r.summary.R_star.mean),
                                          format_double(r.summary.R_star.sd), format_double(r.summary.e.mean),
                                          format_double(r.summary.e.sd), format_double(r.summary.e.cv),
                                          format_double(r.summary.inflow.mean),
                                          format_double(r.summary.inflow.sd)});
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.describe() << '\n';
        if (e.code() == Errc::ConfigParse || e.code() == Errc::InvalidParameter) return 1;
        return e.is_feasibility() ? kExitFeasibility : kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
