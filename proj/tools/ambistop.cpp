// Command-line front door: parse a problem spec, solve it, and optionally
// cross-check the analytic solution against Monte Carlo and finite-difference
// engines. Exit codes: 0 ok, 2 spec error, 3 solver error, 4 verification
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ambistop/core.hpp"
#include "ambistop/json_io.hpp"
#include "ambistop/mc.hpp"
#include "ambistop/pde.hpp"
#include "ambistop/solve.hpp"

namespace {

using ambistop::kInf;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : "-inf";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ambistop::SpecError("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json solution_summary(const ambistop::SolveOutcome& out) {
    json s;
    s["regime"] = ambistop::regime_name(out.sol.regime);
    s["c_star"] = finite_or_string(out.sol.c_star);
    s["thresholds"] = out.sol.thresholds;
    s["lambda_star"] = out.sol.lambda_star;
    json cont = json::array();
    for (const auto& [lo, hi] : out.continuation)
        cont.push_back({finite_or_string(lo), finite_or_string(hi)});
    s["continuation"] = cont;
    return s;
}

json base_report(const json& problem, const ambistop::SolveOutcome& out,
                 double elapsed_ms) {
    json rep;
    rep["schema"] = "1";
    rep["tool"] = "ambistop";
    rep["version"] = kToolVersion;
    rep["problem"] = problem;
    rep["solution"] = solution_summary(out);
    rep["timing_ms"] = elapsed_ms;
    return rep;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw ambistop::SpecError("cannot open output file: " + out_path);
    f << text << "\n";
}

// Plot range: the continuation set padded by 50% on each side, clipped to the
// payoff's domain.
std::pair<double, double> plot_range(const ambistop::SolveOutcome& out) {
    double lo = kInf, hi = -kInf;
    for (const auto& [a, b] : out.continuation) {
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    if (!std::isfinite(hi)) {
        lo = 0.0;
        hi = 10.0;
    }
    if (!std::isfinite(lo)) lo = out.radial ? 0.0 : hi - 10.0;
    double pad = 0.5 * (hi - lo);
    lo -= pad;
    hi += pad;
    if (out.radial && lo < 0.0) lo = 0.0;
    return {lo, hi};
}

std::string format_csv(const ambistop::io::ProblemSpec& ps,
                       const ambistop::SolveOutcome& out) {
    auto [lo, hi] = plot_range(out);
    std::ostringstream csv;
    csv.imbue(std::locale::classic());
    csv << "y,payoff,value,in_stopping_set\n";
    char buf[128];
    for (int i = 0; i < 2001; ++i) {
        double y = lo + (hi - lo) * i / 2000.0;
        double f = ps.payoff(y);
        double v = out.sol.value(y);
        bool stop = v <= f + 1e-9 * std::max(1.0, std::abs(f));
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%d\n", y, f, v,
                      stop ? 1 : 0);
        csv << buf;
    }
    return csv.str();
}

double reference_point(const ambistop::SolveOutcome& out) {
    for (const auto& [a, b] : out.continuation) {
        if (std::isfinite(a) && std::isfinite(b)) return 0.5 * (a + b);
        if (std::isfinite(b)) return out.radial ? 0.5 * b : b - 1.0;
    }
    return out.radial ? 1.0 : 0.0;
}

ambistop::mc::PriorStrategy worst_case_prior(const ambistop::Solution& sol) {
    using GK = ambistop::GeneratorDescriptor::Kind;
    using PS = ambistop::mc::PriorStrategy;
    switch (sol.generator.kind) {
        case GK::SignSwitchLinear:
            return PS::worst_case_linear(sol.generator.c);
        case GK::SignSwitchRadial:
            return PS::worst_case_radial(sol.generator.c);
        case GK::PeriodicSwitch:
            return PS::worst_case_periodic(sol.generator.c, sol.generator.period);
    }
    return PS::null();
}

int cmd_solve(const std::string& spec_path, const std::string& out_path,
              const std::string& format) {
    auto t0 = std::chrono::steady_clock::now();
    json problem = json::parse(read_file(spec_path));
    ambistop::io::ProblemSpec ps = ambistop::io::parse_problem(problem);
    ambistop::SolveOutcome out = ambistop::solve_problem(ps);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    if (format == "csv") {
        write_output(out_path, format_csv(ps, out));
        return 0;
    }
    write_output(out_path, base_report(problem, out, ms).dump(2));
    return 0;
}

int cmd_verify(const std::string& spec_path, bool use_mc, bool use_pde,
               long paths, int grid_n, std::uint64_t seed,
               const std::string& out_path) {
    auto t0 = std::chrono::steady_clock::now();
    json problem = json::parse(read_file(spec_path));
    ambistop::io::ProblemSpec ps = ambistop::io::parse_problem(problem);
    ambistop::SolveOutcome out = ambistop::solve_problem(ps);
    bool failed = false;

    json rep;
    if (use_mc) {
        double y0 = reference_point(out);
        ambistop::mc::SimConfig cfg;
        cfg.n_paths = paths;
        cfg.seed = seed;
        ambistop::mc::MCEstimate est = ambistop::mc::estimate_stopped_value(
            out.radial, ps.params, worst_case_prior(out.sol), y0, cfg,
            out.continuation, ps.payoff);
        double analytic = out.sol.value(y0);
        double gap = std::abs(est.mean - analytic);
        bool conclusive = paths >= 1000;
        bool pass = gap <= 3.0 * est.std_error + est.cap_bias_bound;
        json mcj;
        mcj["y0"] = y0;
        mcj["analytic"] = analytic;
        mcj["estimate"] = est.mean;
        mcj["std_error"] = est.std_error;
        mcj["fraction_stopped"] = est.fraction_stopped;
        mcj["cap_bias_bound"] = est.cap_bias_bound;
        if (!conclusive) {
            mcj["status"] = "warning";
            mcj["message"] =
                "standard error too large for a conclusive check (paths < 1000)";
        } else {
            mcj["status"] = pass ? "pass" : "fail";
            if (!pass) failed = true;
        }
        rep["mc"] = mcj;
    }
    if (use_pde) {
        auto [lo, hi] = plot_range(out);
        ambistop::pde::GridSolution gs;
        if (out.radial) {
            ambistop::pde::Grid1D g{std::max(lo, 1e-4), hi, grid_n};
            gs = ambistop::pde::solve_vi_radial(ps.params, ps.payoff, g);
        } else {
            ambistop::pde::Grid1D g{lo, hi, grid_n};
            gs = ambistop::pde::solve_vi_linear(ps.params, ps.payoff, g);
        }
        double h = gs.grid.h();
        json deltas = json::array();
        bool pass = gs.detected_thresholds.size() == out.sol.thresholds.size();
        if (pass) {
            for (std::size_t i = 0; i < out.sol.thresholds.size(); ++i) {
                double d = std::abs(gs.detected_thresholds[i] - out.sol.thresholds[i]);
                deltas.push_back(d);
                if (d > 2.0 * h) pass = false;
            }
        }
        json pj;
        pj["grid_n"] = grid_n;
        pj["h"] = h;
        pj["detected_thresholds"] = gs.detected_thresholds;
        pj["analytic_thresholds"] = out.sol.thresholds;
        pj["threshold_deltas"] = deltas;
        pj["status"] = pass ? "pass" : "fail";
        if (!pass) failed = true;
        rep["pde"] = pj;
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    json full = base_report(problem, out, ms);
    full["seed"] = seed;
    full["verification"] = rep;
    write_output(out_path, full.dump(2));
    return failed ? 4 : 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& param,
              const std::string& values_csv, const std::string& out_path) {
    if (param != "kappa" && param != "r" && param != "K" && param != "a_norm")
        throw ambistop::SpecError(
            "sweep parameter must be one of kappa, r, K, a_norm");
    json problem = json::parse(read_file(spec_path));
    ambistop::io::ProblemSpec base = ambistop::io::parse_problem(problem);
    if (param == "K" && base.payoff.kind() != ambistop::PayoffKind::Straddle)
        throw ambistop::SpecError("parameter K requires a straddle payoff");
    if (param == "a_norm" && base.radial)
        throw ambistop::SpecError("parameter a_norm requires the linear case");

    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ambistop::SpecError("invalid sweep value: " + tok);
        }
    }
    if (values.empty()) throw ambistop::SpecError("sweep values list is empty");

    ambistop::SolveOutcome base_out = ambistop::solve_problem(base);
    double y_ref = reference_point(base_out);

    struct Row {
        double v;
        std::string regime;
        std::vector<double> thresholds;
        double value;
    };
    std::vector<Row> rows;
    for (double v : values) {
        json pj = problem;
        if (param == "K")
            pj["payoff"]["K"] = v;
        else
            pj[param] = v;
        ambistop::io::ProblemSpec ps = ambistop::io::parse_problem(pj);
        ambistop::SolveOutcome o = ambistop::solve_problem(ps);
        rows.push_back({v, ambistop::regime_name(o.sol.regime), o.sol.thresholds,
                        o.sol.value(y_ref)});
    }

    std::string verdict = "n/a";
    if (param == "kappa") {
        bool mono = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].value > rows[i - 1].value + 1e-10 * std::abs(rows[i - 1].value))
                mono = false;
        verdict = mono ? "nonincreasing" : "violated";
    }

    std::ostringstream csv;
    csv.imbue(std::locale::classic());
    csv << param << ",regime,thresholds,value_y_ref,kappa_monotonicity\n";
    char buf[64];
    for (const Row& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g", row.v);
        csv << buf << "," << row.regime << ",";
        for (std::size_t i = 0; i < row.thresholds.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", row.thresholds[i]);
            csv << (i ? ";" : "") << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.12g", row.value);
        csv << "," << buf << "," << verdict << "\n";
    }
    std::string s = csv.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    write_output(out_path, s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust optimal stopping of multidimensional Brownian motion"};
    app.require_subcommand(1);

    std::string spec_path, out_path, format = "json";
    std::string param, values_csv;
    bool use_mc = false, use_pde = false;
    long paths = 100000;
    int grid_n = 4001;
    std::uint64_t seed = 0;

    CLI::App* solve = app.add_subcommand("solve", "solve a problem spec");
    solve->add_option("spec", spec_path, "problem spec (JSON)")->required();
    solve->add_option("--out", out_path, "output file (default stdout)");
    solve->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* verify = app.add_subcommand("verify", "cross-check a solution");
    verify->add_option("spec", spec_path, "problem spec (JSON)")->required();
    verify->add_flag("--mc", use_mc, "Monte Carlo check");
    verify->add_flag("--pde", use_pde, "finite-difference check");
    verify->add_option("--paths", paths, "Monte Carlo path count");
    verify->add_option("--grid", grid_n, "finite-difference grid size");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
    sweep->add_option("spec", spec_path, "problem spec (JSON)")->required();
    sweep->add_option("--param", param, "one of kappa, r, K, a_norm")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (solve->parsed()) return cmd_solve(spec_path, out_path, format);
        if (verify->parsed())
            return cmd_verify(spec_path, use_mc, use_pde, paths, grid_n, seed,
                              out_path);
        if (sweep->parsed()) return cmd_sweep(spec_path, param, values_csv, out_path);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ambistop::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ambistop::ParameterError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ambistop::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
