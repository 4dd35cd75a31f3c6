// lieosc command-line front end: solve / detect / compare / invariants
// pipelines over the built-in oscillator families and sampled coefficient
// curves. Configs are flat key = value files; trajectories go out as CSV
// with full 17-digit precision, reports as JSON.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lieosc/lieosc.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool log_enabled() {
    const char* v = std::getenv("LIEOSC_LOG");
    return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}

void log_info(const std::string& msg) {
    if (log_enabled()) std::cerr << "[lieosc] " << msg << "\n";
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

/// Run configuration parsed from a flat key = value file.
struct RunConfig {
    std::string family;
    std::string samples_path;
    std::map<std::string, double> params;  // family parameters
    double t0 = 0.0;
    double t1 = 0.0;
    long n_points = 0;
    std::optional<double> x0, p0;
    std::optional<double> rho0, rhodot0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    std::optional<double> tol;  // detection / comparison tolerance override
};

const std::set<std::string> kParamKeys = {"m0", "mu", "omega", "L", "c1", "u0", "u1", "k"};

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig cfg;
    bool have_t1 = false, have_n = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");

        if (key == "family") {
            cfg.family = value;
            continue;
        }
        if (key == "samples") {
            cfg.samples_path = value;
            continue;
        }
        double num;
        try {
            std::size_t pos = 0;
            num = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": value for '" + key + "' is not a number");
        }
        if (kParamKeys.count(key)) {
            cfg.params[key] = num;
        } else if (key == "t0") {
            cfg.t0 = num;
        } else if (key == "t1") {
            cfg.t1 = num;
            have_t1 = true;
        } else if (key == "n_points") {
            cfg.n_points = static_cast<long>(num);
            have_n = true;
        } else if (key == "x0") {
            cfg.x0 = num;
        } else if (key == "p0") {
            cfg.p0 = num;
        } else if (key == "rho0") {
            cfg.rho0 = num;
        } else if (key == "rhodot0") {
            cfg.rhodot0 = num;
        } else if (key == "rel_tol") {
            cfg.rel_tol = num;
        } else if (key == "abs_tol") {
            cfg.abs_tol = num;
        } else if (key == "tol") {
            cfg.tol = num;
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
    }
    if (cfg.family.empty()) throw ConfigError("config is missing 'family'");
    if (!have_t1) throw ConfigError("config is missing 't1'");
    if (!have_n) throw ConfigError("config is missing 'n_points'");
    if (!(cfg.t1 > cfg.t0)) throw ConfigError("span must have t1 > t0");
    if (cfg.n_points < 2) throw ConfigError("n_points must be at least 2");
    return cfg;
}

lieosc::SampledCurve read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open samples file '" + path + "'");
    lieosc::SampledCurve curve;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (line_no == 1 && s.find("t,") == 0) continue;  // optional header
        std::istringstream row(s);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(trim(cell)));
        if (vals.size() != 4)
            throw ConfigError("samples line " + std::to_string(line_no) +
                              ": expected t,b0,b1,b2");
        curve.grid.push_back(vals[0]);
        curve.values.push_back({vals[1], vals[2], vals[3]});
    }
    curve.validate();
    return curve;
}

lieosc::FamilyInstance build_family(const RunConfig& cfg) {
    if (cfg.family == "sampled") {
        if (cfg.samples_path.empty())
            throw ConfigError("family 'sampled' requires a 'samples' file path");
        auto curve = read_samples_csv(cfg.samples_path);
        const double omega =
            cfg.params.count("omega") ? cfg.params.at("omega") : 1.0;
        auto fam = lieosc::make_sampled_family(std::move(curve), omega);
        if (cfg.t0 < fam.coeffs.t0 - 1e-12 || cfg.t1 > fam.coeffs.t1 + 1e-12)
            throw ConfigError("requested span exceeds the sampled span");
        return fam;
    }
    return lieosc::make_family(cfg.family, cfg.params, cfg.t0, cfg.t1);
}

std::vector<double> make_grid(const RunConfig& cfg) {
    std::vector<double> grid(static_cast<std::size_t>(cfg.n_points));
    for (long i = 0; i < cfg.n_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            cfg.t0 + (cfg.t1 - cfg.t0) * static_cast<double>(i) /
                         static_cast<double>(cfg.n_points - 1);
    grid.back() = cfg.t1;
    return grid;
}

void check_blow_up(const lieosc::FamilyInstance& fam, const RunConfig& cfg) {
    if (fam.blow_up_time && *fam.blow_up_time > cfg.t0 && *fam.blow_up_time <= cfg.t1)
        throw lieosc::IntegrationFailure("coefficients blow up at t = " +
                                             std::to_string(*fam.blow_up_time) +
                                             " inside the requested span",
                                         cfg.t0);
}

lieosc::PhaseState initial_state(const RunConfig& cfg) {
    if (!cfg.x0 || !cfg.p0) throw ConfigError("config is missing 'x0' or 'p0'");
    return {*cfg.x0, *cfg.p0};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open output file '" + out_path + "'");
    out << content;
}

json span_json(const RunConfig& cfg) {
    return json{{"t0", cfg.t0}, {"t1", cfg.t1}};
}

// --- solve ------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const std::string& out_path, const std::string& format) {
    const auto fam = build_family(cfg);
    check_blow_up(fam, cfg);
    const auto xi0 = initial_state(cfg);
    const auto grid = make_grid(cfg);
    log_info("solve: family=" + fam.family + ", n=" + std::to_string(grid.size()));
    const auto path = lieosc::integrate_group(fam.coeffs, grid, cfg.rel_tol, cfg.abs_tol);
    const auto traj = lieosc::flow_state(path, xi0);

    if (format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& a = path.elements[i];
            rows.push_back(json{{"t", grid[i]},
                                {"x", traj.states[i].x},
                                {"p", traj.states[i].p},
                                {"a11", a.a11},
                                {"a12", a.a12},
                                {"a21", a.a21},
                                {"a22", a.a22},
                                {"det_err", a.det() - 1.0}});
        }
        write_output(out_path, rows.dump(2) + "\n");
        return kExitOk;
    }

    std::string csv = "t,x,p,a11,a12,a21,a22,det_err\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& a = path.elements[i];
        csv += format_double(grid[i]) + "," + format_double(traj.states[i].x) + "," +
               format_double(traj.states[i].p) + "," + format_double(a.a11) + "," +
               format_double(a.a12) + "," + format_double(a.a21) + "," +
               format_double(a.a22) + "," + format_double(a.det() - 1.0) + "\n";
    }
    write_output(out_path, csv);
    return kExitOk;
}

// --- detect -----------------------------------------------------------

int cmd_detect(const RunConfig& cfg, const std::string& out_path, const std::string& format) {
    if (format != "json") throw ConfigError("detect supports only --format json");
    const auto fam = build_family(cfg);
    check_blow_up(fam, cfg);
    const auto grid = make_grid(cfg);
    const double tol = cfg.tol.value_or(fam.family == "sampled" ? 1e-3 : 1e-6);
    log_info("detect: family=" + fam.family + ", tol=" + std::to_string(tol));

    const auto krep = lieosc::detect_kcond(fam.coeffs, grid, tol);
    json out;
    out["span"] = span_json(cfg);
    if (krep.family == lieosc::IntegrableFamily::kcond) {
        out["family"] = "kcond";
        out["constants"] = json{{"c0", krep.c0}, {"c1", krep.c1}, {"c2", krep.c2}};
        out["negative_branch"] = krep.negative_branch;
        out["residual"] = krep.residual;
        write_output(out_path, out.dump(2) + "\n");
        return kExitOk;
    }

    // fall back to the quartic detector for unit-mass, b1 = 0 systems
    if (fam.freq_factor) {
        const auto qrep = lieosc::detect_quartic(fam.freq_factor, fam.omega, grid, tol);
        out["kcond_residual"] = krep.residual;
        if (qrep.family == lieosc::IntegrableFamily::quartic) {
            out["family"] = "quartic";
            out["constants"] = json{{"u0", qrep.u0}, {"u1", qrep.u1}, {"k", qrep.k}};
            out["residual"] = qrep.residual;
            write_output(out_path, out.dump(2) + "\n");
            return kExitOk;
        }
        out["family"] = "none";
        out["residual"] = std::min(krep.residual, qrep.residual);
        out["quartic_residual"] = qrep.residual;
        write_output(out_path, out.dump(2) + "\n");
        return kExitNegative;
    }

    out["family"] = "none";
    out["residual"] = krep.residual;
    write_output(out_path, out.dump(2) + "\n");
    return kExitNegative;
}

// --- compare ----------------------------------------------------------

int cmd_compare(const RunConfig& cfg, const std::string& out_path, const std::string& format) {
    if (format != "json") throw ConfigError("compare supports only --format json");
    const auto fam = build_family(cfg);
    if (!fam.closed_form_position)
        throw ConfigError("family '" + fam.family + "' has no closed-form solution");
    check_blow_up(fam, cfg);
    const auto xi0 = initial_state(cfg);
    const auto grid = make_grid(cfg);
    const double tol = cfg.tol.value_or(1e-6);

    const auto started = std::chrono::steady_clock::now();
    const auto path = lieosc::integrate_group(fam.coeffs, grid, cfg.rel_tol, cfg.abs_tol);
    const auto traj = lieosc::flow_state(path, xi0);
    double sup = 0.0;
    for (const auto& s : traj.states) sup = std::max(sup, std::abs(s.x));
    double max_abs_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        max_abs_err = std::max(
            max_abs_err, std::abs(fam.closed_form_position(xi0, grid[i]) - traj.states[i].x));
    const double max_rel_err = max_abs_err / std::max(sup, 1e-30);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    json out{{"family", fam.family},
             {"max_rel_err", max_rel_err},
             {"runtime", runtime},
             {"tolerance", tol},
             {"pass", max_rel_err < tol}};
    write_output(out_path, out.dump(2) + "\n");
    return max_rel_err < tol ? kExitOk : kExitNegative;
}

// --- invariants -------------------------------------------------------

int cmd_invariants(const RunConfig& cfg, const std::string& out_path,
                   const std::string& format) {
    const auto fam = build_family(cfg);
    check_blow_up(fam, cfg);
    const auto xi0 = initial_state(cfg);
    const auto grid = make_grid(cfg);
    const bool lewis_possible = static_cast<bool>(fam.freq_factor) && fam.unit_mass;

    struct Row {
        std::string invariant;
        double drift;
    };
    std::vector<Row> rows;

    const auto path = lieosc::integrate_group(fam.coeffs, grid, cfg.rel_tol, cfg.abs_tol);
    const auto traj = lieosc::flow_state(path, xi0);

    if (fam.family == "quartic") {
        const double u0 = fam.params.at("u0");
        const double u1 = fam.params.at("u1");
        const double omega = fam.omega;
        rows.push_back({"I1", lieosc::conservation_drift(
                                  [&](double t, lieosc::PhaseState s) {
                                      return lieosc::invariants_quartic(s, t, u0, u1, omega).i1;
                                  },
                                  traj)});
        if (u1 != 0.0) {
            const auto seq = lieosc::quartic_i2_unwrapped(traj, u0, u1, omega);
            double drift = 0.0;
            for (double v : seq) drift = std::max(drift, std::abs(v - seq.front()));
            rows.push_back({"I2", drift / std::max(std::abs(seq.front()), 1e-30)});
        }
    } else if (fam.family == "powerlaw2") {
        const double L = fam.params.at("L");
        const double c1 = fam.params.at("c1");
        const double omega = fam.omega;
        const double u0 = L;
        const double u1 = -c1 * omega;
        auto primed_i1 = [&](double t, lieosc::PhaseState s) {
            const double v = u1 * t + u0;
            const lieosc::PhaseState prime{std::sqrt(omega / v) * s.x,
                                           std::sqrt(v / omega) * s.p};
            return lieosc::invariants_powerlaw2(prime, t, u0, u1, omega).i1;
        };
        rows.push_back({"I1", lieosc::conservation_drift(primed_i1, traj)});
    }

    if (cfg.rho0 || cfg.rhodot0 || rows.empty()) {
        // the Lewis invariant is the family-independent invariant; it is
        // what "invariants" means for families without first-integral
        // formulas of their own
        if (!lewis_possible)
            throw ConfigError("family '" + fam.family +
                              "' does not support the Lewis invariant (mass must be 1)");
        if (!cfg.rho0 || !cfg.rhodot0)
            throw ConfigError("Lewis invariant requires 'rho0' and 'rhodot0'");
        const auto freq = fam.freq_factor;
        const double w2 = fam.omega * fam.omega;
        auto effective_freq = [freq, w2](double t) { return freq(t) * w2; };
        lieosc::IvpProblem co;
        co.dimension = 4;
        co.rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
            if (y[2] < 1e-6) throw lieosc::RhoCollapse(t);
            const double f = effective_freq(t);
            dy[0] = y[1];
            dy[1] = -f * y[0];
            dy[2] = y[3];
            dy[3] = -f * y[2] + 1.0 / (y[2] * y[2] * y[2]);
        };
        co.t0 = cfg.t0;
        co.t1 = cfg.t1;
        co.y0 = {xi0.x, xi0.p, *cfg.rho0, *cfg.rhodot0};
        co.rel_tol = cfg.rel_tol;
        co.abs_tol = cfg.abs_tol;
        const auto sol = lieosc::integrate(co, grid);
        double reference = 0.0, drift = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& y = sol.values[i];
            const double v = lieosc::lewis_invariant({y[2], y[3]}, {y[0], y[1]});
            if (i == 0)
                reference = v;
            else
                drift = std::max(drift, std::abs(v - reference));
        }
        rows.push_back({"lewis", drift / std::max(std::abs(reference), 1e-30)});
    }

    json params(fam.params);
    if (format == "csv") {
        std::string csv = "invariant,family,t0,t1,drift\n";
        for (const auto& r : rows)
            csv += r.invariant + "," + fam.family + "," + format_double(cfg.t0) + "," +
                   format_double(cfg.t1) + "," + format_double(r.drift) + "\n";
        write_output(out_path, csv);
        return kExitOk;
    }
    json out = json::array();
    for (const auto& r : rows)
        out.push_back(json{{"invariant", r.invariant},
                           {"family", fam.family},
                           {"parameters", params},
                           {"span", span_json(cfg)},
                           {"drift", r.drift}});
    write_output(out_path, out.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lieosc - time-dependent oscillators as Lie systems on SL(2,R):\n"
        "group-equation solving, gauge transformations, integrability\n"
        "detection, closed-form solutions and conserved invariants.\n"};
    app.footer(
        "Exit codes:\n"
        "  0  success (detect: family found; compare: within tolerance)\n"
        "  1  negative result (no family detected / comparison above tolerance)\n"
        "  2  configuration error\n"
        "  3  numerical failure (blow-up inside span, integration failure)\n"
        "\n"
        "Set LIEOSC_LOG=1 for progress messages on stderr.");
    app.require_subcommand(1);

    std::string config_path, out_path;
    double tol_override = -1.0;
    // per-subcommand formats: trajectories default to CSV, reports to JSON
    std::string fmt_solve = "csv", fmt_detect = "json", fmt_compare = "json",
                fmt_invariants = "json";

    auto add_common = [&](CLI::App* cmd, std::string& format) {
        cmd->add_option("--config", config_path, "path to key = value config file")
            ->required();
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--tol", tol_override, "tolerance override");
        cmd->add_option("--format", format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* solve = app.add_subcommand("solve", "integrate the group equation, emit trajectory");
    add_common(solve, fmt_solve);
    auto* detect = app.add_subcommand("detect", "run integrability detection, emit JSON report");
    add_common(detect, fmt_detect);
    auto* compare =
        app.add_subcommand("compare", "closed form vs numerical integration, emit JSON");
    add_common(compare, fmt_compare);
    auto* invariants =
        app.add_subcommand("invariants", "conservation drift of the family invariants");
    add_common(invariants, fmt_invariants);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = parse_config(config_path);
        if (tol_override > 0.0) cfg.tol = tol_override;
        if (solve->parsed()) return cmd_solve(cfg, out_path, fmt_solve);
        if (detect->parsed()) return cmd_detect(cfg, out_path, fmt_detect);
        if (compare->parsed()) return cmd_compare(cfg, out_path, fmt_compare);
        if (invariants->parsed()) return cmd_invariants(cfg, out_path, fmt_invariants);
        std::cerr << "error: no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lieosc::IntegrationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const lieosc::RhoCollapse& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
