// toda-spectra: config-driven runs of the series, characteristic, spectral,
// growth and explicit-leaf computations. Writes CSV tables and summary.json.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace toda;
using namespace toda::cli;

namespace {

// Flag name, config key, help text. Every flag takes a YAML scalar or list.
struct Override {
    const char* flag;
    const char* key;
    const char* help;
};

const std::vector<Override> kCommon{
    {"--leaf", "leaf", "leaf exponents, e.g. [3,6]"},
    {"--zeta", "zeta", "parameters; numbers or [re,im] pairs, e.g. [0.1,0.01]"},
};

const std::map<std::string, std::vector<Override>> kOverrides{
    {"series",
     {{"--order", "series.order", "highest power of z = x^s"},
      {"--p-max", "series.p_max", "powers U^1..U^p_max"},
      {"--alpha", "series.alpha", "scale: tables hold (U/alpha)^p"}}},
    {"char", {{"--char-order", "char_order", "series order for the dominant-orbit check"}}},
    {"spectrum",
     {{"--J", "renorm.J", "block size J+1"},
      {"--alpha", "renorm.alpha", "renormalization base alpha > 1"},
      {"--beta", "renorm.beta", "polynomial weight exponent beta > 0"},
      {"--tail-tol", "renorm.tail_tol", "tail tolerance"},
      {"--q", "q", "symmetry blocks, e.g. [1,2]"},
      {"--k-max", "k_max", "eigenvalues kept per block"}}},
    {"scan",
     {{"--J", "renorm.J", "block size J+1"},
      {"--alpha", "renorm.alpha", "renormalization base alpha > 1"},
      {"--beta", "renorm.beta", "polynomial weight exponent beta > 0"},
      {"--tail-tol", "renorm.tail_tol", "tail tolerance"},
      {"--q", "q", "symmetry blocks, e.g. [1,2]"},
      {"--k-max", "k_max", "eigenvalues kept per block"},
      {"--vary", "path.vary", "index of the parameter driven to criticality"},
      {"--bracket", "path.bracket", "[lo,hi] containing its critical value"},
      {"--delta-min", "delta.min", "smallest delta"},
      {"--delta-max", "delta.max", "largest delta"},
      {"--delta-n", "delta.n", "number of log-spaced deltas"}}},
    {"lg",
     {{"--r0", "lg.r0", "initial conformal radius"},
      {"--a0", "lg.a0", "initial real coefficients, one per mode"},
      {"--dT", "lg.dT", "time step"},
      {"--T-max", "lg.T_max", "final time"},
      {"--scan", "lg.scan", "true: spectral scan on the approach to T_c"},
      {"--delta-min", "lg.delta.min", "smallest T_c - T"},
      {"--delta-max", "lg.delta.max", "largest T_c - T"},
      {"--delta-n", "lg.delta.n", "number of log-spaced points"},
      {"--J", "renorm.J", "block size J+1 for the scan"},
      {"--q", "q", "symmetry blocks for the scan"}}},
    {"leaves",
     {{"--b-min", "leaves.b_min", "smallest b"},
      {"--b-max", "leaves.b_max", "largest b"},
      {"--nb", "leaves.nb", "b samples"},
      {"--y-min", "leaves.y_min", "smallest c (pole) or gamma (log)"},
      {"--y-max", "leaves.y_max", "largest c or gamma"},
      {"--ny", "leaves.ny", "c or gamma samples"},
      {"--gamma-tol", "leaves.gamma_tol", "tolerance of the log threshold"}}},
};

struct Run {
    RunConfig cfg;
    ordered_json summary;
    ordered_json points = ordered_json::array();
    int failures = 0;

    void write(const std::string& name, const std::string& content) {
        report::write_atomic((fs::path(cfg.out) / name).string(), content);
        summary["outputs"][name] = report::git_blob_hash(content);
    }
    void point(ordered_json p, const std::string& status, const std::string& message = "") {
        p["status"] = status;
        if (!message.empty()) p["message"] = message;
        if (status != "ok") ++failures;
        points.push_back(std::move(p));
    }
};

ordered_json fit_json(const std::vector<ScalingReport>& fits) {
    ordered_json out = ordered_json::array();
    for (const auto& r : fits)
        out.push_back({{"q", r.q},
                       {"slope_vs_L", r.fit_L.slope},
                       {"r2_vs_L", r.fit_L.r2},
                       {"slope_vs_log_inv_delta", r.fit_log_delta.slope},
                       {"r2_vs_log_inv_delta", r.fit_log_delta.r2},
                       {"gamma_at_smallest_delta", r.gamma_limit},
                       {"mu1_over_L_at_smallest_delta", r.mu_over_L_last},
                       {"higher_max", r.higher_max},
                       {"higher_last_decade_variation", r.last_decade_var}});
    return out;
}

void scan_points(Run& run, const std::vector<ScanPoint>& scan) {
    for (const auto& p : scan) {
        ordered_json j{{"delta", p.delta}};
        if (!p.warning.empty()) j["warning"] = p.warning;
        run.point(j, p.status, p.message);
    }
}

void fits_into_summary(Run& run, const std::vector<ScanPoint>& scan) {
    try {
        run.summary["fits"] = fit_json(fit_log_scaling(scan));
    } catch (const Error& e) {
        run.summary["fits"] = {{"error", e.what()}};
    }
}

ParamPoint base_point(const RunConfig& c) { return ParamPoint(Leaf::make(c.leaf), c.zeta); }

void cmd_series(Run& run) {
    const auto& c = run.cfg;
    const ParamPoint p = base_point(c);
    try {
        const auto u = taylor_branch(p, c.series.order);
        run.write("series.csv",
                  report::series_table(powers_table(u, c.series.p_max, c.series.alpha), 1, 1).str());
        run.point({{"zeta", to_json(c)["zeta"]}}, "ok");
    } catch (const Error& e) {
        run.point({{"zeta", to_json(c)["zeta"]}}, e.code(), e.what());
    }
}

void cmd_char(Run& run) {
    const ParamPoint p = base_point(run.cfg);
    try {
        run.write("char.csv", report::char_table(solve_characteristic(p)).str());
        const auto d = dominant_data(p, run.cfg.char_order, {1});
        run.summary["dominant"] = {{"rho_star", d.rho_star},
                                   {"orbit_size", d.orbit_size},
                                   {"separation", d.separation},
                                   {"phi", d.phi},
                                   {"exponent_hat", d.exponent_hat},
                                   {"kappa_sheet", {d.kappa_sheet.real(), d.kappa_sheet.imag()}}};
        run.point({}, "ok");
    } catch (const Error& e) {
        run.point({}, e.code(), e.what());
    }
}

ScanOptions scan_options(const RunConfig& c) {
    ScanOptions o;
    o.k_max = c.k_max;
    o.char_order = c.char_order;
    o.threads = c.threads;
    return o;
}

void cmd_spectrum(Run& run) {
    const ParamPoint p = base_point(run.cfg);
    const ParamPath flat = [p](double) { return p; };
    const auto scan = scan_path(flat, {0.0}, run.cfg.renorm, run.cfg.q, scan_options(run.cfg));
    run.write("spectrum.csv", report::scan_table(scan).str());
    run.write("spike.csv", report::spike_table(scan).str());
    scan_points(run, scan);
}

void cmd_scan(Run& run) {
    const auto& c = run.cfg;
    const ParamPoint base = base_point(c);
    const int n = c.path.vary;
    const ParamPath slice = [base, n](double t) {
        ParamPoint q = base;
        q.zeta[n] = t;
        return q;
    };
    double tc;
    try {
        tc = critical_parameter(slice, c.path.lo, c.path.hi);
    } catch (const Error& e) {
        run.summary["critical_parameter"] = {{"error", e.what()}};
        run.point({}, e.code(), e.what());
        return;
    }
    run.summary["critical_parameter"] = {{"index", n}, {"value", tc}};
    const ParamPath path = [slice, tc](double delta) { return slice(tc * (1 - delta)); };
    const auto scan = scan_path(path, c.delta.values(), c.renorm, c.q, scan_options(c));
    run.write("scan.csv", report::scan_table(scan).str());
    run.write("spike.csv", report::spike_table(scan).str());
    scan_points(run, scan);
    fits_into_summary(run, scan);
}

void cmd_lg(Run& run) {
    const auto& c = run.cfg;
    const Leaf leaf = Leaf::make(c.leaf);
    std::vector<cplx> a0(c.lg.a0.begin(), c.lg.a0.end());
    Thresholds th;
    TrajectoryState init;
    try {
        init = initial_state(c.lg.r0, a0, leaf);
        th = detect_thresholds(init, leaf, c.lg.dT, c.lg.T_max, {}, c.char_order);
    } catch (const Error& e) {
        run.point({{"T", 0.0}}, e.code(), e.what());
        return;
    }
    run.write("trajectory.csv", report::trajectory_table(th, leaf).str());
    for (const auto& s : th.trajectory) run.point({{"T", s.T}}, "ok");

    auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); };
    std::string verdict = "no_critical_crossing";
    if (th.T_c) verdict = th.separation_ok ? "separated" : "not_separated";
    ordered_json thresholds{{"T_c", opt(th.T_c)},
                            {"T_univ", opt(th.T_univ)},
                            {"margin_at_Tc", th.T_c ? ordered_json(th.margin_at_Tc) : ordered_json()},
                            {"rho_at_Tc", th.T_c ? ordered_json(th.rho_at_Tc) : ordered_json()},
                            {"separation_verdict", verdict}};
    run.write("thresholds.json", thresholds.dump(2) + "\n");
    run.summary["thresholds"] = thresholds;

    if (c.lg.scan && th.T_c) {
        const auto scan = scan_path(growth_path(init, leaf, *th.T_c), c.lg.delta.values(),
                                    c.renorm, c.q, scan_options(c));
        run.write("scan.csv", report::scan_table(scan).str());
        scan_points(run, scan);
        fits_into_summary(run, scan);
    }
}

void cmd_leaves(Run& run) {
    const auto& l = run.cfg.leaves;
    PhaseGrid g;
    g.kind = l.kind == "log" ? PhaseGrid::Kind::Log : PhaseGrid::Kind::Pole;
    g.b_min = l.b_min;
    g.b_max = l.b_max;
    g.nb = l.nb;
    g.y_min = l.y_min;
    g.y_max = l.y_max;
    g.ny = l.ny;
    const auto d = phase_diagram(g);
    run.write("phase.csv", report::phase_table(d.rows).str());
    run.write("contour.csv", report::contour_table(d.contour).str());
    for (const auto& r : d.rows)
        run.point({{"b", r.b}, {"level", r.c_or_gamma}}, r.error_code.empty() ? "ok" : r.error_code);
    for (const auto& cp : d.contour)
        if (!cp.error_code.empty()) run.point({{"b", cp.b}, {"contour", true}}, cp.error_code);
    if (g.kind == PhaseGrid::Kind::Log) {
        ordered_json gc{{"status", "empirical principal-sheet threshold"}, {"tol", l.gamma_tol}};
        try {
            gc["value"] = gamma_c_solve(l.gamma_tol);
        } catch (const Error& e) {
            gc["error"] = e.what();
        }
        run.summary["gamma_c"] = gc;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toda-spectra: inverse-map series, Hessian spectra near criticality, "
                 "Laplacian growth and explicit leaves"};
    app.require_subcommand(0, 1);
    std::string config_path, out_dir;
    int threads = 0;
    app.add_option("--config", config_path, "YAML config file; flags override its values");
    app.add_option("--out", out_dir, "output directory (default: config 'out' or .)");
    app.add_option("--threads", threads, "worker threads (fallback: TODA_SPECTRA_THREADS)")
        ->check(CLI::Range(1, 1024));

    std::map<std::string, std::map<std::string, std::string>> values;
    bool pole = false, log = false;
    for (const auto& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name);
        auto& slot = values[name];
        auto add = [&](const Override& o) {
            sub->add_option(o.flag, slot[o.key], std::string(o.help) + " [" + o.key + "]");
        };
        for (const auto& o : kCommon) add(o);
        for (const auto& o : kOverrides.at(name)) add(o);
        if (name == "leaves") {
            sub->add_flag("--pole", pole, "single-pole leaf (leaves.kind: pole)");
            sub->add_flag("--log", log, "logarithmic leaf (leaves.kind: log)");
        }
    }
    CLI11_PARSE(app, argc, argv);
    // Without a subcommand the config file's `command` key decides.
    std::string command;
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();

    Run run;
    std::string config_text;
    try {
        YAML::Node node;
        if (!config_path.empty()) {
            config_text = read_file(config_path);
            try {
                node = YAML::Load(config_text);
            } catch (const YAML::Exception& e) {
                throw ConfigError("--config", std::string("YAML parse error: ") + e.what());
            }
        }
        if (command.empty()) {
            if (!node.IsMap() || !node["command"])
                throw ConfigError("command", "give a subcommand or a 'command' key");
            try {
                command = node["command"].as<std::string>();
            } catch (const YAML::Exception&) {
                throw ConfigError("command", "expected a string");
            }
        }
        for (const auto& [key, value] : values[command])
            if (!value.empty()) set_key(node, key, value);
        if (pole && log) throw ConfigError("leaves.kind", "--pole and --log are exclusive");
        if (pole) set_key(node, "leaves.kind", "pole");
        if (log) set_key(node, "leaves.kind", "log");
        if (!out_dir.empty()) set_key(node, "out", out_dir);
        if (threads > 0) {
            set_key(node, "threads", std::to_string(threads));
        } else if (const char* env = std::getenv("TODA_SPECTRA_THREADS")) {
            set_key(node, "threads", env);
        }
        run.cfg = parse_config(node, command);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    run.summary["schema"] = 1;
    run.summary["command"] = command;
    run.summary["config"] = to_json(run.cfg);
    const std::string echo = run.summary["config"].dump();
    run.summary["inputs"] = {
        {"config_file", config_path.empty() ? ordered_json() : ordered_json(config_path)},
        {"config_file_hash",
         config_path.empty() ? ordered_json() : ordered_json(report::git_blob_hash(config_text))},
        {"effective_config_hash", report::git_blob_hash(echo)}};
    run.summary["outputs"] = ordered_json::object();

    try {
        fs::create_directories(run.cfg.out);
        if (command == "series") cmd_series(run);
        else if (command == "char") cmd_char(run);
        else if (command == "spectrum") cmd_spectrum(run);
        else if (command == "scan") cmd_scan(run);
        else if (command == "lg") cmd_lg(run);
        else cmd_leaves(run);
    } catch (const std::exception& e) {
        run.point({}, "Error", e.what());
    }

    const int status = run.failures ? 2 : 0;
    run.summary["points"] = run.points;
    run.summary["failed_points"] = run.failures;
    run.summary["exit_status"] = status;
    try {
        report::write_atomic((fs::path(run.cfg.out) / "summary.json").string(),
                             run.summary.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "cannot write summary: " << e.what() << "\n";
        return 2;
    }
    std::cerr << command << ": " << run.points.size() << " points, " << run.failures
              << " failed; outputs in " << run.cfg.out << "\n";
    return status;
}
