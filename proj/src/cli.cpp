#include "synobs/cli.hpp"

#include "synobs/accessibility.hpp"
#include "synobs/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace synobs {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void bind_sim_options(CLI::App& app, SimConfig& cfg) {
    app.add_option("--scenario", cfg.scenario, "bearings, unicycle or vaa");
    app.add_option("--t_end", cfg.t_end, "simulated duration [s]");
    app.add_option("--dt", cfg.dt, "propagation step [s]");
    app.add_option("--integrator", cfg.integrator, "truth integrator: exact or euler");
    app.add_option("--rate_gnss", cfg.rate_gnss, "GNSS rate [Hz]");
    app.add_option("--rate_mag", cfg.rate_mag, "magnetometer rate [Hz]");
    app.add_option("--k_v", cfg.gains.k_v);
    app.add_option("--k_c", cfg.gains.k_c);
    app.add_option("--k_m", cfg.gains.k_m);
    app.add_option("--alpha", cfg.gains.alpha);
    app.add_option("--tau_gnss", cfg.tau_gnss, "GNSS correction duration [s]");
    app.add_option("--tau_mag", cfg.tau_mag, "magnetometer correction duration [s]");
    app.add_option("--flow_steps", cfg.flow_steps, "Euler substeps per correction flow");
    app.add_option("--seed", cfg.seed);
    app.add_option("--output", cfg.output, "CSV path");
    app.add_flag("--no_updates,--no-updates", cfg.no_updates, "propagate only");
    app.set_config("--config", "", "key = value file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
}

// CLI11 reports the option as "--key" on the command line and as a bare
// trailing key for config files; strip it down to the config key.
std::string key_from_parse_error(const std::string& what) {
    const std::string ini = "not able to parse ";
    if (const auto p = what.find(ini); p != std::string::npos) return what.substr(p + ini.size());
    if (what.find("not readable") != std::string::npos) return "config";
    const auto pos = what.find("--");
    if (pos == std::string::npos) return "";
    auto end = what.find_first_of(" :,=", pos);
    return what.substr(pos + 2, end == std::string::npos ? std::string::npos : end - pos - 2);
}

void parse_or_throw(CLI::App& app, std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(key_from_parse_error(e.what()), e.what());
    }
}

// --- analyze ----------------------------------------------------------------

VectorFieldHandle affine_field(const json& spec, int n, const std::string& label) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    if (!spec.is_object()) throw ConfigError("spec", label + ": field must be an object");
    for (const auto& [key, value] : spec.items()) {
        if (key == "constant") {
            if (!value.is_array() || static_cast<int>(value.size()) != n) {
                throw ConfigError("spec", label + ": 'constant' needs " + std::to_string(n) + " entries");
            }
            for (int i = 0; i < n; ++i) b(i) = value[i].get<double>();
        } else if (key == "linear") {
            if (!value.is_array() || static_cast<int>(value.size()) != n) {
                throw ConfigError("spec", label + ": 'linear' needs " + std::to_string(n) + " rows");
            }
            for (int i = 0; i < n; ++i) {
                if (!value[i].is_array() || static_cast<int>(value[i].size()) != n) {
                    throw ConfigError("spec", label + ": 'linear' rows need " + std::to_string(n) + " entries");
                }
                for (int j = 0; j < n; ++j) A(i, j) = value[i][j].get<double>();
            }
        } else {
            throw ConfigError("spec", label + ": unknown key '" + key + "'");
        }
    }
    VectorFieldHandle f;
    f.manifold = ManifoldId::Euclidean;
    f.label = label;
    f.evaluate = [A, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x + b; };
    f.jacobian = [A](const Eigen::VectorXd&) -> Eigen::MatrixXd { return A; };
    return f;
}

AffineSystem system_from_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("spec", "cannot open field spec '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("spec", std::string("field spec is not valid JSON: ") + e.what());
    }
    try {
        const int n = doc.at("dimension").get<int>();
        if (n < 1) throw ConfigError("spec", "dimension must be >= 1");
        AffineSystem sys{ManifoldId::Euclidean, n, std::nullopt, {}};
        if (doc.contains("drift") && !doc["drift"].is_null()) sys.drift = affine_field(doc["drift"], n, "f0");
        if (doc.contains("inputs")) {
            int i = 1;
            for (const auto& f : doc["inputs"]) sys.inputs.push_back(affine_field(f, n, "f" + std::to_string(i++)));
        }
        return sys;
    } catch (const json::exception& e) {
        throw ConfigError("spec", std::string("malformed field spec: ") + e.what());
    }
}

int cmd_analyze(const AffineSystem& sys, const std::string& report_path, int n_samples, int max_dim,
                std::uint64_t seed, std::ostream& out, std::ostream& err) {
    const int n_euclid = sys.manifold == ManifoldId::Euclidean ? sys.chart_dimension : 2;
    const auto samples = sample_points(sys.manifold, n_samples, seed, n_euclid);
    const auto test_points = sample_points(sys.manifold, n_samples, seed + 1, n_euclid);

    AlgebraBasis basis;
    try {
        basis = build_accessibility_basis(sys, samples, 1e-8, max_dim);
    } catch (const NonClosureError& e) {
        err << "error: bracket closure did not terminate: " << e.what() << "\n"
            << "budget " << e.budget() << ", reached " << e.reached() << "\n";
        return exit_code::non_closure;
    }
    const ConstantsWithResidual c = structure_constants(basis);
    const ControllabilityReport ctrl = controllability_check(basis, test_points);
    const AlgebraMatch m = match_algebra(c);

    std::string match_text;
    if (m.kind == AlgebraKind::Abelian) match_text = "abelian";
    else if (m.kind == AlgebraKind::Unknown) match_text = "no catalog match";
    else match_text = "matches " + m.name();

    out << "dimension " << basis.dimension() << ", " << match_text << ", "
        << (ctrl.controllable ? "controllable" : "not controllable") << "\n";
    out << "basis:";
    for (const auto& f : basis.fields) out << " " << f.label;
    out << "\n";
    const int n = c.dimension;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::ostringstream line;
            bool any = false;
            for (int k = 0; k < n; ++k) {
                const double v = c.at(i, j, k);
                if (std::abs(v) <= 1e-9) continue;
                line << (any ? " + " : "") << std::setprecision(6) << v << "*" << c.labels[k];
                any = true;
            }
            out << "  [" << c.labels[i] << ", " << c.labels[j] << "] = " << (any ? line.str() : "0") << "\n";
        }
    out << "fit residual " << c.residual << ", rank " << ctrl.min_rank << "/" << ctrl.required_rank << "\n";

    json constants = json::array();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int j = 0; j < n; ++j) {
            json col = json::array();
            for (int k = 0; k < n; ++k) col.push_back(c.at(i, j, k));
            row.push_back(col);
        }
        constants.push_back(row);
    }
    json report = {{"dimension", basis.dimension()},
                   {"basis", c.labels},
                   {"structure_constants", constants},
                   {"residual", c.residual},
                   {"controllable", ctrl.controllable},
                   {"min_rank", ctrl.min_rank},
                   {"required_rank", ctrl.required_rank},
                   {"match", m.name()}};
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        if (!os) {
            err << "error [output]: cannot write '" << report_path << "'\n";
            return exit_code::invalid_config;
        }
        os << report.dump(2) << "\n";
    }
    return exit_code::ok;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const ScenarioBundle& b, int n_samples, int n_decrease, std::ostream& out) {
    const FundamentalStructure& fs = *b.structure;
    std::vector<VerificationReport> rows;
    rows.push_back(verify_fundamental(fs, n_samples, 1e-9));
    rows.push_back(verify_synchrony(fs, n_samples, 1e-5));
    std::vector<DecreaseReport> witnesses;
    if (b.cost) {
        for (const auto& ch : b.channels) {
            witnesses.push_back(differential_decrease_check(fs, ch, *b.cost, n_decrease, 1e-12));
            rows.push_back(witnesses.back().report);
        }
    }
    bool all = true;
    out << std::left << std::setw(28) << "check" << std::setw(26) << "residual" << std::setw(12) << "tol"
        << "result\n";
    for (const auto& r : rows) {
        out << std::setw(28) << r.name << std::setw(26) << fmt17(r.max_residual) << std::setw(12)
            << r.tolerance << (r.passed ? "PASS" : "FAIL") << "\n";
        all = all && r.passed;
    }
    for (const auto& w : witnesses) {
        if (w.report.passed || !w.witness_state) continue;
        out << "witness for " << w.report.name << ": xi = ["
            << to_chart(*w.witness_state).transpose().format(Eigen::IOFormat(6, 0, ", ")) << "]\n";
    }
    out << (all ? "all checks passed" : "verification FAILED") << "\n";
    return all ? exit_code::ok : exit_code::check_failed;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const SimConfig& cfg, std::ostream& out, std::ostream& err) {
    cfg.validate();
    const ScenarioBundle bundle = configured_bundle(cfg);
    const SimTrace trace = run_simulation(cfg, bundle);

    std::ofstream os(cfg.output);
    if (!os) throw ConfigError("output", "cannot write '" + cfg.output + "'");
    write_csv(os, bundle, trace);
    os.close();

    const TraceRow& last = trace.rows.back();
    const auto [att, vel] = bundle.error_metrics(last.truth, last.estimate);
    double drift = 0.0;
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        if (trace.rows[i].event == 0 && std::isfinite(trace.rows[i].lyapunov)) {
            drift = std::max(drift, std::abs(trace.rows[i].lyapunov - trace.rows[i - 1].lyapunov));
        }
    }
    out << "scenario " << bundle.name << ": " << trace.rows.size() << " rows written to " << cfg.output << "\n";
    out << "final attitude error " << fmt17(att) << " rad, velocity error " << fmt17(vel) << "\n";
    for (const auto& ch : bundle.channels) {
        out << "events " << ch.name << ": " << trace.event_count(ch.channel_id) << "\n";
    }
    if (bundle.cost) {
        out << "lyapunov " << fmt17(trace.rows.front().lyapunov) << " -> " << fmt17(last.lyapunov)
            << ", max change between events " << fmt17(drift) << "\n";
    }
    for (const auto& w : trace.warnings) err << "warning: " << w << "\n";
    if (!trace.warnings.empty()) {
        out << "lyapunov monotonicity VIOLATED at " << trace.warnings.size() << " event(s)\n";
        return exit_code::check_failed;
    }
    out << (bundle.cost ? "lyapunov non-increasing at every event\n" : "no cost function; monotonicity not checked\n");
    return exit_code::ok;
}

}  // namespace

bool SimConfig::operator==(const SimConfig& o) const {
    return scenario == o.scenario && t_end == o.t_end && dt == o.dt && integrator == o.integrator &&
           rate_gnss == o.rate_gnss && rate_mag == o.rate_mag && gains.k_v == o.gains.k_v &&
           gains.k_c == o.gains.k_c && gains.k_m == o.gains.k_m && gains.alpha == o.gains.alpha &&
           tau_gnss == o.tau_gnss && tau_mag == o.tau_mag && flow_steps == o.flow_steps && seed == o.seed &&
           output == o.output && no_updates == o.no_updates;
}

void SimConfig::validate() const {
    if (scenario != "bearings" && scenario != "unicycle" && scenario != "vaa") {
        throw ConfigError("scenario", "scenario: unknown value '" + scenario + "'");
    }
    if (integrator != "exact" && integrator != "euler") {
        throw ConfigError("integrator", "integrator: expected exact or euler, got '" + integrator + "'");
    }
    if (!(t_end > 0.0)) throw ConfigError("t_end", "t_end: must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt", "dt: must be positive");
    const double steps = std::round(t_end / dt);
    if (std::abs(steps * dt - t_end) > 1e-9) throw ConfigError("dt", "dt: must divide t_end");
    if (!(rate_gnss > 0.0)) throw ConfigError("rate_gnss", "rate_gnss: must be positive");
    if (!(rate_mag > 0.0)) throw ConfigError("rate_mag", "rate_mag: must be positive");
    if (!(tau_gnss > 0.0)) throw ConfigError("tau_gnss", "tau_gnss: must be positive");
    if (!(tau_mag > 0.0)) throw ConfigError("tau_mag", "tau_mag: must be positive");
    if (flow_steps < 1) throw ConfigError("flow_steps", "flow_steps: must be >= 1");
    if (output.empty()) throw ConfigError("output", "output: path is empty");
    if (scenario == "vaa") {
        gains.validate();
        for (auto [key, rate] : {std::pair{"rate_gnss", rate_gnss}, std::pair{"rate_mag", rate_mag}}) {
            try {
                measurement_stride(rate, dt);
            } catch (const ConfigError& e) {
                throw ConfigError(key, std::string(key) + ": " + e.what());
            }
        }
    }
}

std::string to_ini(const SimConfig& c) {
    std::ostringstream os;
    os << "scenario = \"" << c.scenario << "\"\n"
       << "t_end = " << fmt17(c.t_end) << "\n"
       << "dt = " << fmt17(c.dt) << "\n"
       << "integrator = \"" << c.integrator << "\"\n"
       << "rate_gnss = " << fmt17(c.rate_gnss) << "\n"
       << "rate_mag = " << fmt17(c.rate_mag) << "\n"
       << "k_v = " << fmt17(c.gains.k_v) << "\n"
       << "k_c = " << fmt17(c.gains.k_c) << "\n"
       << "k_m = " << fmt17(c.gains.k_m) << "\n"
       << "alpha = " << fmt17(c.gains.alpha) << "\n"
       << "tau_gnss = " << fmt17(c.tau_gnss) << "\n"
       << "tau_mag = " << fmt17(c.tau_mag) << "\n"
       << "flow_steps = " << c.flow_steps << "\n"
       << "seed = " << c.seed << "\n"
       << "output = \"" << c.output << "\"\n"
       << "no_updates = " << (c.no_updates ? "true" : "false") << "\n";
    return os.str();
}

SimConfig parse_sim_config(const std::vector<std::string>& args) {
    SimConfig cfg;
    CLI::App app{"simulate"};
    bind_sim_options(app, cfg);
    parse_or_throw(app, args);
    return cfg;
}

namespace {

// simulate gets its own top-level parser: CLI11 only reads config files for
// the top-level app.
int run_simulate(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    SimConfig cfg;
    CLI::App app{"Run a scenario and write a CSV trace", "synobs simulate"};
    bind_sim_options(app, cfg);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        const std::string key = key_from_parse_error(e.what());
        err << "error" << (key.empty() ? "" : " [" + key + "]") << ": " << e.what() << "\n";
        return exit_code::invalid_config;
    }
    try {
        return cmd_simulate(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "error [" << e.key() << "]: " << e.what() << "\n";
        return exit_code::invalid_config;
    }
}

}  // namespace

std::vector<std::string> csv_columns(const ScenarioBundle& b) {
    std::vector<std::string> cols{"t", "event"};
    for (const auto& c : b.state_columns) cols.push_back("truth_" + c);
    for (const auto& c : b.state_columns) cols.push_back("est_" + c);
    cols.insert(cols.end(), {"attitude_error_rad", "velocity_error", "lyapunov"});
    return cols;
}

void write_csv(std::ostream& os, const ScenarioBundle& b, const SimTrace& trace) {
    const auto cols = csv_columns(b);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : trace.rows) {
        os << fmt17(r.t) << "," << r.event;
        const Eigen::VectorXd truth = to_chart(r.truth);
        const Eigen::VectorXd est = to_chart(r.estimate);
        for (Eigen::Index i = 0; i < truth.size(); ++i) os << "," << fmt17(truth(i));
        for (Eigen::Index i = 0; i < est.size(); ++i) os << "," << fmt17(est(i));
        const auto [att, vel] = b.error_metrics(r.truth, r.estimate);
        os << "," << fmt17(att) << "," << fmt17(vel) << "," << fmt17(r.lyapunov) << "\n";
    }
}

ScenarioBundle configured_bundle(const SimConfig& cfg) {
    ScenarioBundle b = make_scenario(cfg.scenario, cfg.gains);
    for (auto& ch : b.channels) {
        ch.n_flow_steps = cfg.flow_steps;
        if (ch.channel_id == kGnssChannel) {
            ch.rate_hz = cfg.rate_gnss;
            ch.tau = cfg.tau_gnss;
        } else if (ch.channel_id == kMagnetometerChannel) {
            ch.rate_hz = cfg.rate_mag;
            ch.tau = cfg.tau_mag;
        }
    }
    return b;
}

SimTrace run_simulation(const SimConfig& cfg, const ScenarioBundle& b) {
    HybridOptions opt;
    opt.t_end = cfg.t_end;
    opt.dt = cfg.dt;
    opt.integrator = cfg.integrator == "euler" ? Integrator::Euler : Integrator::Exact;
    opt.updates_enabled = !cfg.no_updates;
    const ObserverState obs0{b.initial_observer, 0.0};
    const ManifoldPoint truth0 = b.truth_generator(0.0).first;
    return run_hybrid(*b.structure, obs0, truth0, b.input_signal(), b.channels,
                      b.cost ? &*b.cost : nullptr, opt);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synchronous observers on homogeneous spaces", "synobs"};
    app.require_subcommand(1);

    if (!args.empty() && args.front() == "simulate") {
        return run_simulate(std::vector<std::string>(args.begin() + 1, args.end()), out, err);
    }
    app.add_subcommand("simulate", "run a scenario and write a CSV trace");

    std::string an_scenario;
    std::string an_spec;
    std::string an_output = "analysis.json";
    int an_samples = 25;
    int an_max_dim = 0;
    std::int64_t an_seed = 11;
    CLI::App* analyze = app.add_subcommand("analyze", "accessibility algebra of a scenario or field spec");
    auto* sc_opt = analyze->add_option("--scenario", an_scenario, "bearings, unicycle or vaa");
    auto* spec_opt = analyze->add_option("--spec", an_spec, "JSON file with affine fields on R^n");
    sc_opt->excludes(spec_opt);
    analyze->add_option("--output", an_output, "JSON report path");
    analyze->add_option("--samples", an_samples, "sample points");
    analyze->add_option("--max_dim,--max-dim", an_max_dim, "dimension budget (0: 4 dim M)");
    analyze->add_option("--seed", an_seed);

    std::string v_scenario = "vaa";
    VAAGains v_gains;
    int v_samples = 500;
    int v_decrease = 1000;
    CLI::App* verify = app.add_subcommand("verify", "fundamental, synchrony and decrease checks");
    verify->add_option("--scenario", v_scenario, "bearings, unicycle or vaa");
    verify->add_option("--k_v", v_gains.k_v);
    verify->add_option("--k_c", v_gains.k_c);
    verify->add_option("--k_m", v_gains.k_m);
    verify->add_option("--alpha", v_gains.alpha);
    verify->add_option("--samples", v_samples, "samples for fundamental and synchrony");
    verify->add_option("--decrease_samples", v_decrease, "samples per decrease check");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        const std::string key = key_from_parse_error(e.what());
        err << "error" << (key.empty() ? "" : " [" + key + "]") << ": " << e.what() << "\n";
        return exit_code::invalid_config;
    }

    try {
        if (analyze->parsed()) {
            if (an_scenario.empty() == an_spec.empty()) {
                throw ConfigError("scenario", "analyze needs exactly one of --scenario or --spec");
            }
            if (an_samples < 1) throw ConfigError("samples", "samples: must be >= 1");
            const AffineSystem sys =
                an_spec.empty() ? make_scenario(an_scenario).structure->system : system_from_spec(an_spec);
            return cmd_analyze(sys, an_output, an_samples, an_max_dim, static_cast<std::uint64_t>(an_seed), out,
                               err);
        }
        if (verify->parsed()) {
            if (v_samples < 1) throw ConfigError("samples", "samples: must be >= 1");
            if (v_decrease < 1) throw ConfigError("decrease_samples", "decrease_samples: must be >= 1");
            VaaOptions opts;
            opts.enforce_gain_condition = false;
            return cmd_verify(make_scenario(v_scenario, v_gains, opts), v_samples, v_decrease, out);
        }
    } catch (const ConfigError& e) {
        err << "error [" << e.key() << "]: " << e.what() << "\n";
        return exit_code::invalid_config;
    }
    return exit_code::invalid_config;
}

}  // namespace synobs
