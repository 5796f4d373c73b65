// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [path/to/synobs]

#include "synobs/accessibility.hpp"
#include "synobs/cli.hpp"
#include "synobs/scenarios.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace synobs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = limit_s <= 0.0 || secs < limit_s;
    const bool ok = o.passed && in_time;
    if (!ok) ++failures;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f s", secs);
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << timing
              << (limit_s > 0.0 ? (in_time ? " within " : " exceeds ") + std::to_string(limit_s).substr(0, 4) + " s" : "")
              << "]" << std::endl;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimTrace reference_run(bool updates) {
    SimConfig cfg;
    cfg.no_updates = !updates;
    cfg.validate();
    return run_simulation(cfg, configured_bundle(cfg));
}

Outcome unicycle_symmetry(const fs::path& dir) {
    std::ostringstream out;
    std::ostringstream err;
    const std::string report = (dir / "unicycle.json").string();
    const int rc = run_cli({"analyze", "--scenario", "unicycle", "--output", report}, out, err);
    if (rc != 0) return {false, "analyze exited " + std::to_string(rc) + ": " + err.str()};
    const auto j = nlohmann::json::parse(slurp(report));
    const auto& c = j["structure_constants"];
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs(c[0][1][k].get<double>() - (k == 2 ? 1.0 : 0.0)));
        worst = std::max(worst, std::abs(c[0][2][k].get<double>() - (k == 1 ? -1.0 : 0.0)));
        worst = std::max(worst, std::abs(c[1][2][k].get<double>()));
    }
    const bool line_ok = out.str().rfind("dimension 3, matches se(2), controllable", 0) == 0;
    const bool ok = line_ok && j["dimension"] == 3 && j["match"] == "se(2)" && j["controllable"] == true && worst <= 1e-6;
    return {ok, "dimension " + j["dimension"].dump() + ", match " + j["match"].get<std::string>() +
                    ", controllable " + j["controllable"].dump() + ", max constant error " + fmt(worst)};
}

Outcome fundamental_verification() {
    std::string detail;
    bool ok = true;
    for (const auto& b : {bearings_scenario(), unicycle_scenario(), vaa_scenario()}) {
        const VerificationReport r = verify_fundamental(*b.structure, 500, 1e-9);
        ok = ok && r.passed && r.samples == 500;
        detail += (detail.empty() ? "" : ", ") + b.name + " " + fmt(r.max_residual);
    }
    return {ok, "max residual over 500 samples: " + detail};
}

Outcome exact_synchrony() {
    const SimTrace tr = reference_run(false);
    double dL = 0.0;
    double de = 0.0;
    for (const auto& r : tr.rows) {
        dL = std::max(dL, std::abs(r.lyapunov - tr.rows.front().lyapunov));
        de = std::max(de, chart_difference(r.error, tr.rows.front().error).norm());
    }
    return {tr.rows.size() == 1001 && dL <= 1e-9 && de <= 1e-9,
            std::to_string(tr.rows.size()) + " rows, max |L - L0| " + fmt(dL) + ", max error drift " + fmt(de)};
}

Outcome hybrid_monotonicity() {
    const SimTrace tr = reference_run(true);
    int events = 0;
    int strict = 0;
    int ties = 0;
    int increases = 0;
    double flat = 0.0;
    for (std::size_t i = 1; i < tr.rows.size(); ++i) {
        const double before = tr.rows[i - 1].lyapunov;
        const double after = tr.rows[i].lyapunov;
        if (tr.rows[i].event == 0) {
            flat = std::max(flat, std::abs(after - before));
            continue;
        }
        ++events;
        if (after < before) ++strict;
        else if (after == before) ++ties;
        else ++increases;
    }
    return {events == 60 && strict == 60 && flat <= 1e-9,
            std::to_string(strict) + "/" + std::to_string(events) + " events strictly decreasing (" +
                std::to_string(ties) + " unchanged, " + std::to_string(increases) +
                " increasing), max change between events " + fmt(flat)};
}

Outcome convergence() {
    const ScenarioBundle b = vaa_scenario();
    const SimTrace tr = reference_run(true);
    const auto [att, vel] = b.error_metrics(tr.rows.back().truth, tr.rows.back().estimate);
    return {tr.rows.back().t == 10.0 && att < 0.05 && vel < 0.05,
            "at t = 10 s attitude error " + fmt(att) + " rad, velocity error " + fmt(vel) + " m/s"};
}

Outcome differential_decrease() {
    const ScenarioBundle b = vaa_scenario();
    std::string detail;
    bool ok = true;
    for (const auto& ch : b.channels) {
        const DecreaseReport r = differential_decrease_check(*b.structure, ch, *b.cost, 1000, 1e-12);
        ok = ok && r.report.passed;
        detail += ch.name + " max rate " + fmt(r.report.max_residual) + ", ";
    }
    VaaOptions opt;
    opt.enforce_gain_condition = false;
    const ScenarioBundle bad = vaa_scenario(VAAGains{0.01, 1.0, 5.0, 1.0}, opt);
    const DecreaseReport w = differential_decrease_check(*bad.structure, bad.channels[0], *bad.cost, 1000, 1e-12);
    const bool witness = !w.report.passed && w.witness_xhat && w.witness_state &&
                         cost_rate(*bad.structure, bad.channels[0], *bad.cost, *w.witness_xhat, *w.witness_state) > 0.0;
    ok = ok && witness;
    return {ok, detail + "k_v = 0.01 witness rate " + fmt(w.report.max_residual)};
}

Outcome structural_suites() {
    constexpr int n = 1000;
    double axioms = 0.0;
    double subgroup = 0.0;
    double brackets = 0.0;
    double actions = 0.0;
    double round_trip = 0.0;
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int g = 0; g < 3; ++g) {
        const auto id = static_cast<GroupId>(g);
        const GroupAction phi{static_cast<ActionKind>(g)};
        const GroupElement I = GroupElement::identity(id);
        std::mt19937_64 rng(5000 + g);
        const auto pts = sample_points(phi.manifold(), n, 6000 + g);
        for (int k = 0; k < n; ++k) {
            const GroupElement a = random_element(id, rng);
            const GroupElement b = random_element(id, rng);
            const GroupElement c = random_element(id, rng);
            axioms = std::max({axioms, chart_difference(compose(compose(a, b), c), compose(a, compose(b, c))).norm(),
                               chart_difference(compose(I, a), a).norm(), chart_difference(compose(a, I), a).norm(),
                               chart_difference(compose(a, inverse(a)), I).norm()});

            const AlgebraElement u = random_algebra(id, rng);
            const AlgebraElement v = random_algebra(id, rng);
            const AlgebraElement w = random_algebra(id, rng);
            const double s = coef(rng);
            const double t = coef(rng);
            subgroup = std::max(subgroup, chart_difference(exp((s + t) * u), compose(exp(s * u), exp(t * u))).norm());
            brackets = std::max(
                {brackets, (bracket(u, v) + bracket(v, u)).coords().norm(),
                 (bracket(s * u + t * v, w) - (s * bracket(u, w) + t * bracket(v, w))).coords().norm(),
                 (bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v))).coords().norm()});

            const ManifoldPoint& xi = pts[k];
            actions = std::max({actions, chart_difference(act(phi, I, xi), xi).norm(),
                                chart_difference(act(phi, b, act(phi, a, xi)), act(phi, compose(a, b), xi)).norm()});
            round_trip = std::max(round_trip, chart_difference(error(phi, a, reconstruct(phi, a, xi)), xi).norm());
        }
    }
    const bool ok = axioms <= 1e-12 && subgroup <= 1e-10 && brackets <= 1e-12 && actions <= 1e-10 && round_trip <= 1e-10;
    return {ok, "3 x 1000 samples: group axioms " + fmt(axioms) + ", exp subgroup " + fmt(subgroup) + ", bracket " +
                    fmt(brackets) + ", action " + fmt(actions) + ", error/reconstruct " + fmt(round_trip)};
}

Outcome determinism(const fs::path& dir, const std::string& exe) {
    const fs::path a = dir / "run_a.csv";
    const fs::path b = dir / "run_b.csv";
    std::string how;
    if (!exe.empty() && fs::exists(exe)) {
        for (const auto& p : {a, b}) {
            const std::string cmd = "\"" + exe + "\" simulate --scenario vaa --seed 7 --output \"" + p.string() + "\" > \"" +
                                    (dir / "stdout.txt").string() + "\"";
            if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
        }
        how = "two synobs processes";
    } else {
        std::ostringstream out;
        std::ostringstream err;
        for (const auto& p : {a, b}) {
            if (run_cli({"simulate", "--scenario", "vaa", "--seed", "7", "--output", p.string()}, out, err) != 0) {
                return {false, "simulate failed: " + err.str()};
            }
        }
        how = "two in-process runs";
    }
    const std::string x = slurp(a);
    const std::string y = slurp(b);
    return {!x.empty() && x == y, how + ", " + std::to_string(x.size()) + " bytes, " + (x == y ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string exe = argc > 1 ? argv[1] : "";
    const fs::path dir = fs::temp_directory_path() / "synobs_acceptance";
    fs::create_directories(dir);

    criterion("unicycle symmetry derivation", 1.0, [&] { return unicycle_symmetry(dir); });
    criterion("fundamental verification", 1.0, fundamental_verification);
    criterion("exact synchrony", 1.0, exact_synchrony);
    criterion("hybrid Lyapunov monotonicity", 5.0, hybrid_monotonicity);
    criterion("convergence", 0.0, convergence);
    criterion("differential decrease", 0.0, differential_decrease);
    criterion("structural suites", 10.0, structural_suites);
    criterion("determinism", 0.0, [&] { return determinism(dir, exe); });

    fs::remove_all(dir);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
