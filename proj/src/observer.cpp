#include "synobs/observer.hpp"

#include "synobs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace synobs {

void UpdateChannel::validate() const {
    const std::string prefix = "channel " + std::to_string(channel_id) + " (" + name + "): ";
    if (!(tau > 0.0)) throw ConfigError("tau", prefix + "tau must be positive");
    if (n_flow_steps < 1) throw ConfigError("flow_steps", prefix + "flow_steps must be >= 1");
    if (!(rate_hz > 0.0)) throw ConfigError("rate", prefix + "rate must be positive");
    if (!measure || !delta) throw ConfigError("channel", prefix + "missing measurement or correction");
}

ObserverState propagate(const FundamentalStructure& fs, const ObserverState& obs,
                        const InputVector& v, double dt) {
    if (!(dt > 0.0)) throw ContractError("propagate: dt must be positive");
    return {compose(obs.xhat, exp(dt * fs.lambda(v))), obs.t + dt};
}

ManifoldPoint propagate_truth(const FundamentalStructure& fs, const ManifoldPoint& xi,
                              const InputVector& v, double dt) {
    if (!(dt > 0.0)) throw ContractError("propagate_truth: dt must be positive");
    return act(fs.action, exp(dt * fs.lambda(v)), xi);
}

ManifoldPoint propagate_truth_euler(const FundamentalStructure& fs, const ManifoldPoint& xi,
                                    const InputVector& v, double dt) {
    if (!(dt > 0.0)) throw ContractError("propagate_truth_euler: dt must be positive");
    return retract(xi, dt * eval_system(fs.system, v, xi).components);
}

ObserverState apply_update(const ObserverState& obs, const UpdateChannel& ch, const Measurement& y) {
    if (y.channel_id != ch.channel_id) {
        throw ContractError("apply_update: measurement for channel " + std::to_string(y.channel_id) +
                            " given to channel " + std::to_string(ch.channel_id));
    }
    const double h = ch.tau / ch.n_flow_steps;
    GroupElement X = obs.xhat;
    for (int i = 0; i < ch.n_flow_steps; ++i) {
        X = compose(exp(h * ch.delta(y.value, X)), X);
    }
    return {X, obs.t};
}

double lyapunov_value(const CostFunction& cost, const ManifoldPoint& e) { return cost.value(e); }

double cost_rate(const FundamentalStructure& fs, const UpdateChannel& ch, const CostFunction& cost,
                 const GroupElement& Xhat, const ManifoldPoint& xi) {
    const AlgebraElement D = ch.delta(ch.measure(xi), Xhat);
    const ManifoldPoint e = error(fs.action, Xhat, xi);
    const TangentVector de{-fundamental_field(fs.action, D, e).components};
    return cost.differential(e, de);
}

DecreaseReport differential_decrease_check(const FundamentalStructure& fs, const UpdateChannel& ch,
                                           const CostFunction& cost, int n_samples, double tol,
                                           std::uint64_t seed) {
    if (n_samples < 1) throw ContractError("differential_decrease_check: n_samples must be >= 1");
    if (!cost.differential) {
        throw ContractError("differential_decrease_check: cost has no differential");
    }
    std::mt19937_64 rng(seed);
    DecreaseReport out;
    out.report.name = "decrease[" + ch.name + "]";
    out.report.tolerance = tol;
    out.report.samples = n_samples;
    out.report.max_residual = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_samples; ++k) {
        const GroupElement Xhat = random_element(fs.action.group(), rng);
        const ManifoldPoint xi = random_state(fs, rng);
        const double rate = cost_rate(fs, ch, cost, Xhat, xi);
        if (rate > out.report.max_residual) {
            out.report.max_residual = rate;
            out.witness_xhat = Xhat;
            out.witness_state = xi;
        }
    }
    out.report.passed = out.report.max_residual <= tol;
    return out;
}

int SimTrace::event_count(int channel_id) const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                          [&](const TraceRow& r) { return r.event == channel_id; }));
}

long long measurement_stride(double rate_hz, double dt) {
    if (!(rate_hz > 0.0)) throw ConfigError("rate", "measurement rate must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt", "dt must be positive");
    const double period = 1.0 / rate_hz;
    const long long stride = std::llround(period / dt);
    if (stride < 1 || std::abs(static_cast<double>(stride) * dt - period) > 1e-12) {
        throw ConfigError("dt", "dt = " + std::to_string(dt) + " does not divide the measurement period " +
                                    std::to_string(period));
    }
    return stride;
}

SimTrace run_hybrid(const FundamentalStructure& fs, const ObserverState& obs0,
                    const ManifoldPoint& truth0, const InputSignal& input,
                    const std::vector<UpdateChannel>& channels, const CostFunction* cost,
                    const HybridOptions& options) {
    if (!(options.dt > 0.0)) throw ConfigError("dt", "dt must be positive");
    if (!(options.t_end > 0.0)) throw ConfigError("t_end", "t_end must be positive");
    const long long steps = std::llround(options.t_end / options.dt);
    if (std::abs(static_cast<double>(steps) * options.dt - options.t_end) > 1e-9) {
        throw ConfigError("dt", "dt must divide t_end");
    }

    std::vector<const UpdateChannel*> ordered;
    std::vector<long long> strides;
    if (options.updates_enabled) {
        for (const auto& ch : channels) {
            ch.validate();
            ordered.push_back(&ch);
        }
        std::sort(ordered.begin(), ordered.end(),
                  [](const UpdateChannel* a, const UpdateChannel* b) { return a->channel_id < b->channel_id; });
        for (const auto* ch : ordered) strides.push_back(measurement_stride(ch->rate_hz, options.dt));
    }

    const GroupAction& phi = fs.action;
    SimTrace trace;
    trace.rows.reserve(static_cast<std::size_t>(steps + 1));

    auto record = [&](double t, int event, const ObserverState& obs, const ManifoldPoint& xi) {
        ManifoldPoint e = error(phi, obs.xhat, xi);
        const double L = cost ? lyapunov_value(*cost, e) : std::numeric_limits<double>::quiet_NaN();
        trace.rows.push_back(TraceRow{t, event, xi, reconstruct(phi, obs.xhat, fs.origin), std::move(e), L});
    };

    ObserverState obs = obs0;
    ManifoldPoint xi = truth0;
    record(obs.t, 0, obs, xi);

    for (long long k = 1; k <= steps; ++k) {
        const double t_prev = obs0.t + static_cast<double>(k - 1) * options.dt;
        const double t = obs0.t + static_cast<double>(k) * options.dt;
        const InputVector v = input(t_prev);
        obs = propagate(fs, obs, v, options.dt);
        obs.t = t;
        xi = options.integrator == Integrator::Exact ? propagate_truth(fs, xi, v, options.dt)
                                                     : propagate_truth_euler(fs, xi, v, options.dt);
        record(t, 0, obs, xi);

        for (std::size_t c = 0; c < ordered.size(); ++c) {
            if (k % strides[c] != 0) continue;
            const UpdateChannel& ch = *ordered[c];
            const double before = trace.rows.back().lyapunov;
            obs = apply_update(obs, ch, Measurement{ch.channel_id, ch.measure(xi), t});
            record(t, ch.channel_id, obs, xi);
            const double after = trace.rows.back().lyapunov;
            if (after > before) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "t=%.6f channel %d: Lyapunov increased from %.17g to %.17g", t,
                              ch.channel_id, before, after);
                trace.warnings.emplace_back(buf);
            }
        }
    }
    return trace;
}

}  // namespace synobs
