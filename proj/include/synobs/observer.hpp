#pragma once

// Synchronous observer: X̂ follows the fundamental lift between measurements
// and jumps by the flow of a right-trivialized correction field
// X̂' = Δ(X̂, y)·X̂ for a fixed duration τ whenever a measurement arrives.

#include "synobs/systems.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace synobs {

struct ObserverState {
    GroupElement xhat;
    double t = 0.0;
};

struct Measurement {
    int channel_id = 0;
    Eigen::VectorXd value;
    double timestamp = 0.0;
};

using MeasureFn = std::function<Eigen::VectorXd(const ManifoldPoint&)>;
/// Right-trivialized correction Δ(y, X̂) ∈ 𝔤.
using CorrectionFn = std::function<AlgebraElement(const Eigen::VectorXd&, const GroupElement&)>;

struct UpdateChannel {
    int channel_id = 0;
    std::string name;
    MeasureFn measure;
    CorrectionFn delta;
    double tau = 1.0;
    int n_flow_steps = 50;
    double rate_hz = 1.0;

    /// Throws ConfigError unless τ > 0, n_flow_steps ≥ 1 and rate > 0.
    void validate() const;
};

struct CostFunction {
    std::function<double(const ManifoldPoint&)> value;
    /// D𝓛(e)[de] for a chart-coordinate tangent `de` at e.
    std::function<double(const ManifoldPoint&, const TangentVector&)> differential;
    double alpha = 1.0;
};

/// X̂ ← X̂·exp(dt·Λ(v)), t ← t + dt.
ObserverState propagate(const FundamentalStructure& fs, const ObserverState& obs,
                        const InputVector& v, double dt);

/// ξ ← φ(exp(dt·Λ(v)), ξ), the exact flow of f_v for constant v.
ManifoldPoint propagate_truth(const FundamentalStructure& fs, const ManifoldPoint& xi,
                              const InputVector& v, double dt);

/// One first-order step ξ ← retract(ξ, dt·f_v(ξ)); Lie-group Euler on the
/// rotation blocks.
ManifoldPoint propagate_truth_euler(const FundamentalStructure& fs, const ManifoldPoint& xi,
                                    const InputVector& v, double dt);

/// Flow of X̂' = Δ(y, X̂')·X̂' for duration τ with n left-Euler substeps
/// X̂' ← exp((τ/n)·Δ)·X̂'. Time is unchanged.
ObserverState apply_update(const ObserverState& obs, const UpdateChannel& ch, const Measurement& y);

double lyapunov_value(const CostFunction& cost, const ManifoldPoint& e);

/// D𝓛(e)·D_X̂e[Δ·X̂] = D𝓛(e)[−φ♯_Δ(e)] at one (X̂, ξ), with y = h(ξ).
double cost_rate(const FundamentalStructure& fs, const UpdateChannel& ch, const CostFunction& cost,
                 const GroupElement& Xhat, const ManifoldPoint& xi);

struct DecreaseReport {
    VerificationReport report;  // max_residual holds the largest cost rate seen
    std::optional<GroupElement> witness_xhat;
    std::optional<ManifoldPoint> witness_state;
};

/// Largest cost_rate over random (X̂, ξ); passes iff it is ≤ tol.
DecreaseReport differential_decrease_check(const FundamentalStructure& fs, const UpdateChannel& ch,
                                           const CostFunction& cost, int n_samples,
                                           double tol = 1e-12, std::uint64_t seed = kVerifySeed);

enum class Integrator { Exact, Euler };

using InputSignal = std::function<InputVector(double)>;

struct TraceRow {
    double t;
    int event;  // 0 for propagation rows, otherwise the channel id
    ManifoldPoint truth;
    ManifoldPoint estimate;
    ManifoldPoint error;
    double lyapunov;
};

struct SimTrace {
    std::vector<TraceRow> rows;
    std::vector<std::string> warnings;  // Lyapunov increases across an update

    int event_count(int channel_id) const;
};

struct HybridOptions {
    double t_end = 10.0;
    double dt = 0.01;
    Integrator integrator = Integrator::Exact;
    bool updates_enabled = true;
};

/// Number of propagation steps between measurements of a channel. Throws
/// ConfigError if dt does not divide 1/rate to within 1e−12.
long long measurement_stride(double rate_hz, double dt);

/// Hybrid loop on the dt grid. Inputs are held constant over each step at
/// their value at the step start. Channels fire at multiples of 1/rate
/// (t > 0), in ascending channel id, each producing a post-update row.
SimTrace run_hybrid(const FundamentalStructure& fs, const ObserverState& obs0,
                    const ManifoldPoint& truth0, const InputSignal& input,
                    const std::vector<UpdateChannel>& channels, const CostFunction* cost,
                    const HybridOptions& options);

}  // namespace synobs
