#pragma once

// Three worked systems wired into the generic machinery:
//
//   bearings  η̇ = −Ω^×η on 𝕊², observed through SO(3)
//   unicycle  (θ̇, ẋ, ẏ) = (ω, v cos θ, v sin θ) on S¹ × ℝ², symmetry SE(2)
//   vaa       (Ṙ, v̇) = (RΩ^×, Ra + g) on SO(3) × ℝ³, GNSS velocity and
//             magnetometer updates

#include "synobs/observer.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace synobs {

struct VAAGains {
    double k_v = 5.0;
    double k_c = 1.0;
    double k_m = 5.0;
    double alpha = 1.0;

    /// Throws ConfigError unless all gains are positive and k_v > k_c/(2α).
    void validate() const;
};

struct VaaOptions {
    Eigen::Vector3d gravity = 9.81 * Eigen::Vector3d::UnitZ();
    Eigen::Vector3d mag_reference = Eigen::Vector3d::UnitX();
    /// When false the gain condition is not enforced; used to exhibit a
    /// design that fails the decrease check.
    bool enforce_gain_condition = true;
};

/// (ξ(t), v(t)) of the scenario's reference experiment.
using TruthGenerator = std::function<std::pair<ManifoldPoint, InputVector>(double)>;

/// Pair of scalar errors (rotation-like, translation-like) between truth and
/// estimate, written to the CSV as attitude_error_rad and velocity_error.
using ErrorMetrics = std::function<std::pair<double, double>(const ManifoldPoint&, const ManifoldPoint&)>;

struct ScenarioBundle {
    std::string name;
    std::shared_ptr<const FundamentalStructure> structure;
    std::vector<UpdateChannel> channels;
    std::optional<CostFunction> cost;
    TruthGenerator truth_generator;
    GroupElement initial_observer;
    std::vector<std::string> state_columns;  // names of to_chart entries
    ErrorMetrics error_metrics;

    InputSignal input_signal() const;
};

ScenarioBundle bearings_scenario();
ScenarioBundle unicycle_scenario();
ScenarioBundle vaa_scenario(const VAAGains& gains = {}, const VaaOptions& options = {});

/// Bundle by CLI name (`bearings`, `unicycle`, `vaa`); throws ConfigError on
/// anything else.
ScenarioBundle make_scenario(const std::string& name, const VAAGains& gains = {},
                             const VaaOptions& options = {});

/// Circle flight: R(t) = exp(t·e₃^×), v(t) = 2R(t)e₁, inputs (e₃, 2e₂ − Rᵀg).
std::pair<ManifoldPoint, InputVector> vaa_truth(double t,
                                                const Eigen::Vector3d& gravity = 9.81 * Eigen::Vector3d::UnitZ());

/// X̂₀ = (0, exp(0.99π·e₁^×), (3, −2, 2)).
GroupElement vaa_initial_observer();

/// VAA Lyapunov function ½‖R_e − I‖²_F + (α/2)‖v_e‖² with its differential.
CostFunction vaa_cost(double alpha);

inline constexpr int kGnssChannel = 1;
inline constexpr int kMagnetometerChannel = 2;

}  // namespace synobs
