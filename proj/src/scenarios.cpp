#include "synobs/scenarios.hpp"

#include "synobs/errors.hpp"

#include <cmath>
#include <numbers>

namespace synobs {

namespace {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

// --- bearings ---------------------------------------------------------------

VectorFieldHandle sphere_input_field(int i) {
    const Matrix3d A = -hat(Vector3d::Unit(i));
    VectorFieldHandle f;
    f.manifold = ManifoldId::Sphere2;
    f.label = "f" + std::to_string(i + 1);
    f.evaluate = [A](const VectorXd& eta) -> VectorXd { return A * eta; };
    f.jacobian = [A](const VectorXd&) -> MatrixXd { return A; };
    return f;
}

// --- unicycle ---------------------------------------------------------------

VectorFieldHandle unicycle_turn_field() {
    VectorFieldHandle f;
    f.manifold = ManifoldId::Unicycle;
    f.label = "f1";
    f.evaluate = [](const VectorXd&) -> VectorXd { return Vector3d::UnitX(); };
    f.jacobian = [](const VectorXd&) -> MatrixXd { return MatrixXd::Zero(3, 3); };
    return f;
}

VectorFieldHandle unicycle_drive_field() {
    VectorFieldHandle f;
    f.manifold = ManifoldId::Unicycle;
    f.label = "f2";
    f.evaluate = [](const VectorXd& c) -> VectorXd {
        return Vector3d(0.0, std::cos(c(0)), std::sin(c(0)));
    };
    f.jacobian = [](const VectorXd& c) -> MatrixXd {
        MatrixXd J = MatrixXd::Zero(3, 3);
        J(1, 0) = -std::sin(c(0));
        J(2, 0) = std::cos(c(0));
        return J;
    };
    return f;
}

// --- VAA --------------------------------------------------------------------
// Chart (R row-major, v). The rotation-rate fields are linear in R, the
// specific-force fields read one column of R.

VectorFieldHandle vaa_drift_field(const Vector3d& g) {
    VectorFieldHandle f;
    f.manifold = ManifoldId::VaaState;
    f.label = "f0";
    f.evaluate = [g](const VectorXd&) -> VectorXd {
        VectorXd out = VectorXd::Zero(12);
        out.tail<3>() = g;
        return out;
    };
    f.jacobian = [](const VectorXd&) -> MatrixXd { return MatrixXd::Zero(12, 12); };
    return f;
}

VectorFieldHandle vaa_gyro_field(int i) {
    const Matrix3d E = hat(Vector3d::Unit(i));
    VectorFieldHandle f;
    f.manifold = ManifoldId::VaaState;
    f.label = "fw" + std::to_string(i + 1);
    f.evaluate = [E](const VectorXd& c) -> VectorXd {
        VectorXd out = VectorXd::Zero(12);
        out.head<9>() = flatten_row_major(unflatten_row_major(c.head<9>()) * E);
        return out;
    };
    f.jacobian = [E](const VectorXd&) -> MatrixXd {
        MatrixXd J = MatrixXd::Zero(12, 12);
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col)
                for (int m = 0; m < 3; ++m) J(3 * r + col, 3 * r + m) = E(m, col);
        return J;
    };
    return f;
}

VectorFieldHandle vaa_accel_field(int i) {
    VectorFieldHandle f;
    f.manifold = ManifoldId::VaaState;
    f.label = "fa" + std::to_string(i + 1);
    f.evaluate = [i](const VectorXd& c) -> VectorXd {
        VectorXd out = VectorXd::Zero(12);
        out.tail<3>() = unflatten_row_major(c.head<9>()).col(i);
        return out;
    };
    f.jacobian = [i](const VectorXd&) -> MatrixXd {
        MatrixXd J = MatrixXd::Zero(12, 12);
        for (int r = 0; r < 3; ++r) J(9 + r, 3 * r + i) = 1.0;
        return J;
    };
    return f;
}

// Bundles are only handed out if their (φ, Λ) reproduces the system.
std::shared_ptr<const FundamentalStructure> checked(FundamentalStructure fs) {
    const VerificationReport r = verify_fundamental(fs, 50, 1e-9);
    if (!r.passed) {
        throw std::logic_error("scenario structure is not fundamental (residual " +
                               std::to_string(r.max_residual) + ")");
    }
    return std::make_shared<const FundamentalStructure>(std::move(fs));
}

std::vector<std::string> rotation_velocity_columns() {
    return {"R11", "R12", "R13", "R21", "R22", "R23", "R31", "R32", "R33", "v1", "v2", "v3"};
}

}  // namespace

void VAAGains::validate() const {
    if (!(k_v > 0.0)) throw ConfigError("k_v", "k_v must be positive");
    if (!(k_c > 0.0)) throw ConfigError("k_c", "k_c must be positive");
    if (!(k_m > 0.0)) throw ConfigError("k_m", "k_m must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha", "alpha must be positive");
    if (!(k_v > k_c / (2.0 * alpha))) {
        throw ConfigError("k_v", "gain condition k_v > k_c/(2*alpha) violated");
    }
}

InputSignal ScenarioBundle::input_signal() const {
    return [gen = truth_generator](double t) { return gen(t).second; };
}

ScenarioBundle bearings_scenario() {
    AffineSystem sys{ManifoldId::Sphere2, 3, std::nullopt, {}};
    std::vector<AlgebraElement> columns;
    for (int i = 0; i < 3; ++i) {
        sys.inputs.push_back(sphere_input_field(i));
        columns.push_back(AlgebraElement::so3(Vector3d::Unit(i)));
    }
    auto fs = checked(FundamentalStructure{
        sys, GroupAction::sphere_rotation(), LambdaMap{AlgebraElement::zero(GroupId::SO3), columns},
        ManifoldPoint(SpherePoint{Vector3d::UnitZ()})});

    // Demonstration run: constant body rate, gravity direction starting at e₃.
    const Vector3d omega(0.1, -0.2, 0.3);
    TruthGenerator truth = [omega](double t) {
        const Vector3d eta = so3_exp(t * omega).transpose() * Vector3d::UnitZ();
        return std::make_pair(ManifoldPoint(SpherePoint{eta}), InputVector(omega));
    };
    ErrorMetrics metrics = [](const ManifoldPoint& a, const ManifoldPoint& b) {
        const Vector3d& x = a.sphere().eta;
        const Vector3d& y = b.sphere().eta;
        return std::make_pair(std::atan2(x.cross(y).norm(), x.dot(y)), 0.0);
    };

    return ScenarioBundle{"bearings",
                          fs,
                          {},
                          std::nullopt,
                          truth,
                          GroupElement(Rotation{so3_exp(Vector3d(0.3, 0.0, 0.0))}),
                          {"eta1", "eta2", "eta3"},
                          metrics};
}

ScenarioBundle unicycle_scenario() {
    AffineSystem sys{ManifoldId::Unicycle, 3, std::nullopt,
                     {unicycle_turn_field(), unicycle_drive_field()}};
    // Λ(ω, v) = (ω, v, 0) in (ω, u₁, u₂)
    LambdaMap lambda{AlgebraElement::zero(GroupId::SE2),
                     {AlgebraElement::se2(1.0, {0.0, 0.0}), AlgebraElement::se2(0.0, {1.0, 0.0})}};
    auto fs = checked(
        FundamentalStructure{sys, GroupAction::unicycle_se2(), lambda,
                             ManifoldPoint(UnicyclePoint{0.0, {0.0, 0.0}})});

    // Demonstration run: constant turn rate 0.5 rad/s at 1 m/s from the origin.
    const double w = 0.5;
    const double speed = 1.0;
    TruthGenerator truth = [w, speed](double t) {
        const double th = w * t;
        const Eigen::Vector2d p((speed / w) * std::sin(th), (speed / w) * (1.0 - std::cos(th)));
        return std::make_pair(ManifoldPoint(UnicyclePoint{th, p}), InputVector(Eigen::Vector2d(w, speed)));
    };
    ErrorMetrics metrics = [](const ManifoldPoint& a, const ManifoldPoint& b) {
        const auto& x = a.unicycle();
        const auto& y = b.unicycle();
        return std::make_pair(std::abs(wrap_angle_signed(x.theta - y.theta)), (x.p - y.p).norm());
    };

    return ScenarioBundle{"unicycle",
                          fs,
                          {},
                          std::nullopt,
                          truth,
                          GroupElement(PlanarPose{0.5, {1.0, -1.0}}),
                          {"theta", "x", "y"},
                          metrics};
}

CostFunction vaa_cost(double alpha) {
    CostFunction c;
    c.alpha = alpha;
    c.value = [alpha](const ManifoldPoint& e) {
        const auto& s = e.vaa();
        return 0.5 * (s.R - Matrix3d::Identity()).squaredNorm() + 0.5 * alpha * s.v.squaredNorm();
    };
    c.differential = [alpha](const ManifoldPoint& e, const TangentVector& de) {
        const auto& s = e.vaa();
        const Matrix3d dR = unflatten_row_major(de.components.head<9>());
        const Vector3d dv = de.components.tail<3>();
        return (s.R - Matrix3d::Identity()).cwiseProduct(dR).sum() + alpha * s.v.dot(dv);
    };
    return c;
}

ScenarioBundle vaa_scenario(const VAAGains& gains, const VaaOptions& options) {
    if (options.enforce_gain_condition) gains.validate();
    const Vector3d g = options.gravity;
    const Vector3d m_ref = options.mag_reference;

    AffineSystem sys{ManifoldId::VaaState, 12, vaa_drift_field(g), {}};
    std::vector<AlgebraElement> columns;
    for (int i = 0; i < 3; ++i) {
        sys.inputs.push_back(vaa_gyro_field(i));
        columns.push_back(AlgebraElement::vaa(Vector3d::Zero(), Vector3d::Unit(i), Vector3d::Zero()));
    }
    for (int i = 0; i < 3; ++i) {
        sys.inputs.push_back(vaa_accel_field(i));
        columns.push_back(AlgebraElement::vaa(Vector3d::Zero(), Vector3d::Zero(), Vector3d::Unit(i)));
    }
    // Λ(Ω, a) = (g, Ω^×, a + g)
    LambdaMap lambda{AlgebraElement::vaa(g, Vector3d::Zero(), g), columns};
    auto fs = checked(
        FundamentalStructure{sys, GroupAction::vaa_affine(), lambda, ManifoldPoint(VaaState{})});

    UpdateChannel gnss;
    gnss.channel_id = kGnssChannel;
    gnss.name = "gnss";
    gnss.measure = [](const ManifoldPoint& xi) -> VectorXd { return xi.vaa().v; };
    gnss.delta = [gains](const VectorXd& y, const GroupElement& X) {
        const auto& p = X.vaa();
        const Vector3d ry = y - p.z;
        return AlgebraElement::vaa(gains.k_v * ry, gains.k_c * (p.x - p.z).cross(ry),
                                   gains.k_v * (y - p.x));
    };
    gnss.tau = 1.0;
    gnss.n_flow_steps = 50;
    gnss.rate_hz = 1.0;

    UpdateChannel mag;
    mag.channel_id = kMagnetometerChannel;
    mag.name = "magnetometer";
    mag.measure = [m_ref](const ManifoldPoint& xi) -> VectorXd { return xi.vaa().R.transpose() * m_ref; };
    mag.delta = [gains, m_ref](const VectorXd& y, const GroupElement& X) {
        const Vector3d qy = X.vaa().Q * y;
        return AlgebraElement::vaa(Vector3d::Zero(), gains.k_m * qy.cross(m_ref), Vector3d::Zero());
    };
    mag.tau = 0.2;
    mag.n_flow_steps = 50;
    mag.rate_hz = 5.0;

    TruthGenerator truth = [g](double t) { return vaa_truth(t, g); };
    ErrorMetrics metrics = [](const ManifoldPoint& a, const ManifoldPoint& b) {
        const auto& x = a.vaa();
        const auto& y = b.vaa();
        return std::make_pair(rotation_angle(x.R * y.R.transpose()), (x.v - y.v).norm());
    };

    return ScenarioBundle{"vaa",
                          fs,
                          {gnss, mag},
                          vaa_cost(gains.alpha),
                          truth,
                          vaa_initial_observer(),
                          rotation_velocity_columns(),
                          metrics};
}

ScenarioBundle make_scenario(const std::string& name, const VAAGains& gains, const VaaOptions& options) {
    if (name == "bearings") return bearings_scenario();
    if (name == "unicycle") return unicycle_scenario();
    if (name == "vaa") return vaa_scenario(gains, options);
    throw ConfigError("scenario", "unknown scenario '" + name + "' (expected bearings, unicycle or vaa)");
}

std::pair<ManifoldPoint, InputVector> vaa_truth(double t, const Eigen::Vector3d& gravity) {
    const Matrix3d R = so3_exp(t * Vector3d::UnitZ());
    InputVector v(6);
    v << Vector3d::UnitZ(), 2.0 * Vector3d::UnitY() - R.transpose() * gravity;
    return {ManifoldPoint(VaaState{R, 2.0 * R * Vector3d::UnitX()}), v};
}

GroupElement vaa_initial_observer() {
    return GroupElement(VaaPose{Vector3d::Zero(), so3_exp(0.99 * std::numbers::pi * Vector3d::UnitX()),
                                Vector3d(3.0, -2.0, 2.0)});
}

}  // namespace synobs
