#pragma once

// Right group actions on the state manifolds and the machinery derived from
// them: fundamental vector fields, the error e(X̂, ξ) = φ(X̂⁻¹, ξ) and the
// reconstruction ξ̂ = φ(X̂, ξ̊).

#include "synobs/lie_core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace synobs {

enum class ManifoldId {
    Sphere2,    ///< unit vectors η ∈ ℝ³
    Unicycle,   ///< S¹ × ℝ², chart (θ, x, y)
    VaaState,   ///< SO(3) × ℝ³, chart (R row-major, v)
    Euclidean,  ///< ℝⁿ, used for user-supplied field specs
};

std::string_view to_string(ManifoldId id);

struct SpherePoint {
    Eigen::Vector3d eta = Eigen::Vector3d::UnitX();
};

struct UnicyclePoint {
    double theta = 0.0;
    Eigen::Vector2d p = Eigen::Vector2d::Zero();
};

struct VaaState {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

struct EuclideanPoint {
    Eigen::VectorXd x;
};

/// Point on a state manifold. Construction normalizes sphere points, wraps
/// angles and re-orthonormalizes drifting rotation blocks.
class ManifoldPoint {
public:
    using Payload = std::variant<SpherePoint, UnicyclePoint, VaaState, EuclideanPoint>;

    ManifoldPoint(SpherePoint p);
    ManifoldPoint(UnicyclePoint p);
    ManifoldPoint(VaaState p);
    ManifoldPoint(EuclideanPoint p);

    ManifoldId id() const { return static_cast<ManifoldId>(payload_.index()); }
    const Payload& payload() const { return payload_; }

    const SpherePoint& sphere() const;
    const UnicyclePoint& unicycle() const;
    const VaaState& vaa() const;
    const EuclideanPoint& euclidean() const;

private:
    Payload payload_;
};

/// Size of the chart coordinate vector (ambient coordinates for 𝕊² and SO(3)).
int chart_dim(const ManifoldPoint& xi);

/// Dimension of the manifold itself.
int intrinsic_dim(const ManifoldPoint& xi);

Eigen::VectorXd to_chart(const ManifoldPoint& xi);

/// Inverse of `to_chart`; the result is projected back onto the manifold.
ManifoldPoint from_chart(ManifoldId id, const Eigen::VectorXd& coords);

/// Chart difference a − b, with the unicycle angle differenced on the circle.
Eigen::VectorXd chart_difference(const ManifoldPoint& a, const ManifoldPoint& b);

/// Orthonormal basis of T_ξM in chart coordinates, one column per direction.
Eigen::MatrixXd tangent_basis(const ManifoldPoint& xi);

/// First-order step from ξ along chart velocity `delta` (already scaled by
/// the step length). Rotation blocks move by R·exp(Rᵀ·δR), sphere points
/// along the great circle, everything else additively.
ManifoldPoint retract(const ManifoldPoint& xi, const Eigen::VectorXd& delta);

/// Seeded sample points: angles in [0, 2π), positions in [−5, 5], sphere
/// points uniform, rotations exp of a uniform box [−π, π]³.
std::vector<ManifoldPoint> sample_points(ManifoldId id, int n, std::uint64_t seed,
                                         int euclidean_dim = 2);

enum class ActionKind {
    SphereRotation,  ///< φ(R, η) = Rᵀη
    UnicycleSE2,     ///< φ((t, a), (θ, p)) = (θ + t, p + R(θ)a)
    VaaAffine,       ///< φ((z, Q, x), (R, v)) = (RQ, v + Rx + (I − R)z)
};

struct GroupAction {
    ActionKind kind;

    GroupId group() const;
    ManifoldId manifold() const;

    static GroupAction sphere_rotation() { return {ActionKind::SphereRotation}; }
    static GroupAction unicycle_se2() { return {ActionKind::UnicycleSE2}; }
    static GroupAction vaa_affine() { return {ActionKind::VaaAffine}; }
};

ManifoldPoint act(const GroupAction& phi, const GroupElement& X, const ManifoldPoint& xi);

/// φ♯_u(ξ) = Dφ_ξ(I)[u] in closed form.
TangentVector fundamental_field(const GroupAction& phi, const AlgebraElement& u,
                                const ManifoldPoint& xi);

/// Central difference of s ↦ φ(exp(s·u), ξ) at s = 0, step 1e−6·max(1, ‖u‖).
TangentVector fundamental_field_fd(const GroupAction& phi, const AlgebraElement& u,
                                   const ManifoldPoint& xi);

/// e(X̂, ξ) = φ(X̂⁻¹, ξ)
ManifoldPoint error(const GroupAction& phi, const GroupElement& Xhat, const ManifoldPoint& xi);

/// ξ̂ = φ(X̂, ξ̊)
ManifoldPoint reconstruct(const GroupAction& phi, const GroupElement& Xhat,
                          const ManifoldPoint& origin);

/// Some X with φ(X, from) = to. Closed form per action; nullopt when the
/// points are on different manifolds.
std::optional<GroupElement> transport(const GroupAction& phi, const ManifoldPoint& from,
                                      const ManifoldPoint& to);

}  // namespace synobs
