#pragma once

// Concrete Lie groups used by the observers:
//
//   SO(3)  rotation matrices, algebra so(3) stored as Ω ∈ ℝ³ (Ω^× via hat)
//   SE(2)  (θ, t) with θ ∈ [0, 2π), algebra (ω, u₁, u₂)
//   VAA    (z, Q, x) ∈ (ℝ³ × SO(3)) ⋉ ℝ³ with product
//            (z₁,Q₁,x₁)(z₂,Q₂,x₂) = (z₁+z₂, Q₁Q₂, x₁ + Q₁x₂ + (I−Q₁)z₂),
//          algebra (w, Ω, u) ∈ ℝ⁹
//
// Substituting p = x − z turns the VAA group into ℝ³ × SE(3), which is what
// the exponential and the matrix representation use.

#include <Eigen/Dense>

#include <random>
#include <string_view>
#include <variant>

namespace synobs {

enum class GroupId { SO3, SE2, VAA };

std::string_view to_string(GroupId id);

/// Dimension of the Lie algebra.
int algebra_dim(GroupId id);

/// Number of chart coordinates used for elements and tangent vectors.
int group_chart_dim(GroupId id);

/// Chart-coordinate velocity. Interpretation depends on the space it lives
/// on; see `to_chart` for groups and manifold points.
struct TangentVector {
    Eigen::VectorXd components;
};

// --- SO(3) helpers -------------------------------------------------------

Eigen::Matrix3d hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const Eigen::Matrix3d& W);

/// Rodrigues' formula, second-order series below ‖Ω‖ = 1e−8.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);

/// Left Jacobian of SO(3); maps the translational algebra part of SE(3) to
/// the translation of its exponential.
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& omega);

/// Rotation angle in [0, π].
double rotation_angle(const Eigen::Matrix3d& R);

/// ‖RᵀR − I‖_F
double orthogonality_defect(const Eigen::Matrix3d& R);

/// Nearest rotation (polar factor). Only applied when the orthogonality
/// defect exceeds `kRotationTolerance`.
Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& R);
Eigen::Matrix3d maybe_reorthonormalize(const Eigen::Matrix3d& R);

inline constexpr double kRotationTolerance = 1e-9;

Eigen::Matrix<double, 9, 1> flatten_row_major(const Eigen::Matrix3d& M);
Eigen::Matrix3d unflatten_row_major(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Wrap to [0, 2π).
double wrap_angle(double theta);
/// Wrap to (−π, π].
double wrap_angle_signed(double theta);

// --- group and algebra elements -----------------------------------------

struct Rotation {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
};

struct PlanarPose {
    double theta = 0.0;
    Eigen::Vector2d t = Eigen::Vector2d::Zero();
};

struct VaaPose {
    Eigen::Vector3d z = Eigen::Vector3d::Zero();
    Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
};

/// Element of one of the supported groups. Construction restores the chart
/// invariants: rotation blocks are re-orthonormalized when they drift more
/// than 1e−9 and SE(2) angles are wrapped to [0, 2π).
class GroupElement {
public:
    using Payload = std::variant<Rotation, PlanarPose, VaaPose>;

    GroupElement(Rotation r);
    GroupElement(PlanarPose p);
    GroupElement(VaaPose p);

    static GroupElement identity(GroupId id);

    GroupId id() const;
    const Payload& payload() const { return payload_; }

    const Rotation& so3() const;
    const PlanarPose& se2() const;
    const VaaPose& vaa() const;

private:
    Payload payload_;
};

class AlgebraElement {
public:
    /// `coords` must have `algebra_dim(id)` entries.
    AlgebraElement(GroupId id, Eigen::VectorXd coords);

    static AlgebraElement zero(GroupId id);
    static AlgebraElement so3(const Eigen::Vector3d& omega);
    static AlgebraElement se2(double omega, const Eigen::Vector2d& u);
    static AlgebraElement vaa(const Eigen::Vector3d& w, const Eigen::Vector3d& omega,
                              const Eigen::Vector3d& u);

    GroupId id() const { return id_; }
    const Eigen::VectorXd& coords() const { return coords_; }

    // Named views. SO(3): omega(); SE(2): coords (ω, u₁, u₂); VAA: w(), omega(), u().
    Eigen::Vector3d omega() const;
    Eigen::Vector3d w() const;
    Eigen::Vector3d u() const;

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator-() const;
    AlgebraElement operator*(double s) const;

private:
    GroupId id_;
    Eigen::VectorXd coords_;
};

AlgebraElement operator*(double s, const AlgebraElement& u);

// --- group contract ------------------------------------------------------

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);
GroupElement exp(const AlgebraElement& u);
AlgebraElement bracket(const AlgebraElement& u, const AlgebraElement& v);

/// Tangent vector a·U at `a`, in the group's chart coordinates.
TangentVector left_translate(const GroupElement& a, const AlgebraElement& u);

/// Faithful matrix representations (3×3, 3×3 and 8×8 respectively).
Eigen::MatrixXd to_matrix(const GroupElement& a);
Eigen::MatrixXd to_matrix(const AlgebraElement& u);
AlgebraElement algebra_from_matrix(GroupId id, const Eigen::MatrixXd& M);

/// Chart coordinates: SO(3) R row-major (9); SE(2) (θ, t₁, t₂);
/// VAA (z, Q row-major, x) (15).
Eigen::VectorXd to_chart(const GroupElement& a);

/// Chart-coordinate difference a − b; angles are differenced on the circle.
Eigen::VectorXd chart_difference(const GroupElement& a, const GroupElement& b);

/// Samples of the algebra uniform in [−h, h]ⁿ.
AlgebraElement random_algebra(GroupId id, std::mt19937_64& rng, double half_width = 1.0);

/// exp of a `random_algebra` sample.
GroupElement random_element(GroupId id, std::mt19937_64& rng, double half_width = 1.0);

}  // namespace synobs
