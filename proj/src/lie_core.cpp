#include "synobs/lie_core.hpp"

#include "synobs/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace synobs {

namespace {

constexpr double kSmallAngle = 1e-8;

void require_same(GroupId a, GroupId b, const char* op) {
    if (a != b) {
        throw ContractError(std::string(op) + ": group mismatch (" + std::string(to_string(a)) +
                            " vs " + std::string(to_string(b)) + ")");
    }
}

Eigen::Matrix2d planar_rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d R;
    R << c, -s, s, c;
    return R;
}

// Translation part of the SE(2) exponential: V(ω)u.
Eigen::Vector2d se2_translation(double omega, const Eigen::Vector2d& u) {
    double a;  // sin(ω)/ω
    double b;  // (1 − cos ω)/ω
    if (std::abs(omega) < kSmallAngle) {
        a = 1.0 - omega * omega / 6.0;
        b = omega / 2.0;
    } else {
        a = std::sin(omega) / omega;
        b = (1.0 - std::cos(omega)) / omega;
    }
    Eigen::Matrix2d V;
    V << a, -b, b, a;
    return V * u;
}

}  // namespace

std::string_view to_string(GroupId id) {
    switch (id) {
        case GroupId::SO3: return "SO(3)";
        case GroupId::SE2: return "SE(2)";
        case GroupId::VAA: return "VAA";
    }
    return "?";
}

int algebra_dim(GroupId id) { return id == GroupId::VAA ? 9 : 3; }

int group_chart_dim(GroupId id) {
    switch (id) {
        case GroupId::SO3: return 9;
        case GroupId::SE2: return 3;
        case GroupId::VAA: return 15;
    }
    return 0;
}

// --- SO(3) ----------------------------------------------------------------

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
    Eigen::Matrix3d W;
    W << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
         -w.y(), w.x(), 0.0;
    return W;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& W) {
    return {W(2, 1), W(0, 2), W(1, 0)};
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
    const double theta = omega.norm();
    const Eigen::Matrix3d W = hat(omega);
    if (theta < kSmallAngle) {
        return Eigen::Matrix3d::Identity() + W + 0.5 * W * W;
    }
    return Eigen::Matrix3d::Identity() + (std::sin(theta) / theta) * W +
           ((1.0 - std::cos(theta)) / (theta * theta)) * W * W;
}

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& omega) {
    const double theta = omega.norm();
    const Eigen::Matrix3d W = hat(omega);
    if (theta < kSmallAngle) {
        return Eigen::Matrix3d::Identity() + 0.5 * W + W * W / 6.0;
    }
    const double t2 = theta * theta;
    return Eigen::Matrix3d::Identity() + ((1.0 - std::cos(theta)) / t2) * W +
           ((theta - std::sin(theta)) / (t2 * theta)) * W * W;
}

double rotation_angle(const Eigen::Matrix3d& R) {
    const double s = 0.5 * vee(R - R.transpose()).norm();
    const double c = 0.5 * (R.trace() - 1.0);
    return std::atan2(s, c);
}

double orthogonality_defect(const Eigen::Matrix3d& R) {
    return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
}

Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& R) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d U = svd.matrixU();
    const Eigen::Matrix3d V = svd.matrixV();
    if ((U * V.transpose()).determinant() < 0.0) {
        U.col(2) *= -1.0;
    }
    return U * V.transpose();
}

Eigen::Matrix3d maybe_reorthonormalize(const Eigen::Matrix3d& R) {
    return orthogonality_defect(R) > kRotationTolerance ? project_to_rotation(R) : R;
}

Eigen::Matrix<double, 9, 1> flatten_row_major(const Eigen::Matrix3d& M) {
    Eigen::Matrix<double, 9, 1> v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v(3 * i + j) = M(i, j);
    return v;
}

Eigen::Matrix3d unflatten_row_major(const Eigen::Ref<const Eigen::VectorXd>& v) {
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = v(3 * i + j);
    return M;
}

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(theta, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r -= two_pi;
    return r;
}

double wrap_angle_signed(double theta) {
    double r = wrap_angle(theta);
    if (r > std::numbers::pi) r -= 2.0 * std::numbers::pi;
    return r;
}

// --- elements ---------------------------------------------------------------

GroupElement::GroupElement(Rotation r) : payload_(Rotation{maybe_reorthonormalize(r.R)}) {}

GroupElement::GroupElement(PlanarPose p) : payload_(PlanarPose{wrap_angle(p.theta), p.t}) {}

GroupElement::GroupElement(VaaPose p)
    : payload_(VaaPose{p.z, maybe_reorthonormalize(p.Q), p.x}) {}

GroupElement GroupElement::identity(GroupId id) {
    switch (id) {
        case GroupId::SO3: return GroupElement(Rotation{});
        case GroupId::SE2: return GroupElement(PlanarPose{});
        case GroupId::VAA: return GroupElement(VaaPose{});
    }
    throw ContractError("identity: unknown group");
}

GroupId GroupElement::id() const {
    return static_cast<GroupId>(payload_.index());
}

const Rotation& GroupElement::so3() const {
    if (auto p = std::get_if<Rotation>(&payload_)) return *p;
    throw ContractError("element is not in SO(3)");
}

const PlanarPose& GroupElement::se2() const {
    if (auto p = std::get_if<PlanarPose>(&payload_)) return *p;
    throw ContractError("element is not in SE(2)");
}

const VaaPose& GroupElement::vaa() const {
    if (auto p = std::get_if<VaaPose>(&payload_)) return *p;
    throw ContractError("element is not in the VAA group");
}

AlgebraElement::AlgebraElement(GroupId id, Eigen::VectorXd coords)
    : id_(id), coords_(std::move(coords)) {
    if (coords_.size() != algebra_dim(id_)) {
        throw ContractError("algebra element for " + std::string(to_string(id_)) + " needs " +
                            std::to_string(algebra_dim(id_)) + " coordinates, got " +
                            std::to_string(coords_.size()));
    }
}

AlgebraElement AlgebraElement::zero(GroupId id) {
    return {id, Eigen::VectorXd::Zero(algebra_dim(id))};
}

AlgebraElement AlgebraElement::so3(const Eigen::Vector3d& omega) {
    return {GroupId::SO3, omega};
}

AlgebraElement AlgebraElement::se2(double omega, const Eigen::Vector2d& u) {
    Eigen::VectorXd c(3);
    c << omega, u;
    return {GroupId::SE2, c};
}

AlgebraElement AlgebraElement::vaa(const Eigen::Vector3d& w, const Eigen::Vector3d& omega,
                                   const Eigen::Vector3d& u) {
    Eigen::VectorXd c(9);
    c << w, omega, u;
    return {GroupId::VAA, c};
}

Eigen::Vector3d AlgebraElement::omega() const {
    switch (id_) {
        case GroupId::SO3: return coords_.head<3>();
        case GroupId::VAA: return coords_.segment<3>(3);
        case GroupId::SE2: break;
    }
    throw ContractError("omega(): not defined for se(2)");
}

Eigen::Vector3d AlgebraElement::w() const {
    if (id_ != GroupId::VAA) throw ContractError("w(): only defined for the VAA algebra");
    return coords_.head<3>();
}

Eigen::Vector3d AlgebraElement::u() const {
    if (id_ != GroupId::VAA) throw ContractError("u(): only defined for the VAA algebra");
    return coords_.tail<3>();
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    require_same(id_, o.id_, "algebra +");
    return {id_, coords_ + o.coords_};
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
    require_same(id_, o.id_, "algebra -");
    return {id_, coords_ - o.coords_};
}

AlgebraElement AlgebraElement::operator-() const { return {id_, -coords_}; }

AlgebraElement AlgebraElement::operator*(double s) const { return {id_, s * coords_}; }

AlgebraElement operator*(double s, const AlgebraElement& u) { return u * s; }

// --- group contract ---------------------------------------------------------

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    require_same(a.id(), b.id(), "compose");
    switch (a.id()) {
        case GroupId::SO3:
            return GroupElement(Rotation{a.so3().R * b.so3().R});
        case GroupId::SE2: {
            const auto& p = a.se2();
            const auto& q = b.se2();
            return GroupElement(PlanarPose{p.theta + q.theta, p.t + planar_rotation(p.theta) * q.t});
        }
        case GroupId::VAA: {
            const auto& p = a.vaa();
            const auto& q = b.vaa();
            return GroupElement(VaaPose{p.z + q.z, p.Q * q.Q,
                                        p.x + p.Q * q.x + (Eigen::Matrix3d::Identity() - p.Q) * q.z});
        }
    }
    throw ContractError("compose: unknown group");
}

GroupElement inverse(const GroupElement& a) {
    switch (a.id()) {
        case GroupId::SO3:
            return GroupElement(Rotation{a.so3().R.transpose()});
        case GroupId::SE2: {
            const auto& p = a.se2();
            return GroupElement(PlanarPose{-p.theta, -(planar_rotation(p.theta).transpose() * p.t)});
        }
        case GroupId::VAA: {
            const auto& p = a.vaa();
            const Eigen::Matrix3d Qt = p.Q.transpose();
            return GroupElement(
                VaaPose{-p.z, Qt, -Qt * p.x - (Eigen::Matrix3d::Identity() - Qt) * p.z});
        }
    }
    throw ContractError("inverse: unknown group");
}

GroupElement exp(const AlgebraElement& u) {
    const Eigen::VectorXd& c = u.coords();
    switch (u.id()) {
        case GroupId::SO3:
            return GroupElement(Rotation{so3_exp(c.head<3>())});
        case GroupId::SE2:
            return GroupElement(PlanarPose{c(0), se2_translation(c(0), c.tail<2>())});
        case GroupId::VAA: {
            const Eigen::Vector3d w = c.head<3>();
            const Eigen::Vector3d omega = c.segment<3>(3);
            const Eigen::Vector3d p = so3_left_jacobian(omega) * (c.tail<3>() - w);
            return GroupElement(VaaPose{w, so3_exp(omega), p + w});
        }
    }
    throw ContractError("exp: unknown group");
}

AlgebraElement bracket(const AlgebraElement& u, const AlgebraElement& v) {
    require_same(u.id(), v.id(), "bracket");
    if (u.id() == GroupId::SO3) {
        return AlgebraElement::so3(u.omega().cross(v.omega()));
    }
    const Eigen::MatrixXd A = to_matrix(u);
    const Eigen::MatrixXd B = to_matrix(v);
    return algebra_from_matrix(u.id(), A * B - B * A);
}

TangentVector left_translate(const GroupElement& a, const AlgebraElement& u) {
    require_same(a.id(), u.id(), "left_translate");
    const Eigen::VectorXd& c = u.coords();
    Eigen::VectorXd out(group_chart_dim(a.id()));
    switch (a.id()) {
        case GroupId::SO3:
            out = flatten_row_major(a.so3().R * hat(c.head<3>()));
            break;
        case GroupId::SE2: {
            const auto& p = a.se2();
            out << c(0), planar_rotation(p.theta) * c.tail<2>();
            break;
        }
        case GroupId::VAA: {
            const auto& p = a.vaa();
            const Eigen::Vector3d w = c.head<3>();
            out << w, flatten_row_major(p.Q * hat(c.segment<3>(3))),
                p.Q * c.tail<3>() + (Eigen::Matrix3d::Identity() - p.Q) * w;
            break;
        }
    }
    return {out};
}

Eigen::MatrixXd to_matrix(const GroupElement& a) {
    switch (a.id()) {
        case GroupId::SO3:
            return a.so3().R;
        case GroupId::SE2: {
            const auto& p = a.se2();
            Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
            M.topLeftCorner<2, 2>() = planar_rotation(p.theta);
            M.topRightCorner<2, 1>() = p.t;
            return M;
        }
        case GroupId::VAA: {
            const auto& p = a.vaa();
            Eigen::MatrixXd M = Eigen::MatrixXd::Identity(8, 8);
            M.block<3, 1>(0, 3) = p.z;
            M.block<3, 3>(4, 4) = p.Q;
            M.block<3, 1>(4, 7) = p.x - p.z;
            return M;
        }
    }
    throw ContractError("to_matrix: unknown group");
}

Eigen::MatrixXd to_matrix(const AlgebraElement& u) {
    const Eigen::VectorXd& c = u.coords();
    switch (u.id()) {
        case GroupId::SO3:
            return hat(c.head<3>());
        case GroupId::SE2: {
            Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
            M(0, 1) = -c(0);
            M(1, 0) = c(0);
            M(0, 2) = c(1);
            M(1, 2) = c(2);
            return M;
        }
        case GroupId::VAA: {
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(8, 8);
            M.block<3, 1>(0, 3) = c.head<3>();
            M.block<3, 3>(4, 4) = hat(c.segment<3>(3));
            M.block<3, 1>(4, 7) = c.tail<3>() - c.head<3>();
            return M;
        }
    }
    throw ContractError("to_matrix: unknown algebra");
}

AlgebraElement algebra_from_matrix(GroupId id, const Eigen::MatrixXd& M) {
    switch (id) {
        case GroupId::SO3:
            return AlgebraElement::so3(vee(M));
        case GroupId::SE2:
            return AlgebraElement::se2(M(1, 0), M.block<2, 1>(0, 2));
        case GroupId::VAA: {
            const Eigen::Vector3d w = M.block<3, 1>(0, 3);
            const Eigen::Matrix3d W = M.block<3, 3>(4, 4);
            const Eigen::Vector3d rho = M.block<3, 1>(4, 7);
            return AlgebraElement::vaa(w, vee(W), rho + w);
        }
    }
    throw ContractError("algebra_from_matrix: unknown group");
}

Eigen::VectorXd to_chart(const GroupElement& a) {
    Eigen::VectorXd out(group_chart_dim(a.id()));
    switch (a.id()) {
        case GroupId::SO3:
            out = flatten_row_major(a.so3().R);
            break;
        case GroupId::SE2:
            out << a.se2().theta, a.se2().t;
            break;
        case GroupId::VAA: {
            const auto& p = a.vaa();
            out << p.z, flatten_row_major(p.Q), p.x;
            break;
        }
    }
    return out;
}

Eigen::VectorXd chart_difference(const GroupElement& a, const GroupElement& b) {
    require_same(a.id(), b.id(), "chart_difference");
    Eigen::VectorXd d = to_chart(a) - to_chart(b);
    if (a.id() == GroupId::SE2) d(0) = wrap_angle_signed(d(0));
    return d;
}

AlgebraElement random_algebra(GroupId id, std::mt19937_64& rng, double half_width) {
    std::uniform_real_distribution<double> dist(-half_width, half_width);
    Eigen::VectorXd c(algebra_dim(id));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = dist(rng);
    return {id, c};
}

GroupElement random_element(GroupId id, std::mt19937_64& rng, double half_width) {
    return exp(random_algebra(id, rng, half_width));
}

}  // namespace synobs
