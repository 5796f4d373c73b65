#include "synobs/actions.hpp"

#include "synobs/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace synobs {

namespace {

Eigen::Matrix2d planar_rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d R;
    R << c, -s, s, c;
    return R;
}

void require_compatible(const GroupAction& phi, GroupId g, ManifoldId m, const char* op) {
    if (phi.group() != g || phi.manifold() != m) {
        throw ContractError(std::string(op) + ": action on " + std::string(to_string(phi.group())) +
                            " x " + std::string(to_string(phi.manifold())) + " given " +
                            std::string(to_string(g)) + " x " + std::string(to_string(m)));
    }
}

// Rotation taking unit vector a to unit vector b by the shortest arc.
Eigen::Matrix3d rotation_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const Eigen::Vector3d axis = a.cross(b);
    const double s = axis.norm();
    const double c = a.dot(b);
    if (s < 1e-12) {
        if (c > 0.0) return Eigen::Matrix3d::Identity();
        Eigen::Vector3d perp = a.unitOrthogonal();
        return so3_exp(std::numbers::pi * perp);
    }
    return so3_exp(std::atan2(s, c) * axis / s);
}

}  // namespace

std::string_view to_string(ManifoldId id) {
    switch (id) {
        case ManifoldId::Sphere2: return "S2";
        case ManifoldId::Unicycle: return "S1xR2";
        case ManifoldId::VaaState: return "SO3xR3";
        case ManifoldId::Euclidean: return "Rn";
    }
    return "?";
}

ManifoldPoint::ManifoldPoint(SpherePoint p) : payload_(SpherePoint{p.eta.normalized()}) {}

ManifoldPoint::ManifoldPoint(UnicyclePoint p) : payload_(UnicyclePoint{wrap_angle(p.theta), p.p}) {}

ManifoldPoint::ManifoldPoint(VaaState p) : payload_(VaaState{maybe_reorthonormalize(p.R), p.v}) {}

ManifoldPoint::ManifoldPoint(EuclideanPoint p) : payload_(std::move(p)) {}

const SpherePoint& ManifoldPoint::sphere() const {
    if (auto p = std::get_if<SpherePoint>(&payload_)) return *p;
    throw ContractError("point is not on S2");
}

const UnicyclePoint& ManifoldPoint::unicycle() const {
    if (auto p = std::get_if<UnicyclePoint>(&payload_)) return *p;
    throw ContractError("point is not on S1xR2");
}

const VaaState& ManifoldPoint::vaa() const {
    if (auto p = std::get_if<VaaState>(&payload_)) return *p;
    throw ContractError("point is not on SO3xR3");
}

const EuclideanPoint& ManifoldPoint::euclidean() const {
    if (auto p = std::get_if<EuclideanPoint>(&payload_)) return *p;
    throw ContractError("point is not Euclidean");
}

int chart_dim(const ManifoldPoint& xi) {
    switch (xi.id()) {
        case ManifoldId::Sphere2: return 3;
        case ManifoldId::Unicycle: return 3;
        case ManifoldId::VaaState: return 12;
        case ManifoldId::Euclidean: return static_cast<int>(xi.euclidean().x.size());
    }
    return 0;
}

int intrinsic_dim(const ManifoldPoint& xi) {
    switch (xi.id()) {
        case ManifoldId::Sphere2: return 2;
        case ManifoldId::Unicycle: return 3;
        case ManifoldId::VaaState: return 6;
        case ManifoldId::Euclidean: return static_cast<int>(xi.euclidean().x.size());
    }
    return 0;
}

Eigen::VectorXd to_chart(const ManifoldPoint& xi) {
    switch (xi.id()) {
        case ManifoldId::Sphere2:
            return xi.sphere().eta;
        case ManifoldId::Unicycle: {
            Eigen::VectorXd c(3);
            c << xi.unicycle().theta, xi.unicycle().p;
            return c;
        }
        case ManifoldId::VaaState: {
            Eigen::VectorXd c(12);
            c << flatten_row_major(xi.vaa().R), xi.vaa().v;
            return c;
        }
        case ManifoldId::Euclidean:
            return xi.euclidean().x;
    }
    throw ContractError("to_chart: unknown manifold");
}

ManifoldPoint from_chart(ManifoldId id, const Eigen::VectorXd& c) {
    auto need = [&](Eigen::Index n) {
        if (c.size() != n) {
            throw ContractError("from_chart: " + std::string(to_string(id)) + " expects " +
                                std::to_string(n) + " coordinates, got " + std::to_string(c.size()));
        }
    };
    switch (id) {
        case ManifoldId::Sphere2:
            need(3);
            return SpherePoint{c};
        case ManifoldId::Unicycle:
            need(3);
            return UnicyclePoint{c(0), c.tail<2>()};
        case ManifoldId::VaaState:
            need(12);
            return VaaState{project_to_rotation(unflatten_row_major(c.head<9>())), c.tail<3>()};
        case ManifoldId::Euclidean:
            return EuclideanPoint{c};
    }
    throw ContractError("from_chart: unknown manifold");
}

Eigen::VectorXd chart_difference(const ManifoldPoint& a, const ManifoldPoint& b) {
    if (a.id() != b.id() || chart_dim(a) != chart_dim(b)) {
        throw ContractError("chart_difference: points on different manifolds");
    }
    Eigen::VectorXd d = to_chart(a) - to_chart(b);
    if (a.id() == ManifoldId::Unicycle) d(0) = wrap_angle_signed(d(0));
    return d;
}

Eigen::MatrixXd tangent_basis(const ManifoldPoint& xi) {
    switch (xi.id()) {
        case ManifoldId::Sphere2: {
            const Eigen::Vector3d& eta = xi.sphere().eta;
            const Eigen::Vector3d t1 = eta.unitOrthogonal();
            Eigen::MatrixXd B(3, 2);
            B << t1, eta.cross(t1);
            return B;
        }
        case ManifoldId::Unicycle:
            return Eigen::MatrixXd::Identity(3, 3);
        case ManifoldId::VaaState: {
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(12, 6);
            const Eigen::Matrix3d& R = xi.vaa().R;
            for (int i = 0; i < 3; ++i) {
                B.block<9, 1>(0, i) =
                    flatten_row_major(R * hat(Eigen::Vector3d::Unit(i))) / std::numbers::sqrt2;
                B(9 + i, 3 + i) = 1.0;
            }
            return B;
        }
        case ManifoldId::Euclidean: {
            const auto n = xi.euclidean().x.size();
            return Eigen::MatrixXd::Identity(n, n);
        }
    }
    throw ContractError("tangent_basis: unknown manifold");
}

ManifoldPoint retract(const ManifoldPoint& xi, const Eigen::VectorXd& delta) {
    if (delta.size() != chart_dim(xi)) {
        throw ContractError("retract: step has wrong dimension");
    }
    switch (xi.id()) {
        case ManifoldId::Sphere2: {
            const Eigen::Vector3d& eta = xi.sphere().eta;
            const Eigen::Vector3d d = delta - eta * eta.dot(delta);
            const double a = d.norm();
            if (a == 0.0) return xi;
            return SpherePoint{std::cos(a) * eta + std::sin(a) * d / a};
        }
        case ManifoldId::Unicycle: {
            const auto& p = xi.unicycle();
            return UnicyclePoint{p.theta + delta(0), p.p + delta.tail<2>()};
        }
        case ManifoldId::VaaState: {
            const auto& s = xi.vaa();
            const Eigen::Matrix3d W = s.R.transpose() * unflatten_row_major(delta.head<9>());
            const Eigen::Vector3d omega = vee(0.5 * (W - W.transpose()));
            return VaaState{s.R * so3_exp(omega), s.v + delta.tail<3>()};
        }
        case ManifoldId::Euclidean:
            return EuclideanPoint{xi.euclidean().x + delta};
    }
    throw ContractError("retract: unknown manifold");
}

std::vector<ManifoldPoint> sample_points(ManifoldId id, int n, std::uint64_t seed,
                                         int euclidean_dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> box(-std::numbers::pi, std::numbers::pi);
    std::normal_distribution<double> gauss;
    std::vector<ManifoldPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        switch (id) {
            case ManifoldId::Sphere2: {
                Eigen::Vector3d g;
                do {
                    g = {gauss(rng), gauss(rng), gauss(rng)};
                } while (g.norm() < 1e-6);
                out.emplace_back(SpherePoint{g});
                break;
            }
            case ManifoldId::Unicycle: {
                const double theta = ang(rng);
                const double x = pos(rng);
                const double y = pos(rng);
                out.emplace_back(UnicyclePoint{theta, {x, y}});
                break;
            }
            case ManifoldId::VaaState: {
                Eigen::Vector3d w;
                for (int i = 0; i < 3; ++i) w(i) = box(rng);
                Eigen::Vector3d v;
                for (int i = 0; i < 3; ++i) v(i) = pos(rng);
                out.emplace_back(VaaState{so3_exp(w), v});
                break;
            }
            case ManifoldId::Euclidean: {
                Eigen::VectorXd x(euclidean_dim);
                for (int i = 0; i < euclidean_dim; ++i) x(i) = pos(rng);
                out.emplace_back(EuclideanPoint{x});
                break;
            }
        }
    }
    return out;
}

GroupId GroupAction::group() const {
    switch (kind) {
        case ActionKind::SphereRotation: return GroupId::SO3;
        case ActionKind::UnicycleSE2: return GroupId::SE2;
        case ActionKind::VaaAffine: return GroupId::VAA;
    }
    return GroupId::SO3;
}

ManifoldId GroupAction::manifold() const {
    switch (kind) {
        case ActionKind::SphereRotation: return ManifoldId::Sphere2;
        case ActionKind::UnicycleSE2: return ManifoldId::Unicycle;
        case ActionKind::VaaAffine: return ManifoldId::VaaState;
    }
    return ManifoldId::Sphere2;
}

ManifoldPoint act(const GroupAction& phi, const GroupElement& X, const ManifoldPoint& xi) {
    require_compatible(phi, X.id(), xi.id(), "act");
    switch (phi.kind) {
        case ActionKind::SphereRotation:
            return SpherePoint{X.so3().R.transpose() * xi.sphere().eta};
        case ActionKind::UnicycleSE2: {
            const auto& g = X.se2();
            const auto& p = xi.unicycle();
            return UnicyclePoint{p.theta + g.theta, p.p + planar_rotation(p.theta) * g.t};
        }
        case ActionKind::VaaAffine: {
            const auto& g = X.vaa();
            const auto& s = xi.vaa();
            return VaaState{s.R * g.Q, s.v + s.R * g.x + (Eigen::Matrix3d::Identity() - s.R) * g.z};
        }
    }
    throw ContractError("act: unknown action");
}

TangentVector fundamental_field(const GroupAction& phi, const AlgebraElement& u,
                                const ManifoldPoint& xi) {
    require_compatible(phi, u.id(), xi.id(), "fundamental_field");
    switch (phi.kind) {
        case ActionKind::SphereRotation:
            return {-u.omega().cross(xi.sphere().eta)};
        case ActionKind::UnicycleSE2: {
            const auto& p = xi.unicycle();
            const Eigen::VectorXd& c = u.coords();
            Eigen::VectorXd out(3);
            out << c(0), planar_rotation(p.theta) * c.tail<2>();
            return {out};
        }
        case ActionKind::VaaAffine: {
            const auto& s = xi.vaa();
            Eigen::VectorXd out(12);
            out << flatten_row_major(s.R * hat(u.omega())),
                s.R * u.u() + (Eigen::Matrix3d::Identity() - s.R) * u.w();
            return {out};
        }
    }
    throw ContractError("fundamental_field: unknown action");
}

TangentVector fundamental_field_fd(const GroupAction& phi, const AlgebraElement& u,
                                   const ManifoldPoint& xi) {
    const double h = 1e-6 * std::max(1.0, u.coords().norm());
    const ManifoldPoint plus = act(phi, exp(h * u), xi);
    const ManifoldPoint minus = act(phi, exp(-h * u), xi);
    return {chart_difference(plus, minus) / (2.0 * h)};
}

ManifoldPoint error(const GroupAction& phi, const GroupElement& Xhat, const ManifoldPoint& xi) {
    return act(phi, inverse(Xhat), xi);
}

ManifoldPoint reconstruct(const GroupAction& phi, const GroupElement& Xhat,
                          const ManifoldPoint& origin) {
    return act(phi, Xhat, origin);
}

std::optional<GroupElement> transport(const GroupAction& phi, const ManifoldPoint& from,
                                      const ManifoldPoint& to) {
    if (from.id() != phi.manifold() || to.id() != phi.manifold()) return std::nullopt;
    switch (phi.kind) {
        case ActionKind::SphereRotation:
            // Rᵀη₁ = η₂  ⇔  R η₂ = η₁
            return GroupElement(Rotation{rotation_between(to.sphere().eta, from.sphere().eta)});
        case ActionKind::UnicycleSE2: {
            const auto& a = from.unicycle();
            const auto& b = to.unicycle();
            return GroupElement(
                PlanarPose{b.theta - a.theta, planar_rotation(a.theta).transpose() * (b.p - a.p)});
        }
        case ActionKind::VaaAffine: {
            const auto& a = from.vaa();
            const auto& b = to.vaa();
            return GroupElement(VaaPose{Eigen::Vector3d::Zero(), a.R.transpose() * b.R,
                                        a.R.transpose() * (b.v - a.v)});
        }
    }
    return std::nullopt;
}

}  // namespace synobs
