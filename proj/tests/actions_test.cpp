#include "synobs/actions.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace synobs;
using synobs::testing::action_for;
using synobs::testing::kSamples;
using synobs::testing::point_distance;
using synobs::testing::random_point;

namespace {

constexpr double kPi = std::numbers::pi;

class ActionAxioms : public ::testing::TestWithParam<GroupId> {};

}  // namespace

TEST(Act, IdentityLeavesPointFixed) {
    std::mt19937_64 rng(1);
    for (int g = 0; g < 3; ++g) {
        const GroupAction phi = action_for(static_cast<GroupId>(g));
        const ManifoldPoint xi = random_point(phi.manifold(), rng);
        EXPECT_LE(point_distance(act(phi, GroupElement::identity(phi.group()), xi), xi), 1e-12);
    }
}

TEST(Act, VaaOnOriginGivesQx) {
    std::mt19937_64 rng(2);
    const GroupElement X = random_element(GroupId::VAA, rng);
    const VaaState s = act(GroupAction::vaa_affine(), X, ManifoldPoint(VaaState{})).vaa();
    EXPECT_LE((s.R - X.vaa().Q).norm(), 1e-15);
    EXPECT_LE((s.v - X.vaa().x).norm(), 1e-15);
}

TEST(Act, SphereRotatesBackwards) {
    const double t = 0.7;
    const Eigen::Vector3d eta =
        act(GroupAction::sphere_rotation(), exp(AlgebraElement::so3(t * Eigen::Vector3d::UnitZ())),
            ManifoldPoint(SpherePoint{Eigen::Vector3d::UnitX()}))
            .sphere()
            .eta;
    EXPECT_LE((eta - Eigen::Vector3d(std::cos(t), -std::sin(t), 0.0)).norm(), 1e-15);
}

TEST(Act, UnicycleFormula) {
    const ManifoldPoint xi(UnicyclePoint{0.5, {1.0, 2.0}});
    const UnicyclePoint r = act(GroupAction::unicycle_se2(), GroupElement(PlanarPose{0.25, {3.0, 0.0}}), xi).unicycle();
    EXPECT_NEAR(r.theta, 0.75, 1e-15);
    EXPECT_LE((r.p - Eigen::Vector2d(1.0 + 3.0 * std::cos(0.5), 2.0 + 3.0 * std::sin(0.5))).norm(), 1e-15);
}

TEST(FundamentalField, ZeroAlgebraGivesZero) {
    std::mt19937_64 rng(3);
    for (int g = 0; g < 3; ++g) {
        const GroupAction phi = action_for(static_cast<GroupId>(g));
        const ManifoldPoint xi = random_point(phi.manifold(), rng);
        EXPECT_LE(fundamental_field(phi, AlgebraElement::zero(phi.group()), xi).components.norm(), 0.0);
    }
}

TEST(FundamentalField, SphereIsMinusOmegaCrossEta) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const ManifoldPoint xi = random_point(ManifoldId::Sphere2, rng);
        const Eigen::Vector3d Om = Eigen::Vector3d::Random();
        const Eigen::Vector3d f =
            fundamental_field(GroupAction::sphere_rotation(), AlgebraElement::so3(Om), xi).components;
        EXPECT_LE((f + Om.cross(xi.sphere().eta)).norm(), 1e-15);
    }
}

TEST(FundamentalField, VaaLiftReproducesSystem) {
    std::mt19937_64 rng(5);
    const Eigen::Vector3d g = 9.81 * Eigen::Vector3d::UnitZ();
    for (int k = 0; k < 20; ++k) {
        const ManifoldPoint xi = random_point(ManifoldId::VaaState, rng);
        const Eigen::Vector3d Om = Eigen::Vector3d::Random();
        const Eigen::Vector3d a = Eigen::Vector3d::Random();
        const Eigen::VectorXd f =
            fundamental_field(GroupAction::vaa_affine(), AlgebraElement::vaa(g, Om, a + g), xi).components;
        const Eigen::Matrix3d& R = xi.vaa().R;
        EXPECT_LE((f.head<9>() - flatten_row_major(R * hat(Om))).norm(), 1e-14);
        EXPECT_LE((f.tail<3>() - (R * a + g)).norm(), 1e-13);
    }
}

TEST(Error, IdentityObserver) {
    std::mt19937_64 rng(6);
    for (int g = 0; g < 3; ++g) {
        const GroupAction phi = action_for(static_cast<GroupId>(g));
        const ManifoldPoint xi = random_point(phi.manifold(), rng);
        EXPECT_LE(point_distance(error(phi, GroupElement::identity(phi.group()), xi), xi), 1e-15);
    }
}

TEST(Error, VaaClosedForm) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        const VaaPose X = random_element(GroupId::VAA, rng, 2.0).vaa();
        const VaaState s = random_point(ManifoldId::VaaState, rng).vaa();
        const VaaState e = error(GroupAction::vaa_affine(), GroupElement(X), ManifoldPoint(s)).vaa();
        const Eigen::Matrix3d RQt = s.R * X.Q.transpose();
        EXPECT_LE((e.R - RQt).norm(), 1e-14);
        EXPECT_LE((e.v - (s.v - RQt * X.x - (Eigen::Matrix3d::Identity() - RQt) * X.z)).norm(), 1e-12);
    }
}

TEST(Reconstruct, IdentityAndVaaOrigin) {
    std::mt19937_64 rng(8);
    for (int g = 0; g < 3; ++g) {
        const GroupAction phi = action_for(static_cast<GroupId>(g));
        const ManifoldPoint o = random_point(phi.manifold(), rng);
        EXPECT_LE(point_distance(reconstruct(phi, GroupElement::identity(phi.group()), o), o), 1e-15);
    }
    const GroupElement X = random_element(GroupId::VAA, rng);
    const VaaState s = reconstruct(GroupAction::vaa_affine(), X, ManifoldPoint(VaaState{})).vaa();
    EXPECT_LE((s.R - X.vaa().Q).norm(), 1e-15);
    EXPECT_LE((s.v - X.vaa().x).norm(), 1e-15);
}

TEST_P(ActionAxioms, RightActionOnRandomTriples) {
    const GroupAction phi = action_for(GetParam());
    std::mt19937_64 rng(100 + static_cast<int>(GetParam()));
    for (int k = 0; k < kSamples; ++k) {
        const GroupElement X = random_element(phi.group(), rng);
        const GroupElement Y = random_element(phi.group(), rng);
        const ManifoldPoint xi = random_point(phi.manifold(), rng);
        EXPECT_LE(point_distance(act(phi, GroupElement::identity(phi.group()), xi), xi), 1e-12);
        EXPECT_LE(point_distance(act(phi, Y, act(phi, X, xi)), act(phi, compose(X, Y), xi)), 1e-10);
    }
}

TEST_P(ActionAxioms, ErrorReconstructRoundTrip) {
    const GroupAction phi = action_for(GetParam());
    std::mt19937_64 rng(200 + static_cast<int>(GetParam()));
    for (int k = 0; k < kSamples; ++k) {
        const GroupElement X = random_element(phi.group(), rng);
        const ManifoldPoint o = random_point(phi.manifold(), rng);
        const ManifoldPoint xi_hat = reconstruct(phi, X, o);
        EXPECT_LE(point_distance(error(phi, X, xi_hat), o), 1e-10);
        // the error is ξ̊ iff the reconstruction is ξ
        const ManifoldPoint xi = random_point(phi.manifold(), rng);
        const bool error_is_origin = point_distance(error(phi, X, xi), o) <= 1e-9;
        const bool estimate_is_state = point_distance(xi_hat, xi) <= 1e-9;
        EXPECT_EQ(error_is_origin, estimate_is_state);
    }
}

TEST_P(ActionAxioms, FundamentalFieldMatchesFiniteDifference) {
    const GroupAction phi = action_for(GetParam());
    std::mt19937_64 rng(300 + static_cast<int>(GetParam()));
    for (int k = 0; k < kSamples; ++k) {
        const AlgebraElement u = random_algebra(phi.group(), rng);
        const ManifoldPoint xi = random_point(phi.manifold(), rng);
        const Eigen::VectorXd exact = fundamental_field(phi, u, xi).components;
        EXPECT_LE((exact - fundamental_field_fd(phi, u, xi).components).norm(), 1e-6);
        // tangent to the manifold
        const Eigen::MatrixXd B = tangent_basis(xi);
        EXPECT_LE((exact - B * (B.transpose() * exact)).norm(), 1e-9);
    }
}

TEST_P(ActionAxioms, TransportReachesTarget) {
    const GroupAction phi = action_for(GetParam());
    std::mt19937_64 rng(400 + static_cast<int>(GetParam()));
    for (int k = 0; k < kSamples; ++k) {
        const ManifoldPoint a = random_point(phi.manifold(), rng);
        const ManifoldPoint b = random_point(phi.manifold(), rng);
        const auto X = transport(phi, a, b);
        ASSERT_TRUE(X.has_value());
        EXPECT_LE(point_distance(act(phi, *X, a), b), 1e-8);
    }
}

INSTANTIATE_TEST_SUITE_P(AllActions, ActionAxioms, ::testing::Values(GroupId::SO3, GroupId::SE2, GroupId::VAA),
                         [](const auto& info) { return synobs::testing::param_name(info.param); });

TEST(ManifoldPoint, InvariantsRestored) {
    const ManifoldPoint s(SpherePoint{Eigen::Vector3d(3.0, 0.0, 4.0)});
    EXPECT_NEAR(s.sphere().eta.norm(), 1.0, 1e-15);
    const ManifoldPoint u(UnicyclePoint{-kPi, {0.0, 0.0}});
    EXPECT_NEAR(u.unicycle().theta, kPi, 1e-15);
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    R(2, 0) = 1e-5;
    EXPECT_LE(orthogonality_defect(ManifoldPoint(VaaState{R, Eigen::Vector3d::Zero()}).vaa().R), 1e-12);
}

TEST(ManifoldPoint, ChartRoundTrip) {
    std::mt19937_64 rng(9);
    for (ManifoldId id : {ManifoldId::Sphere2, ManifoldId::Unicycle, ManifoldId::VaaState}) {
        const ManifoldPoint xi = random_point(id, rng);
        EXPECT_LE(point_distance(from_chart(id, to_chart(xi)), xi), 1e-15);
        EXPECT_EQ(to_chart(xi).size(), chart_dim(xi));
    }
    EXPECT_EQ(intrinsic_dim(random_point(ManifoldId::Sphere2, rng)), 2);
    EXPECT_EQ(intrinsic_dim(random_point(ManifoldId::Unicycle, rng)), 3);
    EXPECT_EQ(intrinsic_dim(random_point(ManifoldId::VaaState, rng)), 6);
}

TEST(ManifoldPoint, TangentBasisOrthonormal) {
    std::mt19937_64 rng(10);
    for (ManifoldId id : {ManifoldId::Sphere2, ManifoldId::Unicycle, ManifoldId::VaaState}) {
        const ManifoldPoint xi = random_point(id, rng);
        const Eigen::MatrixXd B = tangent_basis(xi);
        EXPECT_EQ(B.cols(), intrinsic_dim(xi));
        EXPECT_LE((B.transpose() * B - Eigen::MatrixXd::Identity(B.cols(), B.cols())).norm(), 1e-12);
        if (id == ManifoldId::Sphere2) EXPECT_LE((B.transpose() * xi.sphere().eta).norm(), 1e-9);
    }
}

TEST(SamplePoints, SeededAndInRange) {
    const auto a = sample_points(ManifoldId::Unicycle, 25, 42);
    const auto b = sample_points(ManifoldId::Unicycle, 25, 42);
    ASSERT_EQ(a.size(), 25u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(to_chart(a[i]), to_chart(b[i]));
        EXPECT_GE(a[i].unicycle().theta, 0.0);
        EXPECT_LT(a[i].unicycle().theta, 2.0 * kPi);
        EXPECT_LE(a[i].unicycle().p.cwiseAbs().maxCoeff(), 5.0);
    }
}

TEST(Act, MismatchedInputsThrow) {
    EXPECT_THROW(act(GroupAction::vaa_affine(), GroupElement::identity(GroupId::SO3), ManifoldPoint(VaaState{})),
                 std::invalid_argument);
    EXPECT_THROW(act(GroupAction::sphere_rotation(), GroupElement::identity(GroupId::SO3), ManifoldPoint(VaaState{})),
                 std::invalid_argument);
}
