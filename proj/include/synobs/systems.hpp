#pragma once

// Affine control systems ξ̇ = f₀(ξ) + Σ vᵢ fᵢ(ξ), the fundamental structure
// (φ, Λ) tying such a system to a group action, and numerical checks that a
// claimed structure is fundamental and its lift X̂' = X̂·Λ(v) synchronous.

#include "synobs/vector_field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace synobs {

using InputVector = Eigen::VectorXd;

struct AffineSystem {
    ManifoldId manifold;
    int chart_dimension;
    std::optional<VectorFieldHandle> drift;  // empty means f₀ ≡ 0
    std::vector<VectorFieldHandle> inputs;

    int input_dim() const { return static_cast<int>(inputs.size()); }
};

/// f₀(ξ) + Σ vᵢ fᵢ(ξ)
TangentVector eval_system(const AffineSystem& f, const InputVector& v, const ManifoldPoint& xi);

/// Affine input map Λ(v) = bias + Σ vᵢ·columnᵢ.
struct LambdaMap {
    AlgebraElement bias;
    std::vector<AlgebraElement> columns;

    AlgebraElement operator()(const InputVector& v) const;
};

struct FundamentalStructure {
    AffineSystem system;
    GroupAction action;
    LambdaMap lambda;
    ManifoldPoint origin;  // ξ̊, also the base point for sampling states
};

AlgebraElement lift_input(const FundamentalStructure& fs, const InputVector& v);

/// f†_v(X̂) = X̂·Λ(v)
TangentVector lifted_dynamics(const FundamentalStructure& fs, const GroupElement& Xhat,
                              const InputVector& v);

struct VerificationReport {
    std::string name;
    bool passed = false;
    double max_residual = 0.0;
    double tolerance = 0.0;
    int samples = 0;
};

/// Default seed for the verification samplers.
inline constexpr std::uint64_t kVerifySeed = 20250101;

/// max ‖φ♯_{Λ(v)}(ξ) − f_v(ξ)‖ over random (v, ξ); inputs uniform in
/// [−2, 2]^ℓ, states φ(X, ξ̊) for random X.
VerificationReport verify_fundamental(const FundamentalStructure& fs, int n_samples, double tol,
                                      std::uint64_t seed = kVerifySeed);

/// max ‖D_X̂e[f†_v(X̂)] + D_ξe[f_v(ξ)]‖, both terms by central differences:
/// the first along X̂·exp(sΛ(v)), the second along a retraction of f_v.
VerificationReport verify_synchrony(const FundamentalStructure& fs, int n_samples, double tol,
                                    std::uint64_t seed = kVerifySeed);

/// max chart distance between e(X̂·exp(δΛ(v)), φ(exp(δΛ(v)), ξ)) and
/// e(X̂, ξ) for random δ ∈ [−5, 5].
VerificationReport verify_discrete_synchrony(const FundamentalStructure& fs, int n_samples,
                                             double tol, std::uint64_t seed = kVerifySeed);

/// max ‖Dφ_ξ̊[f†_v(X̂)] − f_v(φ(X̂, ξ̊))‖ with the left side by central
/// differences.
VerificationReport verify_classical_lift(const FundamentalStructure& fs, int n_samples, double tol,
                                         std::uint64_t seed = kVerifySeed);

/// Uniform input in [−2, 2]^ℓ.
InputVector random_input(const FundamentalStructure& fs, std::mt19937_64& rng);

/// φ(X, ξ̊) for random X.
ManifoldPoint random_state(const FundamentalStructure& fs, std::mt19937_64& rng);

}  // namespace synobs
