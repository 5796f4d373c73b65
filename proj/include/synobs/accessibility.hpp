#pragma once

// Numerical accessibility-algebra construction. Vector fields are compared
// by stacking their values at a fixed set of sample points into one long
// vector, so independence is a statement about the fields and not about a
// single tangent space.

#include "synobs/systems.hpp"

#include <string>
#include <vector>

namespace synobs {

/// Coordinate Lie bracket [f, g](ξ) = Dg(ξ)[f(ξ)] − Df(ξ)[g(ξ)].
TangentVector bracket_vf(const VectorFieldHandle& f, const VectorFieldHandle& g,
                         const ManifoldPoint& xi);

/// Same, at raw chart coordinates.
Eigen::VectorXd bracket_at(const VectorFieldHandle& f, const VectorFieldHandle& g,
                           const Eigen::VectorXd& chart);

/// The field ξ ↦ [f, g](ξ), labelled "[f,g]". Its Jacobian is taken by
/// finite differences.
VectorFieldHandle bracket_field(const VectorFieldHandle& f, const VectorFieldHandle& g);

/// Structure constants c^k_{ij} with [f_i, f_j] ≈ Σ_k c^k_{ij} f_k.
struct ConstantsWithResidual {
    int dimension = 0;
    std::vector<double> values;  // index (i·n + j)·n + k
    double residual = 0.0;       // max pointwise fit error over pairs and samples
    std::vector<std::string> labels;

    double at(int i, int j, int k) const;
};

struct AlgebraBasis {
    std::vector<VectorFieldHandle> fields;
    std::vector<ManifoldPoint> sample_points;
    int gram_rank = 0;
    std::vector<double> singular_values;  // of the stacked evaluation matrix
    double tolerance = 0.0;

    int dimension() const { return static_cast<int>(fields.size()); }
};

/// Starts from the drift and input fields, then brackets all pairs until no
/// numerically independent field appears. `max_dim` ≤ 0 selects the default
/// budget of 4 × dim M. Throws NonClosureError when the budget is exceeded.
/// Generators need analytic Jacobians: without them each bracket level
/// differentiates a differenced field and the noise soon exceeds `tol`.
AlgebraBasis build_accessibility_basis(const AffineSystem& sys,
                                       const std::vector<ManifoldPoint>& samples,
                                       double tol = 1e-8, int max_dim = 0);

ConstantsWithResidual structure_constants(const AlgebraBasis& basis);

struct ControllabilityReport {
    bool controllable = false;
    int min_rank = 0;
    int required_rank = 0;
    int worst_point = -1;
    int points = 0;
};

/// Rank of the basis evaluations in tangent coordinates at every test point.
ControllabilityReport controllability_check(const AlgebraBasis& basis,
                                            const std::vector<ManifoldPoint>& test_points,
                                            double tol = 1e-8);

enum class AlgebraKind { Abelian, SO3, SE2, Heisenberg, Unknown };

struct AlgebraMatch {
    AlgebraKind kind = AlgebraKind::Unknown;
    int dimension = 0;
    int derived_dimension = 0;
    int killing_positive = 0;
    int killing_negative = 0;
    int killing_zero = 0;

    /// "abelian R^n", "so(3)", "se(2)", "heisenberg" or "unknown".
    std::string name() const;
};

/// Classify by (dimension, dim [g,g], Killing-form signature) against the
/// catalog {ℝⁿ, so(3), se(2), heisenberg}. Dimensions above 3 other than
/// abelian ones report Unknown.
AlgebraMatch match_algebra(const ConstantsWithResidual& constants, double tol = 1e-6);

}  // namespace synobs
