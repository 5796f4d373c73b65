#pragma once

#include "synobs/actions.hpp"

#include <functional>
#include <string>

namespace synobs {

using ChartField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ChartJacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// A vector field written in chart coordinates. Callables must be pure; the
/// analytic Jacobian is optional and falls back to central differences.
struct VectorFieldHandle {
    ManifoldId manifold;
    ChartField evaluate;
    ChartJacobian jacobian;
    std::string label;

    Eigen::VectorXd operator()(const Eigen::VectorXd& chart) const { return evaluate(chart); }
    bool has_jacobian() const { return static_cast<bool>(jacobian); }

    /// Analytic Jacobian if supplied, otherwise central differences with step
    /// 1e−6·max(1, |xᵢ|) per coordinate.
    Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& chart) const;
};

/// Central-difference Jacobian of `f` at `x`.
Eigen::MatrixXd finite_difference_jacobian(const ChartField& f, const Eigen::VectorXd& x);

}  // namespace synobs
