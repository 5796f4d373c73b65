#include "synobs/vector_field.hpp"

#include <algorithm>
#include <cmath>

namespace synobs {

Eigen::MatrixXd finite_difference_jacobian(const ChartField& f, const Eigen::VectorXd& x) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd J(f0.size(), x.size());
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
        xp(j) = x(j) + h;
        xm(j) = x(j) - h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return J;
}

Eigen::MatrixXd VectorFieldHandle::jacobian_at(const Eigen::VectorXd& chart) const {
    if (jacobian) return jacobian(chart);
    return finite_difference_jacobian(evaluate, chart);
}

}  // namespace synobs
