#include "synobs/systems.hpp"

#include "synobs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace synobs {

TangentVector eval_system(const AffineSystem& f, const InputVector& v, const ManifoldPoint& xi) {
    if (v.size() != f.input_dim()) {
        throw ContractError("eval_system: expected " + std::to_string(f.input_dim()) +
                            " inputs, got " + std::to_string(v.size()));
    }
    if (xi.id() != f.manifold) {
        throw ContractError("eval_system: point is on the wrong manifold");
    }
    const Eigen::VectorXd c = to_chart(xi);
    Eigen::VectorXd out = f.drift ? (*f.drift)(c) : Eigen::VectorXd::Zero(f.chart_dimension);
    for (int i = 0; i < f.input_dim(); ++i) out += v(i) * f.inputs[i](c);
    return {out};
}

AlgebraElement LambdaMap::operator()(const InputVector& v) const {
    if (v.size() != static_cast<Eigen::Index>(columns.size())) {
        throw ContractError("lift: expected " + std::to_string(columns.size()) + " inputs, got " +
                            std::to_string(v.size()));
    }
    Eigen::VectorXd c = bias.coords();
    for (std::size_t i = 0; i < columns.size(); ++i) c += v(static_cast<Eigen::Index>(i)) * columns[i].coords();
    return {bias.id(), c};
}

AlgebraElement lift_input(const FundamentalStructure& fs, const InputVector& v) {
    return fs.lambda(v);
}

TangentVector lifted_dynamics(const FundamentalStructure& fs, const GroupElement& Xhat,
                              const InputVector& v) {
    return left_translate(Xhat, fs.lambda(v));
}

InputVector random_input(const FundamentalStructure& fs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    InputVector v(fs.system.input_dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
    return v;
}

ManifoldPoint random_state(const FundamentalStructure& fs, std::mt19937_64& rng) {
    return act(fs.action, random_element(fs.action.group(), rng), fs.origin);
}

namespace {

template <typename Fn>
VerificationReport run_samples(std::string name, int n_samples, double tol, Fn&& residual) {
    if (n_samples < 1) throw ContractError(name + ": n_samples must be >= 1");
    VerificationReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.samples = n_samples;
    for (int k = 0; k < n_samples; ++k) r.max_residual = std::max(r.max_residual, residual());
    r.passed = r.max_residual <= tol;
    return r;
}

constexpr double kFlowStep = 1e-6;

}  // namespace

VerificationReport verify_fundamental(const FundamentalStructure& fs, int n_samples, double tol,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return run_samples("fundamental", n_samples, tol, [&] {
        const InputVector v = random_input(fs, rng);
        const ManifoldPoint xi = random_state(fs, rng);
        const TangentVector lhs = fundamental_field(fs.action, fs.lambda(v), xi);
        const TangentVector rhs = eval_system(fs.system, v, xi);
        return (lhs.components - rhs.components).norm();
    });
}

VerificationReport verify_synchrony(const FundamentalStructure& fs, int n_samples, double tol,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const GroupAction& phi = fs.action;
    return run_samples("synchrony", n_samples, tol, [&] {
        const GroupElement Xhat = random_element(phi.group(), rng);
        const ManifoldPoint xi = random_state(fs, rng);
        const InputVector v = random_input(fs, rng);
        const AlgebraElement u = fs.lambda(v);
        const double h = kFlowStep;

        const Eigen::VectorXd d_observer =
            chart_difference(error(phi, compose(Xhat, exp(h * u)), xi),
                             error(phi, compose(Xhat, exp(-h * u)), xi)) / (2.0 * h);

        const Eigen::VectorXd f = eval_system(fs.system, v, xi).components;
        const Eigen::VectorXd d_system =
            chart_difference(error(phi, Xhat, retract(xi, h * f)),
                             error(phi, Xhat, retract(xi, -h * f))) / (2.0 * h);

        return (d_observer + d_system).norm();
    });
}

VerificationReport verify_discrete_synchrony(const FundamentalStructure& fs, int n_samples,
                                             double tol, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> step(-5.0, 5.0);
    const GroupAction& phi = fs.action;
    return run_samples("discrete synchrony", n_samples, tol, [&] {
        const GroupElement Xhat = random_element(phi.group(), rng);
        const ManifoldPoint xi = random_state(fs, rng);
        const InputVector v = random_input(fs, rng);
        const GroupElement E = exp(step(rng) * fs.lambda(v));
        const ManifoldPoint before = error(phi, Xhat, xi);
        const ManifoldPoint after = error(phi, compose(Xhat, E), act(phi, E, xi));
        return chart_difference(after, before).norm();
    });
}

VerificationReport verify_classical_lift(const FundamentalStructure& fs, int n_samples, double tol,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const GroupAction& phi = fs.action;
    return run_samples("classical lift", n_samples, tol, [&] {
        const GroupElement Xhat = random_element(phi.group(), rng);
        const InputVector v = random_input(fs, rng);
        const AlgebraElement u = fs.lambda(v);
        const double h = kFlowStep;
        const Eigen::VectorXd lhs =
            chart_difference(act(phi, compose(Xhat, exp(h * u)), fs.origin),
                             act(phi, compose(Xhat, exp(-h * u)), fs.origin)) / (2.0 * h);
        const Eigen::VectorXd rhs =
            eval_system(fs.system, v, reconstruct(phi, Xhat, fs.origin)).components;
        return (lhs - rhs).norm();
    });
}

}  // namespace synobs
