#include "synobs/accessibility.hpp"

#include "synobs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace synobs {

namespace {

void require_same_manifold(const VectorFieldHandle& f, const VectorFieldHandle& g) {
    if (f.manifold != g.manifold) {
        throw ContractError("bracket: fields " + f.label + " and " + g.label +
                            " live on different manifolds");
    }
}

Eigen::VectorXd stacked(const VectorFieldHandle& f, const std::vector<Eigen::VectorXd>& charts) {
    const Eigen::Index d = charts.front().size();
    Eigen::VectorXd out(d * static_cast<Eigen::Index>(charts.size()));
    for (std::size_t s = 0; s < charts.size(); ++s) {
        out.segment(static_cast<Eigen::Index>(s) * d, d) = f(charts[s]);
    }
    return out;
}

int numeric_rank(const Eigen::MatrixXd& M, double tol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double cut = tol * std::max(1.0, s(0));
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

// Orthonormal span of the accepted stacked vectors, used for the
// independence test.
class StackedSpan {
public:
    explicit StackedSpan(double tol) : tol_(tol) {}

    bool try_add(const Eigen::VectorXd& s) {
        Eigen::VectorXd r = s;
        // two Gram–Schmidt sweeps
        for (int sweep = 0; sweep < 2; ++sweep)
            for (const auto& q : basis_) r -= q * q.dot(r);
        scale_ = std::max(scale_, s.norm());
        const double rn = r.norm();
        if (rn <= tol_ * scale_) return false;
        basis_.push_back(r / rn);
        return true;
    }

private:
    double tol_;
    double scale_ = 0.0;
    std::vector<Eigen::VectorXd> basis_;
};

}  // namespace

Eigen::VectorXd bracket_at(const VectorFieldHandle& f, const VectorFieldHandle& g,
                           const Eigen::VectorXd& chart) {
    require_same_manifold(f, g);
    return g.jacobian_at(chart) * f(chart) - f.jacobian_at(chart) * g(chart);
}

TangentVector bracket_vf(const VectorFieldHandle& f, const VectorFieldHandle& g,
                         const ManifoldPoint& xi) {
    if (xi.id() != f.manifold) throw ContractError("bracket_vf: point on the wrong manifold");
    return {bracket_at(f, g, to_chart(xi))};
}

VectorFieldHandle bracket_field(const VectorFieldHandle& f, const VectorFieldHandle& g) {
    require_same_manifold(f, g);
    VectorFieldHandle out;
    out.manifold = f.manifold;
    out.label = "[" + f.label + "," + g.label + "]";
    out.evaluate = [f, g](const Eigen::VectorXd& c) { return bracket_at(f, g, c); };
    return out;
}

double ConstantsWithResidual::at(int i, int j, int k) const {
    const int n = dimension;
    return values[static_cast<std::size_t>((i * n + j) * n + k)];
}

AlgebraBasis build_accessibility_basis(const AffineSystem& sys,
                                       const std::vector<ManifoldPoint>& samples, double tol,
                                       int max_dim) {
    if (samples.empty()) throw ContractError("build_accessibility_basis: no sample points");
    if (static_cast<int>(samples.size()) < chart_dim(samples.front())) {
        throw ContractError("build_accessibility_basis: need at least chart-dimension samples");
    }
    for (const auto& p : samples) {
        if (p.id() != sys.manifold) {
            throw ContractError("build_accessibility_basis: sample on the wrong manifold");
        }
    }
    const int budget = max_dim > 0 ? max_dim : 4 * intrinsic_dim(samples.front());

    std::vector<Eigen::VectorXd> charts;
    charts.reserve(samples.size());
    for (const auto& p : samples) charts.push_back(to_chart(p));

    AlgebraBasis basis;
    basis.sample_points = samples;
    basis.tolerance = tol;
    StackedSpan span(tol);

    auto consider = [&](const VectorFieldHandle& f) {
        if (!span.try_add(stacked(f, charts))) return false;
        if (basis.dimension() >= budget) {
            throw NonClosureError(budget, basis.dimension() + 1,
                                  "bracket closure exceeded the dimension budget of " +
                                      std::to_string(budget) +
                                      " (algebra may be infinite dimensional or the budget too "
                                      "small)");
        }
        basis.fields.push_back(f);
        return true;
    };

    if (sys.drift) {
        VectorFieldHandle d = *sys.drift;
        if (d.label.empty()) d.label = "f0";
        consider(d);
    }
    for (int i = 0; i < sys.input_dim(); ++i) {
        VectorFieldHandle f = sys.inputs[static_cast<std::size_t>(i)];
        if (f.label.empty()) f.label = "f" + std::to_string(i + 1);
        consider(f);
    }

    // Bracket every pair that involves at least one field added in the
    // previous round, until a round adds nothing.
    int checked = 0;
    while (checked < basis.dimension()) {
        const int end = basis.dimension();
        for (int j = checked; j < end; ++j) {
            for (int i = 0; i < j; ++i) {
                consider(bracket_field(basis.fields[static_cast<std::size_t>(i)],
                                       basis.fields[static_cast<std::size_t>(j)]));
            }
        }
        checked = end;
    }

    if (basis.dimension() > 0) {
        Eigen::MatrixXd M(charts.front().size() * static_cast<Eigen::Index>(charts.size()),
                          basis.dimension());
        for (int k = 0; k < basis.dimension(); ++k) {
            M.col(k) = stacked(basis.fields[static_cast<std::size_t>(k)], charts);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        const auto& s = svd.singularValues();
        basis.singular_values.assign(s.data(), s.data() + s.size());
        basis.gram_rank = numeric_rank(M, tol);
    }
    return basis;
}

ConstantsWithResidual structure_constants(const AlgebraBasis& basis) {
    const int n = basis.dimension();
    ConstantsWithResidual out;
    out.dimension = n;
    out.values.assign(static_cast<std::size_t>(n * n * n), 0.0);
    for (const auto& f : basis.fields) out.labels.push_back(f.label);
    if (n == 0) return out;

    std::vector<Eigen::VectorXd> charts;
    for (const auto& p : basis.sample_points) charts.push_back(to_chart(p));
    const Eigen::Index d = charts.front().size();
    const Eigen::Index rows = d * static_cast<Eigen::Index>(charts.size());

    Eigen::MatrixXd B(rows, n);
    for (int k = 0; k < n; ++k) B.col(k) = stacked(basis.fields[static_cast<std::size_t>(k)], charts);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& fi = basis.fields[static_cast<std::size_t>(i)];
            const auto& fj = basis.fields[static_cast<std::size_t>(j)];
            Eigen::VectorXd target(rows);
            for (std::size_t s = 0; s < charts.size(); ++s) {
                target.segment(static_cast<Eigen::Index>(s) * d, d) = bracket_at(fi, fj, charts[s]);
            }
            const Eigen::VectorXd c = qr.solve(target);
            const Eigen::VectorXd r = B * c - target;
            for (std::size_t s = 0; s < charts.size(); ++s) {
                out.residual =
                    std::max(out.residual, r.segment(static_cast<Eigen::Index>(s) * d, d).norm());
            }
            for (int k = 0; k < n; ++k) {
                out.values[static_cast<std::size_t>((i * n + j) * n + k)] = c(k);
                out.values[static_cast<std::size_t>((j * n + i) * n + k)] = -c(k);
            }
        }
    }
    return out;
}

ControllabilityReport controllability_check(const AlgebraBasis& basis,
                                            const std::vector<ManifoldPoint>& test_points,
                                            double tol) {
    ControllabilityReport rep;
    rep.points = static_cast<int>(test_points.size());
    if (test_points.empty()) return rep;
    rep.required_rank = intrinsic_dim(test_points.front());
    rep.min_rank = rep.required_rank;
    for (std::size_t p = 0; p < test_points.size(); ++p) {
        const ManifoldPoint& xi = test_points[p];
        const Eigen::MatrixXd T = tangent_basis(xi);
        const Eigen::VectorXd c = to_chart(xi);
        Eigen::MatrixXd M(T.cols(), basis.dimension());
        for (int k = 0; k < basis.dimension(); ++k) {
            M.col(k) = T.transpose() * basis.fields[static_cast<std::size_t>(k)](c);
        }
        const int r = basis.dimension() == 0 ? 0 : numeric_rank(M, tol);
        if (rep.worst_point < 0 || r < rep.min_rank) {
            rep.worst_point = static_cast<int>(p);
            rep.min_rank = r;
        }
    }
    rep.controllable = rep.min_rank == rep.required_rank;
    return rep;
}

std::string AlgebraMatch::name() const {
    switch (kind) {
        case AlgebraKind::Abelian: return "abelian R^" + std::to_string(dimension);
        case AlgebraKind::SO3: return "so(3)";
        case AlgebraKind::SE2: return "se(2)";
        case AlgebraKind::Heisenberg: return "heisenberg";
        case AlgebraKind::Unknown: break;
    }
    return "unknown";
}

AlgebraMatch match_algebra(const ConstantsWithResidual& constants, double tol) {
    const int n = constants.dimension;
    AlgebraMatch m;
    m.dimension = n;

    double cmax = 0.0;
    for (double c : constants.values) cmax = std::max(cmax, std::abs(c));

    // Derived algebra: span of all [e_i, e_j].
    if (n > 1) {
        Eigen::MatrixXd D(n, n * (n - 1) / 2);
        int col = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++col)
                for (int k = 0; k < n; ++k) D(k, col) = constants.at(i, j, k);
        m.derived_dimension = cmax <= tol ? 0 : numeric_rank(D, tol);
    }

    // Killing form K_ab = tr(ad_a ad_b), (ad_a)_{kj} = c^k_{aj}.
    if (n > 0) {
        std::vector<Eigen::MatrixXd> ad(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
        for (int a = 0; a < n; ++a)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) ad[static_cast<std::size_t>(a)](k, j) = constants.at(a, j, k);
        Eigen::MatrixXd K(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                K(a, b) = (ad[static_cast<std::size_t>(a)] * ad[static_cast<std::size_t>(b)]).trace();
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues();
        const double cut = tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i) > cut) ++m.killing_positive;
            else if (ev(i) < -cut) ++m.killing_negative;
            else ++m.killing_zero;
        }
    }

    if (m.derived_dimension == 0) {
        m.kind = AlgebraKind::Abelian;
    } else if (n == 3 && m.derived_dimension == 3 && m.killing_negative == 3) {
        m.kind = AlgebraKind::SO3;
    } else if (n == 3 && m.derived_dimension == 2 && m.killing_negative == 1 &&
               m.killing_zero == 2) {
        m.kind = AlgebraKind::SE2;
    } else if (n == 3 && m.derived_dimension == 1 && m.killing_zero == 3) {
        m.kind = AlgebraKind::Heisenberg;
    } else {
        m.kind = AlgebraKind::Unknown;
    }
    return m;
}

}  // namespace synobs
