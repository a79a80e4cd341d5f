#include "wfk/star_soliton.hpp"

#include <cmath>
#include <sstream>

#include "wfk/errors.hpp"

namespace wfk {

namespace {

using Args = std::vector<Eigen::VectorXd>;

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

Eigen::MatrixXd star_ricci_matrix(const StructureAt& st) {
    const int n = st.dim();
    Eigen::MatrixXd out(n, n);
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd fy = st.f.col(j);
        for (int i = 0; i < n; ++i) {
            const Eigen::MatrixXd r = st.geo.curvature_operator(Eigen::VectorXd::Unit(n, i), fy);
            out(i, j) = 0.5 * (r * st.f).trace();
        }
    }
    return out;
}

double trace_g(const LocalGeometry& geo, const Eigen::MatrixXd& t) { return (geo.inverse() * t).trace(); }

// B1 = g - sum eta^i eta^i + eta_bar eta_bar and B2 = eta_bar eta_bar.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> star_basis(const StructureAt& st) {
    const Eigen::MatrixXd eb = st.eta_bar * st.eta_bar.transpose();
    return {st.geo.metric() - st.eta.transpose() * st.eta + eb, eb};
}

void require_symmetric(const Eigen::MatrixXd& ric_star, const Point& p) {
    const double scale = std::max(1.0, ric_star.cwiseAbs().maxCoeff());
    if ((ric_star - ric_star.transpose()).cwiseAbs().maxCoeff() > 1e-6 * scale) {
        std::ostringstream os;
        os << "Ric* is not symmetric at (";
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
        os << "); the soliton equation needs a symmetric Ric*";
        throw ValidationError(os.str());
    }
}

// (1/2) L_V g + Ric* - lambda(g - sum eta eta) - (lambda+mu) eta_bar eta_bar, as a matrix.
Eigen::MatrixXd soliton_defect(const StructureAt& st, const Eigen::MatrixXd& half_lie, const Eigen::MatrixXd& ric_star,
                               double lambda, double mu) {
    const Eigen::MatrixXd eb = st.eta_bar * st.eta_bar.transpose();
    return half_lie + ric_star - lambda * (st.geo.metric() - st.eta.transpose() * st.eta) - (lambda + mu) * eb;
}

// Expanded right side without the Lie term: lambda g - s(2n-1)b^2 g(Q.,.) + ...
Eigen::MatrixXd expanded_rhs(const StructureAt& st, double beta, double lambda, double mu) {
    const WeakFManifold& m = *st.manifold;
    const double b2 = beta * beta;
    const double k = m.s * (2.0 * m.n - 1) * b2;
    const Eigen::MatrixXd& g = st.geo.metric();
    const Eigen::MatrixXd eb = st.eta_bar * st.eta_bar.transpose();
    return lambda * g - k * (g * st.Q) + (k - lambda) * (st.eta.transpose() * st.eta) + (lambda + mu - 2.0 * m.n * b2) * eb;
}

double probe_bilinear(int n, const Eigen::MatrixXd& t) {
    return probe_residual(n, 2, [&](const Args& a) { return scalar(a[0].dot(t * a[1])); });
}

SolitonFit fit_over(const WeakFManifold& m, const VectorField& v, const std::vector<Point>& sample) {
    const int n = m.dim();
    const int per = n * n;
    Eigen::MatrixXd A(per * static_cast<int>(sample.size()), 2);
    Eigen::VectorXd y(A.rows());
    std::vector<Eigen::MatrixXd> lhs_list, b1_list, b2_list;
    int row = 0;
    for (const Point& p : sample) {
        const StructureAt st(m, p);
        const Eigen::MatrixXd lhs = 0.5 * lie_derivative_metric(m.metric, v, p).matrix() + star_ricci_matrix(st);
        const auto [b1, b2] = star_basis(st);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++row) {
                A(row, 0) = b1(i, j);
                A(row, 1) = b2(i, j);
                y(row) = lhs(i, j);
            }
        lhs_list.push_back(lhs);
        b1_list.push_back(b1);
        b2_list.push_back(b2);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    // lambda B1 + mu B2 = lambda(g - sum eta eta) + (lambda + mu) eta_bar eta_bar
    SolitonFit fit{coef(0), coef(1), 0.0};
    for (std::size_t k = 0; k < lhs_list.size(); ++k)
        fit.residual = std::max(fit.residual,
                                (lhs_list[k] - fit.lambda * b1_list[k] - fit.mu * b2_list[k]).cwiseAbs().maxCoeff());
    return fit;
}

}  // namespace

TensorValue star_ricci(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    return TensorValue::from_matrix(star_ricci_matrix(st), {Slot::down, Slot::down}, p);
}

double star_scalar(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    return trace_g(st.geo, star_ricci_matrix(st));
}

std::pair<ResidualReport, ResidualReport> theorem4_residual(const WeakFManifold& m, const Point& p) {
    const double beta = m.beta_constant();
    const double b2 = beta * beta;
    const StructureAt st(m, p);
    const int N = st.dim();
    const double n = m.n, s = m.s;
    const Eigen::MatrixXd rs = star_ricci_matrix(st);
    const Eigen::MatrixXd& g = st.geo.metric();
    const Eigen::MatrixXd eb = st.eta_bar * st.eta_bar.transpose();
    const Eigen::MatrixXd rhs = st.geo.ricci() * st.Q +
                                b2 * (s * (2 * n - 1) * (st.Q.transpose() * g) + 2 * n * eb -
                                      s * (2 * n - 1) * (st.eta.transpose() * st.eta));
    ResidualReport r28 = make_report("thm4.28", p, probe_bilinear(N, rs - rhs), 1e-6);

    const double rstar = trace_g(st.geo, rs);
    const double rhs29 = (st.Q * st.geo.ricci_operator()).trace() + b2 * (4 * s * n * n + s * (2 * n - 1) * st.Qt.trace());
    ResidualReport r29 = make_report("thm4.29", p, std::abs(rstar - rhs29), 1e-6);
    r29.values = {{"r_star", rstar}, {"rhs", rhs29}};
    return {r28, r29};
}

EinsteinFit star_eta_einstein_fit(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const int N = st.dim();
    const Eigen::MatrixXd rs = star_ricci_matrix(st);
    const auto [b1, b2] = star_basis(st);
    Eigen::MatrixXd A(N * N, 2);
    Eigen::VectorXd y(N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            A(i * N + j, 0) = b1(i, j);
            A(i * N + j, 1) = b2(i, j);
            y(i * N + j) = rs(i, j);
        }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    EinsteinFit fit{coef(0), coef(1), 0.0};
    fit.residual = (rs - fit.a * b1 - fit.b * b2).cwiseAbs().maxCoeff();
    return fit;
}

ResidualReport cor2_check(const WeakFManifold& m, const Point& p) {
    const EinsteinFit fit = star_eta_einstein_fit(m, p);
    const double rstar = star_scalar(m, p);
    const double target = rstar / (2.0 * m.n);
    const double res = std::max({fit.residual, std::abs(fit.a - target), std::abs(fit.a + fit.b)});
    ResidualReport rep = make_report("cor2", p, res, 1e-6);
    rep.values = {{"a_bar", fit.a}, {"b_bar", fit.b}, {"r_star", rstar}, {"fit_residual", fit.residual}};
    return rep;
}

ResidualReport star_symmetry_check(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const Eigen::MatrixXd rs = star_ricci_matrix(st);
    const Eigen::MatrixXd& ric = st.geo.ricci_operator();
    const double anti = 0.5 * (rs - rs.transpose()).cwiseAbs().maxCoeff();
    const double comm = (ric * st.Q - st.Q * ric).cwiseAbs().maxCoeff();
    ResidualReport rep = make_report("star.def", p, std::max(anti, comm), 1e-6);
    rep.values = {{"antisymmetric_part", anti}, {"commutator", comm}};
    return rep;
}

ResidualReport star_trace_check(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const int N = st.dim();
    const LocalGeometry& geo = st.geo;
    Eigen::MatrixXd t1(N, N), t2(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const Eigen::VectorXd x = Eigen::VectorXd::Unit(N, i);
            const Eigen::VectorXd fy = st.f.col(j);
            double a = 0.0, b = 0.0;
            for (int k = 0; k < N; ++k) {
                const Eigen::VectorXd z = Eigen::VectorXd::Unit(N, k);
                a -= (st.f * geo.curvature(fy, z, x))(k);
                b -= (st.f * geo.curvature(z, x, fy))(k);
            }
            t1(i, j) = a;
            t2(i, j) = b;
        }
    const Eigen::MatrixXd rs = star_ricci_matrix(st);
    const double res = std::max((t1 - t2).cwiseAbs().maxCoeff(), (t1 + t2 - 2 * rs).cwiseAbs().maxCoeff());
    return make_report("star.30", p, res, 1e-6);
}

std::string to_string(SolitonClass c) {
    switch (c) {
        case SolitonClass::expanding: return "expanding";
        case SolitonClass::steady: return "steady";
        case SolitonClass::shrinking: return "shrinking";
    }
    return "steady";
}

SolitonClass classify(double lambda) {
    if (std::abs(lambda) <= 1e-9) return SolitonClass::steady;
    return lambda < 0 ? SolitonClass::expanding : SolitonClass::shrinking;
}

SolitonVerdict soliton_residual(const WeakFManifold& m, const SolitonData& sol, const Point& p) {
    if (!sol.V) throw ValidationError("the soliton equation needs a vector field V");
    const StructureAt st(m, p);
    const Eigen::MatrixXd rs = star_ricci_matrix(st);
    require_symmetric(rs, p);
    const Eigen::MatrixXd half_lie = 0.5 * lie_derivative_metric(m.metric, *sol.V, p).matrix();
    SolitonVerdict v;
    v.residual = probe_bilinear(st.dim(), soliton_defect(st, half_lie, rs, sol.lambda, sol.mu));
    const double beta = m.beta_constant();
    const Eigen::MatrixXd lhs33 = half_lie + st.geo.ricci() * st.Q;
    v.cross_residual = probe_bilinear(st.dim(), lhs33 - expanded_rhs(st, beta, sol.lambda, sol.mu));
    v.classification = classify(sol.lambda);
    v.prop5_gap = std::abs(sol.lambda + sol.mu);
    return v;
}

SolitonVerdict gradient_soliton_residual(const WeakFManifold& m, const SolitonData& sol, const Point& p) {
    if (!sol.potential) throw ValidationError("the gradient soliton equation needs a potential function v");
    const StructureAt st(m, p);
    const Eigen::MatrixXd rs = star_ricci_matrix(st);
    require_symmetric(rs, p);
    const Eigen::MatrixXd hess = gradient_and_hessian(m.metric, *sol.potential, p).second.matrix();
    SolitonVerdict v;
    v.residual = probe_bilinear(st.dim(), soliton_defect(st, hess, rs, sol.lambda, sol.mu));
    // Vector form as endomorphisms: D_X grad v + Q Ric# X = ...
    const double beta = m.beta_constant();
    const double b2 = beta * beta;
    const double k = m.s * (2.0 * m.n - 1) * b2;
    const int N = st.dim();
    const Eigen::MatrixXd lhs = st.geo.inverse() * hess + st.Q * st.geo.ricci_operator();
    const Eigen::MatrixXd rhs = sol.lambda * Eigen::MatrixXd::Identity(N, N) - k * st.Q +
                                (k - sol.lambda) * st.xi * st.eta +
                                (sol.lambda + sol.mu - 2.0 * m.n * b2) * st.xi_bar * st.eta_bar.transpose();
    v.cross_residual = probe_residual(N, 1, [&](const Args& a) -> Eigen::VectorXd { return (lhs - rhs) * a[0]; });
    v.classification = classify(sol.lambda);
    v.prop5_gap = std::abs(sol.lambda + sol.mu);
    return v;
}

SolitonFit fit_soliton_constants(const WeakFManifold& m, const VectorField& v, const std::vector<Point>& sample) {
    if (sample.size() < 2) throw ValidationError("fitting soliton constants needs at least 2 sample points");
    return fit_over(m, v, sample);
}

Prop5Result prop5_check(double lambda, double mu, double tolerance) {
    Prop5Result r;
    r.gap = std::abs(lambda + mu);
    r.pass = r.gap < tolerance;
    if (mu == 0.0) {
        r.cor3_gap = std::abs(lambda);
        r.pass = r.pass && *r.cor3_gap < tolerance;
    }
    return r;
}

ContactVerdict contact_field_check(const WeakFManifold& m, const VectorField& v, const Point& p) {
    const int N = m.dim();
    const auto probes = probe_vectors(N);
    std::vector<double> lhs, base;
    for (const auto& eta : m.eta) {
        const Eigen::VectorXd l = lie_derivative_1form(eta, v, p).vector();
        const Eigen::VectorXd e = eta.value_at(p);
        for (const auto& x : probes) {
            lhs.push_back(l.dot(x));
            base.push_back(e.dot(x));
        }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k) {
        num += lhs[k] * base[k];
        den += base[k] * base[k];
    }
    ContactVerdict out;
    out.sigma = den > 0.0 ? num / den : 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k) out.residual = std::max(out.residual, std::abs(lhs[k] - out.sigma * base[k]));
    out.is_contact = out.residual < 1e-8;
    out.is_strict = out.is_contact && std::abs(out.sigma) < 1e-8;
    return out;
}

std::vector<ResidualReport> lemma2_audit(const WeakFManifold& m, const SolitonData& sol, const Point& p) {
    const double beta = m.beta_constant();
    const double b2 = beta * beta, b3 = b2 * beta, b4 = b2 * b2;
    const double n = m.n, s = m.s;
    if (!sol.V) throw ValidationError("the Lie derivative audit needs a vector field V");
    const VectorField& V = *sol.V;
    const StructureAt st(m, p);
    const int N = st.dim();
    const Eigen::MatrixXd& ric = st.geo.ricci_operator();

    std::string hypothesis;
    try {
        const SolitonVerdict v = soliton_residual(m, sol, p);
        if (v.residual >= 1e-6) hypothesis = "soliton equation not satisfied at this point";
    } catch (const ValidationError& err) {
        hypothesis = err.what();
    }

    std::vector<ResidualReport> out;

    // L_V D along xi_i over the coordinate basis.
    const TensorValue a = lie_derivative_connection(m.metric, V, p);
    double gap42 = 0.0, d_slot = 0.0;
    for (int x = 0; x < N; ++x) {
        const Eigen::VectorXd X = Eigen::VectorXd::Unit(N, x);
        const Eigen::VectorXd qx = st.Q * X;
        const Eigen::VectorXd rhs = 2 * beta * ric * qx + 4 * s * n * b3 * qx + 2 * s * b3 * (st.Qt * X) +
                                    4 * n * b3 * (st.eta_bar.dot(X) * st.xi_bar - s * st.vertical(X));
        for (int i = 0; i < m.s; ++i) {
            const Eigen::VectorXd xi = st.xi.col(i);
            Eigen::VectorXd lhs = Eigen::VectorXd::Zero(N);
            for (int l = 0; l < N; ++l)
                for (int j = 0; j < N; ++j) lhs(l) += a(l, x, j) * xi(j);
            const Eigen::VectorXd diff = rhs - lhs;
            gap42 = std::max(gap42, diff.cwiseAbs().maxCoeff());
            if (x == 0 && i == 0) d_slot = diff(0);
        }
    }
    ResidualReport r42 = make_report("lemma2.42", p, gap42, 1e-4, true);
    r42.values = {{"d_slot_gap", d_slot}, {"predicted_gap", 2 * s * (m.c ? *m.c : 0.0) * b3}};
    r42.flagged = !r42.pass;
    out.push_back(r42);

    // The curvature checks need the Lie derivative of R.
    const TensorValue lr = lie_derivative_curvature(m.metric, V, p);
    const auto dric = covariant_ricci_operator(m.metric, p);
    auto lie_r = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
        for (int l = 0; l < N; ++l)
            for (int i = 0; i < N; ++i) {
                if (x(i) == 0.0) continue;
                for (int j = 0; j < N; ++j) {
                    if (y(j) == 0.0) continue;
                    for (int k = 0; k < N; ++k) v(l) += lr(l, i, j, k) * x(i) * y(j) * z(k);
                }
            }
        return v;
    };
    auto nabla_ric = [&](const Eigen::VectorXd& x) { return st.nabla(dric, x); };

    double gap34 = 0.0;
    for (int i = 0; i < m.s; ++i) {
        const Eigen::VectorXd xi = st.xi.col(i);
        gap34 = std::max(gap34, probe_residual(N, 2, [&](const Args& args) -> Eigen::VectorXd {
                             const auto& x = args[0];
                             const auto& y = args[1];
                             const double ex = st.eta_bar.dot(x), ey = st.eta_bar.dot(y);
                             const Eigen::VectorXd rhs =
                                 2 * beta * (nabla_ric(x) * (st.Q * y) - nabla_ric(y) * (st.Q * x)) +
                                 2 * b2 * (ex * ric * y - ey * ric * x) +
                                 4 * b2 * (ex * ric * (st.Qt * y) - ey * ric * (st.Qt * x)) +
                                 4 * s * n * b4 * ex * (y + 2 * st.Qt * y - st.vertical(y)) -
                                 4 * s * n * b4 * ey * (x + 2 * st.Qt * x - st.vertical(x));
                             return lie_r(x, y, xi) - rhs;
                         }));
    }
    ResidualReport r34 = make_report("lemma2.34", p, gap34, 1e-3, true);
    r34.flagged = !r34.pass;
    out.push_back(r34);

    double r35 = 0.0;
    for (int i = 0; i < m.s; ++i)
        for (int j = 0; j < m.s; ++j)
            r35 = std::max(r35, probe_residual(N, 1, [&](const Args& args) -> Eigen::VectorXd {
                               return lie_r(args[0], st.xi.col(j), st.xi.col(i));
                           }));
    out.push_back(make_report("lemma2.35", p, r35, 1e-3, true));
    out.back().flagged = !out.back().pass;

    for (auto& r : out) r.note = hypothesis;
    return out;
}

std::vector<ResidualReport> discrepancy_audit(const WeakFManifold& m, const Point& p) {
    if (!m.c) throw ValidationError("the discrepancy audit needs the example2 parameter c");
    const double c = *m.c;
    const double beta = m.beta_constant();
    const double b2 = beta * beta;
    const double n = m.n, s = m.s;
    const double k = 2 * n * (s - 1) + 1;
    const double gap = (1 + c) * b2 * (k - s);

    std::vector<ResidualReport> out;
    auto add = [&](const char* id, double oracle, double reference, double predicted) {
        ResidualReport r = make_report(id, p, std::abs((oracle - reference) - predicted), 1e-6, true);
        r.values = {{"oracle", oracle}, {"reference", reference}, {"gap", oracle - reference}, {"predicted_gap", predicted}};
        r.flagged = std::abs(oracle - reference) > 1e-6;
        out.push_back(r);
    };

    const FBasis fb = f_basis(m, p);
    const Eigen::VectorXd& e = fb.frame.front();
    const Eigen::MatrixXd rs = star_ricci(m, p).matrix();
    add("disc.ricstar", e.dot(rs * e), -(1 + c) * k * b2, gap);
    add("disc.rstar", star_scalar(m, p), -2 * n * k * (1 + c) * b2, 2 * n * gap);
    const SolitonFit fit = fit_over(m, m.xi_bar(), {p});
    add("disc.lambda", fit.lambda, s * beta - (1 + c) * k * b2, gap);
    out.back().values.push_back({"mu", fit.mu});
    return out;
}

}  // namespace wfk
