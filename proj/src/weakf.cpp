#include "wfk/weakf.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "wfk/errors.hpp"

namespace wfk {

double WeakFManifold::beta_constant() const {
    if (!beta.is_constant()) {
        throw ValidationError("beta must be a constant here, got \"" + to_string(beta) + "\"");
    }
    return beta.constant_value();
}

StructureAt::StructureAt(const WeakFManifold& m, const Point& p)
    : manifold(&m), geo(m.metric, p), beta(evaluate(m.beta, p)) {
    const int n = geo.dim();
    f = m.f.value_at(p);
    Q = m.Q.value_at(p);
    Qt = Q - Eigen::MatrixXd::Identity(n, n);
    xi.resize(n, m.s);
    eta.resize(m.s, n);
    for (int i = 0; i < m.s; ++i) {
        xi.col(i) = m.xi[static_cast<std::size_t>(i)].value_at(p);
        eta.row(i) = m.eta[static_cast<std::size_t>(i)].value_at(p).transpose();
    }
    xi_bar = xi.rowwise().sum();
    eta_bar = eta.colwise().sum().transpose();
    nabla_f = geo.covariant_endomorphism(jet_of(m.f, p));
    nabla_Q = geo.covariant_endomorphism(jet_of(m.Q, p));
    for (const auto& x : m.xi) nabla_xi.push_back(geo.covariant_vector(jet_of(x.components, p)));
}

Eigen::MatrixXd StructureAt::nabla(const std::vector<Eigen::MatrixXd>& d, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k)
        if (x(k) != 0.0) out += x(k) * d[static_cast<std::size_t>(k)];
    return out;
}

ResidualReport make_report(std::string id, const Point& p, double residual, double tolerance, bool audit) {
    ResidualReport r;
    r.id = std::move(id);
    r.point = p;
    r.residual = residual;
    r.tolerance = tolerance;
    r.pass = std::isfinite(residual) && residual < tolerance;
    r.audit = audit;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Eigen::VectorXd> random_vectors(int dim, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = u(rng);
        out.push_back(v);
    }
    return out;
}

}  // namespace

std::vector<Eigen::VectorXd> probe_vectors(int dim) {
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < dim; ++i) out.push_back(Eigen::VectorXd::Unit(dim, i));
    std::mt19937_64 rng(probe_seed);
    for (auto& v : random_vectors(dim, random_probe_count, rng)) out.push_back(std::move(v));
    return out;
}

double probe_residual(int dim, int arity, const ProbeFn& fn) {
    double worst = 0.0;
    auto take = [&](const std::vector<Eigen::VectorXd>& args) {
        const Eigen::VectorXd r = fn(args);
        if (r.size() == 0) return;
        if (!r.allFinite()) {
            worst = std::numeric_limits<double>::infinity();
            return;
        }
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    };
    if (arity == 0) {
        take({});
        return worst;
    }
    std::vector<int> idx(static_cast<std::size_t>(arity), 0);
    std::vector<Eigen::VectorXd> args(static_cast<std::size_t>(arity));
    for (;;) {
        for (int a = 0; a < arity; ++a) args[static_cast<std::size_t>(a)] = Eigen::VectorXd::Unit(dim, idx[static_cast<std::size_t>(a)]);
        take(args);
        int pos = arity - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == dim) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    std::mt19937_64 rng(probe_seed);
    for (int t = 0; t < random_probe_count; ++t) take(random_vectors(dim, arity, rng));
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

std::string point_text(const Point& p) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

}  // namespace

void validate(const WeakFManifold& m, const std::vector<Point>& points) {
    require(m.n >= 1, "n must be at least 1");
    require(m.s >= 1, "s must be at least 1");
    const int dim = m.dim();
    require(m.metric.dim() == dim, "metric dimension must equal 2n+s = " + std::to_string(dim));
    require(m.f.dim() == dim, "f must be " + std::to_string(dim) + "x" + std::to_string(dim));
    require(m.Q.dim() == dim, "Q must be " + std::to_string(dim) + "x" + std::to_string(dim));
    require(static_cast<int>(m.xi.size()) == m.s, "expected s = " + std::to_string(m.s) + " vector fields xi");
    require(static_cast<int>(m.eta.size()) == m.s, "expected s = " + std::to_string(m.s) + " 1-forms eta");
    for (const auto& x : m.xi) require(x.dim() == dim, "xi components must have length " + std::to_string(dim));
    for (const auto& e : m.eta) require(e.dim() == dim, "eta components must have length " + std::to_string(dim));
    if (m.c) require(*m.c >= 0.0, "c must be non-negative");

    for (const Point& p : points) {
        require(static_cast<int>(p.size()) == dim, "sample point has the wrong dimension");
        const std::string at = " at validation point " + point_text(p);
        Eigen::MatrixXd g;
        try {
            g = LocalGeometry(m.metric, p).metric();
        } catch (const GeometryError& err) {
            throw ValidationError(std::string(err.what()));
        }
        const Eigen::MatrixXd f = m.f.value_at(p);
        const Eigen::MatrixXd Q = m.Q.value_at(p);
        Eigen::MatrixXd xi(dim, m.s), eta(m.s, dim);
        for (int i = 0; i < m.s; ++i) {
            xi.col(i) = m.xi[static_cast<std::size_t>(i)].value_at(p);
            eta.row(i) = m.eta[static_cast<std::size_t>(i)].value_at(p).transpose();
        }
        const double tol = 1e-8;
        require(((eta * xi) - Eigen::MatrixXd::Identity(m.s, m.s)).cwiseAbs().maxCoeff() < tol,
                "axiom η^i(ξ_j)=δ violated at validation point " + point_text(p));
        const Eigen::MatrixXd gf = g * f;
        require((gf + gf.transpose()).cwiseAbs().maxCoeff() < tol * std::max(1.0, gf.cwiseAbs().maxCoeff()),
                "f is not skew-symmetric with respect to g" + at);
        const Eigen::MatrixXd gq = g * Q;
        require((gq - gq.transpose()).cwiseAbs().maxCoeff() < tol * std::max(1.0, gq.cwiseAbs().maxCoeff()),
                "Q is not self-adjoint with respect to g" + at);
        Eigen::JacobiSVD<Eigen::MatrixXd> qsvd(Q);
        require(qsvd.singularValues()(dim - 1) > tol * std::max(1.0, qsvd.singularValues()(0)), "Q is singular" + at);
        // Rank of f in a g-orthonormal frame.
        const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(g).matrixU();
        Eigen::JacobiSVD<Eigen::MatrixXd> fsvd(l * f * l.inverse());
        const auto& sv = fsvd.singularValues();
        const double scale = std::max(1.0, sv(0));
        require(sv(2 * m.n - 1) > tol * scale && (2 * m.n == dim || sv(2 * m.n) < tol * scale),
                "f must have rank 2n = " + std::to_string(2 * m.n) + at);
    }
}

std::vector<ResidualReport> check_axioms(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const int n = st.dim();
    const double tol = 1e-8;
    const auto& f = st.f;
    const auto& Q = st.Q;
    std::vector<ResidualReport> out;
    auto add = [&](const char* id, int arity, const ProbeFn& fn) {
        out.push_back(make_report(id, p, probe_residual(n, arity, fn), tol));
    };
    using Args = std::vector<Eigen::VectorXd>;
    auto one = [](double v) { return Eigen::VectorXd::Constant(1, v); };

    add("axiom.5", 1, [&](const Args& a) -> Eigen::VectorXd { return f * (f * a[0]) + Q * a[0] - st.vertical(a[0]); });
    add("axiom.6", 2, [&](const Args& a) {
        return one(st.g(f * a[0], f * a[1]) - st.g(a[0], Q * a[1]) + st.eta_eta(a[0], a[1]));
    });
    add("axiom.f_xi", 0, [&](const Args&) -> Eigen::VectorXd {
        Eigen::MatrixXd r = f * st.xi;
        return Eigen::Map<Eigen::VectorXd>(r.data(), r.size());
    });
    add("axiom.eta_f", 1, [&](const Args& a) -> Eigen::VectorXd { return st.eta * (f * a[0]); });
    add("axiom.eta_Q", 1, [&](const Args& a) -> Eigen::VectorXd { return st.eta * (Q * a[0]) - st.eta * a[0]; });
    add("axiom.Qf", 1, [&](const Args& a) -> Eigen::VectorXd { return Q * (f * a[0]) - f * (Q * a[0]); });
    add("axiom.Q_xi", 0, [&](const Args&) -> Eigen::VectorXd {
        Eigen::MatrixXd r = Q * st.xi - st.xi;
        return Eigen::Map<Eigen::VectorXd>(r.data(), r.size());
    });
    add("axiom.g_xi", 1, [&](const Args& a) -> Eigen::VectorXd {
        return st.xi.transpose() * st.geo.metric() * a[0] - st.eta * a[0];
    });
    add("axiom.f3", 1, [&](const Args& a) -> Eigen::VectorXd {
        const Eigen::VectorXd fx = f * a[0];
        return f * (f * fx) + fx + st.Qt * fx;
    });
    add("axiom.dual", 0, [&](const Args&) -> Eigen::VectorXd {
        Eigen::MatrixXd r = st.eta * st.xi - Eigen::MatrixXd::Identity(m.s, m.s);
        return Eigen::Map<Eigen::VectorXd>(r.data(), r.size());
    });
    add("axiom.f_skew", 2, [&](const Args& a) { return one(st.g(f * a[0], a[1]) + st.g(a[0], f * a[1])); });
    add("axiom.Q_sym", 2, [&](const Args& a) { return one(st.g(Q * a[0], a[1]) - st.g(a[0], Q * a[1])); });
    return out;
}

TensorValue nijenhuis(const MetricField& g, const MixedTensorField& s, const Point& p) {
    const LocalGeometry geo(g, p);
    const int n = geo.dim();
    const MatrixJet jet = jet_of(s, p);
    const Eigen::MatrixXd& S = jet.value;
    const auto ds = geo.covariant_endomorphism(jet);
    auto nabla = [&](const Eigen::VectorXd& x) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k < n; ++k) out += x(k) * ds[static_cast<std::size_t>(k)];
        return out;
    };
    TensorValue t({Slot::up, Slot::down, Slot::down}, n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Eigen::VectorXd x = Eigen::VectorXd::Unit(n, i), y = Eigen::VectorXd::Unit(n, j);
            const Eigen::VectorXd v = (S * ds[static_cast<std::size_t>(j)] - nabla(S * y)) * x -
                                      (S * ds[static_cast<std::size_t>(i)] - nabla(S * x)) * y;
            for (int l = 0; l < n; ++l) t(l, i, j) = v(l);
        }
    }
    return t;
}

TensorValue normality_tensor(const WeakFManifold& m, const Point& p) {
    TensorValue t = nijenhuis(m.metric, m.f, p);
    const int n = m.dim();
    for (int a = 0; a < m.s; ++a) {
        const TensorValue d = exterior_derivative_1form(m.eta[static_cast<std::size_t>(a)], p);
        const Eigen::VectorXd xi = m.xi[static_cast<std::size_t>(a)].value_at(p);
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) t(l, i, j) += 2.0 * d(i, j) * xi(l);
    }
    return t;
}

TwoFormField fundamental_form_field(const WeakFManifold& m) {
    const int n = m.dim();
    TwoFormField phi(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr acc = Expr::constant(0);
            for (int k = 0; k < n; ++k) acc = acc + m.metric(i, k) * m.f(k, j);
            phi(i, j) = acc;
        }
    return phi;
}

TensorValue fundamental_form(const WeakFManifold& m, const Point& p) {
    const LocalGeometry geo(m.metric, p);
    return TensorValue::from_matrix(geo.metric() * m.f.value_at(p), {Slot::down, Slot::down}, p);
}

TensorValue wedge(const Eigen::VectorXd& alpha, const TensorValue& phi) {
    const int n = phi.dim();
    TensorValue t({Slot::down, Slot::down, Slot::down}, n, phi.base());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                t(i, j, k) = (alpha(i) * phi(j, k) + alpha(j) * phi(k, i) + alpha(k) * phi(i, j)) / 3.0;
    return t;
}

namespace {

double contract3(const TensorValue& t, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
    const int n = t.dim();
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
        if (x(i) == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (y(j) == 0.0) continue;
            for (int k = 0; k < n; ++k) v += t(i, j, k) * x(i) * y(j) * z(k);
        }
    }
    return v;
}

Eigen::VectorXd apply_up_down_down(const TensorValue& t, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const int n = t.dim();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i) {
            if (x(i) == 0.0) continue;
            for (int j = 0; j < n; ++j) v(l) += t(l, i, j) * x(i) * y(j);
        }
    return v;
}

}  // namespace

FBasis f_basis(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const int n = st.dim();
    const Eigen::LLT<Eigen::MatrixXd> llt(st.geo.metric());
    // y = U x with g = U^T U turns g into the Euclidean product.
    const Eigen::MatrixXd U = llt.matrixU();
    const Eigen::MatrixXd Uinv = U.inverse();
    const Eigen::MatrixXd Qy = U * st.Q * Uinv;
    const Eigen::MatrixXd fy = U * st.f * Uinv;

    // Orthonormal basis of D = span(xi)^perp in y-coordinates.
    const Eigen::MatrixXd xiy = U * st.xi;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(xiy);
    const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd B = full.rightCols(n - m.s);

    FBasis out;
    std::vector<Eigen::VectorXd> fe_list;
    for (int step = 0; step < m.n; ++step) {
        const Eigen::MatrixXd A = B.transpose() * Qy * B;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
        if (es.info() != Eigen::Success) throw GeometryError("eigen-decomposition of Q on D did not converge");
        const Eigen::VectorXd& ev = es.eigenvalues();
        const Eigen::MatrixXd V = B * es.eigenvectors();
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        if (ev(0) <= 1e-12 * scale) throw GeometryError("Q is not positive on D at this point");

        // Group eigenvalues into eigenspaces.
        std::vector<std::pair<int, int>> groups;  // [begin, end)
        for (int a = 0; a < ev.size();) {
            int b = a + 1;
            while (b < ev.size() && ev(b) - ev(a) <= 1e-8 * scale) ++b;
            groups.emplace_back(a, b);
            a = b;
        }

        Eigen::VectorXd best;
        double best_norm = 0.0, best_lambda = 0.0;
        for (int axis = 0; axis < n && best_norm == 0.0; ++axis) {
            const Eigen::VectorXd ya = U.col(axis);
            for (const auto& [a, b] : groups) {
                const Eigen::MatrixXd E = V.middleCols(a, b - a);
                const Eigen::VectorXd proj = E * (E.transpose() * ya);
                const double nrm = proj.norm();
                if (nrm > 1e-9 * ya.norm() && nrm > best_norm) {
                    best_norm = nrm;
                    best = proj / nrm;
                    best_lambda = ev.segment(a, b - a).mean();
                }
            }
        }
        if (best_norm == 0.0) throw GeometryError("f-basis construction failed to find an eigenvector");

        Eigen::VectorXd ex = Uinv * best;
        for (int i = 0; i < n; ++i) {
            if (std::abs(ex(i)) > 1e-12) {
                if (ex(i) < 0) {
                    ex = -ex;
                    best = -best;
                }
                break;
            }
        }
        const Eigen::VectorXd fey = fy * best;
        out.frame.push_back(ex);
        out.frame.push_back(st.f * ex);
        out.lambda.push_back(best_lambda);

        // Remove span{e, fe} from the working subspace.
        if (B.cols() > 2) {
            Eigen::MatrixXd coeff(B.cols(), 2);
            coeff.col(0) = B.transpose() * best;
            coeff.col(1) = B.transpose() * fey.normalized();
            Eigen::HouseholderQR<Eigen::MatrixXd> cq(coeff);
            const Eigen::MatrixXd cfull = cq.householderQ() * Eigen::MatrixXd::Identity(B.cols(), B.cols());
            B = (B * cfull.rightCols(B.cols() - 2)).eval();
        }
    }
    for (int i = 0; i < m.s; ++i) out.frame.push_back(st.xi.col(i));
    return out;
}

std::vector<ResidualReport> theorem1_check(const WeakFManifold& m, const Point& p) {
    const int n = m.dim();
    const double tol = 1e-6;
    std::vector<ResidualReport> out;

    const TensorValue n1 = normality_tensor(m, p);
    out.push_back(make_report("n1", p, probe_residual(n, 2, [&](const std::vector<Eigen::VectorXd>& a) {
                                  return apply_up_down_down(n1, a[0], a[1]);
                              }),
                              tol));

    double deta = 0.0;
    for (const auto& e : m.eta) {
        const TensorValue d = exterior_derivative_1form(e, p);
        deta = std::max(deta, probe_residual(n, 2, [&](const std::vector<Eigen::VectorXd>& a) {
                            return Eigen::VectorXd::Constant(1, a[0].dot(d.matrix() * a[1]));
                        }));
    }
    out.push_back(make_report("deta", p, deta, tol));

    const TensorValue dphi = exterior_derivative_2form(fundamental_form_field(m), p);
    const double beta = evaluate(m.beta, p);
    const TensorValue w = wedge(m.eta_bar().value_at(p), fundamental_form(m, p));
    out.push_back(make_report("dphi", p, probe_residual(n, 3, [&](const std::vector<Eigen::VectorXd>& a) {
                                  return Eigen::VectorXd::Constant(
                                      1, contract3(dphi, a[0], a[1], a[2]) - 2 * beta * contract3(w, a[0], a[1], a[2]));
                              }),
                              tol));
    return out;
}

double dphi_proportionality(const WeakFManifold& m, const Point& p) {
    const TensorValue dphi = exterior_derivative_2form(fundamental_form_field(m), p);
    const double beta = evaluate(m.beta, p);
    const TensorValue w = wedge(m.eta_bar().value_at(p), fundamental_form(m, p));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.data().size(); ++i) {
        const double rhs = beta * w.data()[i];
        num += dphi.data()[i] * rhs;
        den += rhs * rhs;
    }
    if (den < 1e-28) return std::numeric_limits<double>::quiet_NaN();
    return num / den;
}

ResidualReport prop1_check(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    double worst = 0.0;
    for (int i = 0; i < m.s; ++i)
        for (int j = 0; j < m.s; ++j) {
            const Eigen::VectorXd vij = st.nabla_xi[static_cast<std::size_t>(j)] * st.xi.col(i);
            const Eigen::VectorXd vji = st.nabla_xi[static_cast<std::size_t>(i)] * st.xi.col(j);
            worst = std::max({worst, (st.eta * vij).cwiseAbs().maxCoeff(), (vij + vji).cwiseAbs().maxCoeff()});
        }
    return make_report("prop1.10", p, worst, 1e-8);
}

}  // namespace wfk
