#include "wfk/geometry.hpp"

#include <cmath>
#include <sstream>

#include "wfk/errors.hpp"

namespace wfk {

namespace {

std::string point_text(std::span<const double> p) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

void check_dim(int expected, std::size_t got, const char* what) {
    if (static_cast<std::size_t>(expected) != got) {
        std::ostringstream os;
        os << what << ": expected dimension " << expected << ", got " << got;
        throw GeometryError(os.str());
    }
}

}  // namespace

LocalGeometry::LocalGeometry(const MetricField& g, std::span<const double> p)
    : n_(g.dim()), point_(p.begin(), p.end()) {
    check_dim(n_, p.size(), "metric evaluation");
    const int n = n_;
    const std::size_t nn = static_cast<std::size_t>(n);
    g_ = Eigen::MatrixXd::Zero(n, n);
    dg_.assign(nn, Eigen::MatrixXd::Zero(n, n));
    ddg_.assign(nn * nn, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const Expr& e = g(i, j);
            if (e.is_constant()) {
                g_(i, j) = g_(j, i) = e.constant_value();
                continue;
            }
            const ScalarJet jet = evaluate_jet(e, p);
            g_(i, j) = g_(j, i) = jet.value();
            for (int k = 0; k < n; ++k) {
                dg_[static_cast<std::size_t>(k)](i, j) = dg_[static_cast<std::size_t>(k)](j, i) = jet.gradient(k);
                for (int l = 0; l < n; ++l) {
                    auto& h = ddg_[static_cast<std::size_t>(k * n + l)];
                    h(i, j) = h(j, i) = jet.hessian(k, l);
                }
            }
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(g_);
    if (llt.info() != Eigen::Success || !g_.allFinite()) {
        throw GeometryError("metric is not positive definite at " + point_text(p));
    }
    ginv_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    ginv_ = 0.5 * (ginv_ + ginv_.transpose()).eval();

    // First-kind symbols and their partials.
    std::vector<double> first(nn * nn * nn), dfirst(nn * nn * nn * nn);
    for (int m = 0; m < n; ++m) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                first[idx3(m, i, j)] = 0.5 * (dmetric(i, m, j) + dmetric(j, m, i) - dmetric(m, i, j));
                for (int k = 0; k < n; ++k) {
                    dfirst[idx4(k, m, i, j)] =
                        0.5 * (ddmetric(k, i, m, j) + ddmetric(k, j, m, i) - ddmetric(k, m, i, j));
                }
            }
        }
    }

    std::vector<Eigen::MatrixXd> dginv(nn);
    for (int k = 0; k < n; ++k) dginv[static_cast<std::size_t>(k)] = -ginv_ * dg_[static_cast<std::size_t>(k)] * ginv_;

    gamma_.assign(nn * nn * nn, 0.0);
    dgamma_.assign(nn * nn * nn * nn, 0.0);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int m = 0; m < n; ++m) acc += ginv_(l, m) * first[idx3(m, i, j)];
                gamma_[idx3(l, i, j)] = acc;
                for (int k = 0; k < n; ++k) {
                    double d = 0.0;
                    for (int m = 0; m < n; ++m) {
                        d += dginv[static_cast<std::size_t>(k)](l, m) * first[idx3(m, i, j)] +
                             ginv_(l, m) * dfirst[idx4(k, m, i, j)];
                    }
                    dgamma_[idx4(k, l, i, j)] = d;
                }
            }
        }
    }

    riemann_.assign(nn * nn * nn * nn, 0.0);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                for (int k = 0; k < n; ++k) {
                    double v = dchristoffel(i, l, j, k) - dchristoffel(j, l, i, k);
                    for (int m = 0; m < n; ++m) {
                        v += christoffel(m, j, k) * christoffel(l, i, m) - christoffel(m, i, k) * christoffel(l, j, m);
                    }
                    riemann_[idx4(l, i, j, k)] = v;
                }
            }
        }
    }

    ricci_ = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) ricci_(i, j) += riemann(l, l, i, j);
    ricci_ = 0.5 * (ricci_ + ricci_.transpose()).eval();
    ricci_op_ = ginv_ * ricci_;
    scalar_ = ricci_op_.trace();
}

Eigen::VectorXd LocalGeometry::connection(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    for (int l = 0; l < n_; ++l)
        for (int i = 0; i < n_; ++i) {
            if (x(i) == 0.0) continue;
            for (int j = 0; j < n_; ++j) out(l) += christoffel(l, i, j) * x(i) * y(j);
        }
    return out;
}

Eigen::MatrixXd LocalGeometry::curvature_operator(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
        if (x(i) == 0.0) continue;
        for (int j = 0; j < n_; ++j) {
            const double w = x(i) * y(j);
            if (w == 0.0) continue;
            for (int l = 0; l < n_; ++l)
                for (int k = 0; k < n_; ++k) m(l, k) += w * riemann(l, i, j, k);
        }
    }
    return m;
}

Eigen::VectorXd LocalGeometry::curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& z) const {
    return curvature_operator(x, y) * z;
}

Eigen::MatrixXd LocalGeometry::covariant_vector(const VectorJet& v) const {
    Eigen::MatrixXd d = v.jacobian;
    for (int a = 0; a < n_; ++a)
        for (int k = 0; k < n_; ++k)
            for (int m = 0; m < n_; ++m) d(a, k) += christoffel(a, k, m) * v.value(m);
    return d;
}

Eigen::MatrixXd LocalGeometry::covariant_covector(const VectorJet& w) const {
    Eigen::MatrixXd d = w.jacobian;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            for (int m = 0; m < n_; ++m) d(j, k) -= christoffel(m, k, j) * w.value(m);
    return d;
}

std::vector<Eigen::MatrixXd> LocalGeometry::covariant_endomorphism(const MatrixJet& t) const {
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
        Eigen::MatrixXd gk(n_, n_);  // gk(i, m) = Gamma^i_{k m}
        for (int i = 0; i < n_; ++i)
            for (int m = 0; m < n_; ++m) gk(i, m) = christoffel(i, k, m);
        out[static_cast<std::size_t>(k)] = t.partial[static_cast<std::size_t>(k)] + gk * t.value - t.value * gk;
    }
    return out;
}

std::vector<Eigen::MatrixXd> LocalGeometry::second_covariant_vector(const VectorJet& v) const {
    const Eigen::MatrixXd w = covariant_vector(v);  // w(l, j) = D_j V^l
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n_), Eigen::MatrixXd::Zero(n_, n_));
    for (int l = 0; l < n_; ++l) {
        auto& h = out[static_cast<std::size_t>(l)];
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                double acc = v.hessian[static_cast<std::size_t>(l)](i, j);
                for (int m = 0; m < n_; ++m) {
                    acc += dchristoffel(i, l, j, m) * v.value(m) + christoffel(l, j, m) * v.jacobian(m, i) +
                           christoffel(l, i, m) * w(m, j) - christoffel(m, i, j) * w(l, m);
                }
                h(i, j) = acc;
            }
        }
    }
    return out;
}

Eigen::MatrixXd LocalGeometry::orthonormal_frame() const {
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n_, n_);
    for (int a = 0; a < n_; ++a) {
        Eigen::VectorXd v = e.col(a);
        for (int b = 0; b < a; ++b) v -= inner(e.col(b), v) * e.col(b);
        e.col(a) = v / std::sqrt(inner(v, v));
    }
    return e;
}

double LocalGeometry::metric_compatibility_residual() const {
    double worst = 0.0;
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                double v = dmetric(k, i, j);
                for (int m = 0; m < n_; ++m) v -= christoffel(m, k, i) * g_(m, j) + christoffel(m, k, j) * g_(i, m);
                worst = std::max(worst, std::abs(v));
            }
    return worst;
}

// ---------------------------------------------------------------------------

TensorValue metric_at(const MetricField& g, const Point& p) {
    LocalGeometry geo(g, p);
    return TensorValue::from_matrix(geo.metric(), {Slot::down, Slot::down}, p);
}

TensorValue christoffel(const MetricField& g, const Point& p) {
    LocalGeometry geo(g, p);
    const int n = geo.dim();
    TensorValue t({Slot::up, Slot::down, Slot::down}, n, p);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t(l, i, j) = geo.christoffel(l, i, j);
    return t;
}

TensorValue riemann(const MetricField& g, const Point& p) {
    LocalGeometry geo(g, p);
    const int n = geo.dim();
    TensorValue t({Slot::up, Slot::down, Slot::down, Slot::down}, n, p);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) t(l, i, j, k) = geo.riemann(l, i, j, k);
    return t;
}

TensorValue ricci(const MetricField& g, const Point& p) {
    LocalGeometry geo(g, p);
    return TensorValue::from_matrix(geo.ricci(), {Slot::down, Slot::down}, p);
}

double scalar_curvature(const MetricField& g, const Point& p) { return LocalGeometry(g, p).scalar_curvature(); }

TensorValue lie_derivative_metric(const MetricField& g, const VectorField& v, const Point& p) {
    check_dim(g.dim(), static_cast<std::size_t>(v.dim()), "vector field");
    LocalGeometry geo(g, p);
    const Eigen::MatrixXd dv = geo.covariant_vector(jet_of(v.components, p));
    // (L_V g)(X,Y) = g(D_X V, Y) + g(X, D_Y V)
    const Eigen::MatrixXd a = dv.transpose() * geo.metric();
    return TensorValue::from_matrix(a + a.transpose(), {Slot::down, Slot::down}, p);
}

TensorValue lie_derivative_1form(const CovectorField& w, const VectorField& v, const Point& p) {
    check_dim(w.dim(), static_cast<std::size_t>(v.dim()), "vector field");
    check_dim(w.dim(), p.size(), "point");
    const VectorJet wj = jet_of(w.components, p);
    const VectorJet vj = jet_of(v.components, p);
    // (L_V w)(d_j) = V(w_j) - w([V, d_j]),  [V, d_j] = -d_j V^k d_k
    const Eigen::VectorXd out = wj.jacobian * vj.value + vj.jacobian.transpose() * wj.value;
    return TensorValue::from_vector(out, Slot::down, p);
}

TensorValue exterior_derivative_1form(const CovectorField& w, const Point& p) {
    check_dim(w.dim(), p.size(), "point");
    const VectorJet wj = jet_of(w.components, p);
    // Coordinate fields commute, so dw_ij = 1/2 (d_i w_j - d_j w_i).
    const Eigen::MatrixXd d = 0.5 * (wj.jacobian.transpose() - wj.jacobian);
    return TensorValue::from_matrix(d, {Slot::down, Slot::down}, p);
}

TensorValue exterior_derivative_2form(const TwoFormField& form, const Point& p) {
    check_dim(form.dim(), p.size(), "point");
    const int n = form.dim();
    const MatrixJet fj = jet_of(form, p);
    auto df = [&](int k, int i, int j) {
        const auto& m = fj.partial[static_cast<std::size_t>(k)];
        return 0.5 * (m(i, j) - m(j, i));
    };
    TensorValue t({Slot::down, Slot::down, Slot::down}, n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) t(i, j, k) = (df(i, j, k) + df(j, k, i) + df(k, i, j)) / 3.0;
    return t;
}

std::pair<TensorValue, TensorValue> gradient_and_hessian(const MetricField& g, const Expr& v, const Point& p) {
    LocalGeometry geo(g, p);
    const int n = geo.dim();
    const ScalarJet jet = evaluate_jet(v, p);
    Eigen::VectorXd dv(n);
    Eigen::MatrixXd hess(n, n);
    for (int i = 0; i < n; ++i) dv(i) = jet.gradient(i);
    // Hess_ij = d_i d_j v - Gamma^k_ij d_k v
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double h = jet.hessian(i, j);
            for (int k = 0; k < n; ++k) h -= geo.christoffel(k, i, j) * dv(k);
            hess(i, j) = h;
        }
    hess = 0.5 * (hess + hess.transpose()).eval();
    return {TensorValue::from_vector(geo.raise(dv), Slot::up, p),
            TensorValue::from_matrix(hess, {Slot::down, Slot::down}, p)};
}

namespace {

TensorValue lie_connection_at(const LocalGeometry& geo, const VectorJet& vj) {
    const int n = geo.dim();
    const auto second = geo.second_covariant_vector(vj);
    TensorValue t({Slot::up, Slot::down, Slot::down}, n, geo.point());
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double r = 0.0;  // R(V, d_i) d_j
                for (int m = 0; m < n; ++m) r += vj.value(m) * geo.riemann(l, m, i, j);
                t(l, i, j) = second[static_cast<std::size_t>(l)](i, j) + r;
            }
    return t;
}

}  // namespace

TensorValue lie_derivative_connection(const MetricField& g, const VectorField& v, const Point& p) {
    check_dim(g.dim(), static_cast<std::size_t>(v.dim()), "vector field");
    LocalGeometry geo(g, p);
    return lie_connection_at(geo, jet_of(v.components, p));
}

std::vector<Eigen::VectorXd> outer_partials(const std::function<Eigen::VectorXd(const Point&)>& f,
                                            const Point& p, FiniteDifference fd) {
    if (!(fd.step > 0.0) || !std::isfinite(fd.step)) throw GeometryError("finite-difference step must be positive");
    const double h = fd.step;
    for (double x : p) {
        const double probe = fd.richardson ? h / 2 : h;
        if (x + probe == x || probe < 1e-7) {
            throw GeometryError("finite-difference step underflows at coordinate value " + std::to_string(x));
        }
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(p.size());
    auto central = [&](std::size_t k, double step) {
        Point a = p, b = p;
        a[k] += step;
        b[k] -= step;
        return Eigen::VectorXd((f(a) - f(b)) / (2.0 * step));
    };
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (fd.richardson) {
            const Eigen::VectorXd coarse = central(k, h);
            const Eigen::VectorXd fine = central(k, h / 2);
            out.push_back((4.0 * fine - coarse) / 3.0);
        } else {
            out.push_back(central(k, h));
        }
    }
    return out;
}

TensorValue lie_derivative_curvature(const MetricField& g, const VectorField& v, const Point& p, FiniteDifference fd) {
    check_dim(g.dim(), static_cast<std::size_t>(v.dim()), "vector field");
    const int n = g.dim();
    const std::size_t n3 = static_cast<std::size_t>(n * n * n);
    auto flat = [&](const Point& q) {
        LocalGeometry geo(g, q);
        const TensorValue a = lie_connection_at(geo, jet_of(v.components, q));
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(a.data().data(), static_cast<Eigen::Index>(n3)));
    };
    const auto partials = outer_partials(flat, p, fd);
    LocalGeometry geo(g, p);
    const TensorValue a = lie_connection_at(geo, jet_of(v.components, p));
    auto da = [&](int k, int l, int i, int j) {
        return partials[static_cast<std::size_t>(k)](static_cast<Eigen::Index>((l * n + i) * n + j));
    };
    // (D_k A)^l_ij
    auto cov = [&](int k, int l, int i, int j) {
        double v = da(k, l, i, j);
        for (int m = 0; m < n; ++m) {
            v += geo.christoffel(l, k, m) * a(m, i, j) - geo.christoffel(m, k, i) * a(l, m, j) -
                 geo.christoffel(m, k, j) * a(l, i, m);
        }
        return v;
    };
    TensorValue t({Slot::up, Slot::down, Slot::down, Slot::down}, n, p);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) t(l, i, j, k) = cov(i, l, j, k) - cov(j, l, i, k);
    return t;
}

std::vector<Eigen::MatrixXd> covariant_ricci_operator(const MetricField& g, const Point& p, FiniteDifference fd) {
    const int n = g.dim();
    auto flat = [&](const Point& q) {
        LocalGeometry geo(g, q);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(geo.ricci_operator().data(), n * n));
    };
    const auto partials = outer_partials(flat, p, fd);
    LocalGeometry geo(g, p);
    MatrixJet jet{geo.ricci_operator(), {}};
    for (const auto& d : partials) jet.partial.emplace_back(Eigen::Map<const Eigen::MatrixXd>(d.data(), n, n));
    return geo.covariant_endomorphism(jet);
}

Eigen::VectorXd scalar_curvature_gradient(const MetricField& g, const Point& p, FiniteDifference fd) {
    auto scalar = [&](const Point& q) {
        Eigen::VectorXd v(1);
        v(0) = LocalGeometry(g, q).scalar_curvature();
        return v;
    };
    const auto partials = outer_partials(scalar, p, fd);
    Eigen::VectorXd out(static_cast<Eigen::Index>(partials.size()));
    for (std::size_t k = 0; k < partials.size(); ++k) out(static_cast<Eigen::Index>(k)) = partials[k](0);
    return out;
}

Eigen::VectorXd ricci_divergence(const MetricField& g, const Point& p, FiniteDifference fd) {
    const auto d = covariant_ricci_operator(g, p, fd);
    const int n = g.dim();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(j) += d[static_cast<std::size_t>(k)](k, j);
    return out;
}

}  // namespace wfk
