#include "wfk/kenmotsu.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "wfk/errors.hpp"

namespace wfk {

namespace {

using Args = std::vector<Eigen::VectorXd>;

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

// sX - s sum_j eta^j(X) xi_j + eta_bar(X) xi_bar
Eigen::VectorXd P(const StructureAt& st, const Eigen::VectorXd& x) {
    const double s = st.manifold->s;
    return s * x - s * st.vertical(x) + st.eta_bar.dot(x) * st.xi_bar;
}

// s g(X,Y) - s sum_j eta^j(X) eta^j(Y) + eta_bar(X) eta_bar(Y)
double Pg(const StructureAt& st, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double s = st.manifold->s;
    return s * st.g(x, y) - s * st.eta_eta(x, y) + st.eta_bar.dot(x) * st.eta_bar.dot(y);
}

Eigen::MatrixXd directional(const std::vector<Eigen::MatrixXd>& d, const Eigen::VectorXd& x) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d.front().rows(), d.front().cols());
    for (std::size_t k = 0; k < d.size(); ++k)
        if (x(static_cast<Eigen::Index>(k)) != 0.0) out += x(static_cast<Eigen::Index>(k)) * d[k];
    return out;
}

// Deterministic points used by the builders to check their inputs.
std::vector<Point> builder_points(int dim) {
    std::vector<Point> pts{Point(static_cast<std::size_t>(dim), 0.0)};
    std::mt19937_64 rng(probe_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 4; ++k) {
        Point p(static_cast<std::size_t>(dim));
        for (double& x : p) x = u(rng);
        pts.push_back(p);
    }
    return pts;
}

}  // namespace

ResidualReport kenmotsu_residual(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const double r = probe_residual(st.dim(), 2, [&](const Args& a) -> Eigen::VectorXd {
        const Eigen::VectorXd& x = a[0];
        const Eigen::VectorXd& y = a[1];
        const Eigen::VectorXd lhs = st.nabla(st.nabla_f, x) * y;
        const Eigen::VectorXd fx = st.f * x;
        return lhs - st.beta * (st.g(fx, y) * st.xi_bar - st.eta_bar.dot(y) * fx);
    });
    return make_report("kenmotsu.12", p, r, 1e-8);
}

const std::vector<std::string>& identity_ids() {
    static const std::vector<std::string> ids{"13", "14", "15", "16", "18", "19", "20", "21", "22",
                                              "23", "26", "27", "27.literal", "44"};
    return ids;
}

std::vector<ResidualReport> audit_identities(const WeakFManifold& m, const Point& p,
                                             const std::vector<std::string>& ids) {
    for (const auto& id : ids) {
        if (std::find(identity_ids().begin(), identity_ids().end(), id) == identity_ids().end()) {
            throw std::invalid_argument("unknown identity id \"" + id + "\"");
        }
    }
    const double beta = m.beta_constant();
    const double b2 = beta * beta, b3 = b2 * beta;
    const StructureAt st(m, p);
    const LocalGeometry& geo = st.geo;
    const int N = st.dim();
    const int n = m.n, s = m.s;
    const auto& f = st.f;
    const Eigen::MatrixXd& ric = geo.ricci_operator();

    std::vector<Eigen::MatrixXd> dric;  // D_k Ric#, computed on demand
    auto nabla_ric = [&]() -> const std::vector<Eigen::MatrixXd>& {
        if (dric.empty()) dric = covariant_ricci_operator(m.metric, p);
        return dric;
    };

    std::vector<ResidualReport> out;
    for (const auto& id : ids) {
        double r = 0.0;
        double tol = 1e-8;
        bool audit = false;
        if (id == "13") {
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    r = std::max(r, (st.nabla_xi[static_cast<std::size_t>(j)] * st.xi.col(i)).cwiseAbs().maxCoeff());
        } else if (id == "14") {
            for (int i = 0; i < s; ++i)
                r = std::max(r, probe_residual(N, 1, [&](const Args& a) -> Eigen::VectorXd {
                                 return st.nabla_xi[static_cast<std::size_t>(i)] * a[0] - beta * (a[0] - st.vertical(a[0]));
                             }));
        } else if (id == "15") {
            for (int i = 0; i < s; ++i) {
                const Eigen::MatrixXd de = geo.covariant_covector(jet_of(m.eta[static_cast<std::size_t>(i)].components, p));
                r = std::max(r, probe_residual(N, 2, [&](const Args& a) {
                                 const double lhs = a[1].dot(de * a[0]);
                                 return scalar(lhs - beta * (st.g(a[0], a[1]) - st.eta_eta(a[0], a[1])));
                             }));
            }
        } else if (id == "16") {
            r = probe_residual(N, 2, [&](const Args& a) -> Eigen::VectorXd {
                const Eigen::VectorXd lhs = st.nabla(st.nabla_Q, a[0]) * a[1];
                const Eigen::VectorXd qx = st.Qt * a[0];
                return lhs + beta * (st.eta_bar.dot(a[1]) * qx + st.g(qx, a[1]) * st.xi_bar);
            });
        } else if (id == "18") {
            for (int i = 0; i < s; ++i) {
                const Eigen::MatrixXd lg = lie_derivative_metric(m.metric, m.xi[static_cast<std::size_t>(i)], p).matrix();
                r = std::max(r, probe_residual(N, 2, [&](const Args& a) {
                                 return scalar(a[0].dot(lg * a[1]) - 2 * beta * (st.g(a[0], a[1]) - st.eta_eta(a[0], a[1])));
                             }));
            }
        } else if (id == "19") {
            for (int i = 0; i < s; ++i)
                r = std::max(r, probe_residual(N, 2, [&](const Args& a) -> Eigen::VectorXd {
                                 const auto& x = a[0];
                                 const auto& y = a[1];
                                 const double ex = st.eta_bar.dot(x), ey = st.eta_bar.dot(y);
                                 Eigen::VectorXd rhs = ex * y - ey * x;
                                 for (int j = 0; j < s; ++j)
                                     rhs += (ey * st.eta.row(j).dot(x) - ex * st.eta.row(j).dot(y)) * st.xi.col(j);
                                 return geo.curvature(x, y, st.xi.col(i)) - b2 * rhs;
                             }));
        } else if (id == "20") {
            for (int i = 0; i < s; ++i)
                r = std::max(r, (ric * st.xi.col(i) + 2 * n * b2 * st.xi_bar).cwiseAbs().maxCoeff());
        } else if (id == "21") {
            tol = 1e-4;
            for (int i = 0; i < s; ++i) {
                const Eigen::MatrixXd d = directional(nabla_ric(), st.xi.col(i));
                r = std::max(r, probe_residual(N, 1, [&](const Args& a) -> Eigen::VectorXd {
                                 return d * a[0] + 2 * beta * ric * a[0] + 4 * n * b3 * P(st, a[0]);
                             }));
            }
        } else if (id == "22") {
            tol = 1e-4;
            const Eigen::VectorXd dr = scalar_curvature_gradient(m.metric, p);
            const double rr = geo.scalar_curvature();
            for (int i = 0; i < s; ++i)
                r = std::max(r, std::abs(dr.dot(st.xi.col(i)) + 2 * beta * (rr + 2.0 * s * n * (2 * n + 1) * b2)));
        } else if (id == "23") {
            tol = 1e-4;
            for (int i = 0; i < s; ++i)
                r = std::max(r, probe_residual(N, 1, [&](const Args& a) -> Eigen::VectorXd {
                                 return directional(nabla_ric(), a[0]) * st.xi.col(i) + beta * ric * a[0] +
                                        2 * n * b3 * P(st, a[0]);
                             }));
        } else if (id == "26") {
            r = probe_residual(N, 3, [&](const Args& a) -> Eigen::VectorXd {
                const auto& x = a[0];
                const auto& y = a[1];
                const auto& z = a[2];
                const Eigen::MatrixXd rxy = geo.curvature_operator(x, y);
                const Eigen::VectorXd lhs = rxy * (f * z) - f * (rxy * z);
                const Eigen::VectorXd rhs = Pg(st, y, z) * (f * x) - Pg(st, x, z) * (f * y) +
                                            st.g(x, f * z) * P(st, y) - st.g(y, f * z) * P(st, x);
                return lhs - b2 * rhs;
            });
        } else if (id == "27" || id == "27.literal") {
            const bool literal = id == "27.literal";
            audit = literal;
            r = probe_residual(N, 3, [&](const Args& a) -> Eigen::VectorXd {
                const auto& x = a[0];
                const auto& y = a[1];
                const auto& z = a[2];
                const Eigen::VectorXd fx = f * x, fy = f * y;
                const Eigen::VectorXd lhs = geo.curvature(fx, fy, z) - geo.curvature(x, st.Q * y, z);
                Eigen::VectorXd rhs = (st.g(z, st.Q * y) - st.eta_eta(y, z)) * P(st, x) -
                                      Pg(st, z, x) * (st.Q * y - st.vertical(y));
                if (literal) {
                    rhs += st.g(z, fx) * (s * fy - s * st.vertical(y) + st.eta_bar.dot(y) * st.xi_bar) -
                           (s * st.g(z, fy) - s * st.eta_eta(z, y) + st.eta_bar.dot(z) * st.eta_bar.dot(y)) * fx;
                } else {
                    rhs += s * st.g(z, fx) * fy - s * st.g(z, fy) * fx;
                }
                Eigen::VectorXd tail = st.eta_bar.dot(z) * x - st.g(z, x) * st.xi_bar;
                for (int j = 0; j < s; ++j)
                    tail += st.eta.row(j).dot(x) * (st.eta.row(j).dot(z) * st.xi_bar - st.eta_bar.dot(z) * st.xi.col(j));
                rhs += st.eta_bar.dot(y) * tail;
                return lhs - b2 * rhs;
            });
        } else if (id == "44") {
            for (int i = 0; i < s; ++i)
                r = std::max(r, probe_residual(N, 2, [&](const Args& a) -> Eigen::VectorXd {
                                 const auto& x = a[0];
                                 const auto& z = a[1];
                                 Eigen::VectorXd rhs = st.g(x, z) * st.xi_bar - st.eta_bar.dot(z) * x;
                                 for (int j = 0; j < s; ++j)
                                     rhs += st.eta.row(j).dot(x) *
                                            (st.eta_bar.dot(z) * st.xi.col(j) - st.eta.row(j).dot(z) * st.xi_bar);
                                 return geo.curvature(x, st.xi.col(i), z) - b2 * rhs;
                             }));
        }
        out.push_back(make_report(id, p, r, tol, audit));
        if (audit) {
            out.back().note = "literal form; the corrected form is id 27";
            out.back().flagged = !out.back().pass;
        }
    }
    return out;
}

WeakFManifold build_example2(int n, int s, double beta, double c) {
    if (n < 1) throw ValidationError("n must be at least 1");
    if (s < 1) throw ValidationError("s must be at least 1");
    if (!std::isfinite(beta) || beta == 0.0) throw ValidationError("beta must be a non-zero number");
    if (!std::isfinite(c) || c < 0.0) throw ValidationError("c must be non-negative");
    const int N = 2 * n + s;

    Expr xbar = Expr::variable(2 * n);
    for (int p = 1; p < s; ++p) xbar = Expr::binary(Expr::Kind::add, xbar, Expr::variable(2 * n + p));
    const double k = 2 * beta;
    const Expr warp = Expr::unary(Expr::Kind::exp, k == 1.0 ? xbar : Expr::binary(Expr::Kind::multiply, Expr::constant(k), xbar));

    WeakFManifold m;
    m.n = n;
    m.s = s;
    m.beta = Expr::constant(beta);
    m.c = c;
    m.metric = MetricField(N);
    m.f = MixedTensorField(N);
    m.Q = MixedTensorField(N);
    const double root = std::sqrt(1 + c);
    for (int i = 0; i < N; ++i) {
        m.metric.set(i, i, i < 2 * n ? warp : Expr::constant(1));
        m.Q(i, i) = Expr::constant(i < 2 * n ? 1 + c : 1.0);
    }
    for (int i = 0; i < n; ++i) {
        m.f(n + i, i) = Expr::constant(root);
        m.f(i, n + i) = Expr::constant(-root);
    }
    for (int p = 0; p < s; ++p) {
        m.xi.push_back(VectorField::coordinate(N, 2 * n + p));
        m.eta.push_back(CovectorField::differential(N, 2 * n + p));
    }
    m.origin = "example2";
    return m;
}

FiberSpec kahler_product(const std::vector<double>& scales) {
    if (scales.empty()) throw ValidationError("a Kahler product needs at least one factor");
    FiberSpec fiber;
    fiber.n = static_cast<int>(scales.size());
    fiber.metric = MetricField::euclidean(2 * fiber.n);
    fiber.J = MixedTensorField(2 * fiber.n);
    for (int i = 0; i < fiber.n; ++i) {
        const double c = scales[static_cast<std::size_t>(i)];
        if (!std::isfinite(c) || c <= 0.0) throw ValidationError("Kahler factor scales must be positive");
        fiber.J(2 * i + 1, 2 * i) = Expr::constant(c);
        fiber.J(2 * i, 2 * i + 1) = Expr::constant(-c);
    }
    fiber.scales = scales;
    return fiber;
}

void validate_fiber(const FiberSpec& fiber, const std::vector<Point>& points) {
    const int d = 2 * fiber.n;
    if (fiber.n < 1) throw ValidationError("fiber dimension must be positive and even");
    if (fiber.metric.dim() != d || fiber.J.dim() != d) throw ValidationError("fiber metric and J must be 2n x 2n");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (fiber.metric(i, j).max_variable_index() >= d || fiber.J(i, j).max_variable_index() >= d) {
                throw ValidationError("fiber data may only use fiber coordinates x1..x" + std::to_string(d));
            }
        }
    for (const Point& p : points) {
        Eigen::MatrixXd g;
        try {
            g = LocalGeometry(fiber.metric, p).metric();
        } catch (const GeometryError& err) {
            throw ValidationError(std::string("fiber ") + err.what());
        }
        const Eigen::MatrixXd J = fiber.J.value_at(p);
        const Eigen::MatrixXd gj = g * J;
        if ((gj + gj.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, gj.cwiseAbs().maxCoeff())) {
            throw ValidationError("fiber J is not skew-symmetric with respect to the fiber metric");
        }
        const Eigen::MatrixXd mj2 = -(g * J * J);
        Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (mj2 + mj2.transpose()));
        if (llt.info() != Eigen::Success) throw ValidationError("fiber J^2 is not negative definite");
    }
}

WeakFManifold build_twisted_product(const FiberSpec& fiber, int s, const Expr& sigma, std::optional<Expr> beta) {
    if (s < 1) throw ValidationError("s must be at least 1");
    const int d = 2 * fiber.n;
    std::vector<Point> fiber_points = builder_points(d);
    validate_fiber(fiber, fiber_points);
    const int N = d + s;
    if (sigma.max_variable_index() >= N) throw ValidationError("sigma uses a coordinate beyond x" + std::to_string(N));
    if (beta && beta->max_variable_index() >= N) throw ValidationError("beta uses a coordinate beyond x" + std::to_string(N));

    const auto points = builder_points(N);
    std::vector<double> inferred;
    for (const Point& p : points) {
        ScalarJet j;
        try {
            j = evaluate_jet(sigma, p);
        } catch (const DomainError& err) {
            throw ValidationError(std::string("sigma must be positive: ") + err.what());
        }
        if (!(j.value() > 0.0)) throw ValidationError("sigma must be positive");
        for (int q = 0; q < s; ++q) inferred.push_back(j.gradient(d + q) / j.value());
    }
    if (!beta) {
        for (double v : inferred) {
            if (std::abs(v - inferred.front()) > 1e-9 * std::max(1.0, std::abs(inferred.front()))) {
                throw ValidationError("xi_i(log sigma) is not a single constant; give beta explicitly");
            }
        }
        beta = Expr::constant(inferred.front());
    }

    WeakFManifold m;
    m.n = fiber.n;
    m.s = s;
    m.beta = *beta;
    m.metric = MetricField(N);
    m.f = MixedTensorField(N);
    m.Q = MixedTensorField(N);
    const Expr sigma2 = pow(sigma, 2);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) m.metric.set(i, j, sigma2 * fiber.metric(i, j));
        for (int j = 0; j < d; ++j) {
            m.f(i, j) = fiber.J(i, j);
            Expr acc = Expr::constant(0);
            for (int k = 0; k < d; ++k) acc = acc + fiber.J(i, k) * fiber.J(k, j);
            m.Q(i, j) = -acc;
        }
    }
    for (int q = 0; q < s; ++q) {
        m.metric.set(d + q, d + q, Expr::constant(1));
        m.Q(d + q, d + q) = Expr::constant(1);
        m.xi.push_back(VectorField::coordinate(N, d + q));
        m.eta.push_back(CovectorField::differential(N, d + q));
    }
    m.origin = "twisted";
    m.twisted = TwistedData{fiber.metric, sigma};
    validate(m, points);
    return m;
}

std::vector<ResidualReport> twisted_product_audit(const WeakFManifold& m, const Point& p) {
    if (!m.twisted) throw ValidationError("twisted-product relations need a manifold built as a twisted product");
    const int N = m.dim();
    const int d = 2 * m.n;
    const LocalGeometry geo(m.metric, p);
    const LocalGeometry fiber(m.twisted->fiber_metric, std::span<const double>(p.data(), static_cast<std::size_t>(d)));
    const ScalarJet sj = evaluate_jet(m.twisted->sigma, p);
    Eigen::VectorXd dlog(N);
    for (int k = 0; k < N; ++k) dlog(k) = sj.gradient(k) / sj.value();
    const Eigen::VectorXd dlog_fiber = dlog.head(d);

    auto horizontal = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd h = x;
        h.tail(m.s).setZero();
        return h;
    };
    const double tol = 1e-6;
    std::vector<ResidualReport> out;

    double ri = 0.0;
    for (int q = 0; q < m.s; ++q) {
        const Eigen::VectorXd xi = Eigen::VectorXd::Unit(N, d + q);
        ri = std::max(ri, probe_residual(N, 1, [&](const Args& a) -> Eigen::VectorXd {
                          const Eigen::VectorXd x = horizontal(a[0]);
                          Eigen::VectorXd r(2 * N);
                          r << geo.connection(x, xi) - dlog(d + q) * x, geo.connection(xi, x) - dlog(d + q) * x;
                          return r;
                      }));
    }
    out.push_back(make_report("twisted.i", p, ri, tol));

    out.push_back(make_report("twisted.ii", p, probe_residual(N, 2, [&](const Args& a) -> Eigen::VectorXd {
                                  const Eigen::VectorXd x = horizontal(a[0]), y = horizontal(a[1]);
                                  return geo.connection(x, y).tail(m.s) + geo.inner(x, y) * dlog.tail(m.s);
                              }),
                              tol));

    out.push_back(make_report("twisted.iii", p, probe_residual(N, 2, [&](const Args& a) -> Eigen::VectorXd {
                                  const Eigen::VectorXd x = a[0].head(d), y = a[1].head(d);
                                  const Eigen::VectorXd lhs = geo.connection(horizontal(a[0]), horizontal(a[1])).head(d);
                                  const Eigen::VectorXd rhs = fiber.connection(x, y) + x.dot(dlog_fiber) * y +
                                                              y.dot(dlog_fiber) * x -
                                                              fiber.inner(x, y) * fiber.raise(dlog_fiber);
                                  return lhs - rhs;
                              }),
                              tol));
    return out;
}

namespace {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> einstein_basis(const StructureAt& st) {
    const Eigen::MatrixXd& g = st.geo.metric();
    const Eigen::MatrixXd eb = st.eta_bar * st.eta_bar.transpose();
    const Eigen::MatrixXd b1 = g - st.eta.transpose() * st.eta + eb;
    return {b1, eb};
}

}  // namespace

EinsteinFit eta_einstein_fit(const WeakFManifold& m, const Point& p) {
    const StructureAt st(m, p);
    const int N = st.dim();
    const auto [b1, b2] = einstein_basis(st);
    const Eigen::MatrixXd& ric = st.geo.ricci();
    const int rows = N * (N + 1) / 2;
    Eigen::MatrixXd A(rows, 2);
    Eigen::VectorXd y(rows);
    int r = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j, ++r) {
            A(r, 0) = b1(i, j);
            A(r, 1) = b2(i, j);
            y(r) = ric(i, j);
        }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    EinsteinFit fit{coef(0), coef(1), 0.0};
    fit.residual = (ric - fit.a * b1 - fit.b * b2).cwiseAbs().maxCoeff();
    return fit;
}

ResidualReport einstein11_check(const WeakFManifold& m, const Point& p) {
    const EinsteinFit fit = eta_einstein_fit(m, p);
    ResidualReport rep = make_report("einstein.11", p, fit.residual, 1e-8);
    rep.values = {{"a", fit.a}, {"b", fit.b}};
    return rep;
}

ResidualReport einstein24_check(const WeakFManifold& m, const Point& p) {
    const double beta = m.beta_constant();
    const StructureAt st(m, p);
    const double rr = st.geo.scalar_curvature();
    const double a = m.s * beta * beta + rr / (2.0 * m.n);
    const Eigen::MatrixXd& ric = st.geo.ricci();
    const double res = probe_residual(st.dim(), 2, [&](const Args& v) {
        const double rhs = a * (st.g(v[0], v[1]) - st.eta_eta(v[0], v[1])) -
                           2.0 * m.n * beta * beta * st.eta_bar.dot(v[0]) * st.eta_bar.dot(v[1]);
        return scalar(v[0].dot(ric * v[1]) - rhs);
    });
    ResidualReport rep = make_report("einstein.24", p, res, 1e-8);
    rep.values = {{"a", a}, {"r", rr}};
    return rep;
}

ResidualReport einstein_constants_check(const WeakFManifold& m, const Point& p) {
    const double beta = m.beta_constant();
    const double b2 = beta * beta;
    const EinsteinFit fit = eta_einstein_fit(m, p);
    const double rr = scalar_curvature(m.metric, p);
    const double s = m.s, n = m.n;
    const double res = std::max({std::abs(fit.a + 2 * s * n * b2), std::abs(fit.b - 2 * (s - 1) * n * b2),
                                 std::abs(rr + 2 * s * n * (2 * n + 1) * b2)});
    ResidualReport rep = make_report("einstein.thm67", p, res, 1e-6);
    rep.values = {{"a", fit.a}, {"b", fit.b}, {"r", rr}};
    return rep;
}

}  // namespace wfk
