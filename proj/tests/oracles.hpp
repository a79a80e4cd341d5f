#pragma once

// Independent oracles shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wfk/geometry.hpp"

namespace wfk_test {

using wfk::Expr;
using wfk::MetricField;
using wfk::Point;

// Random expression whose evaluation stays finite on [-1, 1]^dim.
inline Expr random_safe(std::mt19937& rng, int dim, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_int_distribution<int> var(0, dim - 1);
    std::uniform_real_distribution<double> num(-2.0, 2.0);
    using K = Expr::Kind;
    switch (pick(rng)) {
        case 0: return Expr::constant(std::round(num(rng) * 100) / 100);
        case 1: return Expr::variable(var(rng));
        case 2: return Expr::unary(K::negate, random_safe(rng, dim, depth - 1));
        case 3: return Expr::binary(K::add, random_safe(rng, dim, depth - 1), random_safe(rng, dim, depth - 1));
        case 4: return Expr::binary(K::subtract, random_safe(rng, dim, depth - 1), random_safe(rng, dim, depth - 1));
        case 5: return Expr::binary(K::multiply, random_safe(rng, dim, depth - 1), random_safe(rng, dim, depth - 1));
        case 6: {
            // a / (2 + b^2)
            Expr den = Expr::binary(K::add, Expr::constant(2), Expr::power(random_safe(rng, dim, depth - 1), 2));
            return Expr::binary(K::divide, random_safe(rng, dim, depth - 1), den);
        }
        case 7: {
            Expr inner = Expr::binary(K::divide, random_safe(rng, dim, depth - 1),
                                      Expr::binary(K::add, Expr::constant(3), Expr::power(Expr::variable(var(rng)), 2)));
            return Expr::unary(K::exp, inner);
        }
        case 8: {
            Expr arg = Expr::binary(K::add, Expr::constant(1), Expr::power(random_safe(rng, dim, depth - 1), 2));
            return Expr::unary(std::uniform_int_distribution<int>(0, 1)(rng) ? K::sqrt : K::log, arg);
        }
        default:
            return Expr::power(random_safe(rng, dim, depth - 1), std::uniform_int_distribution<int>(0, 3)(rng));
    }
}

// Independent oracle: Christoffel symbols from fourth-order central differences of g.
inline std::vector<double> fd_christoffel(const MetricField& g, const Point& p, double h = 1e-3) {
    const int n = g.dim();
    std::vector<Eigen::MatrixXd> dg(n);
    for (int k = 0; k < n; ++k) {
        auto at = [&](double t) {
            Point q = p;
            q[k] += t;
            return g.value_at(q);
        };
        dg[k] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    }
    const Eigen::MatrixXd ginv = g.value_at(p).inverse();
    std::vector<double> out(n * n * n, 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m)
                    out[(l * n + i) * n + j] += 0.5 * ginv(l, m) * (dg[i](m, j) + dg[j](m, i) - dg[m](i, j));
    return out;
}

// Independent oracle: R^l_ijk from differences of the finite-difference Christoffels.
inline double fd_riemann(const MetricField& g, const Point& p, int l, int i, int j, int k) {
    const int n = g.dim();
    const double h = 1e-3;
    auto gamma_at = [&](int axis, double t) {
        Point q = p;
        q[axis] += t;
        return fd_christoffel(g, q, 1e-4);
    };
    auto G = [&](const std::vector<double>& gm, int a, int b, int c) { return gm[(a * n + b) * n + c]; };
    auto dG = [&](int axis, int a, int b, int c) {
        return (-G(gamma_at(axis, 2 * h), a, b, c) + 8 * G(gamma_at(axis, h), a, b, c) -
                8 * G(gamma_at(axis, -h), a, b, c) + G(gamma_at(axis, -2 * h), a, b, c)) /
               (12 * h);
    };
    const auto g0 = fd_christoffel(g, p);
    double v = dG(i, l, j, k) - dG(j, l, i, k);
    for (int m = 0; m < n; ++m) v += G(g0, m, j, k) * G(g0, l, i, m) - G(g0, m, i, k) * G(g0, l, j, m);
    return v;
}

// Worst relative disagreement between the analytic jet of e at p and central
// differences with step h (gradient and Hessian).
inline double jet_fd_error(const Expr& e, const std::vector<double>& p, double h = 1e-4) {
    const int dim = static_cast<int>(p.size());
    auto f = [&](const std::vector<double>& q) { return wfk::evaluate_jet(e, q).value(); };
    const auto jet = wfk::evaluate_jet(e, p);
    const double scale0 = std::max(1.0, std::abs(jet.value()));
    double worst = 0.0;
    for (int i = 0; i < dim; ++i) {
        auto a = p, b = p;
        a[i] += h;
        b[i] -= h;
        const double fd = (f(a) - f(b)) / (2 * h);
        worst = std::max(worst, std::abs(fd - jet.gradient(i)) / std::max(scale0, std::abs(jet.gradient(i))));
        for (int k = 0; k < dim; ++k) {
            auto pp = p, pm = p, mp = p, mm = p;
            pp[i] += h, pp[k] += h;
            pm[i] += h, pm[k] -= h;
            mp[i] -= h, mp[k] += h;
            mm[i] -= h, mm[k] -= h;
            const double fd2 = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
            worst = std::max(worst, std::abs(fd2 - jet.hessian(i, k)) / std::max(scale0, std::abs(jet.hessian(i, k))));
        }
    }
    return worst;
}

}  // namespace wfk_test
