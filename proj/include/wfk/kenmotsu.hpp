#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfk/weakf.hpp"

namespace wfk {

// (D_X f)Y - beta{g(fX,Y) xi_bar - eta_bar(Y) fX}; beta may depend on the point.
ResidualReport kenmotsu_residual(const WeakFManifold& m, const Point& p);

// Identity ids accepted by audit_identities, in catalogue order.
const std::vector<std::string>& identity_ids();

// One report per id. Unknown ids throw std::invalid_argument; a non-constant
// beta throws ValidationError. "27" is the corrected form of the R_{fX,fY}
// identity and "27.literal" the uncorrected one (an audit).
std::vector<ResidualReport> audit_identities(const WeakFManifold& m, const Point& p,
                                             const std::vector<std::string>& ids);

// example2: metric diag(e^{2 beta xbar} on D, 1 on the xi directions).
WeakFManifold build_example2(int n, int s, double beta, double c);

struct FiberSpec {
    int n = 0;                            // fiber dimension is 2n
    MetricField metric;                   // over fiber coordinates x1..x2n
    MixedTensorField J;                   // weak Hermitian structure
    std::vector<double> scales;           // Kahler factor constants, when the fiber is a product
};

// Product of flat (R^2, delta, c_i * rotation) factors.
FiberSpec kahler_product(const std::vector<double>& scales);

// Checks J is g-skew and J^2 negative definite at the given fiber points.
void validate_fiber(const FiberSpec& fiber, const std::vector<Point>& points);

// g = sigma^2 g_fiber + dt^2 with coordinates (x1..x2n, t1..ts); f = J lifted,
// Q = -J^2 lifted on D and id on the t directions. Without an explicit beta
// it is inferred from xi_i(log sigma), which must be one constant.
WeakFManifold build_twisted_product(const FiberSpec& fiber, int s, const Expr& sigma,
                                    std::optional<Expr> beta = std::nullopt);

// Reports "twisted.i", "twisted.ii", "twisted.iii".
std::vector<ResidualReport> twisted_product_audit(const WeakFManifold& m, const Point& p);

struct EinsteinFit {
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;
};

// Least squares for Ric = a g - a sum eta^i eta^i + (a+b) eta_bar eta_bar.
EinsteinFit eta_einstein_fit(const WeakFManifold& m, const Point& p);

// "einstein.11": fit residual; "einstein.24": the closed form with
// a = s beta^2 + r/2n; "einstein.thm67": fitted a, b and r against
// -2sn beta^2, 2(s-1)n beta^2, -2sn(2n+1) beta^2.
ResidualReport einstein11_check(const WeakFManifold& m, const Point& p);
ResidualReport einstein24_check(const WeakFManifold& m, const Point& p);
ResidualReport einstein_constants_check(const WeakFManifold& m, const Point& p);

}  // namespace wfk
