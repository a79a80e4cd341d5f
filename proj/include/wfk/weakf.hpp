#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wfk/fields.hpp"
#include "wfk/geometry.hpp"

namespace wfk {

// Fiber data recorded by the twisted-product builder. Coordinates are laid
// out as (fiber x1..x2n, then t1..ts).
struct TwistedData {
    MetricField fiber_metric;  // 2n x 2n, entries over all coordinates (fiber ones in practice)
    Expr sigma;
};

// A weak metric f-structure (f, Q, xi_i, eta^i, g) on a single chart of
// dimension 2n + s.
struct WeakFManifold {
    int n = 0;
    int s = 0;
    Expr beta;                // constant except for twisted (non-warped) products
    std::optional<double> c;  // example2 deformation parameter, when known
    MetricField metric;
    MixedTensorField f;
    MixedTensorField Q;
    std::vector<VectorField> xi;
    std::vector<CovectorField> eta;
    std::string origin;
    std::optional<TwistedData> twisted;

    int dim() const { return 2 * n + s; }
    VectorField xi_bar() const { return sum(xi); }
    CovectorField eta_bar() const { return sum(eta); }

    // The constant beta; throws ValidationError when beta depends on the point.
    double beta_constant() const;
};

// Structure tensors and their first derivatives at one point.
struct StructureAt {
    StructureAt(const WeakFManifold& m, const Point& p);

    const WeakFManifold* manifold;
    LocalGeometry geo;
    double beta;
    Eigen::MatrixXd f, Q, Qt;  // Qt = Q - id
    Eigen::MatrixXd xi;        // column i = xi_i
    Eigen::MatrixXd eta;       // row i = eta^i
    Eigen::VectorXd xi_bar, eta_bar;
    std::vector<Eigen::MatrixXd> nabla_f;  // [k] = D_k f
    std::vector<Eigen::MatrixXd> nabla_Q;  // [k] = D_k Q
    std::vector<Eigen::MatrixXd> nabla_xi; // [i](a, k) = (D_k xi_i)^a

    int dim() const { return geo.dim(); }
    double g(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return geo.inner(x, y); }
    // sum_j eta^j(X) xi_j
    Eigen::VectorXd vertical(const Eigen::VectorXd& x) const { return xi * (eta * x); }
    // sum_j eta^j(X) eta^j(Y)
    double eta_eta(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return (eta * x).dot(eta * y); }
    Eigen::MatrixXd nabla(const std::vector<Eigen::MatrixXd>& d, const Eigen::VectorXd& x) const;
};

struct ResidualReport {
    std::string id;
    Point point;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool audit = false;    // audits are informational and never fail a run
    bool flagged = false;  // an audit that exposes a discrepancy with a reference value
    std::string note;
    std::vector<std::pair<std::string, double>> values;
};

ResidualReport make_report(std::string id, const Point& p, double residual, double tolerance,
                           bool audit = false);

// ---------------------------------------------------------------------------
// Probe evaluation of multilinear identities.

using ProbeFn = std::function<Eigen::VectorXd(const std::vector<Eigen::VectorXd>&)>;

inline constexpr std::uint64_t probe_seed = 0x5eed2024;
inline constexpr int random_probe_count = 8;

// The coordinate basis followed by 8 seeded random vectors in [-1, 1]^dim.
std::vector<Eigen::VectorXd> probe_vectors(int dim);

// Max-abs of fn over all basis tuples of the given arity plus 8 random tuples.
double probe_residual(int dim, int arity, const ProbeFn& fn);

// ---------------------------------------------------------------------------

// Structural checks (dimensions everywhere, dual basis, skewness, symmetry,
// rank and invertibility at the given points). Throws ValidationError.
void validate(const WeakFManifold& m, const std::vector<Point>& points);

std::vector<ResidualReport> check_axioms(const WeakFManifold& m, const Point& p);

// Nijenhuis torsion [S,S] from the covariant expression, (l, i, j) = [S,S](d_i, d_j)^l.
TensorValue nijenhuis(const MetricField& g, const MixedTensorField& s, const Point& p);
// [f,f] + 2 sum_i d eta^i (x) xi_i
TensorValue normality_tensor(const WeakFManifold& m, const Point& p);

// Phi(X,Y) = g(X, fY) as a symbolic 2-form and at a point.
TwoFormField fundamental_form_field(const WeakFManifold& m);
TensorValue fundamental_form(const WeakFManifold& m, const Point& p);

// (alpha ^ Phi)(X,Y,Z) = 1/3 [alpha(X)Phi(Y,Z) + alpha(Y)Phi(Z,X) + alpha(Z)Phi(X,Y)]
TensorValue wedge(const Eigen::VectorXd& alpha, const TensorValue& phi);

struct FBasis {
    std::vector<Eigen::VectorXd> frame;  // e_1, f e_1, ..., e_n, f e_n, xi_1, ..., xi_s
    std::vector<double> lambda;          // Q e_i = lambda_i e_i
};

FBasis f_basis(const WeakFManifold& m, const Point& p);

// Reports "n1", "deta", "dphi".
std::vector<ResidualReport> theorem1_check(const WeakFManifold& m, const Point& p);

// Least-squares kappa with dPhi = kappa * beta * (eta_bar ^ Phi); NaN when the
// right side vanishes.
double dphi_proportionality(const WeakFManifold& m, const Point& p);

// D_{xi_i} xi_j lies in D and is antisymmetric in (i, j): "prop1.10".
ResidualReport prop1_check(const WeakFManifold& m, const Point& p);

}  // namespace wfk
