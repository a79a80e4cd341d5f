#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wfk/fields.hpp"
#include "wfk/tensor.hpp"

namespace wfk {

// Levi-Civita data of a metric field at one point, from analytic jets of the
// metric entries: g, g^-1, dg, Christoffel symbols, their first partials,
// the curvature tensor and its traces.
//
// Conventions: R(X,Y) = [D_X, D_Y] - D_[X,Y]; riemann(l,i,j,k) is the l-th
// component of R(d_i, d_j) d_k; Ric(X,Y) = trace(Z -> R(Z,X)Y).
class LocalGeometry {
public:
    LocalGeometry(const MetricField& g, std::span<const double> p);

    int dim() const { return n_; }
    const Point& point() const { return point_; }

    const Eigen::MatrixXd& metric() const { return g_; }
    const Eigen::MatrixXd& inverse() const { return ginv_; }
    double dmetric(int k, int i, int j) const { return dg_[static_cast<std::size_t>(k)](i, j); }
    double ddmetric(int k, int l, int i, int j) const {
        return ddg_[static_cast<std::size_t>(k * n_ + l)](i, j);
    }

    double christoffel(int l, int i, int j) const { return gamma_[idx3(l, i, j)]; }
    double dchristoffel(int k, int l, int i, int j) const { return dgamma_[idx4(k, l, i, j)]; }
    double riemann(int l, int i, int j, int k) const { return riemann_[idx4(l, i, j, k)]; }

    const Eigen::MatrixXd& ricci() const { return ricci_; }
    const Eigen::MatrixXd& ricci_operator() const { return ricci_op_; }
    double scalar_curvature() const { return scalar_; }

    double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return x.dot(g_ * y); }
    Eigen::VectorXd raise(const Eigen::VectorXd& w) const { return ginv_ * w; }
    Eigen::VectorXd lower(const Eigen::VectorXd& v) const { return g_ * v; }

    // Gamma(X, Y)^l = Gamma^l_ij X^i Y^j, i.e. D_X Y for constant-coefficient Y.
    Eigen::VectorXd connection(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    // Endomorphism Z -> R(X,Y)Z.
    Eigen::MatrixXd curvature_operator(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    Eigen::VectorXd curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) const;

    // Covariant derivatives of jets: result(a, k) = (D_k V)^a.
    Eigen::MatrixXd covariant_vector(const VectorJet& v) const;
    // result(j, k) = (D_k w)_j.
    Eigen::MatrixXd covariant_covector(const VectorJet& w) const;
    // result[k] = D_k T for a (1,1)-tensor T.
    std::vector<Eigen::MatrixXd> covariant_endomorphism(const MatrixJet& t) const;
    // result[l](i, j) = (D_i D_j V - D_{D_i d_j} V)^l.
    std::vector<Eigen::MatrixXd> second_covariant_vector(const VectorJet& v) const;

    // Gram-Schmidt on the coordinate basis in index order; columns are g-orthonormal.
    Eigen::MatrixXd orthonormal_frame() const;

    // max |D_k g_ij| over all components.
    double metric_compatibility_residual() const;

private:
    std::size_t idx3(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)) * n_ + static_cast<std::size_t>(c);
    }
    std::size_t idx4(int a, int b, int c, int d) const {
        return idx3(a, b, c) * n_ + static_cast<std::size_t>(d);
    }

    int n_;
    Point point_;
    Eigen::MatrixXd g_, ginv_;
    std::vector<Eigen::MatrixXd> dg_, ddg_;
    std::vector<double> gamma_, dgamma_, riemann_;
    Eigen::MatrixXd ricci_, ricci_op_;
    double scalar_ = 0.0;
};

// ---------------------------------------------------------------------------
// Point-wise operations

TensorValue metric_at(const MetricField& g, const Point& p);
TensorValue christoffel(const MetricField& g, const Point& p);
TensorValue riemann(const MetricField& g, const Point& p);
TensorValue ricci(const MetricField& g, const Point& p);
double scalar_curvature(const MetricField& g, const Point& p);

TensorValue lie_derivative_metric(const MetricField& g, const VectorField& v, const Point& p);
TensorValue lie_derivative_1form(const CovectorField& w, const VectorField& v, const Point& p);

// dw(X,Y) = 1/2 {X w(Y) - Y w(X) - w([X,Y])}.
TensorValue exterior_derivative_1form(const CovectorField& w, const Point& p);
// 3 dF(X,Y,Z) = cyclic sum of X F(Y,Z) minus bracket terms. The input is
// antisymmetrized first.
TensorValue exterior_derivative_2form(const TwoFormField& form, const Point& p);

// (grad v, Hess v) with Hess v(X,Y) = g(D_X grad v, Y).
std::pair<TensorValue, TensorValue> gradient_and_hessian(const MetricField& g, const Expr& v, const Point& p);

// (L_V D)(X,Y) = D_X D_Y V - D_{D_X Y} V + R(V,X)Y, signature (up,down,down)
// with component (l, i, j) for X = d_i, Y = d_j.
TensorValue lie_derivative_connection(const MetricField& g, const VectorField& v, const Point& p);

struct FiniteDifference {
    double step = 1e-3;
    bool richardson = true;
};

// (L_V R)(X,Y)Z = (D_X (L_V D))(Y,Z) - (D_Y (L_V D))(X,Z); signature
// (up,down,down,down) laid out like riemann(). Uses outer central differences.
TensorValue lie_derivative_curvature(const MetricField& g, const VectorField& v, const Point& p,
                                     FiniteDifference fd = {});

// Central-difference partials of a vector-valued function of the point;
// result[k] = d_k F(p). Richardson refinement combines steps h and h/2.
std::vector<Eigen::VectorXd> outer_partials(const std::function<Eigen::VectorXd(const Point&)>& f,
                                            const Point& p, FiniteDifference fd);

// result[k] = D_k Ric# (a (1,1)-tensor), via outer differences of Ric#.
std::vector<Eigen::MatrixXd> covariant_ricci_operator(const MetricField& g, const Point& p, FiniteDifference fd = {});
Eigen::VectorXd scalar_curvature_gradient(const MetricField& g, const Point& p, FiniteDifference fd = {});
// (div Ric)(X) = trace(Z -> (D_Z Ric#) X).
Eigen::VectorXd ricci_divergence(const MetricField& g, const Point& p, FiniteDifference fd = {});

}  // namespace wfk
