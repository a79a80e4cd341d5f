#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wfk/expr.hpp"
#include "wfk/tensor.hpp"

namespace wfk {

// Symmetric metric field; only the lower triangle is stored.
class MetricField {
public:
    MetricField() = default;
    explicit MetricField(int dim);

    static MetricField euclidean(int dim);
    static MetricField diagonal(const std::vector<Expr>& entries);

    int dim() const { return dim_; }
    const Expr& operator()(int i, int j) const;
    void set(int i, int j, Expr e);

    Eigen::MatrixXd value_at(std::span<const double> p) const;

private:
    static std::size_t packed(int i, int j);
    int dim_ = 0;
    std::vector<Expr> lower_;
};

// Contravariant components V^i.
struct VectorField {
    std::vector<Expr> components;

    static VectorField zero(int dim);
    static VectorField coordinate(int dim, int index);
    int dim() const { return static_cast<int>(components.size()); }
    Eigen::VectorXd value_at(std::span<const double> p) const;
};

// Covariant components w_i.
struct CovectorField {
    std::vector<Expr> components;

    static CovectorField zero(int dim);
    static CovectorField differential(int dim, int index);  // dx_{index}
    int dim() const { return static_cast<int>(components.size()); }
    Eigen::VectorXd value_at(std::span<const double> p) const;
};

// Square array of expressions. As a (1,1)-tensor, entry (i, j) is T^i_j so that
// (T X)^i = T^i_j X^j; as a 2-form it holds the covariant components w_ij.
class ExprMatrix {
public:
    ExprMatrix() = default;
    explicit ExprMatrix(int dim);

    static ExprMatrix identity(int dim);

    int dim() const { return dim_; }
    const Expr& operator()(int i, int j) const;
    Expr& operator()(int i, int j);

    Eigen::MatrixXd value_at(std::span<const double> p) const;

private:
    int dim_ = 0;
    std::vector<Expr> entries_;
};

using MixedTensorField = ExprMatrix;
using TwoFormField = ExprMatrix;

// Values and first/second partials of field components at a point.
struct VectorJet {
    Eigen::VectorXd value;
    Eigen::MatrixXd jacobian;             // (a, k) = d_k V^a
    std::vector<Eigen::MatrixXd> hessian;  // hessian[a](k, l) = d_k d_l V^a
};

struct MatrixJet {
    Eigen::MatrixXd value;
    std::vector<Eigen::MatrixXd> partial;  // partial[k] = d_k T
};

VectorJet jet_of(const std::vector<Expr>& components, std::span<const double> p);
MatrixJet jet_of(const ExprMatrix& m, std::span<const double> p);

// Symbolic sums used to assemble derived structure fields.
VectorField sum(const std::vector<VectorField>& fields);
CovectorField sum(const std::vector<CovectorField>& fields);

}  // namespace wfk
