#include "wfk/fields.hpp"

#include <stdexcept>

namespace wfk {

MetricField::MetricField(int dim)
    : dim_(dim), lower_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim + 1) / 2) {}

MetricField MetricField::euclidean(int dim) {
    MetricField g(dim);
    for (int i = 0; i < dim; ++i) g.set(i, i, Expr::constant(1.0));
    return g;
}

MetricField MetricField::diagonal(const std::vector<Expr>& entries) {
    MetricField g(static_cast<int>(entries.size()));
    for (int i = 0; i < g.dim(); ++i) g.set(i, i, entries[static_cast<std::size_t>(i)]);
    return g;
}

std::size_t MetricField::packed(int i, int j) {
    if (i < j) std::swap(i, j);
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2 + static_cast<std::size_t>(j);
}

const Expr& MetricField::operator()(int i, int j) const { return lower_.at(packed(i, j)); }
void MetricField::set(int i, int j, Expr e) { lower_.at(packed(i, j)) = std::move(e); }

Eigen::MatrixXd MetricField::value_at(std::span<const double> p) const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = evaluate((*this)(i, j), p);
    return m;
}

VectorField VectorField::zero(int dim) { return {std::vector<Expr>(static_cast<std::size_t>(dim))}; }

VectorField VectorField::coordinate(int dim, int index) {
    VectorField v = zero(dim);
    v.components.at(static_cast<std::size_t>(index)) = Expr::constant(1.0);
    return v;
}

Eigen::VectorXd VectorField::value_at(std::span<const double> p) const {
    Eigen::VectorXd v(dim());
    for (int i = 0; i < dim(); ++i) v(i) = evaluate(components[static_cast<std::size_t>(i)], p);
    return v;
}

CovectorField CovectorField::zero(int dim) { return {std::vector<Expr>(static_cast<std::size_t>(dim))}; }

CovectorField CovectorField::differential(int dim, int index) {
    CovectorField w = zero(dim);
    w.components.at(static_cast<std::size_t>(index)) = Expr::constant(1.0);
    return w;
}

Eigen::VectorXd CovectorField::value_at(std::span<const double> p) const {
    Eigen::VectorXd v(dim());
    for (int i = 0; i < dim(); ++i) v(i) = evaluate(components[static_cast<std::size_t>(i)], p);
    return v;
}

ExprMatrix::ExprMatrix(int dim)
    : dim_(dim), entries_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {}

ExprMatrix ExprMatrix::identity(int dim) {
    ExprMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = Expr::constant(1.0);
    return m;
}

const Expr& ExprMatrix::operator()(int i, int j) const {
    return entries_.at(static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(j));
}

Expr& ExprMatrix::operator()(int i, int j) {
    return entries_.at(static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(j));
}

Eigen::MatrixXd ExprMatrix::value_at(std::span<const double> p) const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = evaluate((*this)(i, j), p);
    return m;
}

VectorJet jet_of(const std::vector<Expr>& components, std::span<const double> p) {
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(components.size());
    VectorJet out{Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, n), {}};
    out.hessian.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n, n));
    for (int a = 0; a < m; ++a) {
        const Expr& e = components[static_cast<std::size_t>(a)];
        if (e.is_constant()) {
            out.value(a) = e.constant_value();
            continue;
        }
        const ScalarJet j = evaluate_jet(e, p);
        out.value(a) = j.value();
        for (int k = 0; k < n; ++k) {
            out.jacobian(a, k) = j.gradient(k);
            for (int l = 0; l < n; ++l) out.hessian[static_cast<std::size_t>(a)](k, l) = j.hessian(k, l);
        }
    }
    return out;
}

MatrixJet jet_of(const ExprMatrix& m, std::span<const double> p) {
    const int n = static_cast<int>(p.size());
    const int d = m.dim();
    MatrixJet out{Eigen::MatrixXd::Zero(d, d), {}};
    out.partial.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(d, d));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const Expr& e = m(i, j);
            if (e.is_constant()) {
                out.value(i, j) = e.constant_value();
                continue;
            }
            const ScalarJet jet = evaluate_jet(e, p);
            out.value(i, j) = jet.value();
            for (int k = 0; k < n; ++k) out.partial[static_cast<std::size_t>(k)](i, j) = jet.gradient(k);
        }
    }
    return out;
}

VectorField sum(const std::vector<VectorField>& fields) {
    if (fields.empty()) throw std::invalid_argument("sum of no vector fields");
    VectorField out = VectorField::zero(fields.front().dim());
    for (const auto& f : fields)
        for (int i = 0; i < out.dim(); ++i)
            out.components[static_cast<std::size_t>(i)] =
                out.components[static_cast<std::size_t>(i)] + f.components.at(static_cast<std::size_t>(i));
    return out;
}

CovectorField sum(const std::vector<CovectorField>& fields) {
    if (fields.empty()) throw std::invalid_argument("sum of no covector fields");
    CovectorField out = CovectorField::zero(fields.front().dim());
    for (const auto& f : fields)
        for (int i = 0; i < out.dim(); ++i)
            out.components[static_cast<std::size_t>(i)] =
                out.components[static_cast<std::size_t>(i)] + f.components.at(static_cast<std::size_t>(i));
    return out;
}

}  // namespace wfk
