#include "wfk/jet.hpp"

#include <cmath>

namespace wfk {

ScalarJet::ScalarJet(int dim, double value)
    : dim_(dim),
      value_(value),
      gradient_(static_cast<std::size_t>(dim), 0.0),
      hessian_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim + 1) / 2, 0.0) {}

ScalarJet ScalarJet::coordinate(int dim, int index, double value) {
    ScalarJet j(dim, value);
    j.gradient(index) = 1.0;
    return j;
}

ScalarJet ScalarJet::chain(double phi, double d1, double d2) const {
    ScalarJet out(dim_, phi);
    for (int i = 0; i < dim_; ++i) {
        out.gradient(i) = d1 * gradient(i);
        for (int j = 0; j <= i; ++j) {
            out.hessian(i, j) = d1 * hessian(i, j) + d2 * gradient(i) * gradient(j);
        }
    }
    return out;
}

ScalarJet& ScalarJet::operator+=(const ScalarJet& rhs) {
    value_ += rhs.value_;
    for (std::size_t i = 0; i < gradient_.size(); ++i) gradient_[i] += rhs.gradient_[i];
    for (std::size_t i = 0; i < hessian_.size(); ++i) hessian_[i] += rhs.hessian_[i];
    return *this;
}

ScalarJet& ScalarJet::operator-=(const ScalarJet& rhs) {
    value_ -= rhs.value_;
    for (std::size_t i = 0; i < gradient_.size(); ++i) gradient_[i] -= rhs.gradient_[i];
    for (std::size_t i = 0; i < hessian_.size(); ++i) hessian_[i] -= rhs.hessian_[i];
    return *this;
}

ScalarJet& ScalarJet::operator*=(double k) {
    value_ *= k;
    for (auto& v : gradient_) v *= k;
    for (auto& v : hessian_) v *= k;
    return *this;
}

ScalarJet operator+(ScalarJet a, const ScalarJet& b) { return a += b; }
ScalarJet operator-(ScalarJet a, const ScalarJet& b) { return a -= b; }
ScalarJet operator-(const ScalarJet& a) { return -1.0 * a; }
ScalarJet operator*(double k, ScalarJet a) { return a *= k; }

ScalarJet operator*(const ScalarJet& a, const ScalarJet& b) {
    const int n = a.dim();
    ScalarJet out(n, a.value() * b.value());
    for (int i = 0; i < n; ++i) {
        out.gradient(i) = a.value() * b.gradient(i) + b.value() * a.gradient(i);
        for (int j = 0; j <= i; ++j) {
            out.hessian(i, j) = a.value() * b.hessian(i, j) + b.value() * a.hessian(i, j) +
                                a.gradient(i) * b.gradient(j) + a.gradient(j) * b.gradient(i);
        }
    }
    return out;
}

ScalarJet reciprocal(const ScalarJet& a) {
    const double u = a.value();
    return a.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u));
}

ScalarJet exp(const ScalarJet& a) {
    const double e = std::exp(a.value());
    return a.chain(e, e, e);
}

ScalarJet sqrt(const ScalarJet& a) {
    const double r = std::sqrt(a.value());
    return a.chain(r, 0.5 / r, -0.25 / (r * a.value()));
}

ScalarJet log(const ScalarJet& a) {
    const double u = a.value();
    return a.chain(std::log(u), 1.0 / u, -1.0 / (u * u));
}

ScalarJet pow(const ScalarJet& a, int exponent) {
    if (exponent == 0) return ScalarJet(a.dim(), 1.0);
    if (exponent == 1) return a;
    const double u = a.value();
    const double k = exponent;
    return a.chain(std::pow(u, exponent), k * std::pow(u, exponent - 1),
                   k * (k - 1.0) * std::pow(u, exponent - 2));
}

}  // namespace wfk
