#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace wfk {

// Value, gradient and Hessian of a scalar at a point. The Hessian is stored
// as its lower triangle (row-major, i >= j), so it is symmetric by layout.
class ScalarJet {
public:
    ScalarJet() = default;
    explicit ScalarJet(int dim, double value = 0.0);

    static ScalarJet constant(int dim, double value) { return ScalarJet(dim, value); }
    static ScalarJet coordinate(int dim, int index, double value);

    int dim() const { return dim_; }
    double value() const { return value_; }
    double& value() { return value_; }

    double gradient(int i) const { return gradient_[static_cast<std::size_t>(i)]; }
    double& gradient(int i) { return gradient_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& gradient() const { return gradient_; }

    double hessian(int i, int j) const { return hessian_[packed(i, j)]; }
    double& hessian(int i, int j) { return hessian_[packed(i, j)]; }

    // Applies a scalar function with derivatives d1 = phi'(u), d2 = phi''(u).
    ScalarJet chain(double phi, double d1, double d2) const;

    ScalarJet& operator+=(const ScalarJet& rhs);
    ScalarJet& operator-=(const ScalarJet& rhs);
    ScalarJet& operator*=(double k);

private:
    static std::size_t packed(int i, int j) {
        if (i < j) std::swap(i, j);
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2 +
               static_cast<std::size_t>(j);
    }

    int dim_ = 0;
    double value_ = 0.0;
    std::vector<double> gradient_;
    std::vector<double> hessian_;
};

ScalarJet operator+(ScalarJet a, const ScalarJet& b);
ScalarJet operator-(ScalarJet a, const ScalarJet& b);
ScalarJet operator-(const ScalarJet& a);
ScalarJet operator*(const ScalarJet& a, const ScalarJet& b);
ScalarJet operator*(double k, ScalarJet a);
ScalarJet reciprocal(const ScalarJet& a);
ScalarJet exp(const ScalarJet& a);
ScalarJet sqrt(const ScalarJet& a);
ScalarJet log(const ScalarJet& a);
ScalarJet pow(const ScalarJet& a, int exponent);

}  // namespace wfk
