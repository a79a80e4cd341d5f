#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wfk {

using Point = std::vector<double>;

enum class Slot { up, down };

// Dense components of a tensor at a point. Slot k of the signature says
// whether index k is contravariant or covariant; indices run row-major.
class TensorValue {
public:
    TensorValue() = default;
    TensorValue(std::vector<Slot> signature, int dim, Point base);

    static TensorValue from_matrix(const Eigen::MatrixXd& m, std::vector<Slot> signature, Point base);
    static TensorValue from_vector(const Eigen::VectorXd& v, Slot slot, Point base);

    const std::vector<Slot>& signature() const { return signature_; }
    int rank() const { return static_cast<int>(signature_.size()); }
    int dim() const { return dim_; }
    const Point& base() const { return base_; }

    template <typename... I>
    double& operator()(I... idx) {
        return data_[offset({static_cast<int>(idx)...})];
    }
    template <typename... I>
    double operator()(I... idx) const {
        return data_[offset({static_cast<int>(idx)...})];
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    Eigen::MatrixXd matrix() const;  // rank 2 only
    Eigen::VectorXd vector() const;  // rank 1 only

    double max_abs() const;

    // Index slot k lowered (or raised) with the given metric (or its inverse).
    TensorValue lowered(int slot, const Eigen::MatrixXd& metric) const;
    TensorValue raised(int slot, const Eigen::MatrixXd& inverse_metric) const;

private:
    std::size_t offset(std::initializer_list<int> idx) const;
    TensorValue contracted_slot(int slot, const Eigen::MatrixXd& m, Slot result) const;

    std::vector<Slot> signature_;
    int dim_ = 0;
    Point base_;
    std::vector<double> data_;
};

double max_abs_difference(const TensorValue& a, const TensorValue& b);

}  // namespace wfk
