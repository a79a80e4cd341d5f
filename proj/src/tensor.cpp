#include "wfk/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfk/errors.hpp"

namespace wfk {

TensorValue::TensorValue(std::vector<Slot> signature, int dim, Point base)
    : signature_(std::move(signature)), dim_(dim), base_(std::move(base)) {
    std::size_t size = 1;
    for (std::size_t k = 0; k < signature_.size(); ++k) size *= static_cast<std::size_t>(dim_);
    data_.assign(size, 0.0);
}

TensorValue TensorValue::from_matrix(const Eigen::MatrixXd& m, std::vector<Slot> signature, Point base) {
    TensorValue t(std::move(signature), static_cast<int>(m.rows()), std::move(base));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
    return t;
}

TensorValue TensorValue::from_vector(const Eigen::VectorXd& v, Slot slot, Point base) {
    TensorValue t({slot}, static_cast<int>(v.size()), std::move(base));
    for (int i = 0; i < v.size(); ++i) t(i) = v(i);
    return t;
}

std::size_t TensorValue::offset(std::initializer_list<int> idx) const {
    if (idx.size() != signature_.size()) throw std::out_of_range("tensor index arity mismatch");
    std::size_t off = 0;
    for (int i : idx) {
        if (i < 0 || i >= dim_) throw std::out_of_range("tensor index out of range");
        off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    }
    return off;
}

Eigen::MatrixXd TensorValue::matrix() const {
    if (rank() != 2) throw std::logic_error("matrix() needs a rank-2 tensor");
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

Eigen::VectorXd TensorValue::vector() const {
    if (rank() != 1) throw std::logic_error("vector() needs a rank-1 tensor");
    return Eigen::Map<const Eigen::VectorXd>(data_.data(), dim_);
}

double TensorValue::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

TensorValue TensorValue::contracted_slot(int slot, const Eigen::MatrixXd& m, Slot result) const {
    TensorValue out = *this;
    out.signature_[static_cast<std::size_t>(slot)] = result;
    const std::size_t n = static_cast<std::size_t>(dim_);
    std::size_t stride = 1;
    for (int k = rank() - 1; k > slot; --k) stride *= n;
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < data_.size(); outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            for (std::size_t a = 0; a < n; ++a) {
                double acc = 0.0;
                for (std::size_t b = 0; b < n; ++b) {
                    acc += m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                           data_[outer + b * stride + inner];
                }
                out.data_[outer + a * stride + inner] = acc;
            }
        }
    }
    return out;
}

TensorValue TensorValue::lowered(int slot, const Eigen::MatrixXd& metric) const {
    if (signature_.at(static_cast<std::size_t>(slot)) != Slot::up) throw GeometryError("slot is already covariant");
    return contracted_slot(slot, metric, Slot::down);
}

TensorValue TensorValue::raised(int slot, const Eigen::MatrixXd& inverse_metric) const {
    if (signature_.at(static_cast<std::size_t>(slot)) != Slot::down) {
        throw GeometryError("slot is already contravariant");
    }
    return contracted_slot(slot, inverse_metric, Slot::up);
}

double max_abs_difference(const TensorValue& a, const TensorValue& b) {
    if (a.data().size() != b.data().size()) throw std::invalid_argument("tensor shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace wfk
