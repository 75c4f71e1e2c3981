#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace loadcast {

/// Error thrown when operand shapes do not conform to an operation.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Error thrown when values leave an operation's numeric domain
/// (non-positive log input, division blow-up, exp overflow).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape of a dense tensor. The engine handles scalars, vectors and
/// matrices; that covers every operation the model needs.
struct Shape {
    std::uint8_t rank = 1;
    std::uint32_t dim[2] = {1, 1};

    static Shape scalar() { return Shape{1, {1, 1}}; }
    static Shape vec(std::size_t n) {
        return Shape{1, {static_cast<std::uint32_t>(n), 1}};
    }
    static Shape mat(std::size_t rows, std::size_t cols) {
        return Shape{2, {static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols)}};
    }

    std::size_t size() const {
        return rank == 1 ? dim[0] : static_cast<std::size_t>(dim[0]) * dim[1];
    }
    std::size_t rows() const { return dim[0]; }
    std::size_t cols() const { return dim[1]; }
    bool is_scalar() const { return size() == 1; }

    bool operator==(const Shape& o) const {
        return rank == o.rank && dim[0] == o.dim[0] && dim[1] == o.dim[1];
    }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    std::string str() const;
};

/// Dense tensor of 64-bit reals, row-major.
class Tensor {
public:
    Tensor() : shape_(Shape::scalar()), data_(1, 0.0) {}
    explicit Tensor(Shape shape, double fill = 0.0)
        : shape_(shape), data_(shape.size(), fill) {}
    Tensor(Shape shape, std::vector<double> values);

    static Tensor scalar(double v);
    static Tensor vec(std::vector<double> values);
    static Tensor mat(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor zeros(Shape shape) { return Tensor(shape, 0.0); }
    static Tensor full(Shape shape, double v) { return Tensor(shape, v); }

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c) {
        return data_[r * shape_.cols() + c];
    }
    double at(std::size_t r, std::size_t c) const {
        return data_[r * shape_.cols() + c];
    }

    /// Scalar access; throws unless the tensor holds exactly one value.
    double item() const;

    bool all_finite() const;
    bool same_values(const Tensor& o) const;

private:
    Shape shape_;
    std::vector<double> data_;
};

} // namespace loadcast
