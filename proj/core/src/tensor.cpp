#include "loadcast/tensor.hpp"

#include <cmath>
#include <sstream>

namespace loadcast {

std::string Shape::str() const {
    std::ostringstream os;
    os << '{' << dim[0];
    if (rank == 2) os << ',' << dim[1];
    os << '}';
    return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(shape), data_(std::move(values)) {
    if (data_.size() != shape_.size()) {
        throw ShapeError("tensor: " + std::to_string(data_.size()) +
                         " values do not fill shape " + shape_.str());
    }
}

Tensor Tensor::scalar(double v) {
    Tensor t(Shape::scalar());
    t.data_[0] = v;
    return t;
}

Tensor Tensor::vec(std::vector<double> values) {
    Shape s = Shape::vec(values.size());
    return Tensor(s, std::move(values));
}

Tensor Tensor::mat(std::size_t rows, std::size_t cols, std::vector<double> values) {
    Shape s = Shape::mat(rows, cols);
    return Tensor(s, std::move(values));
}

double Tensor::item() const {
    if (size() != 1) {
        throw ShapeError("item() on tensor of shape " + shape_.str());
    }
    return data_[0];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool Tensor::same_values(const Tensor& o) const {
    if (shape_ != o.shape_) return false;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (data_[i] != o.data_[i]) return false;
    }
    return true;
}

} // namespace loadcast
