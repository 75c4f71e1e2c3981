#include <doctest.h>

#include <limits>

#include "loadcast/tensor.hpp"

using namespace loadcast;

TEST_SUITE_BEGIN("unit");

TEST_CASE("tensor shape bookkeeping") {
    Tensor t = Tensor::mat(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(t.size() == 6);
    CHECK(t.shape().rows() == 2);
    CHECK(t.shape().cols() == 3);
    CHECK(t.at(1, 2) == 6);
    CHECK(t.shape().str() == "{2,3}");

    CHECK_THROWS_AS(Tensor::mat(2, 3, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor::vec({1, 2}).item(), ShapeError);
    CHECK(Tensor::scalar(4.5).item() == 4.5);
}

TEST_CASE("tensor finiteness check") {
    Tensor t = Tensor::vec({1.0, 2.0});
    CHECK(t.all_finite());
    t[1] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(t.all_finite());
    t[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(t.all_finite());
}

TEST_CASE("zeros and full") {
    Tensor z = Tensor::zeros(Shape::vec(4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(z[i] == 0.0);
    Tensor o = Tensor::full(Shape::mat(2, 2), 1.5);
    CHECK(o.size() == 4);
    CHECK(o[3] == 1.5);
}

TEST_SUITE_END();
