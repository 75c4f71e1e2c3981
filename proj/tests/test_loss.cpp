#include <doctest.h>

#include <random>

#include "loadcast/loss.hpp"

using namespace loadcast;

TEST_SUITE_BEGIN("unit");

TEST_CASE("pinball unit cases") {
    CHECK(pinball_value(1.0, 0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(pinball_value(0.7, 0.7, 0.3) == 0.0);
    CHECK(pinball_value(0.0, 1.0, 0.9) == doctest::Approx(0.1).epsilon(1e-15));
    // The graph op agrees.
    Graph g;
    Var v = pinball(g.constant(1.0), g.constant(0.5), 0.5);
    CHECK(g.scalar(v) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(pinball(g.constant(1.0), g.constant(0.5), 1.5), DomainError);
}

TEST_CASE("step loss composition") {
    Graph g;
    Tensor target(Shape::vec(24));
    Tensor fc(Shape::vec(24));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.8, 1.2);
    for (std::size_t i = 0; i < 24; ++i) {
        target[i] = u(rng);
        fc[i] = u(rng);
    }
    LossSpec spec;
    spec.q_center = 0.525;
    spec.q_lower = 0.045;
    spec.q_upper = 0.975;

    SUBCASE("gamma zero keeps only the central pinball") {
        spec.gamma = 0.0;
        Var c = g.constant(fc);
        Var l = step_loss(g, target, c, g.constant(Tensor::full(Shape::vec(24), 0.1)),
                          g.constant(Tensor::full(Shape::vec(24), 9.0)), spec);
        double expect = 0.0;
        for (std::size_t i = 0; i < 24; ++i) {
            expect += pinball_value(target[i], fc[i], spec.q_center);
        }
        expect /= 24.0;
        CHECK(g.scalar(l) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("exact forecasts give zero loss") {
        spec.gamma = 0.3;
        Var t = g.constant(target);
        Var l = step_loss(g, target, t, t, t, spec);
        CHECK(g.scalar(l) == 0.0);
    }
    SUBCASE("the loss is linear in gamma") {
        Var c = g.constant(fc);
        Var lo = g.constant(Tensor::full(Shape::vec(24), 0.9));
        Var hi = g.constant(Tensor::full(Shape::vec(24), 1.1));
        spec.gamma = 0.0;
        const double base = g.scalar(step_loss(g, target, c, lo, hi, spec));
        spec.gamma = 0.3;
        const double g1 = g.scalar(step_loss(g, target, c, lo, hi, spec));
        spec.gamma = 0.6;
        const double g2 = g.scalar(step_loss(g, target, c, lo, hi, spec));
        CHECK(g2 - base == doctest::Approx(2.0 * (g1 - base)).epsilon(1e-12));
    }
    SUBCASE("loss is nonnegative and zero only at equality") {
        spec.gamma = 0.4;
        Var c = g.constant(fc);
        Var l = step_loss(g, target, c, c, c, spec);
        CHECK(g.scalar(l) > 0.0);
    }
    SUBCASE("bad quantile ordering rejected") {
        spec.q_lower = 0.6;
        Var c = g.constant(fc);
        CHECK_THROWS_AS(step_loss(g, target, c, c, c, spec), DomainError);
    }
}

TEST_CASE("pinball gradient matches finite differences off the kink") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int rep = 0; rep < 20; ++rep) {
        const double x = u(rng);
        double xq = u(rng);
        if (std::abs(x - xq) < 1e-3) xq += 0.01;
        for (double q : {0.045, 0.525, 0.975}) {
            Graph g;
            Var p = g.param("p", Tensor::scalar(xq));
            Var l = pinball(g.constant(x), p, q);
            g.backward(l);
            const double analytic = g.gradients().at("p")[0];

            const double eps = 1e-6;
            auto eval = [&](double v) {
                Graph h;
                return h.scalar(pinball(h.constant(x), h.constant(v), q));
            };
            const double numeric = (eval(xq + eps) - eval(xq - eps)) / (2 * eps);
            CHECK(std::abs(analytic - numeric) /
                      std::max(1e-8, std::abs(analytic) + std::abs(numeric)) <=
                  1e-4);
        }
    }
}

TEST_SUITE_END();
