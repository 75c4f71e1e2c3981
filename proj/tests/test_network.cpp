#include <doctest.h>

#include <random>

#include "loadcast/network.hpp"

using namespace loadcast;

namespace {

NetworkConfig tiny_config(std::size_t feature_len, std::size_t head_width,
                          bool attention = true, bool inject = true) {
    NetworkConfig c;
    c.state_size = 6;
    c.control_size = 3;
    c.embed_dim = 4;
    c.dilations = {2, 4, 7};
    c.feature_len = feature_len;
    c.head_width = head_width;
    c.attention = attention;
    c.inject_input = inject;
    return c;
}

Tensor rand_vec(std::size_t n, std::mt19937_64& rng, double a = 1.0) {
    std::uniform_real_distribution<double> u(-a, a);
    Tensor t(Shape::vec(n));
    for (std::size_t i = 0; i < n; ++i) t[i] = u(rng);
    return t;
}

} // namespace

TEST_SUITE_BEGIN("unit");

TEST_CASE("zero upper layers pass layer one through the residuals") {
    const NetworkConfig cfg = tiny_config(10, kMainHeadWidth);
    ParameterStore store;
    std::mt19937_64 rng(5);
    create_network_params(store, "net", cfg, rng);
    // Zero every weight of layers 2 and 3 (both sub-cells).
    for (auto& [name, entry] : store) {
        if (name.rfind("net/l2/", 0) == 0 || name.rfind("net/l3/", 0) == 0) {
            for (auto& v : entry.value.values()) v = 0.0;
        }
    }

    Graph g;
    NetworkWeights w = bind_network(g, store, "net", cfg);
    NetworkHistory hist(g, cfg);
    Var x = g.constant(rand_vec(10, rng));

    // Reference: layer 1 alone.
    Graph g1;
    NetworkWeights w1 = bind_network(g1, store, "net", cfg);
    NetworkHistory h1(g1, cfg);
    AttentiveStep l1 = adrnn_cell_step(w1.layers[0].bottom, w1.layers[0].upper,
                                       g1.constant(g.value(x)), h1.layers[0].bottom,
                                       h1.layers[0].upper, true);

    Var out = network_step(g, w, cfg, x, hist);
    const Tensor& full = g.value(out);
    const Tensor& ref = g1.value(l1.y);
    for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK(full[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("input injection controls upper-layer input lengths") {
    ParameterStore with, without;
    std::mt19937_64 r1(1), r2(1);
    const NetworkConfig ci = tiny_config(10, kMainHeadWidth, true, true);
    const NetworkConfig cn = tiny_config(10, kMainHeadWidth, true, false);
    create_network_params(with, "net", ci, r1);
    create_network_params(without, "net", cn, r2);
    // Layer 2 input: state + features when injecting, state only otherwise.
    CHECK(with.get("net/l2/cell/f/W").shape() == Shape::mat(6, 16));
    CHECK(without.get("net/l2/cell/f/W").shape() == Shape::mat(6, 6));
    CHECK(ci.layer_input(2) == 16);
    CHECK(cn.layer_input(2) == 6);
}

TEST_CASE("dilated lookbacks reach the right steps") {
    // Layer 3 has dilation 7: at step 5 its delayed states are still zero,
    // at step 8 it reads states from step 1. Probe via sensitivity of the
    // delayed h-state path.
    const NetworkConfig cfg = tiny_config(8, kMainHeadWidth);
    ParameterStore store;
    std::mt19937_64 rng(9);
    create_network_params(store, "net", cfg, rng);

    Graph g;
    NetworkWeights w = bind_network(g, store, "net", cfg);
    NetworkHistory hist(g, cfg);
    for (int t = 0; t < 9; ++t) {
        (void)network_step(g, w, cfg, g.constant(rand_vec(8, rng, 0.5)), hist);
    }
    CellHistory& l3 = hist.layers[2].upper;
    // During step t (0-based) the delayed lookup is h_{t-7}.
    for (double v : g.value(l3.h_at(5 - 7)).values()) CHECK(v == 0.0);
    bool nonzero = false;
    for (double v : g.value(l3.h_at(8 - 7)).values()) nonzero |= v != 0.0;
    CHECK(nonzero);
}

TEST_CASE("embedding is a pure linear map of the one-hots") {
    ParameterStore store;
    std::mt19937_64 rng(3);
    const NetworkConfig cfg = tiny_config(8, kMainHeadWidth);
    create_network_params(store, "net", cfg, rng);

    Graph g;
    Var W = store.use(g, "net/embed/W");
    const CalendarFeatures f = calendar_onehots(CivilDate{2017, 3, 14}); // Tuesday
    Var emb = embed_calendar(g, W, f);
    REQUIRE(g.value(emb).size() == cfg.embed_dim);

    // One-hot linearity: the embedding is the sum of the three active columns.
    const Tensor& Wt = g.value(W);
    const auto onehot = f.onehot();
    for (std::size_t r = 0; r < cfg.embed_dim; ++r) {
        double expect = 0.0;
        for (std::size_t c = 0; c < onehot.size(); ++c) {
            if (onehot[c] == 1.0) expect += Wt.at(r, c);
        }
        CHECK(g.value(emb)[r] == doctest::Approx(expect).epsilon(1e-12));
    }

    // Zero weights embed to zero.
    for (auto& v : store.get("net/embed/W").values()) v = 0.0;
    Graph g2;
    Var emb0 = embed_calendar(g2, store.use(g2, "net/embed/W"), f);
    for (double v : g2.value(emb0).values()) CHECK(v == 0.0);
}

TEST_CASE("two dates differing in one slot differ by one column pair") {
    ParameterStore store;
    std::mt19937_64 rng(3);
    const NetworkConfig cfg = tiny_config(8, kMainHeadWidth);
    create_network_params(store, "net", cfg, rng);
    Graph g;
    Var W = store.use(g, "net/embed/W");
    // 2018-01-02 and 2018-01-09 are both Tuesdays in week 1/2 with different
    // day-of-month; pick two dates equal except the week slot instead:
    const CalendarFeatures a = calendar_onehots(CivilDate{2018, 1, 2});
    CalendarFeatures b = a;
    b.week_of_year = a.week_of_year + 1;
    Var ea = g.matvec(W, g.constant_vec(a.onehot()));
    Var eb = g.matvec(W, g.constant_vec(b.onehot()));
    const Tensor& Wt = g.value(W);
    const std::size_t col_a = static_cast<std::size_t>(7 + 31 + a.week_of_year - 1);
    const std::size_t col_b = static_cast<std::size_t>(7 + 31 + b.week_of_year - 1);
    for (std::size_t r = 0; r < cfg.embed_dim; ++r) {
        const double diff = g.value(eb)[r] - g.value(ea)[r];
        CHECK(diff == doctest::Approx(Wt.at(r, col_b) - Wt.at(r, col_a)).epsilon(1e-12));
    }
}

TEST_CASE("heads split their output exactly") {
    const NetworkConfig cfg = tiny_config(8, kMainHeadWidth);
    ParameterStore store;
    std::mt19937_64 rng(6);
    create_network_params(store, "net", cfg, rng);
    Graph g;
    NetworkWeights w = bind_network(g, store, "net", cfg);
    Var y = g.constant(rand_vec(cfg.state_size, rng));

    MainHeadOutput mo = head_main(g, w, y);
    CHECK(g.value(mo.point).size() == 24);
    CHECK(g.value(mo.lower).size() == 24);
    CHECK(g.value(mo.upper).size() == 24);
    CHECK(g.value(mo.dalpha).size() == 1);
    CHECK(g.value(mo.dbeta).size() == 1);

    // Zero weights zero the whole head.
    for (auto& v : store.get("net/head/W").values()) v = 0.0;
    Graph g2;
    NetworkWeights w2 = bind_network(g2, store, "net", cfg);
    MainHeadOutput z = head_main(g2, w2, g2.constant(g.value(y)));
    for (double v : g2.value(z.point).values()) CHECK(v == 0.0);
    CHECK(g2.value(z.dalpha)[0] == 0.0);
}

TEST_CASE("context head produces u + 2 values") {
    NetworkConfig cfg = tiny_config(8, 5); // u = 3
    ParameterStore store;
    std::mt19937_64 rng(6);
    create_network_params(store, "net", cfg, rng);
    Graph g;
    NetworkWeights w = bind_network(g, store, "net", cfg);
    ContextHeadOutput co = head_context(g, w, g.constant(rand_vec(cfg.state_size, rng)), 3);
    CHECK(g.value(co.r).size() == 3);
    CHECK(g.value(co.dalpha).size() == 1);
    CHECK(g.value(co.dbeta).size() == 1);
    CHECK_THROWS_AS(head_context(g, w, g.constant(rand_vec(cfg.state_size, rng)), 4),
                    ShapeError);
}

TEST_CASE("forward stepping is deterministic") {
    const NetworkConfig cfg = tiny_config(9, kMainHeadWidth);
    auto run = [&]() {
        ParameterStore store;
        std::mt19937_64 rng(123);
        create_network_params(store, "net", cfg, rng);
        Graph g;
        NetworkWeights w = bind_network(g, store, "net", cfg);
        NetworkHistory hist(g, cfg);
        Var out;
        std::mt19937_64 xr(5);
        for (int t = 0; t < 6; ++t) {
            out = network_step(g, w, cfg, g.constant(rand_vec(9, xr, 0.7)), hist);
        }
        return g.value(out);
    };
    CHECK(run().same_values(run()));
}

TEST_CASE("config validation") {
    NetworkConfig cfg = tiny_config(8, kMainHeadWidth);
    cfg.control_size = 9; // exceeds state size
    CHECK_THROWS_AS(cfg.validate(), ShapeError);
    cfg = tiny_config(8, kMainHeadWidth);
    cfg.dilations = {2, 0};
    CHECK_THROWS_AS(cfg.validate(), ShapeError);
}

TEST_SUITE_END();
