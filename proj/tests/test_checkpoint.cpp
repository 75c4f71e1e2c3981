#include <doctest.h>

#include <sstream>

#include "loadcast/checkpoint.hpp"
#include "loadcast/forecast.hpp"
#include "loadcast/synth.hpp"
#include "loadcast/trainer.hpp"

using namespace loadcast;

namespace {

ModelConfig tiny_model() {
    ModelConfig c;
    c.state_size = 5;
    c.control_size = 2;
    c.embed_dim = 2;
    c.context_size = 2;
    return c;
}

std::string to_bytes(const Model& m) {
    std::ostringstream out(std::ios::binary);
    save_checkpoint(m, out);
    return out.str();
}

} // namespace

TEST_SUITE_BEGIN("unit");

TEST_CASE("checkpoint round trip preserves everything bit for bit") {
    Model m = Model::create(tiny_model(), {"AA", "BB"}, 77);
    m.ensure_main_series("XX");
    const std::string bytes = to_bytes(m);

    std::istringstream in(bytes);
    Model back = load_checkpoint(in, "<mem>");
    CHECK(back.cfg.state_size == m.cfg.state_size);
    CHECK(back.cfg.context_size == m.cfg.context_size);
    CHECK(back.cfg.loss.q_center == m.cfg.loss.q_center);
    CHECK(back.context_ids == m.context_ids);
    CHECK(back.seed == m.seed);
    CHECK(back.params.size() == m.params.size());
    for (const auto& [name, entry] : m.params) {
        CHECK(back.params.get(name).same_values(entry.value));
    }
    CHECK(to_bytes(back) == bytes);
}

TEST_CASE("same seed, same bytes") {
    const std::string a = to_bytes(Model::create(tiny_model(), {"AA"}, 5));
    const std::string b = to_bytes(Model::create(tiny_model(), {"AA"}, 5));
    const std::string c = to_bytes(Model::create(tiny_model(), {"AA"}, 6));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("no-context checkpoints carry no context parameters") {
    ModelConfig cfg = tiny_model();
    cfg.use_context = false;
    Model m = Model::create(cfg, {}, 4);
    m.ensure_main_series("XX");
    for (const auto& [name, entry] : m.params) {
        CHECK(name.find("ctx") == std::string::npos);
        CHECK(name.find("/g") == std::string::npos);
    }
    const std::string bytes = to_bytes(m);
    std::istringstream in(bytes);
    Model back = load_checkpoint(in, "<mem>");
    CHECK_FALSE(back.cfg.use_context);
    CHECK(back.context_ids.empty());
}

TEST_CASE("corrupt checkpoints are rejected") {
    std::istringstream junk("definitely not a checkpoint");
    CHECK_THROWS_AS(load_checkpoint(junk, "<mem>"), DataError);

    Model m = Model::create(tiny_model(), {"AA"}, 5);
    std::string bytes = to_bytes(m);
    bytes.resize(bytes.size() / 2);
    std::istringstream cut(bytes);
    CHECK_THROWS_AS(load_checkpoint(cut, "<mem>"), DataError);
}

TEST_CASE("a trained checkpoint reproduces its forecasts exactly") {
    SynthOptions so;
    so.num_series = 3;
    so.days = 120;
    so.seed = 12;
    const auto data = synth_dataset(so);
    const std::vector<std::string> ctx_ids = {data[2].id};
    std::vector<const HourlyLoadSeries*> ctxs = {&data[2]};
    const std::vector<std::string> main_ids = {data[0].id};

    ModelConfig mc = tiny_model();
    mc.context_size = 1;
    Model model = Model::create(mc, ctx_ids, 21);
    TrainConfig tc;
    tc.epochs = 1;
    tc.batch_schedule = {{1, 1}};
    tc.max_window_steps = 12;
    tc.max_updates_per_epoch = 3;
    tc.clip_mode = SubEpochClip::MaxForm;
    const DayIndex first = BatchRunner::earliest_context_day(ctxs);
    train(model, data, main_ids, DayRange{first, first + 70}, tc, nullptr);

    const std::string bytes = to_bytes(model);
    std::istringstream in(bytes);
    Model loaded = load_checkpoint(in, "<mem>");

    RollingOptions opts;
    opts.first = first + 40;
    opts.last = first + 42;
    opts.spin_up_days = 10;
    auto a = rolling_forecast(model, data, main_ids, opts);
    auto b = rolling_forecast(loaded, data, main_ids, opts);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int h = 0; h < 24; ++h) {
            CHECK(a[i].point[static_cast<std::size_t>(h)] ==
                  b[i].point[static_cast<std::size_t>(h)]);
            CHECK(a[i].lower[static_cast<std::size_t>(h)] ==
                  b[i].lower[static_cast<std::size_t>(h)]);
        }
    }
}

TEST_SUITE_END();
