#include <doctest.h>

#include <cmath>
#include <sstream>

#include "loadcast/metrics.hpp"
#include "loadcast/synth.hpp"
#include "loadcast/trainer.hpp"

using namespace loadcast;

namespace {

ModelConfig tiny_model(std::size_t u = 2) {
    ModelConfig c;
    c.state_size = 6;
    c.control_size = 3;
    c.embed_dim = 2;
    c.context_size = u;
    return c;
}

struct Fixture {
    std::vector<HourlyLoadSeries> data;
    std::vector<const HourlyLoadSeries*> mains, ctxs;
    std::vector<std::string> ctx_ids, main_ids;

    explicit Fixture(int num = 4, int days = 140, std::uint64_t seed = 33) {
        SynthOptions so;
        so.num_series = num;
        so.days = days;
        so.seed = seed;
        data = synth_dataset(so);
        for (int i = 0; i < num / 2; ++i) {
            mains.push_back(&data[static_cast<std::size_t>(i)]);
            main_ids.push_back(data[static_cast<std::size_t>(i)].id);
        }
        for (int i = num / 2; i < num; ++i) {
            ctxs.push_back(&data[static_cast<std::size_t>(i)]);
            ctx_ids.push_back(data[static_cast<std::size_t>(i)].id);
        }
    }
};

} // namespace

TEST_SUITE_BEGIN("unit");

TEST_CASE("sub-epoch formula") {
    CHECK(sub_epochs(100, 4, 400, 0.8) == 1.0);                      // Nb == L
    CHECK(sub_epochs(100, 2, 400, 0.8) ==
          doctest::Approx(std::pow(0.5, 0.8)).epsilon(1e-15));       // printed min form
    CHECK(sub_epochs(100, 2, 400, 0.8) == doctest::Approx(0.574349).epsilon(1e-5));
    CHECK(sub_epochs(100, 2, 400, 0.0) == 1.0);                      // p = 0
    CHECK(sub_epochs(2000, 2, 35, 0.8) == 1.0);                      // clipped at one scan
    CHECK(sub_epochs(2000, 2, 35, 0.8, SubEpochClip::MaxForm) ==
          doctest::Approx(std::pow(2000.0 * 2 / 35, 0.8)).epsilon(1e-12));
    CHECK_THROWS_AS(sub_epochs(0, 2, 35, 0.8), std::invalid_argument);
}

TEST_CASE("schedules follow the configured steps") {
    TrainConfig tc;
    CHECK(tc.lr_at(1) == 3e-3);
    CHECK(tc.lr_at(5) == 3e-3);
    CHECK(tc.lr_at(6) == 1e-3);
    CHECK(tc.lr_at(7) == 3e-4);
    CHECK(tc.lr_at(8) == 1e-4);
    CHECK(tc.lr_at(9) == 1e-4);
    CHECK(tc.batch_at(1) == 2);
    CHECK(tc.batch_at(3) == 2);
    CHECK(tc.batch_at(4) == 5);
    CHECK(tc.batch_at(9) == 5);
    tc.warmup_steps = 60;
    CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
}

TEST_CASE("windows near the range end run fewer steps") {
    Fixture f;
    Model model = Model::create(tiny_model(), f.ctx_ids, 5);
    TrainConfig tc;
    tc.max_window_steps = 50;
    tc.warmup_steps = 2;
    const DayIndex start = BatchRunner::earliest_context_day(f.ctxs) + 1;
    WindowResult res = run_window(model, f.mains, f.ctxs, start, start + 9, tc);
    CHECK(res.days == 10); // clamped by the range, not l_o
    CHECK(res.valid);
    CHECK(res.scored == static_cast<int>(f.mains.size()) * (10 - tc.warmup_steps));
}

TEST_CASE("a window of only warmup steps is discarded") {
    Fixture f;
    Model model = Model::create(tiny_model(), f.ctx_ids, 5);
    TrainConfig tc;
    tc.warmup_steps = 7;
    const DayIndex start = BatchRunner::earliest_context_day(f.ctxs) + 1;
    WindowResult res = run_window(model, f.mains, f.ctxs, start, start + 5, tc);
    CHECK_FALSE(res.valid);
    CHECK(res.scored == 0);
}

TEST_CASE("window loss is bitwise reproducible") {
    Fixture f;
    TrainConfig tc;
    tc.max_window_steps = 9;
    tc.warmup_steps = 2;
    const DayIndex start = BatchRunner::earliest_context_day(f.ctxs) + 4;
    auto run = [&]() {
        Model model = Model::create(tiny_model(), f.ctx_ids, 5);
        std::vector<const HourlyLoadSeries*> one_main = {f.mains[0]};
        WindowResult r = run_window(model, one_main, f.ctxs, start, start + 30, tc);
        return r;
    };
    const WindowResult a = run();
    const WindowResult b = run();
    CHECK(a.valid);
    CHECK(a.loss == b.loss);
    for (const auto& [name, g] : a.grads) {
        CHECK(g.same_values(b.grads.at(name)));
    }
}

TEST_CASE("gradients reach every parameter class") {
    Fixture f;
    Model model = Model::create(tiny_model(), f.ctx_ids, 5);
    TrainConfig tc;
    tc.max_window_steps = 14; // deep enough for the seasonal write-ahead lag
    tc.warmup_steps = 2;
    const DayIndex start = BatchRunner::earliest_context_day(f.ctxs) + 1;
    WindowResult res = run_window(model, f.mains, f.ctxs, start, start + 40, tc);
    REQUIRE(res.valid);

    auto norm_of = [&](const std::string& needle) {
        double acc = 0.0;
        for (const auto& [name, g] : res.grads) {
            if (name.find(needle) != std::string::npos) {
                for (double v : g.values()) acc += v * v;
            }
        }
        return acc;
    };
    CHECK(norm_of("net/main/l1/cell/") > 0.0);   // cell weights
    CHECK(norm_of("net/main/l1/att/") > 0.0);    // attention cells
    CHECK(norm_of("net/main/head/") > 0.0);      // output head
    CHECK(norm_of("net/main/embed/") > 0.0);     // calendar embedding
    CHECK(norm_of("net/ctx/") > 0.0);            // context network
    CHECK(norm_of("/ialpha") > 0.0);             // smoothing logits
    CHECK(norm_of("/ibeta") > 0.0);
    CHECK(norm_of("/g") > 0.0);                  // modulation vectors
}

TEST_CASE("training conforms to the published schedules") {
    Fixture f(6, 130, 44);
    // 3 mains from the fixture plus the contexts as mains too: use 5 mains.
    std::vector<std::string> main_ids;
    for (int i = 0; i < 5; ++i) main_ids.push_back(f.data[static_cast<std::size_t>(i)].id);

    Model model = Model::create(tiny_model(), f.ctx_ids, 5);
    TrainConfig tc;
    tc.max_window_steps = 9;
    tc.warmup_steps = 2;
    tc.max_updates_per_epoch = 2; // keep the run small
    tc.clip_mode = SubEpochClip::PrintedMin;
    tc.seed = 5;

    const DayIndex first = BatchRunner::earliest_context_day(f.ctxs);
    DayRange range{first, first + 60};
    std::ostringstream log;
    TrainStats stats = train(model, f.data, main_ids, range, tc, &log);
    CHECK(stats.updates > 0);

    std::istringstream in(log.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch\tupdate\tlr\tbatch\tloss");
    int seen = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int epoch, update, batch;
        double lr, loss;
        ls >> epoch >> update >> lr >> batch >> loss;
        CHECK(lr == tc.lr_at(epoch));
        CHECK(batch == tc.batch_at(epoch));
        CHECK(std::isfinite(loss));
        ++seen;
    }
    CHECK(seen == stats.updates);
}

TEST_CASE("ensemble aggregation is an elementwise mean") {
    Fixture f;
    std::vector<Model> members;
    members.push_back(Model::create(tiny_model(), f.ctx_ids, 5));
    members.push_back(Model::create(tiny_model(), f.ctx_ids, 6));

    RollingOptions opts;
    opts.first = BatchRunner::earliest_context_day(f.ctxs) + 3;
    opts.last = opts.first + 2;
    opts.spin_up_days = 2;
    const std::vector<std::string> ids = {f.main_ids[0]};

    auto a = rolling_forecast(members[0], f.data, ids, opts);
    auto b = rolling_forecast(members[1], f.data, ids, opts);
    auto mean2 = ensemble_rolling_forecast(std::span<Model>(members), f.data, ids, opts);
    REQUIRE(a.size() == mean2.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int h = 0; h < 24; ++h) {
            CHECK(mean2[i].point[static_cast<std::size_t>(h)] ==
                  doctest::Approx((a[i].point[static_cast<std::size_t>(h)] +
                                   b[i].point[static_cast<std::size_t>(h)]) /
                                  2.0)
                      .epsilon(1e-12));
        }
    }

    // A single member aggregates to itself.
    auto solo = ensemble_rolling_forecast(std::span<Model>(members.data(), 1), f.data, ids,
                                          opts);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int h = 0; h < 24; ++h) {
            CHECK(solo[i].point[static_cast<std::size_t>(h)] ==
                  a[i].point[static_cast<std::size_t>(h)]);
        }
    }
}

TEST_CASE("ensemble mean never scores worse than the member average") {
    // Convexity of the absolute error under mean aggregation; holds for any
    // members, trained or not.
    Fixture f;
    std::vector<Model> members;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        members.push_back(Model::create(tiny_model(), f.ctx_ids, s));
    }
    RollingOptions opts;
    opts.first = BatchRunner::earliest_context_day(f.ctxs) + 3;
    opts.last = opts.first + 6;
    opts.spin_up_days = 2;
    const std::vector<std::string> ids = {f.main_ids[0], f.main_ids[1]};

    double mean_of_members = 0.0;
    for (auto& m : members) {
        auto bundles = rolling_forecast(m, f.data, ids, opts);
        mean_of_members +=
            evaluate_forecasts(f.data, bundles, ids, opts.first, opts.last).pooled_hours.mape;
    }
    mean_of_members /= static_cast<double>(members.size());
    const MetricsReport ens =
        rolling_evaluation(std::span<Model>(members), f.data, ids, opts);
    CHECK(ens.pooled_hours.mape <= mean_of_members + 1e-9);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("training");

TEST_CASE("a few epochs of training reduce the validation error") {
    // Seed-averaged desk experiment: more epochs => lower validation MAPE
    // on the tiny task, for the first three epochs.
    SynthOptions so;
    so.num_series = 3;
    so.days = 250;
    so.seed = 3;
    const auto data = synth_dataset(so);
    const std::vector<std::string> ctx_ids = {data[2].id};
    const std::vector<std::string> main_ids = {data[0].id, data[1].id};
    std::vector<const HourlyLoadSeries*> ctxs = {&data[2]};

    const DayIndex first = BatchRunner::earliest_context_day(ctxs);
    const DayIndex train_last = first + 150;
    DayRange range{first, train_last};
    RollingOptions eval;
    eval.first = train_last + 1;
    eval.last = train_last + 40;
    eval.spin_up_days = 40;

    double mape_by_epochs[4] = {0, 0, 0, 0};
    const int seeds = 5;
    for (int epochs = 1; epochs <= 3; ++epochs) {
        for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
            ModelConfig mc = tiny_model(1);
            mc.state_size = 8;
            mc.control_size = 4;
            Model model = Model::create(mc, ctx_ids, seed);
            TrainConfig tc;
            tc.epochs = epochs;
            tc.max_window_steps = 20;
            tc.warmup_steps = 7;
            tc.batch_schedule = {{1, 2}};
            tc.max_updates_per_epoch = 10;
            tc.clip_mode = SubEpochClip::MaxForm;
            tc.seed = seed;
            train(model, data, main_ids, range, tc, nullptr);
            std::vector<Model> one;
            one.push_back(std::move(model));
            mape_by_epochs[epochs] +=
                rolling_evaluation(std::span<Model>(one), data, main_ids, eval)
                    .pooled_hours.mape /
                seeds;
        }
    }
    CHECK(mape_by_epochs[2] < mape_by_epochs[1]);
    CHECK(mape_by_epochs[3] < mape_by_epochs[2]);
}

TEST_CASE("raising the centre quantile raises the forecasts (bias lever)") {
    // With PE = 100 (z - zhat) / z, a higher centre quantile pushes zhat up
    // and the signed error down.
    SynthOptions so;
    so.num_series = 2;
    so.days = 250;
    so.noise = 0.05;
    so.seed = 9;
    const auto data = synth_dataset(so);
    const std::vector<std::string> ctx_ids = {data[1].id};
    const std::vector<std::string> main_ids = {data[0].id};
    std::vector<const HourlyLoadSeries*> ctxs = {&data[1]};

    const DayIndex first = BatchRunner::earliest_context_day(ctxs);
    DayRange range{first, first + 150};
    RollingOptions eval;
    eval.first = first + 151;
    eval.last = first + 200;
    eval.spin_up_days = 40;

    auto train_mpe = [&](double q_center, std::uint64_t seed) {
        ModelConfig mc = tiny_model(1);
        mc.loss.q_center = q_center;
        Model model = Model::create(mc, ctx_ids, seed);
        TrainConfig tc;
        tc.epochs = 3;
        tc.batch_schedule = {{1, 2}};
        tc.max_window_steps = 25;
        tc.max_updates_per_epoch = 12;
        tc.clip_mode = SubEpochClip::MaxForm;
        tc.seed = seed;
        train(model, data, main_ids, range, tc, nullptr);
        std::vector<Model> one;
        one.push_back(std::move(model));
        return rolling_evaluation(std::span<Model>(one), data, main_ids, eval)
            .pooled_hours.mpe;
    };

    double low = 0.0, high = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        low += train_mpe(0.5, seed) / 5.0;
        high += train_mpe(0.525, seed) / 5.0;
    }
    CHECK(high < low);
}

TEST_SUITE_END();
