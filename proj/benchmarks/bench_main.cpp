#include <benchmark/benchmark.h>

#include "loadcast/stats.hpp"
#include "loadcast/synth.hpp"
#include "loadcast/trainer.hpp"

using namespace loadcast;

namespace {

struct BenchData {
    std::vector<HourlyLoadSeries> data;
    std::vector<std::string> ctx_ids;
    std::vector<const HourlyLoadSeries*> mains, ctxs;

    static const BenchData& get() {
        static BenchData d = [] {
            BenchData b;
            SynthOptions so;
            so.num_series = 6;
            so.days = 400;
            so.seed = 5;
            b.data = synth_dataset(so);
            for (int i = 0; i < 2; ++i) b.mains.push_back(&b.data[static_cast<std::size_t>(i)]);
            for (int i = 2; i < 6; ++i) {
                b.ctxs.push_back(&b.data[static_cast<std::size_t>(i)]);
                b.ctx_ids.push_back(b.data[static_cast<std::size_t>(i)].id);
            }
            return b;
        }();
        return d;
    }
};

ModelConfig bench_model(std::size_t state) {
    ModelConfig c;
    c.state_size = state;
    c.control_size = state / 2;
    c.embed_dim = 10;
    c.context_size = 3;
    return c;
}

void BM_cell_step(benchmark::State& state) {
    const std::size_t in = static_cast<std::size_t>(state.range(0));
    ParameterStore store;
    std::mt19937_64 rng(1);
    const CellShape shape{in, in, std::min<std::size_t>(in, 70)};
    create_cell_params(store, "c", shape, rng);
    const Tensor x = uniform_init(Shape::vec(in), in, rng);
    for (auto _ : state) {
        Graph g;
        CellWeights w = bind_cell(g, store, "c", shape);
        CellHistory hist(g, shape, 2);
        benchmark::DoNotOptimize(drnn_cell_step(w, g.constant(x), hist));
    }
}
BENCHMARK(BM_cell_step)->Arg(64)->Arg(150)->Arg(347);

void BM_window_forward_backward(benchmark::State& state) {
    const BenchData& b = BenchData::get();
    Model model = Model::create(bench_model(static_cast<std::size_t>(state.range(0))),
                                b.ctx_ids, 3);
    TrainConfig tc;
    tc.max_window_steps = 10;
    tc.warmup_steps = 2;
    const DayIndex start = BatchRunner::earliest_context_day(b.ctxs) + 1;
    for (auto _ : state) {
        WindowResult r = run_window(model, b.mains, b.ctxs, start, start + 40, tc);
        benchmark::DoNotOptimize(r.loss);
    }
    state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_window_forward_backward)->Arg(24)->Arg(70)->Unit(benchmark::kMillisecond);

void BM_es_roll_year(benchmark::State& state) {
    const BenchData& b = BenchData::get();
    for (auto _ : state) {
        benchmark::DoNotOptimize(es_roll(*b.mains[0], 24 * 365));
    }
}
BENCHMARK(BM_es_roll_year);

void BM_h_ratio_year(benchmark::State& state) {
    const BenchData& b = BenchData::get();
    const HourlyLoadSeries& s = *b.mains[0];
    for (auto _ : state) {
        benchmark::DoNotOptimize(h_ratio(s, 24, s.start, s.start + 8760));
    }
}
BENCHMARK(BM_h_ratio_year);

} // namespace

BENCHMARK_MAIN();
