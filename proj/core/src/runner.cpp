#include "loadcast/runner.hpp"

namespace loadcast {

namespace {

std::int64_t aligned_join_cursor(const HourlyLoadSeries& s) {
    // First cursor >= the init prefix that lands on a UTC midnight.
    const std::int64_t rem = (s.start + kEsInitHours) % 24;
    return kEsInitHours + (rem == 0 ? 0 : 24 - rem);
}

} // namespace

DayIndex BatchRunner::earliest_step_day(const HourlyLoadSeries& series) {
    return (series.start + aligned_join_cursor(series)) / 24;
}

DayIndex BatchRunner::earliest_context_day(
    std::span<const HourlyLoadSeries* const> contexts) {
    DayIndex d = 0;
    for (const auto* s : contexts) {
        d = std::max(d, earliest_step_day(*s));
    }
    return d;
}

std::vector<EsState> BatchRunner::initial_states(
    Model& model, std::span<const HourlyLoadSeries* const> mains,
    std::span<const HourlyLoadSeries* const> contexts, DayIndex begin_day) {
    BatchRunner r(model, std::vector<const HourlyLoadSeries*>(mains.begin(), mains.end()),
                  std::vector<const HourlyLoadSeries*>(contexts.begin(), contexts.end()),
                  begin_day);
    std::vector<EsState> out;
    out.reserve(r.mains_.size() + r.ctxs_.size());
    for (const Track& t : r.mains_) out.push_back(t.base);
    for (const Track& t : r.ctxs_) out.push_back(t.base);
    return out;
}

BatchRunner::BatchRunner(Model& model, std::vector<const HourlyLoadSeries*> mains,
                         std::vector<const HourlyLoadSeries*> contexts, DayIndex begin_day,
                         const std::vector<EsState>* frozen)
    : model_(&model), day_(begin_day) {
    if (frozen && frozen->size() != mains.size() + contexts.size()) {
        throw DataError("runner: frozen state count mismatch");
    }
    if (model.cfg.use_context &&
        contexts.size() != model.context_ids.size()) {
        throw DataError("runner: expected " + std::to_string(model.context_ids.size()) +
                        " context series, got " + std::to_string(contexts.size()));
    }
    mains_.resize(mains.size());
    for (std::size_t i = 0; i < mains.size(); ++i) {
        model.ensure_main_series(mains[i]->id);
        init_track(mains_[i], mains[i], Model::main_series_prefix(mains[i]->id), begin_day,
                   frozen ? &(*frozen)[i] : nullptr);
    }
    if (model.cfg.use_context) {
        ctxs_.resize(contexts.size());
        for (std::size_t i = 0; i < contexts.size(); ++i) {
            if (contexts[i]->id != model.context_ids[i]) {
                throw DataError("runner: context series order mismatch at position " +
                                std::to_string(i) + " (" + contexts[i]->id + " vs " +
                                model.context_ids[i] + ")");
            }
            init_track(ctxs_[i], contexts[i], Model::context_series_prefix(contexts[i]->id),
                       begin_day, frozen ? &(*frozen)[mains_.size() + i] : nullptr);
        }
    }
    attach_graph(false);
}

void BatchRunner::init_track(Track& t, const HourlyLoadSeries* s, const std::string& prefix,
                             DayIndex begin_day, const EsState* frozen) {
    t.series = s;
    t.prefix = prefix;
    t.join_cursor = aligned_join_cursor(*s);
    if (frozen) {
        t.base = *frozen;
        return;
    }
    const double ia = model_->params.get(prefix + "/ialpha").item();
    const double ib = model_->params.get(prefix + "/ibeta").item();
    const std::int64_t target = std::max<std::int64_t>(
        t.join_cursor, begin_day * 24 - s->start);
    const std::int64_t hours = std::min<std::int64_t>(
        target, static_cast<std::int64_t>(s->size()));
    t.base = es_roll(*s, hours, ia, ib);
}

void BatchRunner::attach_graph(bool resume) {
    auto g = std::make_unique<Graph>();
    main_w_ = bind_network(*g, model_->params, "net/main", model_->main_network());
    if (model_->cfg.use_context) {
        ctx_w_ = bind_network(*g, model_->params, "net/ctx", model_->context_network());
    }
    const int keep = model_->cfg.max_dilation();
    for (auto* tracks : {&mains_, &ctxs_}) {
        for (Track& t : *tracks) {
            t.ialpha = model_->params.use(*g, t.prefix + "/ialpha");
            t.ibeta = model_->params.use(*g, t.prefix + "/ibeta");
            const bool is_ctx = tracks == &ctxs_;
            const NetworkConfig ncfg =
                is_ctx ? model_->context_network() : model_->main_network();
            if (resume) {
                EsState snap = t.es->snapshot();
                t.es = std::make_unique<EsWindow>(*g, snap, t.ialpha, t.ibeta, true);
                t.hist.detach_to(*g, keep);
            } else {
                t.es = std::make_unique<EsWindow>(*g, t.base, t.ialpha, t.ibeta, false);
                t.hist = NetworkHistory(*g, ncfg);
            }
        }
    }
    g_ = std::move(g);
}

void BatchRunner::detach() { attach_graph(true); }

bool BatchRunner::track_can_step(const Track& t, DayIndex day) const {
    const std::int64_t c = cursor_for(t, day);
    if (c != t.es->cursor() || c < t.join_cursor) return false;
    return t.series->complete(t.series->start + c - kInputWindowHours, kInputWindowHours);
}

bool BatchRunner::main_can_step(std::size_t idx) const {
    return track_can_step(mains_[idx], day_);
}

bool BatchRunner::context_ready() const {
    for (const Track& t : ctxs_) {
        if (!track_can_step(t, day_)) return false;
    }
    return true;
}

std::span<const double> BatchRunner::window_values(const Track& t, std::int64_t from,
                                                   std::size_t n) const {
    return std::span<const double>(t.series->values.data() + from, n);
}

DayOutputs BatchRunner::step() {
    Graph& g = *g_;
    DayOutputs out;
    out.day = day_;
    const CalendarFeatures calendar = calendar_onehots(day_);

    Var r; // concatenated context vector
    if (model_->cfg.use_context && !ctxs_.empty()) {
        std::vector<Var> rs;
        rs.reserve(ctxs_.size());
        const NetworkConfig ctx_cfg = model_->context_network();
        for (Track& t : ctxs_) {
            if (!track_can_step(t, day_)) {
                throw DataError("context series " + t.series->id +
                                " cannot step at " + format_date(day_));
            }
            const std::int64_t c = t.es->cursor();
            InputPattern pattern =
                make_input(g, window_values(t, c - kInputWindowHours, kInputWindowHours),
                           *t.es, calendar, std::nullopt);
            Var y = network_step(g, ctx_w_, ctx_cfg,
                                 assemble_features(g, ctx_w_, pattern), t.hist);
            ContextHeadOutput ho = head_context(g, ctx_w_, y, model_->cfg.context_size);
            t.es->apply_corrections(ho.dalpha, ho.dbeta);
            rs.push_back(ho.r);
        }
        r = g.concat(rs);
        out.context_vector = r;
    }

    const NetworkConfig main_cfg = model_->main_network();
    out.mains.reserve(mains_.size());
    for (std::size_t i = 0; i < mains_.size(); ++i) {
        Track& t = mains_[i];
        MainStepOutput mo;
        mo.series_index = i;
        mo.day = day_;
        if (!track_can_step(t, day_)) {
            if (t.joined) t.hist.push_zero_step();
            out.mains.push_back(std::move(mo));
            continue;
        }
        t.joined = true;

        std::optional<Var> rmod;
        if (model_->cfg.use_context) {
            Var gj = model_->cfg.adapt_modulation
                         ? model_->params.use(g, t.prefix + "/g")
                         : g.constant(Tensor::full(
                               Shape::vec(model_->context_vector_len()), 1.0));
            rmod = r * gj;
        }
        const std::int64_t c = t.es->cursor();
        InputPattern pattern =
            make_input(g, window_values(t, c - kInputWindowHours, kInputWindowHours),
                       *t.es, calendar, rmod);
        Var y = network_step(g, main_w_, main_cfg,
                             assemble_features(g, main_w_, pattern), t.hist);
        mo.head = head_main(g, main_w_, y);
        t.es->apply_corrections(mo.head.dalpha, mo.head.dbeta);

        mo.stepped = true;
        mo.zbar = pattern.zbar;
        mo.s_out = pattern.s_out;
        mo.center = loss_space(mo.head.point, mo.s_out);
        mo.lower = loss_space(mo.head.lower, mo.s_out);
        mo.upper = loss_space(mo.head.upper, mo.s_out);
        if (t.series->complete(t.series->start + c, kOutputWindowHours)) {
            mo.has_target = true;
            mo.target = make_output(window_values(t, c, kOutputWindowHours), mo.zbar).x_out;
        }
        out.mains.push_back(std::move(mo));
    }
    return out;
}

void BatchRunner::ingest_track(Track& t, DayIndex day) {
    const std::int64_t c = cursor_for(t, day);
    if (c != t.es->cursor()) return;
    const std::int64_t remaining = static_cast<std::int64_t>(t.series->size()) - c;
    const std::size_t n = static_cast<std::size_t>(std::clamp<std::int64_t>(remaining, 0, 24));
    if (n == 0) return;
    const std::size_t off = static_cast<std::size_t>(c);
    t.es->ingest_day(std::span<const double>(t.series->values.data() + off, n),
                     std::span<const std::uint8_t>(t.series->missing.data() + off, n));
}

void BatchRunner::ingest_and_advance() {
    for (Track& t : ctxs_) ingest_track(t, day_);
    for (Track& t : mains_) ingest_track(t, day_);
    ++day_;
}

ForecastBundle BatchRunner::bundle(const MainStepOutput& out) const {
    if (!out.stepped) {
        throw std::logic_error("bundle: series did not step");
    }
    const Graph& g = *g_;
    std::vector<double> s_hat(out.s_out.size());
    for (std::size_t i = 0; i < out.s_out.size(); ++i) {
        s_hat[i] = g.scalar(out.s_out[i]);
    }
    ForecastBundle b = postprocess(g.value(out.head.point).values(),
                                   g.value(out.head.lower).values(),
                                   g.value(out.head.upper).values(), out.zbar, s_hat);
    b.series_id = mains_[out.series_index].series->id;
    b.day = out.day;
    return b;
}

} // namespace loadcast
