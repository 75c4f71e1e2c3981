#include "loadcast/cell.hpp"

namespace loadcast {

void create_cell_params(ParameterStore& store, const std::string& prefix,
                        const CellShape& shape, std::mt19937_64& rng) {
    for (const char* gate : kGateNames) {
        const std::string base = prefix + "/" + gate;
        store.create(base + "/W",
                     uniform_init(Shape::mat(shape.state, shape.input), shape.input, rng));
        store.create(base + "/V",
                     uniform_init(Shape::mat(shape.state, shape.control), shape.control, rng));
        store.create(base + "/U",
                     uniform_init(Shape::mat(shape.state, shape.control), shape.control, rng));
        store.create(base + "/b", Tensor::zeros(Shape::vec(shape.state)));
    }
}

CellWeights bind_cell(Graph& g, const ParameterStore& store, const std::string& prefix,
                      const CellShape& shape) {
    CellWeights w;
    w.shape = shape;
    for (std::size_t i = 0; i < kGateNames.size(); ++i) {
        const std::string base = prefix + "/" + kGateNames[i];
        w.W[i] = store.use(g, base + "/W");
        w.V[i] = store.use(g, base + "/V");
        w.U[i] = store.use(g, base + "/U");
        w.b[i] = store.use(g, base + "/b");
        if (g.value(w.W[i]).shape() != Shape::mat(shape.state, shape.input)) {
            throw ShapeError("cell " + prefix + ": stored W shape " +
                             g.value(w.W[i]).shape().str() + " does not match layer input " +
                             std::to_string(shape.input));
        }
    }
    return w;
}

CellHistory::CellHistory(Graph& g, const CellShape& shape, int dilation)
    : g_(&g), shape_(shape), dilation_(dilation) {
    if (dilation < 1) {
        throw std::invalid_argument("cell dilation must be positive");
    }
}

Var CellHistory::zero_c() const {
    if (!zero_c_.valid()) zero_c_ = g_->constant(Tensor::zeros(Shape::vec(shape_.state)));
    return zero_c_;
}

Var CellHistory::zero_h() const {
    if (!zero_h_.valid()) zero_h_ = g_->constant(Tensor::zeros(Shape::vec(shape_.control)));
    return zero_h_;
}

Var CellHistory::c_at(std::int64_t step) const {
    if (step < tail_start_ || step >= length_) return zero_c();
    return tail_c_[static_cast<std::size_t>(step - tail_start_)];
}

Var CellHistory::h_at(std::int64_t step) const {
    if (step < tail_start_ || step >= length_) return zero_h();
    return tail_h_[static_cast<std::size_t>(step - tail_start_)];
}

void CellHistory::push(Var c, Var h) {
    tail_c_.push_back(c);
    tail_h_.push_back(h);
    ++length_;
}

void CellHistory::detach_to(Graph& g, int keep) {
    const std::size_t have = tail_c_.size();
    const std::size_t carry = std::min<std::size_t>(static_cast<std::size_t>(keep), have);
    std::vector<Var> nc, nh;
    nc.reserve(carry);
    nh.reserve(carry);
    for (std::size_t i = have - carry; i < have; ++i) {
        nc.push_back(g.constant(g_->value(tail_c_[i])));
        nh.push_back(g.constant(g_->value(tail_h_[i])));
    }
    tail_c_ = std::move(nc);
    tail_h_ = std::move(nh);
    tail_start_ = length_ - static_cast<std::int64_t>(carry);
    g_ = &g;
    zero_c_ = Var{};
    zero_h_ = Var{};
}

Var drnn_cell_step(const CellWeights& w, Var x, CellHistory& history) {
    Graph& g = *x.graph;
    if (g.value(x).size() != w.shape.input) {
        throw ShapeError("drnn_cell_step: input of length " +
                         std::to_string(g.value(x).size()) + ", cell expects " +
                         std::to_string(w.shape.input));
    }
    const std::int64_t t = history.length();
    const int d = history.dilation();
    Var h1 = history.h_at(t - 1);
    Var hd = history.h_at(t - d);
    Var c1 = history.c_at(t - 1);
    Var cd = history.c_at(t - d);

    auto pre = [&](std::size_t gate) {
        return matvec(w.W[gate], x) + matvec(w.V[gate], h1) + matvec(w.U[gate], hd) +
               w.b[gate];
    };
    Var f = sigmoid(pre(0));
    Var u = sigmoid(pre(1));
    Var o = sigmoid(pre(2));
    Var c_tilde = tanh(pre(3));

    Var fused = f * c1 + (1.0 - f) * cd;
    Var c = u * c_tilde + (1.0 - u) * fused;
    Var y = o * tanh(c);
    Var h = slice(y, 0, w.shape.control);
    history.push(c, h);
    return y;
}

AttentiveStep adrnn_cell_step(const CellWeights& bottom, const CellWeights& upper,
                              Var x, CellHistory& bottom_history, CellHistory& upper_history,
                              bool attention_enabled) {
    AttentiveStep out;
    if (attention_enabled) {
        if (bottom.shape.state != bottom.shape.input) {
            throw ShapeError("adrnn_cell_step: attention cell emits length " +
                             std::to_string(bottom.shape.state) + " for input of length " +
                             std::to_string(bottom.shape.input));
        }
        out.m = drnn_cell_step(bottom, x, bottom_history);
        x = x * exp(out.m);
    }
    out.y = drnn_cell_step(upper, x, upper_history);
    return out;
}

} // namespace loadcast
