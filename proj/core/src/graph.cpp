#include "loadcast/graph.hpp"

#include <cmath>
#include <cstring>

namespace loadcast {

namespace {

[[noreturn]] void shape_fail(OpKind op, const Shape& a, const Shape& b) {
    throw ShapeError(std::string(op_name(op)) + ": shapes " + a.str() + " and " +
                     b.str() + " do not conform");
}

// Binary elementwise ops allow equal shapes or a scalar on either side.
enum class Bcast { None, Left, Right };

Bcast broadcast_mode(OpKind op, const Shape& a, const Shape& b) {
    if (a == b) return Bcast::None;
    if (a.is_scalar()) return Bcast::Left;
    if (b.is_scalar()) return Bcast::Right;
    shape_fail(op, a, b);
}

} // namespace

const char* op_name(OpKind op) {
    switch (op) {
        case OpKind::Constant: return "constant";
        case OpKind::Param: return "param";
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::Div: return "div";
        case OpKind::Neg: return "neg";
        case OpKind::AddConst: return "add_const";
        case OpKind::MulConst: return "mul_const";
        case OpKind::RsubConst: return "rsub_const";
        case OpKind::MatVec: return "matvec";
        case OpKind::Concat: return "concat";
        case OpKind::Slice: return "slice";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Tanh: return "tanh";
        case OpKind::Exp: return "exp";
        case OpKind::Log: return "log";
        case OpKind::Mean: return "mean";
        case OpKind::Sum: return "sum";
        case OpKind::Pinball: return "pinball";
    }
    return "?";
}

Var Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(Var v) const {
    check_owned(v, "node");
    return nodes_[v.id];
}

void Graph::check_owned(Var v, const char* where) const {
    if (v.graph != this || v.id >= nodes_.size()) {
        throw std::logic_error(std::string(where) + ": var does not belong to this graph");
    }
}

Var Graph::constant(Tensor value) {
    Node n;
    n.op = OpKind::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Graph::param(const std::string& name, const Tensor& value) {
    auto it = param_index_.find(name);
    if (it != param_index_.end()) {
        return Var{this, it->second};
    }
    Node n;
    n.op = OpKind::Param;
    n.requires_grad = true;
    n.value = value;
    n.name_idx = static_cast<std::int32_t>(param_nodes_.size());
    Var v = push(std::move(n));
    param_nodes_.emplace_back(name, v.id);
    param_index_.emplace(name, v.id);
    return v;
}

const Tensor& Graph::value(Var v) const { return node(v).value; }

Var Graph::emit_binary(OpKind op, Var a, Var b, double aux) {
    check_owned(a, op_name(op));
    check_owned(b, op_name(op));
    const Tensor& ta = nodes_[a.id].value;
    const Tensor& tb = nodes_[b.id].value;
    Bcast bc = broadcast_mode(op, ta.shape(), tb.shape());
    const Shape out_shape = bc == Bcast::Left ? tb.shape() : ta.shape();

    Tensor out(out_shape);
    const std::size_t n = out.size();
    const double* pa = ta.data();
    const double* pb = tb.data();
    double* po = out.data();
    auto lhs = [&](std::size_t i) { return bc == Bcast::Left ? pa[0] : pa[i]; };
    auto rhs = [&](std::size_t i) { return bc == Bcast::Right ? pb[0] : pb[i]; };

    switch (op) {
        case OpKind::Add:
            for (std::size_t i = 0; i < n; ++i) po[i] = lhs(i) + rhs(i);
            break;
        case OpKind::Sub:
            for (std::size_t i = 0; i < n; ++i) po[i] = lhs(i) - rhs(i);
            break;
        case OpKind::Mul:
            for (std::size_t i = 0; i < n; ++i) po[i] = lhs(i) * rhs(i);
            break;
        case OpKind::Div:
            for (std::size_t i = 0; i < n; ++i) po[i] = lhs(i) / rhs(i);
            if (!out.all_finite()) {
                throw DomainError("div: non-finite result");
            }
            break;
        case OpKind::Pinball:
            // lhs = actual x, rhs = forecast of quantile aux.
            for (std::size_t i = 0; i < n; ++i) {
                const double x = lhs(i), xq = rhs(i);
                po[i] = x >= xq ? (x - xq) * aux : (x - xq) * (aux - 1.0);
            }
            break;
        default:
            throw std::logic_error("emit_binary: bad op");
    }

    Node nd;
    nd.op = op;
    nd.a = a.id;
    nd.b = b.id;
    nd.aux = aux;
    nd.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    nd.value = std::move(out);
    return push(std::move(nd));
}

Var Graph::emit_unary(OpKind op, Var a, double aux) {
    check_owned(a, op_name(op));
    const Tensor& ta = nodes_[a.id].value;
    const std::size_t n = ta.size();
    const double* pa = ta.data();

    Tensor out(ta.shape());
    double* po = out.data();
    bool check_finite = false;
    switch (op) {
        case OpKind::Neg:
            for (std::size_t i = 0; i < n; ++i) po[i] = -pa[i];
            break;
        case OpKind::AddConst:
            for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] + aux;
            break;
        case OpKind::MulConst:
            for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] * aux;
            break;
        case OpKind::RsubConst:
            for (std::size_t i = 0; i < n; ++i) po[i] = aux - pa[i];
            break;
        case OpKind::Sigmoid:
            for (std::size_t i = 0; i < n; ++i) po[i] = 1.0 / (1.0 + std::exp(-pa[i]));
            break;
        case OpKind::Tanh:
            for (std::size_t i = 0; i < n; ++i) po[i] = std::tanh(pa[i]);
            break;
        case OpKind::Exp:
            for (std::size_t i = 0; i < n; ++i) po[i] = std::exp(pa[i]);
            check_finite = true;
            break;
        case OpKind::Log:
            for (std::size_t i = 0; i < n; ++i) {
                if (!(pa[i] > 0.0)) {
                    throw DomainError("log: input " + std::to_string(pa[i]) +
                                      " is not strictly positive");
                }
                po[i] = std::log(pa[i]);
            }
            break;
        case OpKind::Mean: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += pa[i];
            out = Tensor::scalar(acc / static_cast<double>(n));
            break;
        }
        case OpKind::Sum: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += pa[i];
            out = Tensor::scalar(acc);
            break;
        }
        default:
            throw std::logic_error("emit_unary: bad op");
    }
    if (check_finite && !out.all_finite()) {
        throw DomainError(std::string(op_name(op)) + ": non-finite result");
    }

    Node nd;
    nd.op = op;
    nd.a = a.id;
    nd.b = a.id;
    nd.aux = aux;
    nd.requires_grad = nodes_[a.id].requires_grad;
    nd.value = std::move(out);
    return push(std::move(nd));
}

Var Graph::add(Var a, Var b) { return emit_binary(OpKind::Add, a, b); }
Var Graph::sub(Var a, Var b) { return emit_binary(OpKind::Sub, a, b); }
Var Graph::mul(Var a, Var b) { return emit_binary(OpKind::Mul, a, b); }
Var Graph::div(Var a, Var b) { return emit_binary(OpKind::Div, a, b); }
Var Graph::pinball(Var actual, Var pred, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("pinball: quantile " + std::to_string(q) + " outside (0,1)");
    }
    return emit_binary(OpKind::Pinball, actual, pred, q);
}
Var Graph::neg(Var a) { return emit_unary(OpKind::Neg, a); }
Var Graph::add_const(Var a, double c) { return emit_unary(OpKind::AddConst, a, c); }
Var Graph::mul_const(Var a, double c) { return emit_unary(OpKind::MulConst, a, c); }
Var Graph::rsub_const(double c, Var a) { return emit_unary(OpKind::RsubConst, a, c); }
Var Graph::sigmoid(Var a) { return emit_unary(OpKind::Sigmoid, a); }
Var Graph::tanh(Var a) { return emit_unary(OpKind::Tanh, a); }
Var Graph::exp(Var a) { return emit_unary(OpKind::Exp, a); }
Var Graph::log(Var a) { return emit_unary(OpKind::Log, a); }
Var Graph::mean(Var a) { return emit_unary(OpKind::Mean, a); }
Var Graph::sum(Var a) { return emit_unary(OpKind::Sum, a); }

Var Graph::matvec(Var w, Var x) {
    check_owned(w, "matvec");
    check_owned(x, "matvec");
    const Tensor& tw = nodes_[w.id].value;
    const Tensor& tx = nodes_[x.id].value;
    if (tw.shape().rank != 2 || tx.shape().rank != 1 ||
        tw.shape().cols() != tx.shape().rows()) {
        shape_fail(OpKind::MatVec, tw.shape(), tx.shape());
    }
    const std::size_t m = tw.shape().rows();
    const std::size_t n = tw.shape().cols();
    Tensor out(Shape::vec(m));
    const double* pw = tw.data();
    const double* px = tx.data();
    double* po = out.data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = pw + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * px[j];
        po[i] = acc;
    }

    Node nd;
    nd.op = OpKind::MatVec;
    nd.a = w.id;
    nd.b = x.id;
    nd.requires_grad = nodes_[w.id].requires_grad || nodes_[x.id].requires_grad;
    nd.value = std::move(out);
    return push(std::move(nd));
}

Var Graph::concat(std::span<const Var> parts) {
    if (parts.empty()) {
        throw ShapeError("concat: no inputs");
    }
    std::size_t total = 0;
    bool rg = false;
    for (Var p : parts) {
        check_owned(p, "concat");
        const Tensor& t = nodes_[p.id].value;
        if (t.shape().rank != 1) {
            throw ShapeError("concat: input of shape " + t.shape().str() + " is not a vector");
        }
        total += t.size();
        rg = rg || nodes_[p.id].requires_grad;
    }
    Tensor out(Shape::vec(total));
    double* po = out.data();
    Node nd;
    nd.op = OpKind::Concat;
    nd.extra.reserve(parts.size());
    for (Var p : parts) {
        const Tensor& t = nodes_[p.id].value;
        std::memcpy(po, t.data(), t.size() * sizeof(double));
        po += t.size();
        nd.extra.push_back(p.id);
    }
    nd.requires_grad = rg;
    nd.value = std::move(out);
    return push(std::move(nd));
}

Var Graph::slice(Var a, std::size_t offset, std::size_t len) {
    check_owned(a, "slice");
    const Tensor& ta = nodes_[a.id].value;
    if (ta.shape().rank != 1 || offset + len > ta.size() || len == 0) {
        throw ShapeError("slice: [" + std::to_string(offset) + "," +
                         std::to_string(offset + len) + ") out of range for shape " +
                         ta.shape().str());
    }
    Tensor out(Shape::vec(len));
    std::memcpy(out.data(), ta.data() + offset, len * sizeof(double));

    Node nd;
    nd.op = OpKind::Slice;
    nd.a = a.id;
    nd.b = a.id;
    nd.off = static_cast<std::uint32_t>(offset);
    nd.len = static_cast<std::uint32_t>(len);
    nd.requires_grad = nodes_[a.id].requires_grad;
    nd.value = std::move(out);
    return push(std::move(nd));
}

Var Graph::apply_primitive(OpKind op, std::span<const Var> inputs, double aux,
                           std::size_t offset, std::size_t len) {
    switch (op) {
        case OpKind::Add: return add(inputs[0], inputs[1]);
        case OpKind::Sub: return sub(inputs[0], inputs[1]);
        case OpKind::Mul: return mul(inputs[0], inputs[1]);
        case OpKind::Div: return div(inputs[0], inputs[1]);
        case OpKind::Pinball: return pinball(inputs[0], inputs[1], aux);
        case OpKind::Neg: return neg(inputs[0]);
        case OpKind::AddConst: return add_const(inputs[0], aux);
        case OpKind::MulConst: return mul_const(inputs[0], aux);
        case OpKind::RsubConst: return rsub_const(aux, inputs[0]);
        case OpKind::MatVec: return matvec(inputs[0], inputs[1]);
        case OpKind::Concat: return concat(inputs);
        case OpKind::Slice: return slice(inputs[0], offset, len);
        case OpKind::Sigmoid: return sigmoid(inputs[0]);
        case OpKind::Tanh: return tanh(inputs[0]);
        case OpKind::Exp: return exp(inputs[0]);
        case OpKind::Log: return log(inputs[0]);
        case OpKind::Mean: return mean(inputs[0]);
        case OpKind::Sum: return sum(inputs[0]);
        default:
            throw std::logic_error("apply_primitive: not a primitive op");
    }
}

Tensor& Graph::grad_buf(std::uint32_t id) {
    if (!grad_set_[id]) {
        grads_[id] = Tensor::zeros(nodes_[id].value.shape());
        grad_set_[id] = true;
    }
    return grads_[id];
}

void Graph::backward(Var loss) {
    check_owned(loss, "backward");
    if (!nodes_[loss.id].value.shape().is_scalar()) {
        throw ShapeError("backward: loss has shape " +
                         nodes_[loss.id].value.shape().str() + ", expected a scalar");
    }
    grads_.assign(nodes_.size(), Tensor());
    grad_set_.assign(nodes_.size(), false);
    if (!nodes_[loss.id].requires_grad) {
        return; // loss does not depend on any parameter
    }
    grad_buf(loss.id)[0] = 1.0;

    // Tape order is topological, so one reverse sweep suffices.
    for (std::uint32_t id = loss.id + 1; id-- > 0;) {
        if (!grad_set_[id] || !nodes_[id].requires_grad) continue;
        const Node& nd = nodes_[id];
        const Tensor& g = grads_[id];
        const std::size_t n = g.size();

        auto want = [&](std::uint32_t in) { return nodes_[in].requires_grad; };
        // Scalar operands broadcast forward; their gradient sum-reduces back.
        auto accum_elem = [&](std::uint32_t in, auto&& fn) {
            if (!want(in)) return;
            Tensor& gi = grad_buf(in);
            if (gi.size() == n) {
                for (std::size_t i = 0; i < n; ++i) gi[i] += fn(i);
            } else { // broadcast scalar
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += fn(i);
                gi[0] += acc;
            }
        };
        const Tensor& va = nodes_[nd.a].value;
        const Tensor& vb = nodes_[nd.b].value;
        auto aval = [&](std::size_t i) { return va.size() == 1 ? va[0] : va[i]; };
        auto bval = [&](std::size_t i) { return vb.size() == 1 ? vb[0] : vb[i]; };
        const double* pg = g.data();
        const double* pv = nd.value.data();

        switch (nd.op) {
            case OpKind::Constant:
            case OpKind::Param:
                break;
            case OpKind::Add:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i]; });
                accum_elem(nd.b, [&](std::size_t i) { return pg[i]; });
                break;
            case OpKind::Sub:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i]; });
                accum_elem(nd.b, [&](std::size_t i) { return -pg[i]; });
                break;
            case OpKind::Mul:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] * bval(i); });
                accum_elem(nd.b, [&](std::size_t i) { return pg[i] * aval(i); });
                break;
            case OpKind::Div:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] / bval(i); });
                accum_elem(nd.b, [&](std::size_t i) {
                    const double b = bval(i);
                    return -pg[i] * aval(i) / (b * b);
                });
                break;
            case OpKind::Pinball:
                // d/dx rho = q or q-1; d/dxq = -(that). At the kink the
                // x >= xq branch applies (subgradient choice).
                accum_elem(nd.a, [&](std::size_t i) {
                    return pg[i] * (aval(i) >= bval(i) ? nd.aux : nd.aux - 1.0);
                });
                accum_elem(nd.b, [&](std::size_t i) {
                    return -pg[i] * (aval(i) >= bval(i) ? nd.aux : nd.aux - 1.0);
                });
                break;
            case OpKind::Neg:
                accum_elem(nd.a, [&](std::size_t i) { return -pg[i]; });
                break;
            case OpKind::AddConst:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i]; });
                break;
            case OpKind::MulConst:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] * nd.aux; });
                break;
            case OpKind::RsubConst:
                accum_elem(nd.a, [&](std::size_t i) { return -pg[i]; });
                break;
            case OpKind::Sigmoid:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] * pv[i] * (1.0 - pv[i]); });
                break;
            case OpKind::Tanh:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] * (1.0 - pv[i] * pv[i]); });
                break;
            case OpKind::Exp:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] * pv[i]; });
                break;
            case OpKind::Log:
                accum_elem(nd.a, [&](std::size_t i) { return pg[i] / aval(i); });
                break;
            case OpKind::Mean: {
                const double gs = pg[0] / static_cast<double>(va.size());
                if (want(nd.a)) {
                    Tensor& gi = grad_buf(nd.a);
                    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += gs;
                }
                break;
            }
            case OpKind::Sum: {
                const double gs = pg[0];
                if (want(nd.a)) {
                    Tensor& gi = grad_buf(nd.a);
                    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += gs;
                }
                break;
            }
            case OpKind::MatVec: {
                const std::size_t m = va.shape().rows();
                const std::size_t k = va.shape().cols();
                if (want(nd.a)) {
                    Tensor& gw = grad_buf(nd.a);
                    double* pgw = gw.data();
                    const double* px = vb.data();
                    for (std::size_t i = 0; i < m; ++i) {
                        const double gi = pg[i];
                        if (gi == 0.0) continue;
                        double* row = pgw + i * k;
                        for (std::size_t j = 0; j < k; ++j) row[j] += gi * px[j];
                    }
                }
                if (want(nd.b)) {
                    Tensor& gx = grad_buf(nd.b);
                    double* pgx = gx.data();
                    const double* pw = va.data();
                    for (std::size_t i = 0; i < m; ++i) {
                        const double gi = pg[i];
                        if (gi == 0.0) continue;
                        const double* row = pw + i * k;
                        for (std::size_t j = 0; j < k; ++j) pgx[j] += gi * row[j];
                    }
                }
                break;
            }
            case OpKind::Concat: {
                std::size_t off = 0;
                for (std::uint32_t in : nd.extra) {
                    const std::size_t sz = nodes_[in].value.size();
                    if (want(in)) {
                        Tensor& gi = grad_buf(in);
                        for (std::size_t i = 0; i < sz; ++i) gi[i] += pg[off + i];
                    }
                    off += sz;
                }
                break;
            }
            case OpKind::Slice:
                if (want(nd.a)) {
                    Tensor& gi = grad_buf(nd.a);
                    for (std::size_t i = 0; i < nd.len; ++i) gi[nd.off + i] += pg[i];
                }
                break;
        }
    }
}

bool Graph::has_grad(Var v) const {
    check_owned(v, "has_grad");
    return v.id < grad_set_.size() && grad_set_[v.id];
}

Tensor Graph::grad(Var v) const {
    check_owned(v, "grad");
    if (has_grad(v)) return grads_[v.id];
    return Tensor::zeros(nodes_[v.id].value.shape());
}

GradientMap Graph::gradients() const {
    GradientMap out;
    for (const auto& [name, id] : param_nodes_) {
        if (id < grad_set_.size() && grad_set_[id]) {
            out.emplace(name, grads_[id]);
        } else {
            out.emplace(name, Tensor::zeros(nodes_[id].value.shape()));
        }
    }
    return out;
}

} // namespace loadcast
