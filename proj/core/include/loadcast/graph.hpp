#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "loadcast/tensor.hpp"

namespace loadcast {

class Graph;

/// Primitive operations recorded on the tape. The set covers every
/// function the model's forward pass is built from.
enum class OpKind : std::uint8_t {
    Constant,
    Param,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    AddConst,  // x + c
    MulConst,  // x * c
    RsubConst, // c - x
    MatVec,
    Concat,
    Slice,
    Sigmoid,
    Tanh,
    Exp,
    Log,
    Mean,
    Sum,
    Pinball, // elementwise pinball(actual, pred, q)
};

const char* op_name(OpKind op);

/// Handle to a node on a Graph's tape.
struct Var {
    Graph* graph = nullptr;
    std::uint32_t id = 0;

    bool valid() const { return graph != nullptr; }
};

using GradientMap = std::map<std::string, Tensor>;

/// Tape for reverse-mode automatic differentiation. Nodes are recorded
/// in construction order, which is already topological: every node's
/// inputs precede it. A graph is built per training step and discarded
/// after the optimizer update (dynamic graph).
///
/// Single-threaded per instance; distinct graphs are fully independent.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Tensor value);
    Var constant(double value) { return constant(Tensor::scalar(value)); }
    Var constant_vec(std::vector<double> values) { return constant(Tensor::vec(std::move(values))); }

    /// Named leaf that collects gradient. Requesting the same name twice
    /// returns the original node so gradients never split across copies.
    Var param(const std::string& name, const Tensor& value);

    const Tensor& value(Var v) const;
    double scalar(Var v) const { return value(v).item(); }

    /// Reverse sweep from a scalar loss. Fills per-node gradients for every
    /// node that (transitively) depends on a Param leaf.
    void backward(Var loss);

    bool has_grad(Var v) const;
    /// Gradient of the last backward()'s loss w.r.t. this node.
    /// Zero tensor if the node was not reached.
    Tensor grad(Var v) const;

    /// name -> gradient for every registered Param; unreached parameters
    /// get zero gradients.
    GradientMap gradients() const;

    std::size_t node_count() const { return nodes_.size(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    // -- op builders ------------------------------------------------------
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);
    Var neg(Var a);
    Var add_const(Var a, double c);
    Var mul_const(Var a, double c);
    Var rsub_const(double c, Var a);
    Var matvec(Var w, Var x);
    Var concat(std::span<const Var> parts);
    Var concat(std::initializer_list<Var> parts) {
        return concat(std::span<const Var>(parts.begin(), parts.size()));
    }
    Var concat(const std::vector<Var>& parts) {
        return concat(std::span<const Var>(parts.data(), parts.size()));
    }
    Var slice(Var a, std::size_t offset, std::size_t len);
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var mean(Var a);
    Var sum(Var a);
    Var pinball(Var actual, Var pred, double q);

    /// Generic dispatch over the primitive set; used by property tests to
    /// sweep every op through one entry point.
    Var apply_primitive(OpKind op, std::span<const Var> inputs, double aux = 0.0,
                        std::size_t offset = 0, std::size_t len = 0);

private:
    struct Node {
        OpKind op;
        bool requires_grad = false;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        double aux = 0.0;
        std::uint32_t off = 0;
        std::uint32_t len = 0;
        std::vector<std::uint32_t> extra; // concat inputs
        Tensor value;
        std::int32_t name_idx = -1;
    };

    Var push(Node n);
    Var emit_binary(OpKind op, Var a, Var b, double aux = 0.0);
    Var emit_unary(OpKind op, Var a, double aux = 0.0);
    const Node& node(Var v) const;
    void check_owned(Var v, const char* where) const;
    Tensor& grad_buf(std::uint32_t id);

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_; // aligned with nodes_, empty shape-0 slots unused
    std::vector<bool> grad_set_;
    std::vector<std::pair<std::string, std::uint32_t>> param_nodes_;
    std::unordered_map<std::string, std::uint32_t> param_index_;
};

// Operator sugar so model code reads like the underlying math.
inline Var operator+(Var a, Var b) { return a.graph->add(a, b); }
inline Var operator-(Var a, Var b) { return a.graph->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.graph->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.graph->div(a, b); }
inline Var operator-(Var a) { return a.graph->neg(a); }
inline Var operator+(Var a, double c) { return a.graph->add_const(a, c); }
inline Var operator+(double c, Var a) { return a.graph->add_const(a, c); }
inline Var operator-(Var a, double c) { return a.graph->add_const(a, -c); }
inline Var operator-(double c, Var a) { return a.graph->rsub_const(c, a); }
inline Var operator*(Var a, double c) { return a.graph->mul_const(a, c); }
inline Var operator*(double c, Var a) { return a.graph->mul_const(a, c); }
inline Var operator/(Var a, double c) { return a.graph->mul_const(a, 1.0 / c); }

inline Var sigmoid(Var a) { return a.graph->sigmoid(a); }
inline Var tanh(Var a) { return a.graph->tanh(a); }
inline Var exp(Var a) { return a.graph->exp(a); }
inline Var log(Var a) { return a.graph->log(a); }
inline Var mean(Var a) { return a.graph->mean(a); }
inline Var sum(Var a) { return a.graph->sum(a); }
inline Var matvec(Var w, Var x) { return w.graph->matvec(w, x); }
inline Var slice(Var a, std::size_t off, std::size_t len) { return a.graph->slice(a, off, len); }
inline Var concat(std::span<const Var> parts) { return parts[0].graph->concat(parts); }
inline Var concat(std::initializer_list<Var> parts) {
    return std::span<const Var>(parts.begin(), parts.size())[0].graph->concat(
        std::span<const Var>(parts.begin(), parts.size()));
}
inline Var pinball(Var actual, Var pred, double q) { return pred.graph->pinball(actual, pred, q); }

} // namespace loadcast
