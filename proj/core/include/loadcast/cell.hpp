#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "loadcast/graph.hpp"
#include "loadcast/optimizer.hpp"

namespace loadcast {

/// Gate order: fusion, update, output, candidate.
inline constexpr std::array<const char*, 4> kGateNames = {"f", "u", "o", "c"};

/// Shapes of one dilated recurrent cell. `state` is the length of the cell
/// state and real output; `control` is the length of the controlling output
/// (the first `control` components of the real output).
struct CellShape {
    std::size_t input = 0;
    std::size_t state = 0;
    std::size_t control = 0;
};

/// Creates the W/V/U/b tensors for all four gates under `prefix` in the
/// store. W maps the input, V the recent controlling state, U the delayed
/// one. Weights are uniform in +-1/sqrt(fan-in); biases zero.
void create_cell_params(ParameterStore& store, const std::string& prefix,
                        const CellShape& shape, std::mt19937_64& rng);

/// Per-graph binding of one cell's weights.
struct CellWeights {
    CellShape shape;
    std::array<Var, 4> W, V, U, b;
};

CellWeights bind_cell(Graph& g, const ParameterStore& store, const std::string& prefix,
                      const CellShape& shape);

/// Recurrent state history of one cell for one series. Histories are indexed
/// by step; lookups before the first retained step yield zero vectors, which
/// is also the semantics of looking back past the window start.
class CellHistory {
public:
    CellHistory() = default;
    CellHistory(Graph& g, const CellShape& shape, int dilation);

    bool valid() const { return g_ != nullptr; }
    std::int64_t length() const { return length_; }
    int dilation() const { return dilation_; }

    Var c_at(std::int64_t step) const;
    Var h_at(std::int64_t step) const;
    void push(Var c, Var h);
    /// Advances one step with zero states (used when a series skips a day so
    /// dilated lookbacks stay aligned to calendar time).
    void push_zero() { push(zero_c(), zero_h()); }

    /// Re-seeds the history on a fresh graph, carrying over the values of the
    /// last `keep` steps as constants. Used for forward-only stepping, where
    /// graphs are discarded day by day.
    void detach_to(Graph& g, int keep);

private:
    Graph* g_ = nullptr;
    CellShape shape_;
    int dilation_ = 1;
    std::int64_t length_ = 0;  // total steps pushed
    std::int64_t tail_start_ = 0; // step index of tail_c_[0]
    std::vector<Var> tail_c_, tail_h_;
    mutable Var zero_c_, zero_h_; // lazily created per graph

    Var zero_c() const;
    Var zero_h() const;
};

/// One step of the dilated cell:
///   g = act(W_g x + V_g h_{t-1} + U_g h_{t-d} + b_g), act = sigmoid (f,u,o) / tanh (candidate)
///   c_t = u (*) c~ + (1-u) (*) (f (*) c_{t-1} + (1-f) (*) c_{t-d})
///   y_t = o (*) tanh(c_t),  h_t = first `control` components of y_t
/// Returns y_t and appends c_t, h_t to the history.
Var drnn_cell_step(const CellWeights& w, Var x, CellHistory& history);

/// Attentive pair: the bottom cell emits an attention vector m_t of the same
/// length as x_t; exp(m_t) reweights the input of the upper cell. With
/// attention disabled the step reduces to the upper cell on the raw input.
struct AttentiveStep {
    Var y;
    Var m; // invalid when attention is disabled
};

AttentiveStep adrnn_cell_step(const CellWeights& bottom, const CellWeights& upper,
                              Var x, CellHistory& bottom_history, CellHistory& upper_history,
                              bool attention_enabled);

} // namespace loadcast
