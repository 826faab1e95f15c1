#pragma once

#include <vector>

#include "selfboost/rng.hpp"
#include "selfboost/tape.hpp"
#include "selfboost/tensor.hpp"

namespace selfboost {

/// Valid (no padding), stride-1 cross-correlation with fused ReLU.
struct Conv1dLayer {
    Tensor kernels;  // [num_filters, kernel_width, in_channels]
    Tensor biases;   // [num_filters]

    int num_filters() const { return kernels.dim(0); }
    int kernel_width() const { return kernels.dim(1); }
    int in_channels() const { return kernels.dim(2); }
};

/// Gated recurrent unit. The update gate multiplies the candidate and
/// (1 - z) multiplies the previous state:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   hc = tanh(W x + U (r . h) + bh)
///   h' = (1 - z) . h + z . hc
/// Biases on all three gates.
struct GruLayer {
    Tensor w_update, w_reset, w_cand;  // [hidden, input]
    Tensor u_update, u_reset, u_cand;  // [hidden, hidden]
    Tensor b_update, b_reset, b_cand;  // [hidden]

    int hidden_size() const { return w_update.dim(0); }
    int input_size() const { return w_update.dim(1); }
};

struct DenseLayer {
    Tensor weights;  // [out, in]
    Tensor bias;     // [out]

    int out_size() const { return weights.dim(0); }
    int in_size() const { return weights.dim(1); }
};

/// Adam optimizer state; one moment pair per parameter tensor, in the
/// model's fixed parameter order.
struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long long step_count = 0;
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;

    void init_moments(const std::vector<Tensor*>& params);
};

// ---- initialization ----

/// Uniform in +-sqrt(6 / (fan_in + fan_out)); draws consumed in row-major
/// element order so initialization is deterministic given the stream.
void init_uniform_glorot(Tensor& weights, int fan_in, int fan_out, Rng& rng);

Conv1dLayer make_conv1d(int num_filters, int kernel_width, int in_channels, Rng& rng);
GruLayer make_gru(int hidden, int input, Rng& rng);
DenseLayer make_dense(int out, int in, Rng& rng);

// ---- tape builders (composite ops on an existing tape) ----

struct GruLeafIds {
    Tape::Id w_update, w_reset, w_cand;
    Tape::Id u_update, u_reset, u_cand;
    Tape::Id b_update, b_reset, b_cand;
};

GruLeafIds gru_leaves(Tape& tape, const GruLayer& layer);
Tape::Id gru_step_on_tape(Tape& tape, const GruLeafIds& ids, Tape::Id x_t, Tape::Id h_prev);

struct DenseLeafIds {
    Tape::Id weights, bias;
};

DenseLeafIds dense_leaves(Tape& tape, const DenseLayer& layer);
Tape::Id dense_on_tape(Tape& tape, const DenseLeafIds& ids, Tape::Id input);

// ---- value-level ops (the library's plain forward surface) ----

Tensor conv1d_forward(const Conv1dLayer& layer, const Tensor& input);
Tensor maxpool1d(const Tensor& input, int pool_width);
Tensor gru_step(const GruLayer& layer, const Tensor& x_t, const Tensor& h_prev);
/// Full hidden sequence [time, hidden]; h0 = zeros when empty.
Tensor gru_sequence(const GruLayer& layer, const Tensor& inputs, const Tensor& h0 = Tensor());
Tensor dense_forward(const DenseLayer& layer, const Tensor& input);
Tensor concat(const std::vector<Tensor>& views);
double mse(const Tensor& prediction, const Tensor& target);

// ---- optimization ----

/// Scale all gradients by max_norm/norm when the global L2 norm exceeds
/// max_norm. max_norm <= 0 disables clipping. Returns the pre-clip norm.
double clip_gradients(std::vector<Tensor>& grads, double max_norm);

/// Standard Adam update with bias correction; increments step_count.
void adam_step(AdamState& state, const std::vector<Tensor*>& params,
               const std::vector<Tensor>& grads);

}  // namespace selfboost
