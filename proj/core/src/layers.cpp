#include "selfboost/layers.hpp"

#include <cmath>

#include "selfboost/error.hpp"

namespace selfboost {

void AdamState::init_moments(const std::vector<Tensor*>& params) {
    first_moment.clear();
    second_moment.clear();
    for (const Tensor* p : params) {
        first_moment.push_back(Tensor::zeros_like(*p));
        second_moment.push_back(Tensor::zeros_like(*p));
    }
    step_count = 0;
}

void init_uniform_glorot(Tensor& weights, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (int i = 0; i < weights.size(); ++i) weights[i] = rng.uniform(-limit, limit);
}

Conv1dLayer make_conv1d(int num_filters, int kernel_width, int in_channels, Rng& rng) {
    Conv1dLayer layer;
    layer.kernels = Tensor({num_filters, kernel_width, in_channels});
    layer.biases = Tensor({num_filters});
    init_uniform_glorot(layer.kernels, kernel_width * in_channels, kernel_width * num_filters, rng);
    return layer;
}

GruLayer make_gru(int hidden, int input, Rng& rng) {
    GruLayer layer;
    auto make_w = [&] {
        Tensor t({hidden, input});
        init_uniform_glorot(t, input, hidden, rng);
        return t;
    };
    auto make_u = [&] {
        Tensor t({hidden, hidden});
        init_uniform_glorot(t, hidden, hidden, rng);
        return t;
    };
    layer.w_update = make_w();
    layer.u_update = make_u();
    layer.b_update = Tensor({hidden});
    layer.w_reset = make_w();
    layer.u_reset = make_u();
    layer.b_reset = Tensor({hidden});
    layer.w_cand = make_w();
    layer.u_cand = make_u();
    layer.b_cand = Tensor({hidden});
    return layer;
}

DenseLayer make_dense(int out, int in, Rng& rng) {
    DenseLayer layer;
    layer.weights = Tensor({out, in});
    layer.bias = Tensor({out});
    init_uniform_glorot(layer.weights, in, out, rng);
    return layer;
}

GruLeafIds gru_leaves(Tape& tape, const GruLayer& layer) {
    GruLeafIds ids;
    ids.w_update = tape.leaf(layer.w_update);
    ids.u_update = tape.leaf(layer.u_update);
    ids.b_update = tape.leaf(layer.b_update);
    ids.w_reset = tape.leaf(layer.w_reset);
    ids.u_reset = tape.leaf(layer.u_reset);
    ids.b_reset = tape.leaf(layer.b_reset);
    ids.w_cand = tape.leaf(layer.w_cand);
    ids.u_cand = tape.leaf(layer.u_cand);
    ids.b_cand = tape.leaf(layer.b_cand);
    return ids;
}

Tape::Id gru_step_on_tape(Tape& tape, const GruLeafIds& ids, Tape::Id x_t, Tape::Id h_prev) {
    const auto gate = [&](Tape::Id w, Tape::Id u, Tape::Id b, Tape::Id h) {
        return tape.add(tape.add(tape.matvec(w, x_t), tape.matvec(u, h)), b);
    };
    const Tape::Id z = tape.sigmoid(gate(ids.w_update, ids.u_update, ids.b_update, h_prev));
    const Tape::Id r = tape.sigmoid(gate(ids.w_reset, ids.u_reset, ids.b_reset, h_prev));
    const Tape::Id gated_h = tape.mul(r, h_prev);
    const Tape::Id cand = tape.tanh(
        tape.add(tape.add(tape.matvec(ids.w_cand, x_t), tape.matvec(ids.u_cand, gated_h)),
                 ids.b_cand));
    // h' = (1 - z) . h_prev + z . cand, exactly as the gate convention states
    return tape.add(tape.mul(tape.affine(z, -1.0, 1.0), h_prev), tape.mul(z, cand));
}

DenseLeafIds dense_leaves(Tape& tape, const DenseLayer& layer) {
    return {tape.leaf(layer.weights), tape.leaf(layer.bias)};
}

Tape::Id dense_on_tape(Tape& tape, const DenseLeafIds& ids, Tape::Id input) {
    return tape.add(tape.matvec(ids.weights, input), ids.bias);
}

Tensor conv1d_forward(const Conv1dLayer& layer, const Tensor& input) {
    Tape tape;
    const auto out = tape.conv1d(tape.leaf(input), tape.leaf(layer.kernels), tape.leaf(layer.biases));
    return tape.value(out);
}

Tensor maxpool1d(const Tensor& input, int pool_width) {
    Tape tape;
    const auto out = tape.maxpool1d(tape.leaf(input), pool_width);
    return tape.value(out);
}

Tensor gru_step(const GruLayer& layer, const Tensor& x_t, const Tensor& h_prev) {
    Tape tape;
    const auto ids = gru_leaves(tape, layer);
    const auto out = gru_step_on_tape(tape, ids, tape.leaf(x_t), tape.leaf(h_prev));
    return tape.value(out);
}

Tensor gru_sequence(const GruLayer& layer, const Tensor& inputs, const Tensor& h0) {
    if (inputs.rank() != 2 || inputs.dim(1) != layer.input_size()) {
        throw Error(ErrorCode::ShapeMismatch, "gru_sequence: expected [time, input_size]");
    }
    const int time = inputs.dim(0);
    const int hidden = layer.hidden_size();
    Tensor h = h0.empty() ? Tensor({hidden}) : h0;
    if (h.size() != hidden) {
        throw Error(ErrorCode::ShapeMismatch, "gru_sequence: h0 size mismatch");
    }
    Tensor out({time, hidden});
    for (int t = 0; t < time; ++t) {
        Tensor x_t({inputs.dim(1)});
        for (int j = 0; j < inputs.dim(1); ++j) x_t[j] = inputs.at(t, j);
        h = gru_step(layer, x_t, h);
        for (int j = 0; j < hidden; ++j) out.at(t, j) = h[j];
    }
    return out;
}

Tensor dense_forward(const DenseLayer& layer, const Tensor& input) {
    Tape tape;
    const auto ids = dense_leaves(tape, layer);
    const auto out = dense_on_tape(tape, ids, tape.leaf(input));
    return tape.value(out);
}

Tensor concat(const std::vector<Tensor>& views) {
    Tape tape;
    std::vector<Tape::Id> ids;
    ids.reserve(views.size());
    for (const auto& v : views) ids.push_back(tape.leaf(v));
    return tape.value(tape.concat(ids));
}

double mse(const Tensor& prediction, const Tensor& target) {
    Tape tape;
    return tape.value(tape.mse(tape.leaf(prediction), tape.leaf(target)))[0];
}

double clip_gradients(std::vector<Tensor>& grads, double max_norm) {
    double sq = 0.0;
    for (const auto& g : grads) {
        for (int i = 0; i < g.size(); ++i) sq += g[i] * g[i];
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto& g : grads) {
            for (int i = 0; i < g.size(); ++i) g[i] *= scale;
        }
    }
    return norm;
}

void adam_step(AdamState& state, const std::vector<Tensor*>& params,
               const std::vector<Tensor>& grads) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw Error(ErrorCode::ShapeMismatch, "adam_step: parameter/gradient/moment count mismatch");
    }
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p];
        const Tensor& g = grads[p];
        if (!theta.same_shape(g)) {
            throw Error(ErrorCode::ShapeMismatch, "adam_step: gradient shape mismatch");
        }
        Tensor& m = state.first_moment[p];
        Tensor& v = state.second_moment[p];
        for (int i = 0; i < theta.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            theta[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

}  // namespace selfboost
