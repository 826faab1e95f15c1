#include "selfboost/tape.hpp"

#include <cmath>

#include "selfboost/error.hpp"

namespace selfboost {

namespace {

void require(bool cond, const char* message) {
    if (!cond) throw Error(ErrorCode::ShapeMismatch, message);
}

}  // namespace

Tape::Id Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Tensor value) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require(va.same_shape(vb), "add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.args = {a, b};
    n.value = Tensor::zeros_like(va);
    for (int i = 0; i < va.size(); ++i) n.value[i] = va[i] + vb[i];
    return push(std::move(n));
}

Tape::Id Tape::mul(Id a, Id b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require(va.same_shape(vb), "mul: shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.args = {a, b};
    n.value = Tensor::zeros_like(va);
    for (int i = 0; i < va.size(); ++i) n.value[i] = va[i] * vb[i];
    return push(std::move(n));
}

Tape::Id Tape::affine(Id x, double c0, double c1) {
    const Tensor& vx = value(x);
    Node n;
    n.op = Op::Affine;
    n.args = {x};
    n.c0 = c0;
    n.c1 = c1;
    n.value = Tensor::zeros_like(vx);
    for (int i = 0; i < vx.size(); ++i) n.value[i] = c0 * vx[i] + c1;
    return push(std::move(n));
}

Tape::Id Tape::sigmoid(Id x) {
    const Tensor& vx = value(x);
    Node n;
    n.op = Op::Sigmoid;
    n.args = {x};
    n.value = Tensor::zeros_like(vx);
    for (int i = 0; i < vx.size(); ++i) n.value[i] = 1.0 / (1.0 + std::exp(-vx[i]));
    return push(std::move(n));
}

Tape::Id Tape::tanh(Id x) {
    const Tensor& vx = value(x);
    Node n;
    n.op = Op::Tanh;
    n.args = {x};
    n.value = Tensor::zeros_like(vx);
    for (int i = 0; i < vx.size(); ++i) n.value[i] = std::tanh(vx[i]);
    return push(std::move(n));
}

Tape::Id Tape::relu(Id x) {
    const Tensor& vx = value(x);
    Node n;
    n.op = Op::Relu;
    n.args = {x};
    n.value = Tensor::zeros_like(vx);
    for (int i = 0; i < vx.size(); ++i) n.value[i] = vx[i] > 0.0 ? vx[i] : 0.0;
    return push(std::move(n));
}

Tape::Id Tape::matvec(Id w, Id x) {
    const Tensor& vw = value(w);
    const Tensor& vx = value(x);
    require(vw.rank() == 2 && vx.rank() == 1, "matvec: expected matrix and vector");
    require(vw.dim(1) == vx.dim(0), "matvec: inner dimensions differ");
    const int m = vw.dim(0);
    const int k = vw.dim(1);
    Node n;
    n.op = Op::MatVec;
    n.args = {w, x};
    n.value = Tensor({m});
    const double* wp = vw.data();
    const double* xp = vx.data();
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* wrow = wp + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) acc += wrow[j] * xp[j];
        n.value[i] = acc;
    }
    return push(std::move(n));
}

Tape::Id Tape::conv1d(Id input, Id kernels, Id bias) {
    const Tensor& vin = value(input);
    const Tensor& vk = value(kernels);
    const Tensor& vb = value(bias);
    require(vin.rank() == 2 && vk.rank() == 3 && vb.rank() == 1, "conv1d: bad ranks");
    const int length = vin.dim(0);
    const int in_channels = vin.dim(1);
    const int filters = vk.dim(0);
    const int width = vk.dim(1);
    require(vk.dim(2) == in_channels, "conv1d: kernel channels mismatch input channels");
    require(vb.dim(0) == filters, "conv1d: bias size mismatch filter count");
    require(length >= width, "conv1d: input shorter than kernel width");

    const int out_len = length - width + 1;
    Node n;
    n.op = Op::Conv1d;
    n.args = {input, kernels, bias};
    n.value = Tensor({out_len, filters});
    for (int t = 0; t < out_len; ++t) {
        for (int f = 0; f < filters; ++f) {
            double acc = vb.at(f);
            for (int w = 0; w < width; ++w) {
                for (int c = 0; c < in_channels; ++c) {
                    acc += vk.at(f, w, c) * vin.at(t + w, c);
                }
            }
            n.value.at(t, f) = acc > 0.0 ? acc : 0.0;  // ReLU fused
        }
    }
    return push(std::move(n));
}

Tape::Id Tape::maxpool1d(Id input, int width) {
    const Tensor& vin = value(input);
    require(vin.rank() == 2, "maxpool1d: expected [length, channels]");
    require(width >= 1 && vin.dim(0) >= width, "maxpool1d: input shorter than pool width");
    const int length = vin.dim(0);
    const int channels = vin.dim(1);
    const int out_len = length / width;
    Node n;
    n.op = Op::MaxPool1d;
    n.args = {input};
    n.i0 = width;
    n.value = Tensor({out_len, channels});
    n.aux_idx.resize(static_cast<std::size_t>(out_len) * channels);
    for (int t = 0; t < out_len; ++t) {
        for (int c = 0; c < channels; ++c) {
            int best = t * width;
            double best_v = vin.at(best, c);
            for (int o = 1; o < width; ++o) {
                const double v = vin.at(t * width + o, c);
                if (v > best_v) {  // ties keep the first occurrence
                    best_v = v;
                    best = t * width + o;
                }
            }
            n.value.at(t, c) = best_v;
            n.aux_idx[static_cast<std::size_t>(t) * channels + c] = best;
        }
    }
    return push(std::move(n));
}

Tape::Id Tape::row(Id input, int r) {
    const Tensor& vin = value(input);
    require(vin.rank() == 2, "row: expected a matrix");
    require(r >= 0 && r < vin.dim(0), "row: index out of range");
    const int cols = vin.dim(1);
    Node n;
    n.op = Op::Row;
    n.args = {input};
    n.i0 = r;
    n.value = Tensor({cols});
    for (int j = 0; j < cols; ++j) n.value[j] = vin.at(r, j);
    return push(std::move(n));
}

Tape::Id Tape::concat(const std::vector<Id>& parts) {
    require(!parts.empty(), "concat: no parts");
    int total = 0;
    for (Id p : parts) {
        require(value(p).rank() == 1, "concat: expected vectors");
        total += value(p).dim(0);
    }
    Node n;
    n.op = Op::Concat;
    n.args = parts;
    n.value = Tensor({total});
    n.aux_idx.reserve(parts.size());
    int offset = 0;
    for (Id p : parts) {
        n.aux_idx.push_back(offset);
        const Tensor& vp = value(p);
        for (int i = 0; i < vp.size(); ++i) n.value[offset + i] = vp[i];
        offset += vp.size();
    }
    return push(std::move(n));
}

Tape::Id Tape::mse(Id prediction, Id target) {
    const Tensor& vp = value(prediction);
    const Tensor& vt = value(target);
    require(vp.same_shape(vt), "mse: shape mismatch");
    double acc = 0.0;
    for (int i = 0; i < vp.size(); ++i) {
        const double d = vp[i] - vt[i];
        acc += d * d;
    }
    Node n;
    n.op = Op::Mse;
    n.args = {prediction, target};
    n.value = Tensor::scalar(acc / vp.size());
    return push(std::move(n));
}

Tape::Id Tape::lin_comb(const std::vector<Id>& scalars, const std::vector<double>& coeffs) {
    require(!scalars.empty() && scalars.size() == coeffs.size(), "lin_comb: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        require(value(scalars[i]).size() == 1, "lin_comb: arguments must be scalars");
        acc += coeffs[i] * value(scalars[i])[0];
    }
    Node n;
    n.op = Op::LinComb;
    n.args = scalars;
    n.aux_coef = coeffs;
    n.value = Tensor::scalar(acc);
    return push(std::move(n));
}

void Tape::backward(Id loss) {
    Node& last = nodes_[static_cast<std::size_t>(loss)];
    if (last.value.size() != 1) {
        throw Error(ErrorCode::GraphNotScalar, "backward: loss node is not a scalar");
    }
    for (auto& n : nodes_) {
        n.grad = Tensor::zeros_like(n.value);
    }
    last.grad[0] = 1.0;
    for (Id id = loss; id >= 0; --id) {
        backward_node(nodes_[static_cast<std::size_t>(id)]);
    }
}

void Tape::backward_node(Node& node) {
    auto g = [&](Id id) -> Tensor& { return nodes_[static_cast<std::size_t>(id)].grad; };
    auto v = [&](Id id) -> const Tensor& { return nodes_[static_cast<std::size_t>(id)].value; };

    switch (node.op) {
        case Op::Leaf:
            break;
        case Op::Add: {
            Tensor& ga = g(node.args[0]);
            Tensor& gb = g(node.args[1]);
            for (int i = 0; i < node.grad.size(); ++i) {
                ga[i] += node.grad[i];
                gb[i] += node.grad[i];
            }
            break;
        }
        case Op::Mul: {
            Tensor& ga = g(node.args[0]);
            Tensor& gb = g(node.args[1]);
            const Tensor& va = v(node.args[0]);
            const Tensor& vb = v(node.args[1]);
            for (int i = 0; i < node.grad.size(); ++i) {
                ga[i] += node.grad[i] * vb[i];
                gb[i] += node.grad[i] * va[i];
            }
            break;
        }
        case Op::Affine: {
            Tensor& gx = g(node.args[0]);
            for (int i = 0; i < node.grad.size(); ++i) gx[i] += node.c0 * node.grad[i];
            break;
        }
        case Op::Sigmoid: {
            Tensor& gx = g(node.args[0]);
            for (int i = 0; i < node.grad.size(); ++i) {
                const double s = node.value[i];
                gx[i] += node.grad[i] * s * (1.0 - s);
            }
            break;
        }
        case Op::Tanh: {
            Tensor& gx = g(node.args[0]);
            for (int i = 0; i < node.grad.size(); ++i) {
                const double t = node.value[i];
                gx[i] += node.grad[i] * (1.0 - t * t);
            }
            break;
        }
        case Op::Relu: {
            Tensor& gx = g(node.args[0]);
            for (int i = 0; i < node.grad.size(); ++i) {
                if (node.value[i] > 0.0) gx[i] += node.grad[i];
            }
            break;
        }
        case Op::MatVec: {
            Tensor& gw = g(node.args[0]);
            Tensor& gx = g(node.args[1]);
            const Tensor& vw = v(node.args[0]);
            const Tensor& vx = v(node.args[1]);
            const int m = vw.dim(0);
            const int k = vw.dim(1);
            for (int i = 0; i < m; ++i) {
                const double gi = node.grad[i];
                if (gi == 0.0) continue;
                double* gwrow = gw.data() + static_cast<std::size_t>(i) * k;
                const double* wrow = vw.data() + static_cast<std::size_t>(i) * k;
                for (int j = 0; j < k; ++j) {
                    gwrow[j] += gi * vx[j];
                    gx[j] += gi * wrow[j];
                }
            }
            break;
        }
        case Op::Conv1d: {
            Tensor& gin = g(node.args[0]);
            Tensor& gk = g(node.args[1]);
            Tensor& gb = g(node.args[2]);
            const Tensor& vin = v(node.args[0]);
            const Tensor& vk = v(node.args[1]);
            const int out_len = node.value.dim(0);
            const int filters = node.value.dim(1);
            const int width = vk.dim(1);
            const int in_channels = vk.dim(2);
            for (int t = 0; t < out_len; ++t) {
                for (int f = 0; f < filters; ++f) {
                    if (node.value.at(t, f) <= 0.0) continue;  // ReLU gate
                    const double gtf = node.grad.at(t, f);
                    if (gtf == 0.0) continue;
                    gb[f] += gtf;
                    for (int w = 0; w < width; ++w) {
                        for (int c = 0; c < in_channels; ++c) {
                            gk.at(f, w, c) += gtf * vin.at(t + w, c);
                            gin.at(t + w, c) += gtf * vk.at(f, w, c);
                        }
                    }
                }
            }
            break;
        }
        case Op::MaxPool1d: {
            Tensor& gin = g(node.args[0]);
            const int channels = node.value.dim(1);
            for (int t = 0; t < node.value.dim(0); ++t) {
                for (int c = 0; c < channels; ++c) {
                    gin.at(node.aux_idx[static_cast<std::size_t>(t) * channels + c], c) +=
                        node.grad.at(t, c);
                }
            }
            break;
        }
        case Op::Row: {
            Tensor& gin = g(node.args[0]);
            for (int j = 0; j < node.value.size(); ++j) gin.at(node.i0, j) += node.grad[j];
            break;
        }
        case Op::Concat: {
            for (std::size_t p = 0; p < node.args.size(); ++p) {
                Tensor& gp = g(node.args[p]);
                const int offset = node.aux_idx[p];
                for (int i = 0; i < gp.size(); ++i) gp[i] += node.grad[offset + i];
            }
            break;
        }
        case Op::Mse: {
            Tensor& gp = g(node.args[0]);
            Tensor& gt = g(node.args[1]);
            const Tensor& vp = v(node.args[0]);
            const Tensor& vt = v(node.args[1]);
            const double scale = 2.0 * node.grad[0] / vp.size();
            for (int i = 0; i < vp.size(); ++i) {
                const double d = scale * (vp[i] - vt[i]);
                gp[i] += d;
                gt[i] -= d;
            }
            break;
        }
        case Op::LinComb: {
            for (std::size_t i = 0; i < node.args.size(); ++i) {
                g(node.args[i])[0] += node.aux_coef[i] * node.grad[0];
            }
            break;
        }
    }
}

}  // namespace selfboost
