#pragma once

#include <vector>

#include "selfboost/tensor.hpp"

namespace selfboost {

/// Reverse-mode autodiff over a recorded tape.
///
/// The forecaster's architecture is static, so differentiation needs no graph
/// compiler: every forward op appends one node whose inputs have smaller ids,
/// and backward() walks the nodes once in reverse. Composite layers (the GRU
/// cell, task branches) are built from the primitive ops below, which keeps
/// each adjoint a few lines and lets finite differences check every op in
/// isolation.
///
/// Typical batch use: add parameter leaves once, build the per-sample forward
/// subgraphs against the shared parameter leaves, combine the per-sample
/// losses with lin_comb, call backward once, read grad() per parameter leaf.
class Tape {
public:
    using Id = int;

    Tape() = default;

    /// Leaf holding a value. Gradients accumulate for leaves like any node;
    /// callers read them only for parameter leaves.
    Id leaf(Tensor value);

    // ---- elementwise ----
    Id add(Id a, Id b);
    Id mul(Id a, Id b);
    /// c0 * x + c1, elementwise with scalar coefficients.
    Id affine(Id x, double c0, double c1);
    Id sigmoid(Id x);
    Id tanh(Id x);
    Id relu(Id x);

    // ---- linear algebra ----
    /// W: [m, n], x: [n] -> [m]
    Id matvec(Id w, Id x);

    // ---- sequence ops ----
    /// input: [length, in_channels], kernels: [filters, width, in_channels],
    /// bias: [filters] -> ReLU(valid cross-correlation): [length-width+1, filters]
    Id conv1d(Id input, Id kernels, Id bias);
    /// input: [length, channels] -> [floor(length/width), channels];
    /// gradient routes to the first argmax of each window.
    Id maxpool1d(Id input, int width);
    /// Row r of a [rows, cols] matrix -> [cols].
    Id row(Id input, int r);
    /// Concatenate vectors in order -> one vector.
    Id concat(const std::vector<Id>& parts);

    // ---- reductions ----
    /// Mean squared difference over all elements -> scalar.
    Id mse(Id prediction, Id target);
    /// sum_i coeffs[i] * scalars[i] -> scalar.
    Id lin_comb(const std::vector<Id>& scalars, const std::vector<double>& coeffs);

    const Tensor& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Tensor& grad(Id id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

    /// Reverse pass from a scalar node. Throws GraphNotScalar otherwise.
    void backward(Id loss);

    int size() const { return static_cast<int>(nodes_.size()); }
    void clear() { nodes_.clear(); }

private:
    enum class Op {
        Leaf,
        Add,
        Mul,
        Affine,
        Sigmoid,
        Tanh,
        Relu,
        MatVec,
        Conv1d,
        MaxPool1d,
        Row,
        Concat,
        Mse,
        LinComb,
    };

    struct Node {
        Op op;
        std::vector<Id> args;
        Tensor value;
        Tensor grad;
        double c0 = 0.0;
        double c1 = 0.0;
        int i0 = 0;                    // pool width / row index
        std::vector<int> aux_idx;      // argmax (maxpool) or offsets (concat)
        std::vector<double> aux_coef;  // lin_comb coefficients
    };

    Id push(Node node);
    void backward_node(Node& node);

    std::vector<Node> nodes_;
};

}  // namespace selfboost
