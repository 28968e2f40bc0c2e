#pragma once

#include <vector>

#include "swsmil/matrix.hpp"

namespace swsmil {

// Single-use reverse-mode tape. Nodes are appended in evaluation order, so
// creation order is already topological and backward() is one reverse sweep.
// A fresh tape is built per training sample; MergeUp changes the graph shape
// per sample and the tape absorbs that without any static graph plumbing.
//
// Only the primitives the attention-MIL graph needs exist here. Gradients are
// hand-coded per primitive and verified against central finite differences.
class Tape {
public:
    using NodeId = int;

    NodeId constant(Matrix value) { return push(std::move(value), Op::Leaf, -1, -1, 0.0, false); }
    NodeId param(Matrix value) { return push(std::move(value), Op::Leaf, -1, -1, 0.0, true); }

    NodeId matmul(NodeId a, NodeId b);     // A·B
    NodeId matmul_nt(NodeId a, NodeId b);  // A·Bᵀ
    NodeId add(NodeId a, NodeId b);
    NodeId add_bias(NodeId m, NodeId bias);
    NodeId tanh(NodeId a);
    NodeId softmax_rows(NodeId a);
    NodeId elementwise_mul(NodeId a, NodeId b);
    NodeId weighted_sum_rows(NodeId weights, NodeId m);
    NodeId log_guarded(NodeId a);  // log(max(x, kLogClamp)), clamp events counted
    NodeId reduce_sum(NodeId a);   // -> 1×1
    NodeId scale(NodeId a, double c);

    // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. The loss node
    // must be 1×1.
    void backward(NodeId loss);

    const Matrix& value(NodeId id) const { return nodes_[id].value; }
    const Matrix& grad(NodeId id) const { return nodes_[id].grad; }
    bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }
    int size() const { return static_cast<int>(nodes_.size()); }

    long log_clamp_events() const { return log_clamp_events_; }

    static constexpr double kLogClamp = 1e-12;

private:
    enum class Op {
        Leaf,
        Matmul,
        MatmulNT,
        Add,
        AddBias,
        Tanh,
        SoftmaxRows,
        ElementwiseMul,
        WeightedSumRows,
        LogGuarded,
        ReduceSum,
        Scale,
    };

    struct Node {
        Matrix value;
        Matrix grad;
        Op op;
        NodeId a;
        NodeId b;
        double c;
        bool requires_grad;
        bool touched;
    };

    NodeId push(Matrix value, Op op, NodeId a, NodeId b, double c, bool requires_grad);
    void check_id(NodeId id) const;
    Matrix& touch(NodeId id);

    std::vector<Node> nodes_;
    long log_clamp_events_ = 0;
};

}  // namespace swsmil
