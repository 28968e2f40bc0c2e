#include "swsmil/tape.hpp"

#include <cmath>
#include <string>

#include "swsmil/error.hpp"

namespace swsmil {

Tape::NodeId Tape::push(Matrix value, Op op, NodeId a, NodeId b, double c, bool requires_grad) {
    Node n;
    n.value = std::move(value);
    n.op = op;
    n.a = a;
    n.b = b;
    n.c = c;
    n.requires_grad = requires_grad;
    n.touched = false;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

void Tape::check_id(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
        throw ContractError("tape node id out of range: " + std::to_string(id));
    }
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    return push(swsmil::matmul(nodes_[a].value, nodes_[b].value), Op::Matmul, a, b, 0.0, false);
}

Tape::NodeId Tape::matmul_nt(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    return push(swsmil::matmul_nt(nodes_[a].value, nodes_[b].value), Op::MatmulNT, a, b, 0.0, false);
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    return push(swsmil::add(nodes_[a].value, nodes_[b].value), Op::Add, a, b, 0.0, false);
}

Tape::NodeId Tape::add_bias(NodeId m, NodeId bias) {
    check_id(m);
    check_id(bias);
    return push(swsmil::add_bias(nodes_[m].value, nodes_[bias].value), Op::AddBias, m, bias, 0.0, false);
}

Tape::NodeId Tape::tanh(NodeId a) {
    check_id(a);
    return push(tanh_ew(nodes_[a].value), Op::Tanh, a, -1, 0.0, false);
}

Tape::NodeId Tape::softmax_rows(NodeId a) {
    check_id(a);
    return push(swsmil::softmax_rows(nodes_[a].value), Op::SoftmaxRows, a, -1, 0.0, false);
}

Tape::NodeId Tape::elementwise_mul(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    return push(swsmil::elementwise_mul(nodes_[a].value, nodes_[b].value), Op::ElementwiseMul, a, b, 0.0, false);
}

Tape::NodeId Tape::weighted_sum_rows(NodeId weights, NodeId m) {
    check_id(weights);
    check_id(m);
    return push(swsmil::weighted_sum_rows(nodes_[weights].value, nodes_[m].value), Op::WeightedSumRows, weights, m,
                0.0, false);
}

Tape::NodeId Tape::log_guarded(NodeId a) {
    check_id(a);
    const Matrix& x = nodes_[a].value;
    Matrix y = x;
    for (double& v : y.raw()) {
        if (v < kLogClamp) {
            ++log_clamp_events_;
            v = std::log(kLogClamp);
        } else {
            v = std::log(v);
        }
    }
    return push(std::move(y), Op::LogGuarded, a, -1, 0.0, false);
}

Tape::NodeId Tape::reduce_sum(NodeId a) {
    check_id(a);
    Matrix s(1, 1);
    s.at(0, 0) = swsmil::reduce_sum(nodes_[a].value);
    return push(std::move(s), Op::ReduceSum, a, -1, 0.0, false);
}

Tape::NodeId Tape::scale(NodeId a, double c) {
    check_id(a);
    return push(swsmil::scale(nodes_[a].value, c), Op::Scale, a, -1, c, false);
}

Matrix& Tape::touch(NodeId id) {
    Node& n = nodes_[id];
    if (!n.touched) {
        n.grad = Matrix(n.value.rows(), n.value.cols());
        n.touched = true;
    }
    return n.grad;
}

void Tape::backward(NodeId loss) {
    check_id(loss);
    const Node& loss_node = nodes_[loss];
    if (loss_node.value.rows() != 1 || loss_node.value.cols() != 1) {
        throw ContractError("backward requires a scalar loss node, got " + loss_node.value.shape_str());
    }
    touch(loss).at(0, 0) = 1.0;

    for (NodeId id = loss; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.touched || n.op == Op::Leaf) continue;
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Matmul: {
                // C = A·B: dA = dC·Bᵀ, dB = Aᵀ·dC
                const Matrix& A = nodes_[n.a].value;
                const Matrix& B = nodes_[n.b].value;
                Matrix& ga = touch(n.a);
                for (int i = 0; i < A.rows(); ++i)
                    for (int k = 0; k < A.cols(); ++k) {
                        double acc = 0.0;
                        for (int j = 0; j < B.cols(); ++j) acc += g.at(i, j) * B.at(k, j);
                        ga.at(i, k) += acc;
                    }
                Matrix& gb = touch(n.b);
                for (int k = 0; k < B.rows(); ++k)
                    for (int j = 0; j < B.cols(); ++j) {
                        double acc = 0.0;
                        for (int i = 0; i < A.rows(); ++i) acc += A.at(i, k) * g.at(i, j);
                        gb.at(k, j) += acc;
                    }
                break;
            }
            case Op::MatmulNT: {
                // C = A·Bᵀ: dA = dC·B, dB = dCᵀ·A
                const Matrix& A = nodes_[n.a].value;
                const Matrix& B = nodes_[n.b].value;
                Matrix& ga = touch(n.a);
                for (int i = 0; i < A.rows(); ++i)
                    for (int k = 0; k < A.cols(); ++k) {
                        double acc = 0.0;
                        for (int j = 0; j < B.rows(); ++j) acc += g.at(i, j) * B.at(j, k);
                        ga.at(i, k) += acc;
                    }
                Matrix& gb = touch(n.b);
                for (int j = 0; j < B.rows(); ++j)
                    for (int k = 0; k < B.cols(); ++k) {
                        double acc = 0.0;
                        for (int i = 0; i < A.rows(); ++i) acc += g.at(i, j) * A.at(i, k);
                        gb.at(j, k) += acc;
                    }
                break;
            }
            case Op::Add: {
                Matrix& ga = touch(n.a);
                Matrix& gb = touch(n.b);
                for (size_t i = 0; i < g.size(); ++i) {
                    ga.raw()[i] += g.raw()[i];
                    gb.raw()[i] += g.raw()[i];
                }
                break;
            }
            case Op::AddBias: {
                Matrix& gm = touch(n.a);
                Matrix& gb = touch(n.b);
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < g.cols(); ++j) {
                        gm.at(i, j) += g.at(i, j);
                        gb.at(0, j) += g.at(i, j);
                    }
                break;
            }
            case Op::Tanh: {
                Matrix& ga = touch(n.a);
                const Matrix& y = n.value;
                for (size_t i = 0; i < g.size(); ++i) {
                    ga.raw()[i] += g.raw()[i] * (1.0 - y.raw()[i] * y.raw()[i]);
                }
                break;
            }
            case Op::SoftmaxRows: {
                // per row: dx = (dy - (dy·y)) ⊙ y
                Matrix& ga = touch(n.a);
                const Matrix& y = n.value;
                for (int i = 0; i < y.rows(); ++i) {
                    double dot = 0.0;
                    for (int j = 0; j < y.cols(); ++j) dot += g.at(i, j) * y.at(i, j);
                    for (int j = 0; j < y.cols(); ++j) {
                        ga.at(i, j) += (g.at(i, j) - dot) * y.at(i, j);
                    }
                }
                break;
            }
            case Op::ElementwiseMul: {
                Matrix& ga = touch(n.a);
                Matrix& gb = touch(n.b);
                const Matrix& A = nodes_[n.a].value;
                const Matrix& B = nodes_[n.b].value;
                for (size_t i = 0; i < g.size(); ++i) {
                    ga.raw()[i] += g.raw()[i] * B.raw()[i];
                    gb.raw()[i] += g.raw()[i] * A.raw()[i];
                }
                break;
            }
            case Op::WeightedSumRows: {
                // z = w·V: dw = dz·Vᵀ, dV = wᵀ·dz
                const Matrix& w = nodes_[n.a].value;
                const Matrix& V = nodes_[n.b].value;
                Matrix& gw = touch(n.a);
                Matrix& gV = touch(n.b);
                for (int r = 0; r < V.rows(); ++r) {
                    double acc = 0.0;
                    for (int j = 0; j < V.cols(); ++j) {
                        acc += g.at(0, j) * V.at(r, j);
                        gV.at(r, j) += w.at(0, r) * g.at(0, j);
                    }
                    gw.at(0, r) += acc;
                }
                break;
            }
            case Op::LogGuarded: {
                Matrix& ga = touch(n.a);
                const Matrix& x = nodes_[n.a].value;
                for (size_t i = 0; i < g.size(); ++i) {
                    if (x.raw()[i] >= kLogClamp) {
                        ga.raw()[i] += g.raw()[i] / x.raw()[i];
                    }
                }
                break;
            }
            case Op::ReduceSum: {
                Matrix& ga = touch(n.a);
                const double gs = g.at(0, 0);
                for (double& v : ga.raw()) v += gs;
                break;
            }
            case Op::Scale: {
                Matrix& ga = touch(n.a);
                for (size_t i = 0; i < g.size(); ++i) ga.raw()[i] += n.c * g.raw()[i];
                break;
            }
            case Op::Leaf:
                break;
        }
    }
}

}  // namespace swsmil
