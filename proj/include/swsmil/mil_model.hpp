#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "swsmil/matrix.hpp"
#include "swsmil/tape.hpp"

namespace swsmil {

// Attention-MIL parameters. The aggregator projects each instance with
// v_att, scores it with w_att, softmax-normalizes the scores into attention
// weights, and pools instances into a bag embedding; a single linear layer
// plus softmax classifies the embedding.
struct MilParams {
    Matrix v_att;  // h×d attention projection
    Matrix w_att;  // 1×h attention scorer
    Matrix w_cls;  // C×d classifier weights
    Matrix b_cls;  // 1×C classifier bias

    int dim() const { return v_att.cols(); }
    int hidden() const { return v_att.rows(); }
    int num_classes() const { return w_cls.rows(); }

    std::vector<Matrix*> matrices() { return {&v_att, &w_att, &w_cls, &b_cls}; }
    std::vector<const Matrix*> matrices() const { return {&v_att, &w_att, &w_cls, &b_cls}; }
};

struct Prediction {
    std::vector<double> probs;      // length C, sums to 1
    int label = 0;                  // argmax, ties to the lowest index
    double confidence = 0.0;        // max prob
    std::vector<double> attention;  // length N, sums to 1
};

// Zero-mean uniform init scaled by fan-in, biases zero. Deterministic
// given seed.
MilParams init_params(int dim, int hidden, int num_classes, uint64_t seed);

Prediction forward(const MilParams& params, const Matrix& features);

// Tape-recorded forward used by the trainer. Returns the attention and
// probability nodes; the parameter leaves are exposed so gradients can be
// read back after backward().
struct TapedMil {
    Tape::NodeId v_att;
    Tape::NodeId w_att;
    Tape::NodeId w_cls;
    Tape::NodeId b_cls;
    Tape::NodeId attention;
    Tape::NodeId probs;

    std::vector<Tape::NodeId> param_nodes() const { return {v_att, w_att, w_cls, b_cls}; }
};

TapedMil forward_taped(Tape& tape, const MilParams& params, const Matrix& features);

// Runs the classifier on parameter leaves recorded earlier, so several bags
// can share one tape (and one set of parameter nodes) per optimization step.
struct TapedHeads {
    Tape::NodeId attention;
    Tape::NodeId probs;
};
TapedHeads forward_on_tape(Tape& tape, const TapedMil& leaves, const Matrix& features);

// theta_teacher <- decay*theta_teacher + (1-decay)*theta_student, per
// coordinate. decay in [0,1].
void ema_update(MilParams& teacher, const MilParams& student, double decay);

// Checkpoint: one line of compact JSON (shapes, seed, round, parameter
// order) followed by the raw little-endian float32 payloads concatenated in
// declared order.
void save_checkpoint(const MilParams& params, const std::filesystem::path& path, uint64_t seed, int round);

struct Checkpoint {
    MilParams params;
    uint64_t seed = 0;
    int round = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace swsmil
