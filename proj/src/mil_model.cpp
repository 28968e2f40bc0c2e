#include "swsmil/mil_model.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "swsmil/error.hpp"
#include "swsmil/rng.hpp"

namespace swsmil {

namespace {

void fill_uniform(Matrix& m, double bound, Rng& rng) {
    for (double& v : m.raw()) v = rng.uniform(-bound, bound);
}

void check_dims(const MilParams& params, const Matrix& features) {
    if (features.rows() < 1) throw DimensionError("forward requires at least one instance");
    if (features.cols() != params.dim()) {
        throw DimensionError("feature dim " + std::to_string(features.cols()) + " != model dim " +
                             std::to_string(params.dim()));
    }
}

}  // namespace

MilParams init_params(int dim, int hidden, int num_classes, uint64_t seed) {
    if (dim < 1 || hidden < 1 || num_classes < 1) {
        throw DomainError("init_params requires d, h, C >= 1");
    }
    Rng rng(sub_seed(seed, "init_params"));
    MilParams p;
    p.v_att = Matrix(hidden, dim);
    p.w_att = Matrix(1, hidden);
    p.w_cls = Matrix(num_classes, dim);
    p.b_cls = Matrix(1, num_classes);
    fill_uniform(p.v_att, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
    fill_uniform(p.w_att, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
    fill_uniform(p.w_cls, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
    // biases stay zero
    return p;
}

Prediction forward(const MilParams& params, const Matrix& features) {
    check_dims(params, features);
    // scores_j = w_att · tanh(v_att · x_j), as a 1×N row
    const Matrix hidden = tanh_ew(matmul_nt(features, params.v_att));  // N×h
    const Matrix scores = matmul_nt(params.w_att, hidden);             // 1×N
    const Matrix attention = softmax_rows(scores);                     // 1×N
    const Matrix embedding = weighted_sum_rows(attention, features);   // 1×d
    const Matrix logits = add_bias(matmul_nt(embedding, params.w_cls), params.b_cls);
    const Matrix probs = softmax_rows(logits);  // 1×C

    Prediction pred;
    pred.probs.assign(probs.raw().begin(), probs.raw().end());
    pred.attention.assign(attention.raw().begin(), attention.raw().end());
    pred.label = 0;
    for (int c = 1; c < probs.cols(); ++c) {
        if (probs.at(0, c) > probs.at(0, pred.label)) pred.label = c;
    }
    pred.confidence = probs.at(0, pred.label);
    return pred;
}

TapedMil forward_taped(Tape& tape, const MilParams& params, const Matrix& features) {
    check_dims(params, features);
    TapedMil m;
    m.v_att = tape.param(params.v_att);
    m.w_att = tape.param(params.w_att);
    m.w_cls = tape.param(params.w_cls);
    m.b_cls = tape.param(params.b_cls);
    const TapedHeads heads = forward_on_tape(tape, m, features);
    m.attention = heads.attention;
    m.probs = heads.probs;
    return m;
}

TapedHeads forward_on_tape(Tape& tape, const TapedMil& leaves, const Matrix& features) {
    const Tape::NodeId feats = tape.constant(features);
    const Tape::NodeId hidden = tape.tanh(tape.matmul_nt(feats, leaves.v_att));
    const Tape::NodeId scores = tape.matmul_nt(leaves.w_att, hidden);
    const Tape::NodeId attention = tape.softmax_rows(scores);
    const Tape::NodeId embedding = tape.weighted_sum_rows(attention, feats);
    const Tape::NodeId logits = tape.add_bias(tape.matmul_nt(embedding, leaves.w_cls), leaves.b_cls);
    return TapedHeads{attention, tape.softmax_rows(logits)};
}

void ema_update(MilParams& teacher, const MilParams& student, double decay) {
    if (!(decay >= 0.0 && decay <= 1.0)) throw DomainError("ema decay must be in [0,1]");
    auto t = teacher.matrices();
    auto s = student.matrices();
    for (size_t i = 0; i < t.size(); ++i) {
        if (!t[i]->same_shape(*s[i])) throw DimensionError("ema_update: parameter shape mismatch");
        for (size_t j = 0; j < t[i]->size(); ++j) {
            t[i]->raw()[j] = decay * t[i]->raw()[j] + (1.0 - decay) * s[i]->raw()[j];
        }
    }
}

void save_checkpoint(const MilParams& params, const std::filesystem::path& path, uint64_t seed, int round) {
    nlohmann::ordered_json header;
    header["format"] = "swsmil-checkpoint";
    header["version"] = 1;
    header["d"] = params.dim();
    header["h"] = params.hidden();
    header["c"] = params.num_classes();
    header["seed"] = seed;
    header["round"] = round;
    header["params"] = {"v_att", "w_att", "w_cls", "b_cls"};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
    out << header.dump() << "\n";
    for (const Matrix* m : params.matrices()) {
        std::vector<float> buf(m->size());
        for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(m->raw()[i]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!out) throw IoError("write failure on checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("missing checkpoint: " + path.string());
    std::string header_line;
    if (!std::getline(in, header_line)) throw FormatError("checkpoint has no header: " + path.string());

    Checkpoint ckpt;
    int d = 0, h = 0, c = 0;
    try {
        const auto header = nlohmann::json::parse(header_line);
        if (header.at("format").get<std::string>() != "swsmil-checkpoint") {
            throw FormatError("not a checkpoint file: " + path.string());
        }
        d = header.at("d").get<int>();
        h = header.at("h").get<int>();
        c = header.at("c").get<int>();
        ckpt.seed = header.at("seed").get<uint64_t>();
        ckpt.round = header.at("round").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("corrupt checkpoint header in " + path.string() + ": " + e.what());
    }
    if (d < 1 || h < 1 || c < 1) throw FormatError("checkpoint header has invalid shapes");

    ckpt.params.v_att = Matrix(h, d);
    ckpt.params.w_att = Matrix(1, h);
    ckpt.params.w_cls = Matrix(c, d);
    ckpt.params.b_cls = Matrix(1, c);
    for (Matrix* m : ckpt.params.matrices()) {
        std::vector<float> buf(m->size());
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!in) throw IntegrityError("checkpoint payload truncated: " + path.string());
        for (size_t i = 0; i < buf.size(); ++i) m->raw()[i] = static_cast<double>(buf[i]);
    }
    return ckpt;
}

}  // namespace swsmil
