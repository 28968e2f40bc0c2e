#include "swsmil/iis.hpp"

#include <algorithm>
#include <cmath>

#include "swsmil/error.hpp"
#include "swsmil/rng.hpp"

namespace swsmil {

std::vector<int> sort_descending(const std::vector<double>& scores) {
    std::vector<int> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
    return order;
}

IisVector iis_attention(const MilParams& model, const Bag& bag) {
    const Prediction pred = forward(model, bag.features);
    IisVector iis;
    iis.parent_id = bag.id;
    iis.scores = pred.attention;
    iis.order = sort_descending(iis.scores);
    return iis;
}

namespace {

// Coalition value evaluator for the attention model. The per-instance
// attention logits don't depend on the coalition, so p(class | S) reduces to
// softmax-weighted pooling over running sums: adding an instance is O(d).
class CoalitionValue {
public:
    CoalitionValue(const MilParams& model, const Matrix& features, int target_class)
        : model_(model), features_(features), target_(target_class), dim_(features.cols()) {
        const Matrix hidden = tanh_ew(matmul_nt(features, model.v_att));  // N×h
        const Matrix scores = matmul_nt(model.w_att, hidden);             // 1×N
        double score_max = scores.at(0, 0);
        for (int j = 1; j < scores.cols(); ++j) score_max = std::max(score_max, scores.at(0, j));
        weights_.resize(features.rows());
        for (int j = 0; j < scores.cols(); ++j) weights_[j] = std::exp(scores.at(0, j) - score_max);
    }

    void reset() {
        weight_sum_ = 0.0;
        pooled_.assign(dim_, 0.0);
    }

    // Adds instance j to the coalition and returns p(target | coalition).
    double add(int j) {
        weight_sum_ += weights_[j];
        for (int k = 0; k < dim_; ++k) pooled_[k] += weights_[j] * features_.at(j, k);
        Matrix embedding(1, dim_);
        for (int k = 0; k < dim_; ++k) embedding.at(0, k) = pooled_[k] / weight_sum_;
        const Matrix probs = softmax_rows(add_bias(matmul_nt(embedding, model_.w_cls), model_.b_cls));
        return probs.at(0, target_);
    }

private:
    const MilParams& model_;
    const Matrix& features_;
    int target_;
    int dim_;
    std::vector<double> weights_;
    std::vector<double> pooled_;
    double weight_sum_ = 0.0;
};

}  // namespace

IisVector iis_shapley(const MilParams& model, const Bag& bag, int samples, uint64_t seed) {
    if (samples < 1) throw DomainError("iis_shapley requires samples >= 1");
    const int n = bag.num_instances();

    // Empty-coalition baseline: a bag holding only the zero vector.
    const double baseline = forward(model, Matrix(1, bag.dim())).probs[bag.label];

    CoalitionValue value(model, bag.features, bag.label);
    std::vector<double> totals(n, 0.0);
    Rng rng(sub_seed(seed, "iis_shapley"));
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int s = 0; s < samples; ++s) {
        rng.shuffle(perm);
        value.reset();
        double prev = baseline;
        for (int j : perm) {
            const double cur = value.add(j);
            totals[j] += cur - prev;
            prev = cur;
        }
    }

    IisVector iis;
    iis.parent_id = bag.id;
    iis.scores.resize(n);
    for (int j = 0; j < n; ++j) iis.scores[j] = totals[j] / samples;
    iis.order = sort_descending(iis.scores);
    return iis;
}

}  // namespace swsmil
