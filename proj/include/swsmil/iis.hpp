#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swsmil/bag.hpp"
#include "swsmil/mil_model.hpp"

namespace swsmil {

// Per-instance importance scores plus the descending order they induce.
struct IisVector {
    std::string parent_id;
    std::vector<double> scores;
    std::vector<int> order;  // permutation sorting scores descending, ties by ascending index
};

// Stable descending argsort, ties broken by ascending original index.
std::vector<int> sort_descending(const std::vector<double>& scores);

// IIS from the model's attention weights.
IisVector iis_attention(const MilParams& model, const Bag& bag);

// Monte-Carlo Shapley IIS: score_j estimates instance j's Shapley value for
// the model's probability of the bag's own class, averaging the marginal
// probability change over `samples` random instance orderings. The empty
// coalition is represented by a single zero-feature instance (the model
// needs N >= 1). Deterministic given seed.
IisVector iis_shapley(const MilParams& model, const Bag& bag, int samples, uint64_t seed);

}  // namespace swsmil
