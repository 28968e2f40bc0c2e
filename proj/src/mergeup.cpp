#include "swsmil/mergeup.hpp"

#include <limits>

#include "swsmil/error.hpp"

namespace swsmil {

int effective_class(const PseudoBag& pb) {
    if (pb.status == PseudoBagStatus::Labeled) return pb.inherited_label;
    if (pb.prediction) return *pb.prediction;
    return pb.inherited_label;
}

MergedSample merge(const Matrix& features_a, int class_a, const Matrix& features_b, int class_b,
                   const ClassPriority& priority) {
    if (features_a.cols() != features_b.cols()) {
        throw DimensionError("merge: feature dim mismatch " + features_a.shape_str() + " vs " +
                             features_b.shape_str());
    }
    MergedSample out;
    out.features = concat_rows(features_a, features_b);
    out.label = max_priority_label(class_a, class_b, priority);
    out.merged = true;
    return out;
}

int select_partner(int target_parent_index, int target_effective_class, const PartnerPool& pool,
                   const ClassPriority& priority, Rng& rng) {
    const int target_rank = priority.rank(target_effective_class);

    std::vector<int> eligible;
    std::vector<int> filtered;
    int lowest_rank = std::numeric_limits<int>::max();
    for (size_t i = 0; i < pool.entries.size(); ++i) {
        const auto& e = pool.entries[i];
        if (e.parent_index == target_parent_index) continue;
        eligible.push_back(static_cast<int>(i));
        const int r = priority.rank(e.effective_class);
        lowest_rank = std::min(lowest_rank, r);
        if (r <= target_rank) filtered.push_back(static_cast<int>(i));
    }
    if (eligible.empty()) return -1;
    if (filtered.empty()) {
        for (int i : eligible) {
            if (priority.rank(pool.entries[i].effective_class) == lowest_rank) filtered.push_back(i);
        }
    }
    return filtered[rng.index(filtered.size())];
}

}  // namespace swsmil
