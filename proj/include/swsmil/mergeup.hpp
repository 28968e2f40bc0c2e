#pragma once

#include "swsmil/bag.hpp"
#include "swsmil/rng.hpp"

namespace swsmil {

// The class a pseudo bag acts as during merging: the inherited label once
// Labeled, otherwise the teacher's prediction (unlabeled bags carry no
// label of their own).
int effective_class(const PseudoBag& pb);

struct MergedSample {
    Matrix features;  // rows of a followed by rows of b
    int label = 0;    // max-priority of the two effective classes
    bool merged = false;
};

// Unions two instance sets and keeps the higher-priority label. The b-side
// is expected to come from select_partner, which only offers partners of
// equal or lower priority.
MergedSample merge(const Matrix& features_a, int class_a, const Matrix& features_b, int class_b,
                   const ClassPriority& priority);

struct PartnerPool {
    struct Entry {
        int parent_index = -1;  // Dataset bag index, used for same-parent exclusion
        int plan_parent = -1;   // RoundPlan parent slot
        int pb = -1;            // pseudo bag index within the parent plan
        int effective_class = 0;
    };
    std::vector<Entry> entries;
};

// Uniformly samples a partner whose effective class has priority <= the
// target's, never from the same parent bag. Falls back to the
// lowest-priority class present among eligible entries when the filter is
// empty; returns -1 (merge skipped) when no cross-parent partner exists.
int select_partner(int target_parent_index, int target_effective_class, const PartnerPool& pool,
                   const ClassPriority& priority, Rng& rng);

}  // namespace swsmil
