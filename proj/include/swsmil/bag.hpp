#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swsmil/matrix.hpp"

namespace swsmil {

// Total order over class indices. Merging keeps the label of whichever
// class ranks higher; the order is explicit configuration (clinical
// priority), never inferred from numeric class order.
class ClassPriority {
public:
    ClassPriority() = default;
    // names[i] is the name of class index i; ranks[i] its priority rank
    // (higher rank dominates). ranks must be a permutation of 0..C-1, C >= 2.
    ClassPriority(std::vector<std::string> names, std::vector<int> ranks);

    // Class index order == priority order (the on-disk manifest convention).
    static ClassPriority ascending(std::vector<std::string> names);

    int num_classes() const { return static_cast<int>(ranks_.size()); }
    int rank(int class_index) const;
    const std::string& name(int class_index) const;
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& ranks() const { return ranks_; }

    // Class index with the lowest / highest priority rank.
    int lowest_class() const;
    int highest_class() const;

private:
    std::vector<std::string> names_;
    std::vector<int> ranks_;
};

// Returns whichever of a, b ranks higher in p. Commutative, associative,
// idempotent.
int max_priority_label(int a, int b, const ClassPriority& p);

// A parent sample: instance feature matrix plus slide-level label.
// oracle_instance_labels exist only on synthetic data and are consumed by
// metrics/synthgen oracles; training code never reads them.
struct Bag {
    std::string id;
    Matrix features;  // N×d
    int label = 0;
    std::optional<std::vector<int>> oracle_instance_labels;  // length N when present

    int num_instances() const { return features.rows(); }
    int dim() const { return features.cols(); }
};

enum class PseudoBagStatus { Pending, Labeled, Unlabeled, Discarded };

const char* to_string(PseudoBagStatus s);

// An index subset of a parent bag, treated as a training sample. The label
// is inherited from the parent; prediction/confidence are teacher
// annotations filled in during a round.
struct PseudoBag {
    std::string parent_id;
    int parent_index = -1;           // position of the parent in Dataset::bags
    std::vector<int> member_indices;  // strictly increasing, into parent rows
    int inherited_label = 0;
    PseudoBagStatus status = PseudoBagStatus::Pending;
    std::optional<int> prediction;
    std::optional<double> confidence;

    int size() const { return static_cast<int>(member_indices.size()); }

    // Lifecycle is Pending -> {Labeled | Unlabeled | Discarded}; anything
    // else is a ContractError.
    void transition(PseudoBagStatus next);
};

enum class Split { Train, Val, Test };

const char* to_string(Split s);
std::optional<Split> split_from_string(const std::string& s);

struct Dataset {
    std::vector<Bag> bags;
    ClassPriority priority;
    std::map<std::string, Split> split;  // bag id -> split, exactly one each

    std::vector<int> indices_of(Split s) const;
    const Bag* find(const std::string& id) const;
    int dim() const { return bags.empty() ? 0 : bags.front().dim(); }
    int num_classes() const { return priority.num_classes(); }

    // Throws if ids collide, a split assignment is missing/dangling, a label
    // is out of range, or features are non-finite.
    void validate() const;
};

}  // namespace swsmil
