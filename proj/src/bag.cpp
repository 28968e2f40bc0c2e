#include "swsmil/bag.hpp"

#include <algorithm>
#include <set>

#include "swsmil/error.hpp"

namespace swsmil {

ClassPriority::ClassPriority(std::vector<std::string> names, std::vector<int> ranks)
    : names_(std::move(names)), ranks_(std::move(ranks)) {
    const int c = static_cast<int>(ranks_.size());
    if (c < 2) throw DomainError("class priority needs at least 2 classes");
    if (names_.size() != ranks_.size()) {
        throw DomainError("class priority names/ranks length mismatch");
    }
    std::vector<bool> seen(c, false);
    for (int r : ranks_) {
        if (r < 0 || r >= c || seen[r]) {
            throw DomainError("class priority ranks must be a permutation of 0.." + std::to_string(c - 1));
        }
        seen[r] = true;
    }
}

ClassPriority ClassPriority::ascending(std::vector<std::string> names) {
    std::vector<int> ranks(names.size());
    for (size_t i = 0; i < ranks.size(); ++i) ranks[i] = static_cast<int>(i);
    return ClassPriority(std::move(names), std::move(ranks));
}

int ClassPriority::rank(int class_index) const {
    if (class_index < 0 || class_index >= num_classes()) {
        throw DomainError("class index " + std::to_string(class_index) + " out of range");
    }
    return ranks_[class_index];
}

const std::string& ClassPriority::name(int class_index) const {
    if (class_index < 0 || class_index >= num_classes()) {
        throw DomainError("class index " + std::to_string(class_index) + " out of range");
    }
    return names_[class_index];
}

int ClassPriority::lowest_class() const {
    int best = 0;
    for (int i = 1; i < num_classes(); ++i) {
        if (ranks_[i] < ranks_[best]) best = i;
    }
    return best;
}

int ClassPriority::highest_class() const {
    int best = 0;
    for (int i = 1; i < num_classes(); ++i) {
        if (ranks_[i] > ranks_[best]) best = i;
    }
    return best;
}

int max_priority_label(int a, int b, const ClassPriority& p) {
    return p.rank(a) >= p.rank(b) ? a : b;
}

const char* to_string(PseudoBagStatus s) {
    switch (s) {
        case PseudoBagStatus::Pending: return "pending";
        case PseudoBagStatus::Labeled: return "labeled";
        case PseudoBagStatus::Unlabeled: return "unlabeled";
        case PseudoBagStatus::Discarded: return "discarded";
    }
    return "?";
}

void PseudoBag::transition(PseudoBagStatus next) {
    if (status == next) return;
    if (status != PseudoBagStatus::Pending) {
        throw ContractError(std::string("invalid pseudo bag transition ") + to_string(status) + " -> " +
                            to_string(next));
    }
    status = next;
}

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

std::optional<Split> split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    return std::nullopt;
}

std::vector<int> Dataset::indices_of(Split s) const {
    std::vector<int> out;
    for (size_t i = 0; i < bags.size(); ++i) {
        auto it = split.find(bags[i].id);
        if (it != split.end() && it->second == s) out.push_back(static_cast<int>(i));
    }
    return out;
}

const Bag* Dataset::find(const std::string& id) const {
    for (const Bag& b : bags) {
        if (b.id == id) return &b;
    }
    return nullptr;
}

void Dataset::validate() const {
    const int c = priority.num_classes();
    std::set<std::string> ids;
    for (const Bag& b : bags) {
        if (!ids.insert(b.id).second) throw DataError("duplicate bag id: " + b.id);
        if (b.num_instances() < 1 || b.dim() < 1) {
            throw DataError("bag " + b.id + " must have N >= 1 and d >= 1");
        }
        if (b.label < 0 || b.label >= c) throw DataError("bag " + b.id + " label out of range");
        if (!b.features.all_finite()) throw DataError("bag " + b.id + " has non-finite features");
        if (b.oracle_instance_labels) {
            if (static_cast<int>(b.oracle_instance_labels->size()) != b.num_instances()) {
                throw DataError("bag " + b.id + " instance label count != N");
            }
            int max_label = -1;
            for (int il : *b.oracle_instance_labels) {
                if (il < 0 || il >= c) throw DataError("bag " + b.id + " instance label out of range");
                max_label = max_label < 0 ? il : max_priority_label(max_label, il, priority);
            }
            if (max_label != b.label) {
                throw DataError("bag " + b.id + " label inconsistent with max-priority instance label");
            }
        }
        if (split.find(b.id) == split.end()) throw DataError("bag " + b.id + " has no split assignment");
    }
    for (const auto& [id, _] : split) {
        if (ids.find(id) == ids.end()) throw DataError("split assignment for unknown bag id: " + id);
    }
}

}  // namespace swsmil
