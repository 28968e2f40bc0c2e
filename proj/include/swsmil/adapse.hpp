#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsmil/bag.hpp"
#include "swsmil/mil_model.hpp"

namespace swsmil {

// Splits a bag into m pseudo bags by interleaving instances in the given
// importance order: pseudo bag a receives order positions a, a+m, a+2m, ...
// Every instance lands in exactly one pseudo bag; sizes differ by at most 1;
// each pseudo bag inherits the parent label. Requires 1 <= m <= N (callers
// clamp m for tiny bags).
std::vector<PseudoBag> split_interleaved(const Bag& bag, int parent_index, const std::vector<int>& order, int m);

// Annotates each pseudo bag with the frozen teacher's predicted label and
// confidence on its member instances. No parameter changes.
void classify_pseudo_bags(const MilParams& teacher, const Bag& parent, std::vector<PseudoBag>& pseudo_bags);

struct DiscardOutcome {
    std::vector<int> discarded;  // indices into the pseudo bag vector
    std::vector<int> remaining;  // complement, in index order
    bool retention_applied = false;
    int retained_index = -1;
};

// Discards pseudo bags that are confidently mislabeled: prediction differs
// from the inherited label AND confidence >= gamma_fix. If every pseudo bag
// of the parent qualifies, one is retained (highest-confidence correct one,
// or failing that the least confident) so recycling always has a target.
DiscardOutcome discard_mislabeled(std::vector<PseudoBag>& pseudo_bags, double gamma_fix);

struct RecycleEntry {
    int parent_index = -1;
    std::string parent_id;
    int discarded_pb = -1;
    std::vector<int> instances;     // discarded members in importance order
    std::vector<int> destinations;  // pseudo-bag index receiving instances[k]
};

// Redistributes the instances of each discarded pseudo bag round-robin over
// the parent's remaining pseudo bags, walking the discarded members in
// importance order and the destinations in pseudo-bag index order. The
// surviving pseudo bags partition 0..N-1 again afterwards.
std::vector<RecycleEntry> recycle(std::vector<PseudoBag>& pseudo_bags, const DiscardOutcome& outcome,
                                  const std::vector<int>& iis_order);

// Applies the adaptive threshold to the (re-classified) surviving pseudo
// bags of one parent: prediction == inherited and confidence >= gamma_ada
// -> Labeled, otherwise Unlabeled; at most l_max Labeled per parent, keeping
// the most confident. gamma_ada == 0 disables the gate entirely: every
// surviving pseudo bag is Labeled with its inherited label (inherit-all
// mode, no cap), which is also what the degenerate whole-bag configuration
// relies on.
void assign_labels(std::vector<PseudoBag>& pseudo_bags, const std::vector<int>& remaining, double gamma_ada,
                   int l_max);

// Linear ramp from gamma_0 (round 1) to gamma_max (round R); constant
// gamma_0 when R == 1.
double gamma_ada_schedule(int round, int total_rounds, double gamma_0, double gamma_max);

struct PbRef {
    int parent = -1;  // index into RoundPlan::parents
    int pb = -1;      // index into ParentPlan::pseudo_bags
};

struct ParentPlan {
    int parent_index = -1;  // index into Dataset::bags
    std::string parent_id;
    std::vector<PseudoBag> pseudo_bags;  // all, including Discarded ones
    bool retention_applied = false;
};

struct RoundPlan {
    int round_index = 0;
    double gamma_fix = 0.0;
    double gamma_ada = 0.0;
    std::vector<ParentPlan> parents;
    std::vector<PbRef> labeled;
    std::vector<PbRef> unlabeled;
    std::vector<RecycleEntry> recycle_log;

    int discarded_count() const;
    int surviving_count() const;
    nlohmann::ordered_json to_json() const;  // per-round audit log
};

enum class IisMode { Attention, Shapley };

struct AdapseOptions {
    int pseudo_bags = 8;        // M, clamped to N per bag
    int max_pseudo_labels = 4;  // L_max per parent
    double gamma_fix = 0.95;
    double gamma_ada = 0.5;
    IisMode iis_mode = IisMode::Attention;
    int shapley_samples_per_instance = 200;
    uint64_t seed = 0;  // only consumed by the Shapley estimator
    int round_index = 1;
};

// One full AdaPse pass over the train bags: IIS -> interleaved split ->
// classify -> discard -> recycle -> re-classify -> adaptive labeling.
// Confidence annotations always come from the frozen teacher; iis_model
// (usually the same teacher, optionally the student) drives the ordering.
RoundPlan build_round_plan(const MilParams& teacher, const MilParams& iis_model, const Dataset& ds,
                           const std::vector<int>& train_indices, const AdapseOptions& opt);

// Naive inherit-all baseline: random split order, every pseudo bag Labeled,
// no discard/recycle. Used for the pseudo-label-accuracy comparison.
RoundPlan random_split_plan(const Dataset& ds, const std::vector<int>& train_indices, int pseudo_bags, uint64_t seed);

}  // namespace swsmil
