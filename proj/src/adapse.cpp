#include "swsmil/adapse.hpp"

#include <algorithm>
#include <cmath>

#include "swsmil/error.hpp"
#include "swsmil/iis.hpp"
#include "swsmil/rng.hpp"

namespace swsmil {

std::vector<PseudoBag> split_interleaved(const Bag& bag, int parent_index, const std::vector<int>& order, int m) {
    const int n = bag.num_instances();
    if (m < 1 || m > n) {
        throw DomainError("split_interleaved: M=" + std::to_string(m) + " outside 1..N=" + std::to_string(n));
    }
    if (static_cast<int>(order.size()) != n) {
        throw ContractError("split_interleaved: order length != N");
    }
    std::vector<PseudoBag> out(m);
    for (int a = 0; a < m; ++a) {
        PseudoBag& pb = out[a];
        pb.parent_id = bag.id;
        pb.parent_index = parent_index;
        pb.inherited_label = bag.label;
        for (int pos = a; pos < n; pos += m) {
            pb.member_indices.push_back(order[pos]);
        }
        std::sort(pb.member_indices.begin(), pb.member_indices.end());
    }
    return out;
}

void classify_pseudo_bags(const MilParams& teacher, const Bag& parent, std::vector<PseudoBag>& pseudo_bags) {
    for (PseudoBag& pb : pseudo_bags) {
        if (pb.status == PseudoBagStatus::Discarded) continue;
        if (pb.member_indices.empty()) throw ContractError("cannot classify an empty pseudo bag");
        const Prediction pred = forward(teacher, gather_rows(parent.features, pb.member_indices));
        pb.prediction = pred.label;
        pb.confidence = pred.confidence;
    }
}

namespace {

bool discard_predicate(const PseudoBag& pb, double gamma_fix) {
    return *pb.prediction != pb.inherited_label && *pb.confidence >= gamma_fix;
}

}  // namespace

DiscardOutcome discard_mislabeled(std::vector<PseudoBag>& pseudo_bags, double gamma_fix) {
    for (const PseudoBag& pb : pseudo_bags) {
        if (!pb.prediction || !pb.confidence) {
            throw ContractError("discard_mislabeled requires classified pseudo bags");
        }
    }

    DiscardOutcome out;
    std::vector<bool> discard(pseudo_bags.size(), false);
    int num_discarded = 0;
    for (size_t i = 0; i < pseudo_bags.size(); ++i) {
        if (discard_predicate(pseudo_bags[i], gamma_fix)) {
            discard[i] = true;
            ++num_discarded;
        }
    }

    // Recycling divides by the number of survivors, so one pseudo bag must
    // always remain: prefer the most confident correct one, else the least
    // confidently wrong one.
    if (num_discarded == static_cast<int>(pseudo_bags.size())) {
        int keep = -1;
        for (size_t i = 0; i < pseudo_bags.size(); ++i) {
            const PseudoBag& pb = pseudo_bags[i];
            if (*pb.prediction == pb.inherited_label &&
                (keep < 0 || *pb.confidence > *pseudo_bags[keep].confidence)) {
                keep = static_cast<int>(i);
            }
        }
        if (keep < 0) {
            keep = 0;
            for (size_t i = 1; i < pseudo_bags.size(); ++i) {
                if (*pseudo_bags[i].confidence < *pseudo_bags[keep].confidence) keep = static_cast<int>(i);
            }
        }
        discard[keep] = false;
        out.retention_applied = true;
        out.retained_index = keep;
    }

    for (size_t i = 0; i < pseudo_bags.size(); ++i) {
        if (discard[i]) {
            pseudo_bags[i].transition(PseudoBagStatus::Discarded);
            out.discarded.push_back(static_cast<int>(i));
        } else {
            out.remaining.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::vector<RecycleEntry> recycle(std::vector<PseudoBag>& pseudo_bags, const DiscardOutcome& outcome,
                                  const std::vector<int>& iis_order) {
    std::vector<RecycleEntry> log;
    if (outcome.discarded.empty()) return log;
    if (outcome.remaining.empty()) throw ContractError("recycle: no remaining pseudo bag to receive instances");

    // rank_of[i] = position of instance i in the importance order
    std::vector<int> rank_of(iis_order.size());
    for (size_t pos = 0; pos < iis_order.size(); ++pos) rank_of[iis_order[pos]] = static_cast<int>(pos);

    const int m_remaining = static_cast<int>(outcome.remaining.size());
    for (int d : outcome.discarded) {
        RecycleEntry entry;
        entry.parent_index = pseudo_bags[d].parent_index;
        entry.parent_id = pseudo_bags[d].parent_id;
        entry.discarded_pb = d;
        entry.instances = pseudo_bags[d].member_indices;
        std::sort(entry.instances.begin(), entry.instances.end(),
                  [&](int a, int b) { return rank_of[a] < rank_of[b]; });
        for (size_t k = 0; k < entry.instances.size(); ++k) {
            const int dest = outcome.remaining[k % m_remaining];
            entry.destinations.push_back(dest);
            pseudo_bags[dest].member_indices.push_back(entry.instances[k]);
        }
        log.push_back(std::move(entry));
    }
    for (int r : outcome.remaining) {
        std::sort(pseudo_bags[r].member_indices.begin(), pseudo_bags[r].member_indices.end());
    }
    return log;
}

void assign_labels(std::vector<PseudoBag>& pseudo_bags, const std::vector<int>& remaining, double gamma_ada,
                   int l_max) {
    if (gamma_ada == 0.0) {
        // Threshold disabled: inherit-all mode.
        for (int r : remaining) pseudo_bags[r].transition(PseudoBagStatus::Labeled);
        return;
    }

    std::vector<int> candidates;
    for (int r : remaining) {
        const PseudoBag& pb = pseudo_bags[r];
        if (!pb.prediction || !pb.confidence) {
            throw ContractError("assign_labels requires re-classified pseudo bags");
        }
        if (*pb.prediction == pb.inherited_label && *pb.confidence >= gamma_ada) {
            candidates.push_back(r);
        }
    }
    // Cap per parent, keeping the most confident (ties to the lower index).
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
        return *pseudo_bags[a].confidence > *pseudo_bags[b].confidence;
    });
    if (static_cast<int>(candidates.size()) > l_max) candidates.resize(l_max);

    std::vector<bool> labeled(pseudo_bags.size(), false);
    for (int c : candidates) labeled[c] = true;
    for (int r : remaining) {
        pseudo_bags[r].transition(labeled[r] ? PseudoBagStatus::Labeled : PseudoBagStatus::Unlabeled);
    }
}

double gamma_ada_schedule(int round, int total_rounds, double gamma_0, double gamma_max) {
    if (round < 1 || round > total_rounds) throw DomainError("gamma_ada_schedule: round outside 1..R");
    if (!(gamma_0 >= 0.0 && gamma_0 <= gamma_max && gamma_max <= 1.0)) {
        throw DomainError("gamma_ada_schedule requires 0 <= gamma_0 <= gamma_max <= 1");
    }
    if (total_rounds == 1) return gamma_0;
    return gamma_0 + (gamma_max - gamma_0) * static_cast<double>(round - 1) / static_cast<double>(total_rounds - 1);
}

int RoundPlan::discarded_count() const {
    int n = 0;
    for (const ParentPlan& p : parents) {
        for (const PseudoBag& pb : p.pseudo_bags) {
            if (pb.status == PseudoBagStatus::Discarded) ++n;
        }
    }
    return n;
}

int RoundPlan::surviving_count() const {
    int n = 0;
    for (const ParentPlan& p : parents) {
        for (const PseudoBag& pb : p.pseudo_bags) {
            if (pb.status != PseudoBagStatus::Discarded) ++n;
        }
    }
    return n;
}

nlohmann::ordered_json RoundPlan::to_json() const {
    nlohmann::ordered_json j;
    j["round"] = round_index;
    j["gamma_fix"] = gamma_fix;
    j["gamma_ada"] = gamma_ada;
    nlohmann::ordered_json pbs = nlohmann::ordered_json::array();
    for (const ParentPlan& parent : parents) {
        for (const PseudoBag& pb : parent.pseudo_bags) {
            nlohmann::ordered_json e;
            e["parent"] = pb.parent_id;
            e["size"] = pb.size();
            e["inherited"] = pb.inherited_label;
            e["prediction"] = pb.prediction ? nlohmann::ordered_json(*pb.prediction) : nlohmann::ordered_json(nullptr);
            e["confidence"] = pb.confidence ? nlohmann::ordered_json(*pb.confidence) : nlohmann::ordered_json(nullptr);
            e["status"] = to_string(pb.status);
            pbs.push_back(std::move(e));
        }
    }
    j["pseudo_bags"] = std::move(pbs);
    nlohmann::ordered_json recycles = nlohmann::ordered_json::array();
    for (const RecycleEntry& entry : recycle_log) {
        nlohmann::ordered_json e;
        e["parent"] = entry.parent_id;
        e["discarded_pb"] = entry.discarded_pb;
        e["instances"] = entry.instances;
        e["destinations"] = entry.destinations;
        recycles.push_back(std::move(e));
    }
    j["recycle_log"] = std::move(recycles);
    return j;
}

RoundPlan build_round_plan(const MilParams& teacher, const MilParams& iis_model, const Dataset& ds,
                           const std::vector<int>& train_indices, const AdapseOptions& opt) {
    if (opt.pseudo_bags < 1) throw DomainError("adapse: pseudo_bags must be >= 1");
    if (opt.max_pseudo_labels < 1) throw DomainError("adapse: max_pseudo_labels must be >= 1");

    RoundPlan plan;
    plan.round_index = opt.round_index;
    plan.gamma_fix = opt.gamma_fix;
    plan.gamma_ada = opt.gamma_ada;

    for (int bag_index : train_indices) {
        const Bag& bag = ds.bags[bag_index];
        const int m = std::min(opt.pseudo_bags, bag.num_instances());

        IisVector iis;
        if (opt.iis_mode == IisMode::Attention) {
            iis = iis_attention(iis_model, bag);
        } else {
            const int samples = std::max(1, opt.shapley_samples_per_instance * bag.num_instances());
            iis = iis_shapley(iis_model, bag, samples,
                              sub_seed(opt.seed, "adapse_shapley", static_cast<uint64_t>(opt.round_index),
                                       static_cast<uint64_t>(bag_index)));
        }

        ParentPlan parent;
        parent.parent_index = bag_index;
        parent.parent_id = bag.id;
        parent.pseudo_bags = split_interleaved(bag, bag_index, iis.order, m);

        classify_pseudo_bags(teacher, bag, parent.pseudo_bags);
        const DiscardOutcome outcome = discard_mislabeled(parent.pseudo_bags, opt.gamma_fix);
        parent.retention_applied = outcome.retention_applied;
        auto recycle_entries = recycle(parent.pseudo_bags, outcome, iis.order);
        for (auto& e : recycle_entries) plan.recycle_log.push_back(std::move(e));

        // Thresholds apply to the post-recycle pseudo bags, so re-classify.
        classify_pseudo_bags(teacher, bag, parent.pseudo_bags);
        assign_labels(parent.pseudo_bags, outcome.remaining, opt.gamma_ada, opt.max_pseudo_labels);

        const int parent_slot = static_cast<int>(plan.parents.size());
        for (size_t i = 0; i < parent.pseudo_bags.size(); ++i) {
            if (parent.pseudo_bags[i].status == PseudoBagStatus::Labeled) {
                plan.labeled.push_back({parent_slot, static_cast<int>(i)});
            } else if (parent.pseudo_bags[i].status == PseudoBagStatus::Unlabeled) {
                plan.unlabeled.push_back({parent_slot, static_cast<int>(i)});
            }
        }
        plan.parents.push_back(std::move(parent));
    }
    return plan;
}

RoundPlan random_split_plan(const Dataset& ds, const std::vector<int>& train_indices, int pseudo_bags,
                            uint64_t seed) {
    if (pseudo_bags < 1) throw DomainError("random_split_plan: pseudo_bags must be >= 1");
    RoundPlan plan;
    plan.round_index = 0;
    for (int bag_index : train_indices) {
        const Bag& bag = ds.bags[bag_index];
        const int m = std::min(pseudo_bags, bag.num_instances());
        Rng rng(sub_seed(seed, "random_split", static_cast<uint64_t>(bag_index)));

        ParentPlan parent;
        parent.parent_index = bag_index;
        parent.parent_id = bag.id;
        parent.pseudo_bags = split_interleaved(bag, bag_index, rng.permutation(bag.num_instances()), m);

        const int parent_slot = static_cast<int>(plan.parents.size());
        for (size_t i = 0; i < parent.pseudo_bags.size(); ++i) {
            parent.pseudo_bags[i].transition(PseudoBagStatus::Labeled);
            plan.labeled.push_back({parent_slot, static_cast<int>(i)});
        }
        plan.parents.push_back(std::move(parent));
    }
    return plan;
}

}  // namespace swsmil
