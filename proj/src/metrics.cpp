#include "swsmil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "swsmil/error.hpp"

namespace swsmil {

double accuracy(const PredictionDump& dump) {
    if (dump.empty()) throw DomainError("accuracy of an empty dump is undefined");
    long correct = 0;
    for (const SampleDump& s : dump) {
        if (s.predicted == s.true_label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dump.size());
}

namespace {

// Mann-Whitney AUC for "class c vs rest" on probs[c], ties counted half.
std::optional<double> auc_one_class(const PredictionDump& dump, int c) {
    std::vector<std::pair<double, bool>> scored;  // (score, is_positive)
    long n_pos = 0;
    for (const SampleDump& s : dump) {
        const bool pos = s.true_label == c;
        scored.emplace_back(s.probs[c], pos);
        if (pos) ++n_pos;
    }
    const long n_neg = static_cast<long>(scored.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    // average ranks within tie groups
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < scored.size()) {
        size_t j = i;
        while (j < scored.size() && scored[j].first == scored[i].first) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));  // 1-based
        for (size_t k = i; k < j; ++k) {
            if (scored[k].second) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace

double auc_ovr(const PredictionDump& dump, int num_classes) {
    if (dump.empty()) throw DomainError("auc of an empty dump is undefined");
    std::vector<std::optional<double>> per_class(num_classes);
    double sum = 0.0;
    int counted = 0;
    for (int c = 0; c < num_classes; ++c) {
        per_class[c] = auc_one_class(dump, c);
        if (per_class[c]) {
            sum += *per_class[c];
            ++counted;
        } else {
            std::cerr << "warning: class " << c << " has no positives or no negatives, skipped in AUC\n";
        }
    }
    if (counted == 0) throw DataError("auc_ovr: every class is degenerate");
    if (num_classes == 2 && per_class[1]) return *per_class[1];
    return sum / counted;
}

std::vector<std::vector<long>> confusion_matrix(const PredictionDump& dump, int num_classes) {
    std::vector<std::vector<long>> m(num_classes, std::vector<long>(num_classes, 0));
    for (const SampleDump& s : dump) {
        if (s.true_label < 0 || s.true_label >= num_classes || s.predicted < 0 || s.predicted >= num_classes) {
            throw DomainError("prediction dump label out of range");
        }
        ++m[s.true_label][s.predicted];
    }
    return m;
}

namespace {

struct Prf {
    double precision;
    double recall;
    double f1;
};

Prf prf_one_class(const std::vector<std::vector<long>>& conf, int c) {
    const int num_classes = static_cast<int>(conf.size());
    long tp = conf[c][c], fp = 0, fn = 0;
    for (int r = 0; r < num_classes; ++r) {
        if (r != c) fp += conf[r][c];
    }
    for (int j = 0; j < num_classes; ++j) {
        if (j != c) fn += conf[c][j];
    }
    Prf out{};
    out.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    out.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    out.f1 = out.precision + out.recall > 0.0 ? 2.0 * out.precision * out.recall / (out.precision + out.recall) : 0.0;
    return out;
}

}  // namespace

double macro_f1(const PredictionDump& dump, int num_classes) {
    if (dump.empty()) throw DomainError("macro_f1 of an empty dump is undefined");
    const auto conf = confusion_matrix(dump, num_classes);
    double sum = 0.0;
    for (int c = 0; c < num_classes; ++c) sum += prf_one_class(conf, c).f1;
    return sum / num_classes;
}

MetricsBundle compute_metrics(const PredictionDump& dump, int num_classes) {
    MetricsBundle b;
    b.acc = accuracy(dump);
    b.confusion = confusion_matrix(dump, num_classes);
    b.per_class_auc.resize(num_classes);
    double auc_sum = 0.0;
    int auc_counted = 0;
    for (int c = 0; c < num_classes; ++c) {
        b.per_class_auc[c] = auc_one_class(dump, c);
        if (b.per_class_auc[c]) {
            auc_sum += *b.per_class_auc[c];
            ++auc_counted;
        }
    }
    if (auc_counted == 0) throw DataError("compute_metrics: every class is degenerate for AUC");
    b.auc = (num_classes == 2 && b.per_class_auc[1]) ? *b.per_class_auc[1] : auc_sum / auc_counted;

    double f1_sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        const Prf prf = prf_one_class(b.confusion, c);
        b.per_class_precision.push_back(prf.precision);
        b.per_class_recall.push_back(prf.recall);
        b.per_class_f1.push_back(prf.f1);
        f1_sum += prf.f1;
    }
    b.f1 = f1_sum / num_classes;
    return b;
}

nlohmann::ordered_json MetricsBundle::to_json() const {
    nlohmann::ordered_json j;
    j["acc"] = acc;
    j["auc"] = auc;
    j["f1"] = f1;
    nlohmann::ordered_json per_class;
    nlohmann::ordered_json aucs = nlohmann::ordered_json::array();
    for (const auto& a : per_class_auc) aucs.push_back(a ? nlohmann::ordered_json(*a) : nlohmann::ordered_json(nullptr));
    per_class["auc"] = std::move(aucs);
    per_class["f1"] = per_class_f1;
    per_class["precision"] = per_class_precision;
    per_class["recall"] = per_class_recall;
    j["per_class"] = std::move(per_class);
    j["confusion"] = confusion;
    return j;
}

PseAccResult pse_acc(const RoundPlan& plan, const Dataset& oracle) {
    PseAccResult out;
    long labeled_match = 0, all_match = 0;
    for (const ParentPlan& parent : plan.parents) {
        const Bag& bag = oracle.bags.at(parent.parent_index);
        if (!bag.oracle_instance_labels) {
            throw DataError("pse_acc: bag " + bag.id + " has no oracle instance labels");
        }
        const auto& inst = *bag.oracle_instance_labels;
        for (const PseudoBag& pb : parent.pseudo_bags) {
            if (pb.status == PseudoBagStatus::Discarded) continue;
            int true_label = inst.at(pb.member_indices.front());
            for (int idx : pb.member_indices) {
                true_label = max_priority_label(true_label, inst.at(idx), oracle.priority);
            }
            ++out.all_count;
            if (pb.inherited_label == true_label) ++all_match;
            if (pb.status == PseudoBagStatus::Labeled) {
                ++out.labeled_count;
                if (pb.inherited_label == true_label) ++labeled_match;
            }
        }
    }
    out.all_bags = out.all_count > 0 ? static_cast<double>(all_match) / out.all_count : 0.0;
    out.labeled_only = out.labeled_count > 0 ? static_cast<double>(labeled_match) / out.labeled_count : 0.0;
    return out;
}

}  // namespace swsmil
