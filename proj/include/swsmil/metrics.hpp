#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsmil/adapse.hpp"
#include "swsmil/bag.hpp"

namespace swsmil {

struct SampleDump {
    std::string id;
    int true_label = 0;
    int predicted = 0;
    std::vector<double> probs;
};

using PredictionDump = std::vector<SampleDump>;

// Fraction of samples with predicted == true.
double accuracy(const PredictionDump& dump);

// One-versus-others AUC per class via the Mann-Whitney statistic (ties get
// half credit), macro-averaged. Classes with no positives or no negatives
// are skipped with a warning; binary dumps report the class-1 AUC.
double auc_ovr(const PredictionDump& dump, int num_classes);

// Unweighted mean over all classes of 2PR/(P+R); a class with P+R == 0
// contributes 0.
double macro_f1(const PredictionDump& dump, int num_classes);

// rows = true label, cols = predicted label
std::vector<std::vector<long>> confusion_matrix(const PredictionDump& dump, int num_classes);

struct MetricsBundle {
    double acc = 0.0;
    double auc = 0.0;
    double f1 = 0.0;
    std::vector<std::optional<double>> per_class_auc;  // nullopt where degenerate
    std::vector<double> per_class_f1;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
    std::vector<std::vector<long>> confusion;

    nlohmann::ordered_json to_json() const;
};

MetricsBundle compute_metrics(const PredictionDump& dump, int num_classes);

// Pseudo-label accuracy against the synthetic oracle. A pseudo bag's true
// label is the max-priority class among its members' instance labels.
// labeled_only scores the bags AdaPse actually labeled; all_bags scores
// every surviving bag's inherited label (the right scale for inherit-all
// baselines).
struct PseAccResult {
    double labeled_only = 0.0;
    double all_bags = 0.0;
    int labeled_count = 0;
    int all_count = 0;
};

PseAccResult pse_acc(const RoundPlan& plan, const Dataset& oracle);

}  // namespace swsmil
