#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsmil/adapse.hpp"
#include "swsmil/bag.hpp"
#include "swsmil/metrics.hpp"
#include "swsmil/mil_model.hpp"

namespace swsmil {

struct TrainConfig {
    int rounds = 10;
    int epochs_per_round = 20;
    int patience = 10;
    double lr_initial = 3e-4;
    double lr_reduced = 1e-4;
    int pseudo_bags = 8;        // M
    int max_pseudo_labels = 4;  // L_max
    double gamma_fix = 0.95;
    double gamma_0 = 0.5;
    double gamma_max = 0.95;
    double ema_decay = 0.99;
    IisMode iis_mode = IisMode::Attention;
    bool merge_supervised = true;
    bool iis_from_teacher = true;  // which model's IIS drives the split
    int shapley_samples_per_instance = 200;
    uint64_t seed = 42;

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
    // "key=value" override, same keys as the JSON config
    void apply_override(const std::string& assignment);
};

// Eq-level loss pieces. The tape-built training losses mirror these; the
// scalar forms serve validation and tests.
double consistency_loss(const std::vector<double>& teacher_probs, const std::vector<double>& student_probs);
double supervised_loss(const std::vector<double>& student_probs, int label);
double total_loss(double l_con, double l_sup);

// Tape builders used by the optimization step (and the gradient checks).
Tape::NodeId taped_supervised_loss(Tape& tape, Tape::NodeId probs, int label, int num_classes);
Tape::NodeId taped_consistency_loss(Tape& tape, Tape::NodeId student_probs, const std::vector<double>& teacher_probs);

struct EvalResult {
    MetricsBundle metrics;
    PredictionDump dump;
};

// Whole-bag forward over one split, no augmentation, side-effect free.
EvalResult evaluate(const MilParams& model, const Dataset& ds, Split split);

struct PhaseSummary {
    int epochs_run = 0;
    double train_loss = 0.0;     // mean per-step total loss over the phase
    double best_val_loss = 0.0;  // best within the phase
    MetricsBundle val;
};

struct RoundSummary {
    int round = 0;
    double gamma_ada = 0.0;
    double gamma_fix = 0.0;
    int pseudo_bag_count = 0;
    int labeled_count = 0;
    int unlabeled_count = 0;
    int discarded_count = 0;
    int retained_parents = 0;
    std::optional<double> pse_acc_labeled;
    std::optional<double> pse_acc_all;
    std::optional<double> pse_acc_random;  // inherit-all random-split baseline
    long consistency_steps = 0;
    double consistency_loss_sum = 0.0;
    PhaseSummary phase;
};

struct TrainReport {
    TrainConfig config;
    PhaseSummary warmup;
    std::vector<RoundSummary> rounds;
    std::vector<RoundPlan> plans;  // per-round audit logs, parallel to rounds
    int best_round = 0;
    double best_val_auc = 0.0;
    MetricsBundle test_metrics;
    PredictionDump test_predictions;
    MilParams best_params;  // already rounded through float32, matches checkpoint_best on disk
    MilParams final_params;

    nlohmann::ordered_json to_json() const;  // summaries only; plans/params stay out
};

// Full SWS-MIL training: a supervised warm-up on whole bags, then R rounds
// of AdaPse + student-teacher optimization. Deterministic given cfg.seed.
TrainReport train(const Dataset& ds, const TrainConfig& cfg);

// Writes report.json, round_plans.json, pseacc.csv, checkpoint_best.bin and
// checkpoint_final.bin. Byte-identical for identical reports.
void write_training_artifacts(const TrainReport& report, const std::filesystem::path& out_dir);

// Per-round pseudo-label-accuracy curve, one "adapse" and one "random"
// (inherit-all baseline) row per round. Header only when the dataset
// carries no oracle labels.
void write_pseacc_csv(const TrainReport& report, const std::filesystem::path& csv_path);

}  // namespace swsmil
