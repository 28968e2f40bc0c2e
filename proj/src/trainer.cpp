#include "swsmil/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "swsmil/error.hpp"
#include "swsmil/mergeup.hpp"
#include "swsmil/rng.hpp"

namespace swsmil {

namespace {

constexpr int kAttentionHidden = 128;
constexpr double kImprovementEps = 1e-12;
constexpr double kLossClamp = 1e-12;

}  // namespace

void TrainConfig::validate() const {
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (epochs_per_round < 1) throw ConfigError("epochs_per_round must be >= 1");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (!(lr_initial > 0.0) || !(lr_reduced > 0.0)) throw ConfigError("learning rates must be > 0");
    if (pseudo_bags < 1) throw ConfigError("pseudo_bags must be >= 1");
    if (max_pseudo_labels < 1) throw ConfigError("max_pseudo_labels must be >= 1");
    if (!(gamma_fix >= 0.0 && gamma_fix <= 1.0)) throw ConfigError("gamma_fix must be in [0,1]");
    if (!(gamma_0 >= 0.0 && gamma_0 <= gamma_max && gamma_max <= 1.0)) {
        throw ConfigError("need 0 <= gamma_0 <= gamma_max <= 1");
    }
    if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) throw ConfigError("ema_decay must be in [0,1]");
    if (shapley_samples_per_instance < 1) throw ConfigError("shapley_samples_per_instance must be >= 1");
}

nlohmann::ordered_json TrainConfig::to_json() const {
    nlohmann::ordered_json j;
    j["rounds"] = rounds;
    j["epochs_per_round"] = epochs_per_round;
    j["patience"] = patience;
    j["lr_initial"] = lr_initial;
    j["lr_reduced"] = lr_reduced;
    j["pseudo_bags"] = pseudo_bags;
    j["max_pseudo_labels"] = max_pseudo_labels;
    j["gamma_fix"] = gamma_fix;
    j["gamma_0"] = gamma_0;
    j["gamma_max"] = gamma_max;
    j["ema_decay"] = ema_decay;
    j["iis_mode"] = iis_mode == IisMode::Attention ? "attention" : "shapley";
    j["merge_supervised"] = merge_supervised;
    j["iis_from_teacher"] = iis_from_teacher;
    j["shapley_samples_per_instance"] = shapley_samples_per_instance;
    j["seed"] = seed;
    return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "rounds") cfg.rounds = value.get<int>();
            else if (key == "epochs_per_round") cfg.epochs_per_round = value.get<int>();
            else if (key == "patience") cfg.patience = value.get<int>();
            else if (key == "lr_initial") cfg.lr_initial = value.get<double>();
            else if (key == "lr_reduced") cfg.lr_reduced = value.get<double>();
            else if (key == "pseudo_bags") cfg.pseudo_bags = value.get<int>();
            else if (key == "max_pseudo_labels") cfg.max_pseudo_labels = value.get<int>();
            else if (key == "gamma_fix") cfg.gamma_fix = value.get<double>();
            else if (key == "gamma_0") cfg.gamma_0 = value.get<double>();
            else if (key == "gamma_max") cfg.gamma_max = value.get<double>();
            else if (key == "ema_decay") cfg.ema_decay = value.get<double>();
            else if (key == "iis_mode") {
                const auto mode = value.get<std::string>();
                if (mode == "attention") cfg.iis_mode = IisMode::Attention;
                else if (mode == "shapley") cfg.iis_mode = IisMode::Shapley;
                else throw ConfigError("iis_mode must be \"attention\" or \"shapley\"");
            } else if (key == "merge_supervised") cfg.merge_supervised = value.get<bool>();
            else if (key == "iis_from_teacher") cfg.iis_from_teacher = value.get<bool>();
            else if (key == "shapley_samples_per_instance") cfg.shapley_samples_per_instance = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<uint64_t>();
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void TrainConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key=value, got: " + assignment);
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    nlohmann::json j = to_json();
    if (!j.contains(key)) throw ConfigError("unknown config key: " + key);
    if (j[key].is_string()) {
        j[key] = value;
    } else if (j[key].is_boolean()) {
        if (value == "true" || value == "1") j[key] = true;
        else if (value == "false" || value == "0") j[key] = false;
        else throw ConfigError("expected a boolean for " + key + ", got: " + value);
    } else {
        try {
            j[key] = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("expected a number for " + key + ", got: " + value);
        }
    }
    *this = from_json(j);
}

double consistency_loss(const std::vector<double>& teacher_probs, const std::vector<double>& student_probs) {
    if (teacher_probs.size() != student_probs.size()) {
        throw DimensionError("consistency_loss: probability vector length mismatch");
    }
    double acc = 0.0;
    for (size_t i = 0; i < teacher_probs.size(); ++i) {
        const double d = teacher_probs[i] - student_probs[i];
        acc += d * d;
    }
    return acc;
}

double supervised_loss(const std::vector<double>& student_probs, int label) {
    if (label < 0 || label >= static_cast<int>(student_probs.size())) {
        throw DomainError("supervised_loss: label out of range");
    }
    return -std::log(std::max(student_probs[label], kLossClamp));
}

double total_loss(double l_con, double l_sup) { return 0.5 * l_con + 0.5 * l_sup; }

Tape::NodeId taped_supervised_loss(Tape& tape, Tape::NodeId probs, int label, int num_classes) {
    Matrix onehot(1, num_classes);
    onehot.at(0, label) = 1.0;
    const Tape::NodeId picked = tape.elementwise_mul(tape.log_guarded(probs), tape.constant(std::move(onehot)));
    return tape.scale(tape.reduce_sum(picked), -1.0);
}

Tape::NodeId taped_consistency_loss(Tape& tape, Tape::NodeId student_probs,
                                    const std::vector<double>& teacher_probs) {
    // teacher probabilities are constants: no gradient flows into the teacher
    const Tape::NodeId neg_teacher =
        tape.constant(scale(Matrix::row_vector(std::vector<double>(teacher_probs)), -1.0));
    const Tape::NodeId diff = tape.add(student_probs, neg_teacher);
    return tape.reduce_sum(tape.elementwise_mul(diff, diff));
}

EvalResult evaluate(const MilParams& model, const Dataset& ds, Split split) {
    EvalResult out;
    for (int idx : ds.indices_of(split)) {
        const Bag& bag = ds.bags[idx];
        const Prediction pred = forward(model, bag.features);
        SampleDump s;
        s.id = bag.id;
        s.true_label = bag.label;
        s.predicted = pred.label;
        s.probs = pred.probs;
        out.dump.push_back(std::move(s));
    }
    if (out.dump.empty()) throw DomainError("evaluate: split is empty");
    out.metrics = compute_metrics(out.dump, ds.num_classes());
    return out;
}

namespace {

// Adam with the usual bias correction; one state slot per parameter matrix.
class Adam {
public:
    explicit Adam(const MilParams& shape) {
        for (const Matrix* p : shape.matrices()) {
            m_.emplace_back(p->rows(), p->cols());
            v_.emplace_back(p->rows(), p->cols());
        }
    }

    void step(MilParams& params, const std::vector<const Matrix*>& grads, double lr) {
        ++t_;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        auto targets = params.matrices();
        for (size_t i = 0; i < targets.size(); ++i) {
            Matrix& p = *targets[i];
            const Matrix& g = *grads[i];
            for (size_t k = 0; k < p.size(); ++k) {
                const double gk = g.raw()[k];
                m_[i].raw()[k] = kBeta1 * m_[i].raw()[k] + (1.0 - kBeta1) * gk;
                v_[i].raw()[k] = kBeta2 * v_[i].raw()[k] + (1.0 - kBeta2) * gk * gk;
                const double mhat = m_[i].raw()[k] / bc1;
                const double vhat = v_[i].raw()[k] / bc2;
                p.raw()[k] -= lr * mhat / (std::sqrt(vhat) + kEps);
            }
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    long t_ = 0;
};

double validation_loss(const MilParams& model, const Dataset& ds, const std::vector<int>& val_indices) {
    double acc = 0.0;
    for (int idx : val_indices) {
        const Bag& bag = ds.bags[idx];
        acc += supervised_loss(forward(model, bag.features).probs, bag.label);
    }
    return acc / static_cast<double>(val_indices.size());
}

MilParams round_through_f32(const MilParams& params) {
    MilParams out = params;
    for (Matrix* m : out.matrices()) {
        for (double& v : m->raw()) v = static_cast<double>(static_cast<float>(v));
    }
    return out;
}

// One training sample: either a labeled pseudo bag (cross-entropy branch)
// or an unlabeled one (consistency branch).
struct StepRef {
    bool labeled;
    PbRef ref;
};

struct LrState {
    double current;
    double reduced;
    double global_best_val = std::numeric_limits<double>::infinity();
    int plateau = 0;
    int drop_after;  // epochs of no improvement before the one-time drop
    bool dropped = false;

    void observe(double val_loss) {
        if (val_loss < global_best_val - kImprovementEps) {
            global_best_val = val_loss;
            plateau = 0;
        } else if (!dropped) {
            ++plateau;
            if (plateau >= drop_after) {
                current = reduced;
                dropped = true;
            }
        }
    }
};

struct Trainer {
    const Dataset& ds;
    const TrainConfig& cfg;
    std::vector<int> train_idx;
    std::vector<int> val_idx;
    MilParams student;
    MilParams teacher;
    bool teacher_ready = false;
    Adam adam;
    LrState lr;
    bool oracle_available = false;

    Trainer(const Dataset& ds_, const TrainConfig& cfg_)
        : ds(ds_),
          cfg(cfg_),
          train_idx(ds_.indices_of(Split::Train)),
          val_idx(ds_.indices_of(Split::Val)),
          student(init_params(ds_.dim(), kAttentionHidden, ds_.num_classes(), cfg_.seed)),
          adam(student) {
        lr.current = cfg.lr_initial;
        lr.reduced = cfg.lr_reduced;
        lr.drop_after = std::max(1, cfg.patience / 2);
        oracle_available = true;
        for (int idx : train_idx) {
            if (!ds.bags[idx].oracle_instance_labels) {
                oracle_available = false;
                break;
            }
        }
    }

    Matrix pseudo_features(const RoundPlan& plan, const PbRef& ref) const {
        const ParentPlan& parent = plan.parents[ref.parent];
        return gather_rows(ds.bags[parent.parent_index].features, parent.pseudo_bags[ref.pb].member_indices);
    }

    PartnerPool build_pool(const RoundPlan& plan) const {
        PartnerPool pool;
        for (size_t p = 0; p < plan.parents.size(); ++p) {
            const ParentPlan& parent = plan.parents[p];
            for (size_t i = 0; i < parent.pseudo_bags.size(); ++i) {
                const PseudoBag& pb = parent.pseudo_bags[i];
                if (pb.status == PseudoBagStatus::Discarded) continue;
                pool.entries.push_back(
                    {parent.parent_index, static_cast<int>(p), static_cast<int>(i), effective_class(pb)});
            }
        }
        return pool;
    }

    // Runs one optimization step and returns the total loss value.
    double optimize_step(const RoundPlan& plan, const StepRef& step, const PartnerPool& pool, Rng& merge_rng,
                         RoundSummary* summary) {
        const ParentPlan& parent = plan.parents[step.ref.parent];
        const PseudoBag& pb = parent.pseudo_bags[step.ref.pb];
        Matrix features = pseudo_features(plan, step.ref);
        const int own_class = effective_class(pb);

        Tape tape;
        TapedMil taped;
        Tape::NodeId loss_node;
        if (step.labeled) {
            int target = pb.inherited_label;
            if (cfg.merge_supervised) {
                const int partner = select_partner(parent.parent_index, own_class, pool, ds.priority, merge_rng);
                if (partner >= 0) {
                    const auto& e = pool.entries[partner];
                    const MergedSample merged =
                        merge(features, own_class, pseudo_features(plan, {e.plan_parent, e.pb}), e.effective_class,
                              ds.priority);
                    features = merged.features;
                    target = merged.label;
                }
            }
            taped = forward_taped(tape, student, features);
            loss_node = tape.scale(taped_supervised_loss(tape, taped.probs, target, ds.num_classes()), 0.5);
        } else {
            // teacher sees the identity ("weak") view, student the merged
            // ("strong") view
            const std::vector<double> teacher_probs = forward(teacher, features).probs;
            const int partner = select_partner(parent.parent_index, own_class, pool, ds.priority, merge_rng);
            if (partner >= 0) {
                const auto& e = pool.entries[partner];
                features = merge(features, own_class, pseudo_features(plan, {e.plan_parent, e.pb}),
                                 e.effective_class, ds.priority)
                               .features;
            }
            taped = forward_taped(tape, student, features);
            loss_node = tape.scale(taped_consistency_loss(tape, taped.probs, teacher_probs), 0.5);
            if (summary) {
                ++summary->consistency_steps;
                summary->consistency_loss_sum += tape.value(loss_node).at(0, 0) * 2.0;
            }
        }

        const double loss_value = tape.value(loss_node).at(0, 0);
        if (!std::isfinite(loss_value)) {
            throw NumericError("training loss diverged (non-finite) on bag " + parent.parent_id);
        }

        tape.backward(loss_node);
        const std::vector<const Matrix*> grads = {&tape.grad(taped.v_att), &tape.grad(taped.w_att),
                                                  &tape.grad(taped.w_cls), &tape.grad(taped.b_cls)};
        adam.step(student, grads, lr.current);
        if (teacher_ready) ema_update(teacher, student, cfg.ema_decay);
        return loss_value;
    }

    // Shared epoch loop with per-round early stopping and the one-time lr
    // drop. Returns the phase summary; steps for the warm-up phase are the
    // whole train bags.
    PhaseSummary run_phase(int round_index, const RoundPlan& plan, const std::vector<StepRef>& steps,
                           RoundSummary* summary) {
        PhaseSummary phase;
        const PartnerPool pool = round_index > 0 ? build_pool(plan) : PartnerPool{};
        double loss_sum = 0.0;
        long loss_count = 0;
        double best_val = std::numeric_limits<double>::infinity();
        int since_best = 0;

        for (int epoch = 1; epoch <= cfg.epochs_per_round; ++epoch) {
            std::vector<StepRef> order = steps;
            Rng shuffle_rng(sub_seed(cfg.seed, "epoch_shuffle", static_cast<uint64_t>(round_index),
                                     static_cast<uint64_t>(epoch)));
            shuffle_rng.shuffle(order);
            Rng merge_rng(
                sub_seed(cfg.seed, "merge", static_cast<uint64_t>(round_index), static_cast<uint64_t>(epoch)));

            for (const StepRef& step : order) {
                loss_sum += optimize_step(plan, step, pool, merge_rng, summary);
                ++loss_count;
            }
            ++phase.epochs_run;

            const double val_loss = validation_loss(student, ds, val_idx);
            if (!std::isfinite(val_loss)) throw NumericError("validation loss diverged (non-finite)");
            lr.observe(val_loss);
            if (val_loss < best_val - kImprovementEps) {
                best_val = val_loss;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        }

        phase.train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        phase.best_val_loss = best_val;
        phase.val = evaluate(student, ds, Split::Val).metrics;
        return phase;
    }
};

}  // namespace

TrainReport train(const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    ds.validate();

    Trainer tr(ds, cfg);
    if (tr.train_idx.empty() || tr.val_idx.empty()) {
        throw ConfigError("training requires non-empty train and val splits");
    }

    TrainReport report;
    report.config = cfg;

    // Warm-up: plain supervised pass over whole bags so the teacher's
    // round-1 confidences mean something. No merging happens here — the
    // phase runs with an empty partner pool — and the teacher is born as a
    // copy of the warmed-up student.
    {
        RoundPlan warm_plan;
        std::vector<StepRef> steps;
        for (int idx : tr.train_idx) {
            const Bag& bag = ds.bags[idx];
            ParentPlan parent;
            parent.parent_index = idx;
            parent.parent_id = bag.id;
            std::vector<int> identity(bag.num_instances());
            for (int i = 0; i < bag.num_instances(); ++i) identity[i] = i;
            parent.pseudo_bags = split_interleaved(bag, idx, identity, 1);
            parent.pseudo_bags[0].transition(PseudoBagStatus::Labeled);
            warm_plan.parents.push_back(std::move(parent));
            steps.push_back({true, {static_cast<int>(warm_plan.parents.size()) - 1, 0}});
        }
        report.warmup = tr.run_phase(0, warm_plan, steps, nullptr);
        tr.teacher = tr.student;
        tr.teacher_ready = true;
    }

    double best_auc = -1.0;
    int best_round = 0;
    MilParams best_params;

    for (int round = 1; round <= cfg.rounds; ++round) {
        AdapseOptions opt;
        opt.pseudo_bags = cfg.pseudo_bags;
        opt.max_pseudo_labels = cfg.max_pseudo_labels;
        opt.gamma_fix = cfg.gamma_fix;
        opt.gamma_ada = gamma_ada_schedule(round, cfg.rounds, cfg.gamma_0, cfg.gamma_max);
        opt.iis_mode = cfg.iis_mode;
        opt.shapley_samples_per_instance = cfg.shapley_samples_per_instance;
        opt.seed = cfg.seed;
        opt.round_index = round;

        RoundPlan plan = build_round_plan(tr.teacher, cfg.iis_from_teacher ? tr.teacher : tr.student, ds,
                                          tr.train_idx, opt);
        if (plan.labeled.empty() && plan.unlabeled.empty()) {
            throw ConfigError("round " + std::to_string(round) + " produced neither labeled nor unlabeled bags");
        }

        RoundSummary summary;
        summary.round = round;
        summary.gamma_ada = opt.gamma_ada;
        summary.gamma_fix = opt.gamma_fix;
        summary.pseudo_bag_count = plan.surviving_count();
        summary.labeled_count = static_cast<int>(plan.labeled.size());
        summary.unlabeled_count = static_cast<int>(plan.unlabeled.size());
        summary.discarded_count = plan.discarded_count();
        for (const ParentPlan& p : plan.parents) {
            if (p.retention_applied) ++summary.retained_parents;
        }

        if (tr.oracle_available) {
            const PseAccResult pa = pse_acc(plan, ds);
            summary.pse_acc_labeled = pa.labeled_only;
            summary.pse_acc_all = pa.all_bags;
            const RoundPlan random_plan = random_split_plan(
                ds, tr.train_idx, cfg.pseudo_bags, sub_seed(cfg.seed, "random_baseline", static_cast<uint64_t>(round)));
            summary.pse_acc_random = pse_acc(random_plan, ds).all_bags;
        }

        std::vector<StepRef> steps;
        for (const PbRef& ref : plan.labeled) steps.push_back({true, ref});
        for (const PbRef& ref : plan.unlabeled) steps.push_back({false, ref});

        summary.phase = tr.run_phase(round, plan, steps, &summary);

        const double round_auc = summary.phase.val.auc;
        if (round_auc > best_auc) {
            best_auc = round_auc;
            best_round = round;
            best_params = tr.student;
        }

        report.rounds.push_back(std::move(summary));
        report.plans.push_back(std::move(plan));
    }

    report.best_round = best_round;
    report.best_val_auc = best_auc;
    // Final metrics are computed on the float32-rounded best weights — the
    // exact tensor a reload of checkpoint_best.bin yields.
    report.best_params = round_through_f32(best_params);
    report.final_params = tr.student;
    const EvalResult test = evaluate(report.best_params, ds, Split::Test);
    report.test_metrics = test.metrics;
    report.test_predictions = test.dump;
    return report;
}

nlohmann::ordered_json TrainReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = config.to_json();

    nlohmann::ordered_json warm;
    warm["epochs_run"] = warmup.epochs_run;
    warm["train_loss"] = warmup.train_loss;
    warm["best_val_loss"] = warmup.best_val_loss;
    warm["val"] = warmup.val.to_json();
    j["warmup"] = std::move(warm);

    nlohmann::ordered_json rounds_json = nlohmann::ordered_json::array();
    for (const RoundSummary& r : rounds) {
        nlohmann::ordered_json e;
        e["round"] = r.round;
        e["gamma_ada"] = r.gamma_ada;
        e["gamma_fix"] = r.gamma_fix;
        e["pseudo_bags"] = r.pseudo_bag_count;
        e["labeled"] = r.labeled_count;
        e["unlabeled"] = r.unlabeled_count;
        e["discarded"] = r.discarded_count;
        e["retained_parents"] = r.retained_parents;
        e["pse_acc_labeled"] = r.pse_acc_labeled ? nlohmann::ordered_json(*r.pse_acc_labeled)
                                                 : nlohmann::ordered_json(nullptr);
        e["pse_acc_all"] = r.pse_acc_all ? nlohmann::ordered_json(*r.pse_acc_all) : nlohmann::ordered_json(nullptr);
        e["pse_acc_random"] =
            r.pse_acc_random ? nlohmann::ordered_json(*r.pse_acc_random) : nlohmann::ordered_json(nullptr);
        e["consistency_steps"] = r.consistency_steps;
        e["consistency_loss_sum"] = r.consistency_loss_sum;
        e["epochs_run"] = r.phase.epochs_run;
        e["train_loss"] = r.phase.train_loss;
        e["best_val_loss"] = r.phase.best_val_loss;
        e["val"] = r.phase.val.to_json();
        rounds_json.push_back(std::move(e));
    }
    j["rounds"] = std::move(rounds_json);

    j["best_round"] = best_round;
    j["best_val_auc"] = best_val_auc;
    j["best_checkpoint"] = "checkpoint_best.bin";

    nlohmann::ordered_json final_test;
    final_test["metrics"] = test_metrics.to_json();
    nlohmann::ordered_json preds = nlohmann::ordered_json::array();
    for (const SampleDump& s : test_predictions) {
        nlohmann::ordered_json e;
        e["id"] = s.id;
        e["true_label"] = s.true_label;
        e["predicted"] = s.predicted;
        e["probs"] = s.probs;
        preds.push_back(std::move(e));
    }
    final_test["predictions"] = std::move(preds);
    j["final_test"] = std::move(final_test);
    return j;
}

void write_training_artifacts(const TrainReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    {
        std::ofstream out(out_dir / "report.json", std::ios::trunc);
        if (!out) throw IoError("cannot write report.json");
        out << report.to_json().dump(2) << "\n";
    }
    {
        nlohmann::ordered_json plans = nlohmann::ordered_json::array();
        for (const RoundPlan& plan : report.plans) plans.push_back(plan.to_json());
        std::ofstream out(out_dir / "round_plans.json", std::ios::trunc);
        if (!out) throw IoError("cannot write round_plans.json");
        out << plans.dump(2) << "\n";
    }
    write_pseacc_csv(report, out_dir / "pseacc.csv");
    save_checkpoint(report.best_params, out_dir / "checkpoint_best.bin", report.config.seed, report.best_round);
    save_checkpoint(report.final_params, out_dir / "checkpoint_final.bin", report.config.seed,
                    static_cast<int>(report.rounds.size()));
}

void write_pseacc_csv(const TrainReport& report, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + csv_path.string());
    out << "round,method,pseacc\n";
    char buf[64];
    for (const RoundSummary& r : report.rounds) {
        if (r.pse_acc_labeled) {
            std::snprintf(buf, sizeof(buf), "%d,adapse,%.6f\n", r.round, *r.pse_acc_labeled);
            out << buf;
        }
        if (r.pse_acc_random) {
            std::snprintf(buf, sizeof(buf), "%d,random,%.6f\n", r.round, *r.pse_acc_random);
            out << buf;
        }
    }
    if (!out) throw IoError("write failure on " + csv_path.string());
}

}  // namespace swsmil
