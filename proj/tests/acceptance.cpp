// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one PASS/FAIL line each. Exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "swsmil/adapse.hpp"
#include "swsmil/error.hpp"
#include "swsmil/feature_store.hpp"
#include "swsmil/iis.hpp"
#include "swsmil/mergeup.hpp"
#include "swsmil/metrics.hpp"
#include "swsmil/rng.hpp"
#include "swsmil/synthgen.hpp"
#include "swsmil/trainer.hpp"
#include "test_util.hpp"

using namespace swsmil;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
// End-to-end learning on the canonical benchmark: test ACC >= 0.95 and
// AUC >= 0.98 within 10 rounds, single-threaded wall clock under 5 minutes.
bool end_to_end_learning(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = generate(default_benchmark());
    const TrainConfig cfg;  // paper-default configuration
    const TrainReport report = train(ds, cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool ok = report.test_metrics.acc >= 0.95 && report.test_metrics.auc >= 0.98 && seconds < 300.0;
    detail = "ACC " + fmt(report.test_metrics.acc) + " (>=0.95), AUC " + fmt(report.test_metrics.auc) +
             " (>=0.98), " + fmt(seconds) + "s (<300s), rounds " + std::to_string(report.rounds.size());
    return ok;
}

// ---------------------------------------------------------------- criterion 2
// In the hard 2-sigma regime the adaptive assignment labels pseudo bags at
// least 0.05 more accurately than inherit-all random splitting, averaged
// over rounds and 5 seeds.
bool pseacc_ordering(std::string& detail) {
    double margin_sum = 0.0;
    std::string per_seed;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        SynthSpec spec = benchmark_with_separation(2.0, 100 + seed);
        spec.num_train = 80;
        spec.num_val = 20;
        spec.num_test = 20;
        const Dataset ds = generate(spec);

        TrainConfig cfg;
        cfg.epochs_per_round = 6;
        cfg.seed = seed;
        const TrainReport report = train(ds, cfg);

        double adapse = 0.0, random_baseline = 0.0;
        for (const RoundSummary& r : report.rounds) {
            adapse += r.pse_acc_labeled.value();
            random_baseline += r.pse_acc_random.value();
        }
        adapse /= static_cast<double>(report.rounds.size());
        random_baseline /= static_cast<double>(report.rounds.size());
        margin_sum += adapse - random_baseline;
        per_seed += (per_seed.empty() ? "" : " ") + fmt(adapse - random_baseline);
    }
    const double margin = margin_sum / 5.0;
    detail = "mean margin " + fmt(margin) + " (>=0.05) over seeds [" + per_seed + "]";
    return margin >= 0.05;
}

// ---------------------------------------------------------------- criterion 3
// Analytic gradients of the equal-weighted total loss match central finite
// differences (relative error < 1e-4) at 100 random coordinates on the
// miniature scenario: 2 bags, N=4, d=3, C=2.
bool gradient_correctness(std::string& detail) {
    Rng rng(17);
    const int d = 3, h = 32, c = 2;
    MilParams params = init_params(d, h, c, 1234);
    const Matrix bag_a = test_util::random_matrix(4, d, rng, -2.0, 2.0);
    const Matrix bag_b = test_util::random_matrix(4, d, rng, -2.0, 2.0);
    const std::vector<double> teacher = {0.4, 0.6};

    struct Graph {
        Tape tape;
        TapedMil tm;
        Tape::NodeId loss;
    };
    const auto build = [&]() {
        Graph g;
        g.tm = forward_taped(g.tape, params, bag_a);
        const auto sup = taped_supervised_loss(g.tape, g.tm.probs, 1, c);
        const TapedHeads heads = forward_on_tape(g.tape, g.tm, bag_b);
        const auto con = taped_consistency_loss(g.tape, heads.probs, teacher);
        g.loss = g.tape.add(g.tape.scale(con, 0.5), g.tape.scale(sup, 0.5));
        return g;
    };

    Graph g = build();
    g.tape.backward(g.loss);
    const Tape::NodeId leaves[] = {g.tm.v_att, g.tm.w_att, g.tm.w_cls, g.tm.b_cls};

    auto mats = params.matrices();
    std::vector<std::pair<int, int>> coords;
    for (size_t p = 0; p < mats.size(); ++p)
        for (size_t k = 0; k < mats[p]->size(); ++k) coords.push_back({static_cast<int>(p), static_cast<int>(k)});
    Rng pick(18);
    pick.shuffle(coords);
    coords.resize(100);

    double worst = 0.0;
    for (const auto& [p, k] : coords) {
        const double analytic = g.tape.grad(leaves[p]).raw()[k];
        const double fd = test_util::central_difference(
            [&]() {
                Graph g2 = build();
                return g2.tape.value(g2.loss).at(0, 0);
            },
            mats[p]->raw()[k]);
        worst = std::max(worst, test_util::rel_error(analytic, fd));
    }
    detail = "worst relative error " + fmt(worst) + " over 100 coordinates (<1e-4)";
    return worst < 1e-4;
}

// ---------------------------------------------------------------- criterion 4
// 1,000 randomized rounds of the split/discard/recycle/label machinery with
// zero violations of partition-after-recycle, the discard predicate,
// threshold monotonicity, and interleaving balance.
bool adapse_structural(std::string& detail) {
    long violations = 0;
    Rng rng(40);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rng.uniform_int(1, 60);
        const int m = std::min(rng.uniform_int(1, 12), n);
        const int num_classes = rng.uniform_int(2, 4);
        Bag bag;
        bag.id = "t" + std::to_string(trial);
        bag.label = rng.uniform_int(0, num_classes - 1);
        bag.features = test_util::random_matrix(n, 3, rng);
        const std::vector<int> order = Rng(5000 + trial).permutation(n);
        const double gamma_fix = rng.uniform(0.5, 0.99);
        const double gamma_ada = rng.uniform(0.05, 0.99);
        const int l_max = rng.uniform_int(1, 8);

        auto pbs = split_interleaved(bag, 0, order, m);

        // interleaving balance before recycling
        int min_size = n + 1, max_size = 0;
        for (const PseudoBag& pb : pbs) {
            min_size = std::min(min_size, pb.size());
            max_size = std::max(max_size, pb.size());
        }
        if (max_size - min_size > 1) ++violations;

        for (auto& pb : pbs) {
            pb.prediction = rng.uniform_int(0, num_classes - 1);
            pb.confidence = rng.uniform();
        }
        const auto annotated = pbs;
        const DiscardOutcome outcome = discard_mislabeled(pbs, gamma_fix);

        // discard predicate, allowing for the documented retention exception
        for (size_t i = 0; i < pbs.size(); ++i) {
            const bool wants_discard =
                *annotated[i].prediction != annotated[i].inherited_label && *annotated[i].confidence >= gamma_fix;
            const bool discarded = pbs[i].status == PseudoBagStatus::Discarded;
            if (discarded && !wants_discard) ++violations;
            if (!discarded && wants_discard &&
                !(outcome.retention_applied && outcome.retained_index == static_cast<int>(i))) {
                ++violations;
            }
        }

        recycle(pbs, outcome, order);

        // partition after recycle
        std::vector<int> count(n, 0);
        bool increasing = true;
        for (const PseudoBag& pb : pbs) {
            if (pb.status == PseudoBagStatus::Discarded) continue;
            for (size_t k = 0; k < pb.member_indices.size(); ++k) {
                ++count[pb.member_indices[k]];
                if (k > 0 && pb.member_indices[k] <= pb.member_indices[k - 1]) increasing = false;
            }
        }
        if (!increasing) ++violations;
        for (int i = 0; i < n; ++i) {
            if (count[i] != 1) {
                ++violations;
                break;
            }
        }

        // re-classify (random re-annotation) and label adaptively
        for (int r : outcome.remaining) {
            pbs[r].prediction = rng.uniform_int(0, num_classes - 1);
            pbs[r].confidence = rng.uniform();
        }
        auto lower = pbs;
        assign_labels(pbs, outcome.remaining, gamma_ada, l_max);

        int labeled = 0;
        for (int r : outcome.remaining) {
            const bool is_labeled = pbs[r].status == PseudoBagStatus::Labeled;
            if (is_labeled) ++labeled;
            if (pbs[r].status == PseudoBagStatus::Pending) ++violations;
            const bool qualifies =
                *pbs[r].prediction == pbs[r].inherited_label && *pbs[r].confidence >= gamma_ada;
            if (is_labeled && !qualifies) ++violations;
        }
        if (labeled > l_max) ++violations;

        // threshold monotonicity: a stricter gamma labels a subset, cap
        // included (the cap fills from the highest confidences, which the
        // stricter threshold can only trim from below)
        const double stricter = gamma_ada + (1.0 - gamma_ada) * 0.5;
        assign_labels(lower, outcome.remaining, stricter, l_max);
        for (int r : outcome.remaining) {
            if (lower[r].status == PseudoBagStatus::Labeled && pbs[r].status != PseudoBagStatus::Labeled) {
                ++violations;
            }
        }
    }
    detail = std::to_string(violations) + " violations over 1000 randomized rounds (=0)";
    return violations == 0;
}

// ---------------------------------------------------------------- criterion 5
// MergeUp: exhaustive label-max for C in {2,3,4}, iterated-merge stability,
// size additivity, and model-forward equivalence to a concatenated bag
// within 1e-12.
bool mergeup_suite(std::string& detail) {
    Rng rng(50);
    long failures = 0;

    for (int c = 2; c <= 4; ++c) {
        for (int perm_trial = 0; perm_trial < 6; ++perm_trial) {
            std::vector<std::string> names;
            for (int i = 0; i < c; ++i) names.push_back("c" + std::to_string(i));
            const ClassPriority priority(names, Rng(c * 37 + perm_trial).permutation(c));
            for (int a = 0; a < c; ++a) {
                for (int b = 0; b < c; ++b) {
                    const Matrix fa = test_util::random_matrix(3, 2, rng);
                    const Matrix fb = test_util::random_matrix(2, 2, rng);
                    const MergedSample merged = merge(fa, a, fb, b, priority);
                    const int want = priority.rank(a) >= priority.rank(b) ? a : b;
                    if (merged.label != want) ++failures;
                    if (merged.features.rows() != 5) ++failures;
                }
            }
        }
    }

    // iterated merges never change a top-priority label
    {
        const ClassPriority priority = ClassPriority::ascending({"normal", "tumor"});
        Matrix acc = test_util::random_matrix(4, 3, rng);
        int rows = 4;
        for (int k = 0; k < 25; ++k) {
            const MergedSample merged = merge(acc, 1, test_util::random_matrix(3, 3, rng), 0, priority);
            rows += 3;
            if (merged.label != 1 || merged.features.rows() != rows) ++failures;
            acc = merged.features;
        }
    }

    // model-level equivalence
    double worst = 0.0;
    {
        const ClassPriority priority = ClassPriority::ascending({"normal", "tumor"});
        const MilParams model = init_params(5, 12, 2, 51);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix fa = test_util::random_matrix(rng.uniform_int(1, 8), 5, rng);
            const Matrix fb = test_util::random_matrix(rng.uniform_int(1, 8), 5, rng);
            const MergedSample merged = merge(fa, 1, fb, 0, priority);
            const Prediction on_merged = forward(model, merged.features);
            const Prediction on_concat = forward(model, concat_rows(fa, fb));
            const Prediction reversed = forward(model, concat_rows(fb, fa));
            for (int cc = 0; cc < 2; ++cc) {
                worst = std::max(worst, std::fabs(on_merged.probs[cc] - on_concat.probs[cc]));
                worst = std::max(worst, std::fabs(on_merged.probs[cc] - reversed.probs[cc]));
            }
        }
    }
    if (worst >= 1e-12) ++failures;

    detail = std::to_string(failures) + " failures, forward equivalence gap " + fmt(worst * 1e12) + "e-12 (<1e-12)";
    return failures == 0;
}

// ---------------------------------------------------------------- criterion 6
// Metric oracles: AUC equals pairwise Mann-Whitney counting and F1/ACC equal
// confusion-matrix recomputation on 1,000 random dumps, exact to 1e-12.
bool metric_oracles(std::string& detail) {
    long failures = 0;
    double worst = 0.0;
    for (uint64_t trial = 0; trial < 1000; ++trial) {
        Rng rng(7000 + trial);
        const int c = 2 + static_cast<int>(trial % 3);
        const int n = rng.uniform_int(c + 2, 40);
        PredictionDump dump;
        for (int i = 0; i < n; ++i) {
            SampleDump s;
            s.probs.resize(c);
            double sum = 0.0;
            for (double& p : s.probs) {
                p = rng.uniform(0.01, 1.0);
                sum += p;
            }
            for (double& p : s.probs) p = std::round(p / sum * 50.0) / 50.0;  // quantize for ties
            s.true_label = i < c ? i : rng.uniform_int(0, c - 1);
            s.predicted = static_cast<int>(std::max_element(s.probs.begin(), s.probs.end()) - s.probs.begin());
            dump.push_back(std::move(s));
        }
        const MetricsBundle bundle = compute_metrics(dump, c);

        long correct = 0;
        for (const SampleDump& s : dump) {
            if (s.predicted == s.true_label) ++correct;
        }
        worst = std::max(worst, std::fabs(bundle.acc - static_cast<double>(correct) / n));

        for (int cls = 0; cls < c; ++cls) {
            if (!bundle.per_class_auc[cls]) continue;
            double credit = 0.0;
            long pairs = 0;
            for (const SampleDump& pos : dump) {
                if (pos.true_label != cls) continue;
                for (const SampleDump& neg : dump) {
                    if (neg.true_label == cls) continue;
                    ++pairs;
                    if (pos.probs[cls] > neg.probs[cls]) credit += 1.0;
                    else if (pos.probs[cls] == neg.probs[cls]) credit += 0.5;
                }
            }
            worst = std::max(worst, std::fabs(*bundle.per_class_auc[cls] - credit / pairs));
        }

        double f1_sum = 0.0;
        for (int cls = 0; cls < c; ++cls) {
            long tp = bundle.confusion[cls][cls], fp = 0, fn = 0;
            for (int r = 0; r < c; ++r)
                if (r != cls) fp += bundle.confusion[r][cls];
            for (int j = 0; j < c; ++j)
                if (j != cls) fn += bundle.confusion[cls][j];
            const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
            const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
            f1_sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        }
        worst = std::max(worst, std::fabs(bundle.f1 - f1_sum / c));
        if (worst >= 1e-12) {
            ++failures;
            break;
        }
    }
    detail = "worst deviation " + fmt(worst * 1e12) + "e-12 over 1000 dumps (<1e-12)";
    return failures == 0 && worst < 1e-12;
}

// ---------------------------------------------------------------- criterion 7
// The degenerate configuration (R=1, M=1, gamma_ada=0) reduces to plain
// supervised whole-bag training: one whole-bag pseudo bag per parent, all
// labeled, zero consistency term — asserted from the round-plan log.
bool degenerate_reduction(std::string& detail) {
    SynthSpec spec = default_benchmark();
    spec.num_train = 30;
    spec.num_val = 10;
    spec.num_test = 10;
    const Dataset ds = generate(spec);

    TrainConfig cfg;
    cfg.rounds = 1;
    cfg.pseudo_bags = 1;
    cfg.gamma_0 = 0.0;
    cfg.gamma_max = 0.0;
    cfg.merge_supervised = false;
    cfg.epochs_per_round = 3;
    const TrainReport report = train(ds, cfg);

    bool ok = report.rounds.size() == 1 && report.plans.size() == 1;
    const RoundSummary& r = report.rounds[0];
    ok = ok && r.unlabeled_count == 0 && r.consistency_steps == 0 && r.consistency_loss_sum == 0.0;
    int whole_bag = 0;
    for (const ParentPlan& parent : report.plans[0].parents) {
        if (parent.pseudo_bags.size() != 1) continue;
        const PseudoBag& pb = parent.pseudo_bags[0];
        if (pb.status == PseudoBagStatus::Labeled &&
            pb.size() == ds.bags[parent.parent_index].num_instances()) {
            ++whole_bag;
        }
    }
    ok = ok && whole_bag == 30;
    detail = std::to_string(whole_bag) + "/30 whole-bag labeled pseudo bags, " +
             std::to_string(r.unlabeled_count) + " unlabeled, consistency steps " +
             std::to_string(r.consistency_steps);
    return ok;
}

// ---------------------------------------------------------------- criterion 8
// Two runs with identical config+seed produce byte-identical report.json and
// checkpoints.
bool determinism(std::string& detail) {
    SynthSpec spec = default_benchmark();
    spec.num_train = 40;
    spec.num_val = 10;
    spec.num_test = 10;
    const Dataset ds = generate(spec);

    TrainConfig cfg;
    cfg.rounds = 3;
    cfg.epochs_per_round = 4;
    cfg.seed = 2718;

    const fs::path dir_a = fs::temp_directory_path() / "swsmil_accept_det_a";
    const fs::path dir_b = fs::temp_directory_path() / "swsmil_accept_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    write_training_artifacts(train(ds, cfg), dir_a);
    write_training_artifacts(train(ds, cfg), dir_b);

    int identical = 0;
    const std::vector<std::string> files = {"report.json", "round_plans.json", "pseacc.csv", "checkpoint_best.bin",
                                            "checkpoint_final.bin"};
    for (const std::string& name : files) {
        const std::string a = slurp(dir_a / name);
        if (!a.empty() && a == slurp(dir_b / name)) ++identical;
    }
    detail = std::to_string(identical) + "/" + std::to_string(files.size()) + " artifacts byte-identical";
    return identical == static_cast<int>(files.size());
}

// ---------------------------------------------------------------- criterion 9
// Monte-Carlo Shapley IIS within 0.02 of the exhaustive N=6 enumeration at
// 5,000 samples; efficiency axiom within 1e-9 in exact mode.
bool shapley_iis(std::string& detail) {
    double worst_gap = 0.0;
    double worst_eff = 0.0;
    for (uint64_t trial = 0; trial < 3; ++trial) {
        const MilParams model = init_params(4, 8, 2, 900 + trial);
        Rng rng(910 + trial);
        Bag bag;
        bag.id = "shap";
        bag.label = 1;
        bag.features = test_util::random_matrix(6, 4, rng, -2.0, 2.0);

        const std::vector<double> exact = test_util::exact_shapley(model, bag);
        const IisVector mc = iis_shapley(model, bag, 5000, 77 + trial);
        for (int j = 0; j < 6; ++j) worst_gap = std::max(worst_gap, std::fabs(mc.scores[j] - exact[j]));

        const double total = std::accumulate(exact.begin(), exact.end(), 0.0);
        const double full = forward(model, bag.features).probs[bag.label];
        const double baseline = forward(model, Matrix(1, 4)).probs[bag.label];
        worst_eff = std::max(worst_eff, std::fabs(total - (full - baseline)));
    }
    detail = "MC gap " + fmt(worst_gap) + " (<0.02), efficiency residual " + fmt(worst_eff * 1e9) + "e-9 (<1e-9)";
    return worst_gap < 0.02 && worst_eff < 1e-9;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"end-to-end learning (default benchmark)", end_to_end_learning},
        {"pseudo-label accuracy ordering (2-sigma regime)", pseacc_ordering},
        {"gradient correctness (miniature scenario)", gradient_correctness},
        {"adapse structural invariants (1000 rounds)", adapse_structural},
        {"mergeup suite", mergeup_suite},
        {"metric oracles (1000 dumps)", metric_oracles},
        {"degenerate-config reduction", degenerate_reduction},
        {"determinism (byte-identical artifacts)", determinism},
        {"shapley IIS (monte carlo vs exact)", shapley_iis},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %s — %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
