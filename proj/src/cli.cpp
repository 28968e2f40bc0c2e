#include "swsmil/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "swsmil/error.hpp"
#include "swsmil/feature_store.hpp"
#include "swsmil/synthgen.hpp"
#include "swsmil/trainer.hpp"

namespace swsmil::cli {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

TrainConfig load_train_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    TrainConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file: " + config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
        }
        cfg = TrainConfig::from_json(j);
    }
    for (const std::string& assignment : overrides) cfg.apply_override(assignment);
    return cfg;
}

SynthSpec load_synth_spec(const std::string& spec_path, const std::vector<std::string>& overrides) {
    nlohmann::json j = nlohmann::json::object();
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw ConfigError("cannot open spec file: " + spec_path);
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("spec file " + spec_path + " is not valid JSON: " + e.what());
        }
    }
    // overrides operate on the JSON view so every spec key is reachable
    nlohmann::json merged = SynthSpec::from_json(j).to_json();
    for (const std::string& assignment : overrides) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override must look like key=value, got: " + assignment);
        }
        const std::string key = assignment.substr(0, eq);
        const std::string value = assignment.substr(eq + 1);
        if (!merged.contains(key)) throw ConfigError("unknown synth spec key: " + key);
        if (merged[key].is_string()) {
            merged[key] = value;
        } else {
            try {
                merged[key] = nlohmann::json::parse(value);
            } catch (const nlohmann::json::exception&) {
                throw ConfigError("cannot parse override value for " + key + ": " + value);
            }
        }
    }
    return SynthSpec::from_json(merged);
}

int cmd_synth(const std::string& spec_path, bool use_default, const std::string& out_dir,
              const std::vector<std::string>& overrides) {
    if (use_default && !spec_path.empty()) {
        throw ConfigError("pass either a spec file or --default, not both");
    }
    if (!use_default && spec_path.empty()) {
        throw ConfigError("need a spec file or --default");
    }
    const SynthSpec spec = load_synth_spec(spec_path, overrides);
    const Dataset ds = generate(spec);
    save_feature_store(ds, out_dir);

    long instances = 0;
    std::map<int, int> per_class;
    for (const Bag& bag : ds.bags) {
        instances += bag.num_instances();
        ++per_class[bag.label];
    }
    std::cout << "wrote " << ds.bags.size() << " bags (" << instances << " instances, dim " << ds.dim() << ") to "
              << out_dir << "\n";
    for (const auto& [label, count] : per_class) {
        std::cout << "  class " << label << " (" << ds.priority.name(label) << "): " << count << " bags\n";
    }
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& out_dir, const std::string& config_path,
              const std::vector<std::string>& overrides) {
    const TrainConfig cfg = load_train_config(config_path, overrides);
    const Dataset ds = load_feature_store(data_dir);
    const TrainReport report = train(ds, cfg);
    write_training_artifacts(report, out_dir);

    std::cout << "warmup: epochs " << report.warmup.epochs_run << ", val_loss " << report.warmup.best_val_loss
              << ", val_auc " << report.warmup.val.auc << "\n";
    for (const RoundSummary& r : report.rounds) {
        std::cout << "round " << r.round << ": gamma_ada " << r.gamma_ada << ", labeled " << r.labeled_count
                  << ", unlabeled " << r.unlabeled_count << ", discarded " << r.discarded_count;
        if (r.pse_acc_labeled) std::cout << ", pse_acc " << *r.pse_acc_labeled;
        std::cout << ", val_auc " << r.phase.val.auc << "\n";
    }
    std::cout << "best round " << report.best_round << " (val_auc " << report.best_val_auc << ")\n";
    std::cout << "test: acc " << report.test_metrics.acc << ", auc " << report.test_metrics.auc << ", f1 "
              << report.test_metrics.f1 << "\n";
    std::cout << "artifacts in " << out_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_dir, const std::string& split_name) {
    const auto split = split_from_string(split_name);
    if (!split) throw ConfigError("split must be train, val or test");
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const Dataset ds = load_feature_store(data_dir);
    if (ckpt.params.dim() != ds.dim()) {
        throw DimensionError("checkpoint dim " + std::to_string(ckpt.params.dim()) + " != dataset dim " +
                             std::to_string(ds.dim()));
    }
    const EvalResult result = evaluate(ckpt.params, ds, *split);

    nlohmann::ordered_json j;
    j["split"] = split_name;
    j["metrics"] = result.metrics.to_json();
    nlohmann::ordered_json preds = nlohmann::ordered_json::array();
    for (const SampleDump& s : result.dump) {
        nlohmann::ordered_json e;
        e["id"] = s.id;
        e["true_label"] = s.true_label;
        e["predicted"] = s.predicted;
        e["probs"] = s.probs;
        preds.push_back(std::move(e));
    }
    j["predictions"] = std::move(preds);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_pseacc(const std::string& data_dir, const std::string& out_csv, const std::string& config_path,
               const std::vector<std::string>& overrides) {
    const TrainConfig cfg = load_train_config(config_path, overrides);
    const Dataset ds = load_feature_store(data_dir);
    for (int idx : ds.indices_of(Split::Train)) {
        if (!ds.bags[idx].oracle_instance_labels) {
            throw DataError("pseacc needs oracle instance labels on every train bag; bag " + ds.bags[idx].id +
                            " has none");
        }
    }
    const TrainReport report = train(ds, cfg);
    write_pseacc_csv(report, out_csv);

    double adapse_mean = 0.0, random_mean = 0.0;
    for (const RoundSummary& r : report.rounds) {
        adapse_mean += r.pse_acc_labeled.value_or(0.0);
        random_mean += r.pse_acc_random.value_or(0.0);
    }
    adapse_mean /= static_cast<double>(report.rounds.size());
    random_mean /= static_cast<double>(report.rounds.size());
    std::cout << "mean pseacc over " << report.rounds.size() << " rounds: adapse " << adapse_mean << ", random "
              << random_mean << "\n";
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

int cmd_heatmap(const std::string& checkpoint_path, const std::string& data_dir, const std::string& bag_id,
                const std::string& out_csv) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const Dataset ds = load_feature_store(data_dir);
    const Bag* bag = ds.find(bag_id);
    if (!bag) throw DataError("unknown bag id: " + bag_id);
    if (ckpt.params.dim() != bag->dim()) {
        throw DimensionError("checkpoint dim does not match dataset dim");
    }
    const Prediction pred = forward(ckpt.params, bag->features);

    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_csv);
    const bool oracle = bag->oracle_instance_labels.has_value();
    out << (oracle ? "instance_index,attention_score,oracle_label\n" : "instance_index,attention_score\n");
    char buf[96];
    for (int i = 0; i < bag->num_instances(); ++i) {
        if (oracle) {
            std::snprintf(buf, sizeof(buf), "%d,%.12f,%d\n", i, pred.attention[i], (*bag->oracle_instance_labels)[i]);
        } else {
            std::snprintf(buf, sizeof(buf), "%d,%.12f\n", i, pred.attention[i]);
        }
        out << buf;
    }
    std::cout << "wrote attention for bag " << bag_id << " (N=" << bag->num_instances() << ", predicted "
              << pred.label << " at confidence " << pred.confidence << ") to " << out_csv << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"semi-weakly supervised MIL on feature bags: adaptive pseudo bags, MergeUp, student-teacher"};
    app.require_subcommand(1);

    std::string spec_path, out_dir, data_dir, config_path, checkpoint_path, split_name = "test", bag_id, out_csv;
    bool use_default = false;
    std::vector<std::string> overrides;

    auto* synth = app.add_subcommand("synth", "generate a synthetic feature store");
    std::vector<std::string> synth_args;
    synth->add_option("args", synth_args, "[spec.json] OUT_DIR")->expected(1, 2);
    synth->add_flag("--default", use_default, "use the built-in benchmark spec");
    synth->add_option("--set", overrides, "override a spec key (key=value)");

    auto* train_cmd = app.add_subcommand("train", "train on a feature store");
    train_cmd->add_option("data", data_dir, "feature store directory")->required();
    train_cmd->add_option("out", out_dir, "output directory")->required();
    train_cmd->add_option("--config", config_path, "train config JSON");
    train_cmd->add_option("--set", overrides, "override a config key (key=value)");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    eval_cmd->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    eval_cmd->add_option("data", data_dir, "feature store directory")->required();
    eval_cmd->add_option("--split", split_name, "train|val|test (default test)");

    auto* pseacc_cmd = app.add_subcommand("pseacc", "compare pseudo-label accuracy against a random-split baseline");
    pseacc_cmd->add_option("data", data_dir, "feature store directory")->required();
    pseacc_cmd->add_option("out", out_csv, "output CSV path")->required();
    pseacc_cmd->add_option("--config", config_path, "train config JSON");
    pseacc_cmd->add_option("--set", overrides, "override a config key (key=value)");

    auto* heatmap_cmd = app.add_subcommand("heatmap", "export per-instance attention scores");
    heatmap_cmd->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    heatmap_cmd->add_option("data", data_dir, "feature store directory")->required();
    heatmap_cmd->add_option("bag", bag_id, "bag id")->required();
    heatmap_cmd->add_option("out", out_csv, "output CSV path")->required();

    std::vector<const char*> argv;
    argv.push_back("swsmil");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (synth->parsed()) {
            if (synth_args.size() == 2) {
                spec_path = synth_args[0];
                out_dir = synth_args[1];
            } else {
                out_dir = synth_args[0];
            }
            return cmd_synth(spec_path, use_default, out_dir, overrides);
        }
        if (train_cmd->parsed()) return cmd_train(data_dir, out_dir, config_path, overrides);
        if (eval_cmd->parsed()) return cmd_eval(checkpoint_path, data_dir, split_name);
        if (pseacc_cmd->parsed()) return cmd_pseacc(data_dir, out_csv, config_path, overrides);
        if (heatmap_cmd->parsed()) return cmd_heatmap(checkpoint_path, data_dir, bag_id, out_csv);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace swsmil::cli
