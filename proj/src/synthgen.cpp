#include "swsmil/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "swsmil/error.hpp"
#include "swsmil/rng.hpp"

namespace swsmil {

void SynthSpec::validate() const {
    if (num_train < 1 || num_val < 0 || num_test < 0) throw DomainError("synth spec: bag counts invalid");
    if (instances_min < 1 || instances_max < instances_min) {
        throw DomainError("synth spec: instance range invalid");
    }
    if (dim < 1) throw DomainError("synth spec: dim must be >= 1");
    if (num_classes() < 2) throw DomainError("synth spec: need at least 2 classes");
    if (static_cast<int>(class_means.size()) != num_classes()) {
        throw DomainError("synth spec: class_means count != class count");
    }
    for (const auto& mean : class_means) {
        if (static_cast<int>(mean.size()) != dim) throw DomainError("synth spec: class mean dim mismatch");
    }
    for (size_t i = 0; i < class_means.size(); ++i) {
        for (size_t j = i + 1; j < class_means.size(); ++j) {
            if (class_means[i] == class_means[j]) throw DomainError("synth spec: class means must be distinct");
        }
    }
    if (!(positive_ratio_min > 0.0 && positive_ratio_min <= positive_ratio_max && positive_ratio_max <= 1.0)) {
        throw DomainError("synth spec: positive ratio range must satisfy 0 < min <= max <= 1");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw DomainError("synth spec: noise_sigma must be finite and >= 0");
    }
}

namespace {

Bag make_bag(const SynthSpec& spec, const ClassPriority& priority, const std::string& id, int bag_class,
             uint64_t bag_seed) {
    Rng rng(bag_seed);
    const int n = rng.uniform_int(spec.instances_min, spec.instances_max);
    const int background = priority.lowest_class();

    std::vector<int> labels(n, background);
    if (bag_class != background) {
        const double ratio = rng.uniform(spec.positive_ratio_min, spec.positive_ratio_max);
        const int n_pos = std::max(1, static_cast<int>(std::llround(ratio * n)));
        std::vector<int> pick = rng.permutation(n);
        for (int k = 0; k < std::min(n_pos, n); ++k) labels[pick[k]] = bag_class;
    }

    Bag bag;
    bag.id = id;
    bag.label = bag_class;
    bag.features = Matrix(n, spec.dim);
    for (int i = 0; i < n; ++i) {
        const auto& mean = spec.class_means[labels[i]];
        for (int k = 0; k < spec.dim; ++k) {
            // round to float32 here so save/load round-trips bitwise
            bag.features.at(i, k) =
                static_cast<double>(static_cast<float>(mean[k] + spec.noise_sigma * rng.normal()));
        }
    }
    bag.oracle_instance_labels = std::move(labels);
    return bag;
}

}  // namespace

Dataset generate(const SynthSpec& spec) {
    spec.validate();
    Dataset ds;
    ds.priority = ClassPriority::ascending(spec.class_names);

    const struct {
        Split split;
        int count;
    } splits[] = {{Split::Train, spec.num_train}, {Split::Val, spec.num_val}, {Split::Test, spec.num_test}};

    for (const auto& [split, count] : splits) {
        for (int i = 0; i < count; ++i) {
            const int bag_class = i % spec.num_classes();  // round-robin keeps every split balanced
            char id[64];
            std::snprintf(id, sizeof(id), "%s_%04d", to_string(split), i);
            const uint64_t bag_seed =
                sub_seed(spec.seed, "synthgen_bag", static_cast<uint64_t>(split), static_cast<uint64_t>(i));
            Bag bag = make_bag(spec, ds.priority, id, bag_class, bag_seed);
            ds.split[bag.id] = split;
            ds.bags.push_back(std::move(bag));
        }
    }
    ds.validate();
    return ds;
}

SynthSpec default_benchmark() { return benchmark_with_separation(4.0, 42); }

SynthSpec benchmark_with_separation(double separation_sigma, uint64_t seed) {
    SynthSpec spec;
    spec.class_names = {"normal", "tumor"};
    spec.class_means.assign(2, std::vector<double>(spec.dim, 0.0));
    spec.class_means[1][0] = separation_sigma * spec.noise_sigma;
    spec.seed = seed;
    return spec;
}

SynthSpec default_benchmark_3class() {
    SynthSpec spec;
    spec.class_names = {"benign", "atypical", "malignant"};
    spec.class_means.assign(3, std::vector<double>(spec.dim, 0.0));
    spec.class_means[1][0] = 4.0;
    spec.class_means[2][1] = 4.0;
    return spec;
}

nlohmann::ordered_json SynthSpec::to_json() const {
    nlohmann::ordered_json j;
    j["num_train"] = num_train;
    j["num_val"] = num_val;
    j["num_test"] = num_test;
    j["instances_min"] = instances_min;
    j["instances_max"] = instances_max;
    j["dim"] = dim;
    j["class_names"] = class_names;
    j["class_means"] = class_means;
    j["positive_ratio_min"] = positive_ratio_min;
    j["positive_ratio_max"] = positive_ratio_max;
    j["noise_sigma"] = noise_sigma;
    j["seed"] = seed;
    return j;
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    SynthSpec spec = default_benchmark();
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "num_train") spec.num_train = value.get<int>();
            else if (key == "num_val") spec.num_val = value.get<int>();
            else if (key == "num_test") spec.num_test = value.get<int>();
            else if (key == "instances_min") spec.instances_min = value.get<int>();
            else if (key == "instances_max") spec.instances_max = value.get<int>();
            else if (key == "dim") spec.dim = value.get<int>();
            else if (key == "class_names") spec.class_names = value.get<std::vector<std::string>>();
            else if (key == "class_means") spec.class_means = value.get<std::vector<std::vector<double>>>();
            else if (key == "positive_ratio_min") spec.positive_ratio_min = value.get<double>();
            else if (key == "positive_ratio_max") spec.positive_ratio_max = value.get<double>();
            else if (key == "noise_sigma") spec.noise_sigma = value.get<double>();
            else if (key == "seed") spec.seed = value.get<uint64_t>();
            else throw ConfigError("unknown synth spec key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad synth spec value: ") + e.what());
    }
    // A spec that overrides dim or class count without giving means gets
    // default zero/axis means of matching shape.
    if (static_cast<int>(spec.class_means.size()) != spec.num_classes() ||
        (spec.num_classes() > 0 && static_cast<int>(spec.class_means[0].size()) != spec.dim)) {
        if (!j.contains("class_means")) {
            spec.class_means.assign(spec.num_classes(), std::vector<double>(spec.dim, 0.0));
            for (int c = 1; c < spec.num_classes(); ++c) {
                spec.class_means[c][(c - 1) % spec.dim] = 4.0 * spec.noise_sigma;
            }
        }
    }
    spec.validate();
    return spec;
}

}  // namespace swsmil
