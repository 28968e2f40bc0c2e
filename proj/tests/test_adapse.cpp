#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "swsmil/adapse.hpp"
#include "swsmil/error.hpp"
#include "swsmil/rng.hpp"
#include "swsmil/synthgen.hpp"
#include "test_util.hpp"

using namespace swsmil;

namespace {

Bag make_bag(int n, int d, uint64_t seed, int label = 1) {
    Rng rng(seed);
    Bag bag;
    bag.id = "b" + std::to_string(seed);
    bag.label = label;
    bag.features = test_util::random_matrix(n, d, rng);
    return bag;
}

void annotate(PseudoBag& pb, int prediction, double confidence) {
    pb.prediction = prediction;
    pb.confidence = confidence;
}

// surviving pseudo bags must partition 0..N-1
void check_partition(const std::vector<PseudoBag>& pbs, int n) {
    std::vector<int> count(n, 0);
    for (const PseudoBag& pb : pbs) {
        if (pb.status == PseudoBagStatus::Discarded) continue;
        int prev = -1;
        for (int idx : pb.member_indices) {
            REQUIRE(idx >= 0);
            REQUIRE(idx < n);
            CHECK(idx > prev);  // strictly increasing
            prev = idx;
            ++count[idx];
        }
    }
    for (int i = 0; i < n; ++i) CHECK(count[i] == 1);
}

}  // namespace

TEST_CASE("interleaved split follows the (k-1)M+a pattern") {
    const Bag bag = make_bag(6, 3, 1);
    std::vector<int> identity{0, 1, 2, 3, 4, 5};
    const auto pbs = split_interleaved(bag, 0, identity, 2);
    REQUIRE(pbs.size() == 2);
    CHECK(pbs[0].member_indices == std::vector<int>{0, 2, 4});
    CHECK(pbs[1].member_indices == std::vector<int>{1, 3, 5});
    CHECK(pbs[0].inherited_label == bag.label);
    CHECK(pbs[0].status == PseudoBagStatus::Pending);
}

TEST_CASE("interleaved split respects a non-trivial importance order") {
    const Bag bag = make_bag(5, 3, 2);
    std::vector<int> order{4, 2, 0, 1, 3};  // descending importance
    const auto pbs = split_interleaved(bag, 0, order, 2);
    // positions 0,2,4 -> instances 4,0,3; positions 1,3 -> instances 2,1
    CHECK(pbs[0].member_indices == std::vector<int>{0, 3, 4});
    CHECK(pbs[1].member_indices == std::vector<int>{1, 2});
}

TEST_CASE("M=1 yields the whole bag") {
    const Bag bag = make_bag(4, 2, 3);
    const auto pbs = split_interleaved(bag, 0, {0, 1, 2, 3}, 1);
    REQUIRE(pbs.size() == 1);
    CHECK(pbs[0].member_indices == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("M out of range is a split error") {
    const Bag bag = make_bag(3, 2, 4);
    CHECK_THROWS_AS(split_interleaved(bag, 0, {0, 1, 2}, 4), DomainError);
    CHECK_THROWS_AS(split_interleaved(bag, 0, {0, 1, 2}, 0), DomainError);
}

TEST_CASE("random splits satisfy the set-algebra checks") {
    Rng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rng.uniform_int(1, 50);
        const int m = rng.uniform_int(1, n);
        const Bag bag = make_bag(n, 2, 1000 + trial);
        const std::vector<int> order = Rng(2000 + trial).permutation(n);
        const auto pbs = split_interleaved(bag, 0, order, m);
        REQUIRE(static_cast<int>(pbs.size()) == m);
        check_partition(pbs, n);
        int min_size = n, max_size = 0;
        for (const PseudoBag& pb : pbs) {
            min_size = std::min(min_size, pb.size());
            max_size = std::max(max_size, pb.size());
            CHECK(pb.inherited_label == bag.label);
        }
        CHECK(max_size - min_size <= 1);
    }
}

TEST_CASE("classification annotates with the frozen teacher's forward pass") {
    const MilParams teacher = init_params(4, 6, 2, 9);
    const Bag bag = make_bag(7, 4, 10);
    auto pbs = split_interleaved(bag, 0, Rng(11).permutation(7), 3);
    classify_pseudo_bags(teacher, bag, pbs);
    for (const PseudoBag& pb : pbs) {
        const Prediction pred = forward(teacher, gather_rows(bag.features, pb.member_indices));
        CHECK(*pb.prediction == pred.label);
        CHECK(*pb.confidence == pred.confidence);
        CHECK(*pb.confidence == *std::max_element(pred.probs.begin(), pred.probs.end()));
    }

    // single pseudo bag equals the whole-bag forward
    auto whole = split_interleaved(bag, 0, {0, 1, 2, 3, 4, 5, 6}, 1);
    classify_pseudo_bags(teacher, bag, whole);
    const Prediction pred = forward(teacher, bag.features);
    CHECK(*whole[0].prediction == pred.label);
    CHECK(*whole[0].confidence == pred.confidence);
}

TEST_CASE("discard predicate: confidently wrong goes, everything else stays") {
    const Bag bag = make_bag(8, 2, 12, 1);
    auto pbs = split_interleaved(bag, 0, Rng(13).permutation(8), 4);
    annotate(pbs[0], 0, 0.97);  // wrong, confident -> discard
    annotate(pbs[1], 0, 0.90);  // wrong, below threshold -> stays
    annotate(pbs[2], 1, 0.99);  // right -> stays regardless
    annotate(pbs[3], 1, 0.10);  // right, low confidence -> stays
    const DiscardOutcome out = discard_mislabeled(pbs, 0.95);
    CHECK(out.discarded == std::vector<int>{0});
    CHECK(out.remaining == std::vector<int>{1, 2, 3});
    CHECK(pbs[0].status == PseudoBagStatus::Discarded);
    CHECK_FALSE(out.retention_applied);
}

TEST_CASE("all-discarded parents retain their least confidently wrong bag") {
    const Bag bag = make_bag(6, 2, 14, 1);
    auto pbs = split_interleaved(bag, 0, Rng(15).permutation(6), 3);
    annotate(pbs[0], 0, 0.99);
    annotate(pbs[1], 0, 0.96);
    annotate(pbs[2], 0, 0.98);
    const DiscardOutcome out = discard_mislabeled(pbs, 0.95);
    CHECK(out.retention_applied);
    CHECK(out.retained_index == 1);
    CHECK(out.remaining == std::vector<int>{1});
    CHECK(pbs[1].status == PseudoBagStatus::Pending);
}

TEST_CASE("recycling an entire discarded bag spreads instances evenly") {
    const Bag bag = make_bag(24, 2, 16, 1);
    std::vector<int> order(24);
    for (int i = 0; i < 24; ++i) order[i] = i;
    auto pbs = split_interleaved(bag, 0, order, 4);  // four bags of six
    annotate(pbs[0], 0, 0.99);
    annotate(pbs[1], 1, 0.80);
    annotate(pbs[2], 1, 0.80);
    annotate(pbs[3], 1, 0.80);
    const DiscardOutcome out = discard_mislabeled(pbs, 0.95);
    REQUIRE(out.discarded == std::vector<int>{0});
    const auto log = recycle(pbs, out, order);
    REQUIRE(log.size() == 1);
    CHECK(log[0].instances.size() == 6);
    for (int r : out.remaining) CHECK(pbs[r].size() == 8);  // 6 + 2 each
    check_partition(pbs, 24);
}

TEST_CASE("recycle with no discards is a no-op") {
    const Bag bag = make_bag(9, 2, 17, 1);
    auto pbs = split_interleaved(bag, 0, Rng(18).permutation(9), 3);
    for (auto& pb : pbs) annotate(pb, 1, 0.5);
    const auto before = pbs;
    const DiscardOutcome out = discard_mislabeled(pbs, 0.95);
    const auto log = recycle(pbs, out, Rng(18).permutation(9));
    CHECK(log.empty());
    for (size_t i = 0; i < pbs.size(); ++i) CHECK(pbs[i].member_indices == before[i].member_indices);
}

TEST_CASE("recycling preserves the instance multiset on random scenarios") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.uniform_int(2, 40);
        const int m = rng.uniform_int(1, std::min(n, 10));
        const Bag bag = make_bag(n, 2, 3000 + trial, 1);
        const std::vector<int> order = Rng(4000 + trial).permutation(n);
        auto pbs = split_interleaved(bag, 0, order, m);
        for (auto& pb : pbs) {
            const bool wrong = rng.uniform() < 0.4;
            annotate(pb, wrong ? 0 : 1, rng.uniform());
        }
        const DiscardOutcome out = discard_mislabeled(pbs, 0.6);
        recycle(pbs, out, order);
        check_partition(pbs, n);
    }
}

TEST_CASE("adaptive labeling thresholds and the per-parent cap") {
    const Bag bag = make_bag(10, 2, 20, 1);
    auto pbs = split_interleaved(bag, 0, Rng(21).permutation(10), 5);
    std::vector<int> remaining{0, 1, 2, 3, 4};
    annotate(pbs[0], 1, 0.8);   // labeled
    annotate(pbs[1], 1, 0.4);   // below gamma_ada -> unlabeled
    annotate(pbs[2], 0, 0.6);   // wrong prediction -> unlabeled
    annotate(pbs[3], 1, 0.9);   // labeled
    annotate(pbs[4], 1, 0.7);   // labeled candidate, may fall to the cap
    SUBCASE("without cap pressure") {
        assign_labels(pbs, remaining, 0.5, 5);
        CHECK(pbs[0].status == PseudoBagStatus::Labeled);
        CHECK(pbs[1].status == PseudoBagStatus::Unlabeled);
        CHECK(pbs[2].status == PseudoBagStatus::Unlabeled);
        CHECK(pbs[3].status == PseudoBagStatus::Labeled);
        CHECK(pbs[4].status == PseudoBagStatus::Labeled);
    }
    SUBCASE("cap keeps the most confident") {
        assign_labels(pbs, remaining, 0.5, 2);
        CHECK(pbs[3].status == PseudoBagStatus::Labeled);  // 0.9
        CHECK(pbs[0].status == PseudoBagStatus::Labeled);  // 0.8
        CHECK(pbs[4].status == PseudoBagStatus::Unlabeled);
    }
    SUBCASE("gamma_ada zero labels everything") {
        assign_labels(pbs, remaining, 0.0, 2);
        for (int r : remaining) CHECK(pbs[r].status == PseudoBagStatus::Labeled);
    }
}

TEST_CASE("raising gamma_ada never adds labels") {
    Rng rng(22);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = rng.uniform_int(2, 20);
        const int m = rng.uniform_int(1, n);
        const Bag bag = make_bag(n, 2, 5000 + trial, 1);
        auto base = split_interleaved(bag, 0, Rng(6000 + trial).permutation(n), m);
        std::vector<int> remaining;
        for (size_t i = 0; i < base.size(); ++i) {
            annotate(base[i], rng.uniform() < 0.5 ? 1 : 0, rng.uniform());
            remaining.push_back(static_cast<int>(i));
        }
        const double lo = rng.uniform(0.01, 0.5), hi = rng.uniform(0.5, 1.0);

        auto at = [&](double gamma, int cap) {
            auto copy = base;
            assign_labels(copy, remaining, gamma, cap);
            std::set<int> labeled;
            for (size_t i = 0; i < copy.size(); ++i) {
                if (copy[i].status == PseudoBagStatus::Labeled) labeled.insert(static_cast<int>(i));
            }
            return labeled;
        };

        const auto loose = at(lo, n + 1);
        const auto tight = at(hi, n + 1);
        CHECK(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()));
        const auto capped = at(lo, 2);
        CHECK(std::includes(loose.begin(), loose.end(), capped.begin(), capped.end()));
    }
}

TEST_CASE("gamma schedule ramps linearly") {
    CHECK(gamma_ada_schedule(1, 10, 0.5, 0.95) == 0.5);
    CHECK(gamma_ada_schedule(10, 10, 0.5, 0.95) == 0.95);
    CHECK(gamma_ada_schedule(5, 10, 0.5, 0.95) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(gamma_ada_schedule(1, 1, 0.3, 0.9) == 0.3);
    for (int r = 1; r < 10; ++r) {
        CHECK(gamma_ada_schedule(r + 1, 10, 0.5, 0.95) >= gamma_ada_schedule(r, 10, 0.5, 0.95));
    }
    CHECK_THROWS_AS(gamma_ada_schedule(0, 10, 0.5, 0.95), DomainError);
    CHECK_THROWS_AS(gamma_ada_schedule(1, 10, 0.96, 0.95), DomainError);
}

TEST_CASE("build_round_plan produces a consistent plan on synthetic data") {
    SynthSpec spec = default_benchmark();
    spec.num_train = 12;
    spec.num_val = 4;
    spec.num_test = 4;
    spec.instances_min = 5;
    spec.instances_max = 20;
    const Dataset ds = generate(spec);
    const MilParams teacher = init_params(ds.dim(), 16, ds.num_classes(), 77);

    AdapseOptions opt;
    opt.pseudo_bags = 4;
    opt.max_pseudo_labels = 2;
    opt.gamma_ada = 0.5;
    opt.round_index = 3;
    const RoundPlan plan = build_round_plan(teacher, teacher, ds, ds.indices_of(Split::Train), opt);

    CHECK(plan.parents.size() == 12);
    for (const ParentPlan& parent : plan.parents) {
        const Bag& bag = ds.bags[parent.parent_index];
        check_partition(parent.pseudo_bags, bag.num_instances());
        int labeled = 0;
        for (const PseudoBag& pb : parent.pseudo_bags) {
            CHECK(pb.status != PseudoBagStatus::Pending);
            if (pb.status == PseudoBagStatus::Labeled) {
                ++labeled;
                CHECK(*pb.prediction == pb.inherited_label);
                CHECK(*pb.confidence >= opt.gamma_ada);
            }
            if (pb.status == PseudoBagStatus::Discarded) {
                CHECK(*pb.prediction != pb.inherited_label);
                CHECK(*pb.confidence >= opt.gamma_fix);
            }
        }
        CHECK(labeled <= opt.max_pseudo_labels);
    }
    CHECK(plan.labeled.size() + plan.unlabeled.size() == static_cast<size_t>(plan.surviving_count()));

    const auto j = plan.to_json();
    CHECK(j["round"] == 3);
    CHECK(j["pseudo_bags"].size() == static_cast<size_t>(plan.surviving_count() + plan.discarded_count()));
}

TEST_CASE("random_split_plan labels everything and keeps the partition") {
    SynthSpec spec = default_benchmark();
    spec.num_train = 8;
    spec.num_val = 2;
    spec.num_test = 2;
    spec.instances_min = 3;
    spec.instances_max = 30;
    const Dataset ds = generate(spec);
    const RoundPlan plan = random_split_plan(ds, ds.indices_of(Split::Train), 6, 99);
    for (const ParentPlan& parent : plan.parents) {
        check_partition(parent.pseudo_bags, ds.bags[parent.parent_index].num_instances());
        for (const PseudoBag& pb : parent.pseudo_bags) CHECK(pb.status == PseudoBagStatus::Labeled);
    }
    CHECK(plan.unlabeled.empty());

    // different seeds give different splits
    const RoundPlan plan2 = random_split_plan(ds, ds.indices_of(Split::Train), 6, 100);
    bool any_difference = false;
    for (size_t p = 0; p < plan.parents.size() && !any_difference; ++p) {
        for (size_t i = 0; i < plan.parents[p].pseudo_bags.size(); ++i) {
            if (plan.parents[p].pseudo_bags[i].member_indices != plan2.parents[p].pseudo_bags[i].member_indices) {
                any_difference = true;
                break;
            }
        }
    }
    CHECK(any_difference);
}
