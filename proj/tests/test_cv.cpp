#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include <gtest/gtest.h>

#include "ldl/algorithms.hpp"
#include "ldl/cv.hpp"
#include "ldl/datagen.hpp"
#include "ldl/neighbors.hpp"
#include "ldl/random.hpp"

using namespace ldl;
using namespace ldl::cv;

namespace {

class Constant : public Predictor {
public:
    explicit Constant(LabelDistribution p) : p_(std::move(p)) {}
    LabelDistribution predict(std::span<const double>) const override { return p_; }
    std::string algorithm() const override { return "constant"; }
    std::size_t num_features() const override { return 3; }
    std::size_t num_labels() const override { return p_.size(); }

private:
    LabelDistribution p_;
};

AlgorithmSpec knn_spec(std::vector<std::size_t> ks) {
    AlgorithmSpec spec{"aa-knn", {}};
    for (std::size_t k : ks) {
        spec.grid.push_back({"k=" + std::to_string(k), [k](const LdlDataset& d, std::uint64_t) {
                                 return PredictorPtr(std::make_unique<neighbors::KnnModel>(d, k));
                             }});
    }
    return spec;
}

double mean_kl(const Predictor& p, const LdlDataset& eval) {
    return evaluate_all(p, eval)[static_cast<std::size_t>(MeasureId::KLDivergence)];
}

}  // namespace

TEST(Plan, EvenFolds) {
    const auto plan = make_cv_plan(100, 10, 3);
    for (std::size_t f = 0; f < 10; ++f) EXPECT_EQ(plan.members(f).size(), 10u);
}

TEST(Plan, UnevenFoldsAreBalanced) {
    const auto plan = make_cv_plan(25, 10, 3);
    std::vector<std::size_t> sizes;
    for (std::size_t f = 0; f < 10; ++f) sizes.push_back(plan.members(f).size());
    EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 3u), 5);
    EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 2u), 5);
}

TEST(Plan, PartitionAndDeterminism) {
    const auto plan = make_cv_plan(57, 5, 9);
    std::set<std::size_t> seen;
    for (std::size_t f = 0; f < 5; ++f) {
        for (std::size_t i : plan.members(f)) EXPECT_TRUE(seen.insert(i).second);
    }
    EXPECT_EQ(seen.size(), 57u);
    EXPECT_EQ(plan, make_cv_plan(57, 5, 9));
    EXPECT_FALSE(plan == make_cv_plan(57, 5, 10));
}

TEST(Plan, TooFewExamples) {
    try {
        make_cv_plan(9, 10, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewExamples);
    }
}

TEST(NestedCv, ConstantPredictorHasZeroSpreadOnConstantTargets) {
    LdlDataset ds(3, 3);
    for (int i = 0; i < 30; ++i) {
        const std::vector<double> x{static_cast<double>(i), 0.0, 0.0};
        ds.add(x, validate_distribution({0.2, 0.3, 0.5}));
    }
    const AlgorithmSpec spec{"constant", {{"-", [](const LdlDataset&, std::uint64_t) {
                                               return PredictorPtr(std::make_unique<Constant>(
                                                   validate_distribution({0.1, 0.1, 0.8})));
                                           }}}};
    const auto r = nested_cv(ds, spec, make_cv_plan(30, 10, 1));
    for (std::size_t m = 0; m < kNumMeasures; ++m) EXPECT_NEAR(r.std[m], 0.0, 1e-15);
    EXPECT_NEAR(r.mean[0], 0.3, 1e-15);
}

TEST(NestedCv, OnePointGridIsPlainCv) {
    const auto ds = datagen::sample_training(60, 2);
    const auto plan = make_cv_plan(60, 6, 4);
    const auto r = nested_cv(ds, knn_spec({4}), plan);
    EXPECT_TRUE(r.validation_kl.empty());
    for (std::size_t f = 0; f < 6; ++f) {
        std::vector<std::size_t> train;
        for (std::size_t i = 0; i < 60; ++i) {
            if (plan.fold_of[i] != f) train.push_back(i);
        }
        const auto model = neighbors::fit(ds.subset(train), 4);
        const auto test = plan.members(f);
        EXPECT_EQ(r.per_fold[f], evaluate_all(model, ds.subset(test)));
    }
}

TEST(NestedCv, SelectionMatchesExternalComputation) {
    const auto ds = datagen::sample_training(80, 5);
    const auto plan = make_cv_plan(80, 8, 6);
    const std::size_t n_train = 60;  // 80 minus a test and a validation fold of 10
    const auto r = nested_cv(ds, knn_spec({1, n_train}), plan);
    std::array<double, 2> score{};
    for (std::size_t f = 0; f < 8; ++f) {
        const std::size_t v = validation_fold(f, 8);
        std::vector<std::size_t> train;
        for (std::size_t i = 0; i < 80; ++i) {
            if (plan.fold_of[i] != f && plan.fold_of[i] != v) train.push_back(i);
        }
        ASSERT_EQ(train.size(), n_train);
        const auto val = ds.subset(plan.members(v));
        score[0] += mean_kl(neighbors::fit(ds.subset(train), 1), val) / 8;
        score[1] += mean_kl(neighbors::fit(ds.subset(train), n_train), val) / 8;
    }
    EXPECT_NEAR(r.validation_kl[0], score[0], 1e-15);
    EXPECT_NEAR(r.validation_kl[1], score[1], 1e-15);
    EXPECT_EQ(r.selected, score[0] <= score[1] ? 0u : 1u);
    EXPECT_EQ(r.selected_label, r.selected == 0 ? "k=1" : "k=60");
}

TEST(NestedCv, NoLeakage) {
    const auto ds = datagen::sample_training(50, 7);
    const auto plan = make_cv_plan(50, 5, 8);
    std::mutex mu;
    std::vector<TrainingView> views;
    CvOptions opts;
    opts.threads = 3;
    opts.observer = [&](const TrainingView& v) {
        std::lock_guard lock(mu);
        views.push_back(v);
    };
    nested_cv(ds, knn_spec({1, 3, 5}), plan, opts);
    EXPECT_EQ(views.size(), 5u * 3 + 5);
    for (const auto& v : views) {
        std::set<std::size_t> train(v.train_indices.begin(), v.train_indices.end());
        for (std::size_t i : v.eval_indices) EXPECT_FALSE(train.count(i));
        for (std::size_t i : v.train_indices) EXPECT_NE(plan.fold_of[i], v.fold);
        if (v.phase == Phase::Selection) {
            for (std::size_t i : v.eval_indices) EXPECT_EQ(plan.fold_of[i], validation_fold(v.fold, 5));
            EXPECT_EQ(v.train_indices.size() + v.eval_indices.size(), 40u);
        } else {
            EXPECT_EQ(v.eval_indices, plan.members(v.fold));
            EXPECT_EQ(v.train_indices.size() + v.eval_indices.size(), 50u);
        }
    }
}

TEST(NestedCv, ThreadedMatchesSequential) {
    const auto ds = datagen::sample_training(100, 11);
    const auto plan = make_cv_plan(100, 10, 12);
    for (const char* name : {"aa-knn", "pt-bayes", "sa-bfgs"}) {
        const auto spec = make_spec(name);
        const auto seq = nested_cv(ds, spec, plan);
        CvOptions opts;
        opts.threads = 4;
        const auto par = nested_cv(ds, spec, plan, opts);
        EXPECT_EQ(seq.per_fold, par.per_fold) << name;
        EXPECT_EQ(seq.selected, par.selected) << name;
    }
}

TEST(NestedCv, ErrorsNameTheFold) {
    const auto ds = datagen::sample_training(40, 13);
    const auto plan = make_cv_plan(40, 4, 14);
    const std::size_t bad_fold = 2;
    AlgorithmSpec spec{"fails", {{"-", [&](const LdlDataset& d, std::uint64_t seed) -> PredictorPtr {
                                     if (seed == mix_seed(plan.seed, 2 * bad_fold + 1)) {
                                         throw Error(ErrorCode::Diverged, "boom");
                                     }
                                     return std::make_unique<neighbors::KnnModel>(d, 1);
                                 }}}};
    try {
        nested_cv(ds, spec, plan);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Diverged);
        EXPECT_EQ(e.detail(), "fold 2: boom");
    }
}

TEST(NestedCv, StdUsesSampleFormula) {
    const auto ds = datagen::sample_training(40, 15);
    const auto r = nested_cv(ds, knn_spec({3}), make_cv_plan(40, 4, 16));
    double mean = 0, ss = 0;
    for (const auto& v : r.per_fold) mean += v[0] / 4;
    for (const auto& v : r.per_fold) ss += (v[0] - mean) * (v[0] - mean);
    EXPECT_NEAR(r.mean[0], mean, 1e-15);
    EXPECT_NEAR(r.std[0], std::sqrt(ss / 3), 1e-15);
}

TEST(Holdout, PicksBetterCandidate) {
    const auto ds = datagen::sample_training(200, 17);
    // k = n - holdout averages everything, which is clearly worse here
    EXPECT_EQ(select_by_holdout(ds, knn_spec({160, 5}), 3), 1u);
    EXPECT_EQ(select_by_holdout(ds, knn_spec({5}), 3), 0u);
}

TEST(ParallelFor, LowestIndexErrorWins) {
    for (std::size_t threads : {0u, 4u}) {
        try {
            parallel_for(50, threads, [](std::size_t i) {
                if (i == 7 || i == 30) throw Error(ErrorCode::BadK, std::to_string(i));
            });
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.detail(), "7");
        }
    }
}

TEST(Algorithms, SpecsAndGrids) {
    EXPECT_EQ(describe_grid(make_spec("aa-knn")), "k=3|k=5|k=7|k=9|k=11");
    EXPECT_EQ(make_spec("aa-bp").grid.size(), 2u);
    EXPECT_EQ(make_spec("sa-iis").grid.size(), 1u);
    AlgorithmSettings s;
    s.k = 4;
    EXPECT_EQ(describe_grid(make_spec("aa-knn", s)), "k=4");
    EXPECT_THROW(make_spec("svm"), Error);
    EXPECT_TRUE(is_algorithm("sa-bfgs"));
    EXPECT_FALSE(is_algorithm("sa-lbfgs"));
}
