#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ldl/core.hpp"

using namespace ldl;

namespace {

/// Predicts a fixed distribution regardless of input.
class Constant : public Predictor {
public:
    Constant(std::vector<double> p, std::size_t q) : p_(std::move(p)), q_(q) {}
    LabelDistribution predict(std::span<const double>) const override { return validate_distribution(p_); }
    std::string algorithm() const override { return "constant"; }
    std::size_t num_features() const override { return q_; }
    std::size_t num_labels() const override { return p_.size(); }

private:
    std::vector<double> p_;
    std::size_t q_;
};

/// Softmax of a fixed random linear map, so every label keeps positive mass.
class Linear : public Predictor {
public:
    Linear(std::size_t q, std::size_t c, std::mt19937& gen) : q_(q), c_(c), w_(q * c + c) {
        std::normal_distribution<double> n(0.0, 1.0);
        for (double& v : w_) v = n(gen);
    }
    LabelDistribution predict(std::span<const double> x) const override {
        std::vector<double> eta(c_);
        for (std::size_t j = 0; j < c_; ++j) {
            eta[j] = w_[q_ * c_ + j];
            for (std::size_t k = 0; k < q_; ++k) eta[j] += w_[j * q_ + k] * x[k];
        }
        return validate_distribution(softmax(eta));
    }
    std::string algorithm() const override { return "linear"; }
    std::size_t num_features() const override { return q_; }
    std::size_t num_labels() const override { return c_; }

private:
    std::size_t q_, c_;
    std::vector<double> w_;
};

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an ldl::Error";
    return ErrorCode::IoError;
}

}  // namespace

TEST(ValidateDistribution, AcceptsUniformAndKronecker) {
    EXPECT_EQ(validate_distribution({0.5, 0.5}).degrees(), (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(validate_distribution({1.0, 0.0, 0.0}).degrees(), (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(ValidateDistribution, Errors) {
    EXPECT_EQ(code_of([] { validate_distribution({0.7, 0.7}); }), ErrorCode::BadSum);
    EXPECT_EQ(code_of([] { validate_distribution({1.0}); }), ErrorCode::TooShort);
    EXPECT_EQ(code_of([] { validate_distribution({-0.1, 1.1}); }), ErrorCode::NegativeDegree);
    EXPECT_EQ(code_of([] { validate_distribution({NAN, 1.0}); }), ErrorCode::NonFiniteInput);
    EXPECT_EQ(code_of([] { validate_distribution({0.5, 0.5 + 2e-6}); }), ErrorCode::BadSum);
}

TEST(ValidateDistribution, RenormalisesSmallDrift) {
    const auto d = validate_distribution({0.3, 0.3, 0.4 + 5e-7});
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(d[2], (0.4 + 5e-7) / (1.0 + 5e-7), 1e-16);
}

TEST(ValidateDistribution, TinyNegativeClampedToZero) {
    const auto d = validate_distribution({-1e-13, 1.0});
    EXPECT_EQ(d[0], 0.0);
    EXPECT_EQ(d[1], 1.0);
}

TEST(ValidateDistribution, ExactValuesPreservedAndIdempotent) {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(5);
        double s = 0;
        for (double& x : v) s += (x = u(gen));
        for (double& x : v) x /= s;
        const auto once = validate_distribution(v);
        const auto twice = validate_distribution(once.span());
        EXPECT_EQ(once, twice);
    }
}

TEST(Conversions, SingleLabel) {
    EXPECT_EQ(from_single_label(1, 4).degrees(), (std::vector<double>{0, 1, 0, 0}));
    EXPECT_EQ(from_single_label(0, 2).degrees(), (std::vector<double>{1, 0}));
    EXPECT_EQ(code_of([] { from_single_label(5, 3); }), ErrorCode::IndexOutOfRange);
    EXPECT_EQ(code_of([] { from_single_label(0, 1); }), ErrorCode::TooShort);
}

TEST(Conversions, LabelSet) {
    EXPECT_EQ(from_label_set({1, 3}, 4).degrees(), (std::vector<double>{0, 0.5, 0, 0.5}));
    EXPECT_EQ(from_label_set({0}, 3).degrees(), (std::vector<double>{1, 0, 0}));
    const auto third = from_label_set({0, 1, 2}, 3);
    for (double d : third) EXPECT_DOUBLE_EQ(d, 1.0 / 3.0);
    EXPECT_EQ(code_of([] { from_label_set({}, 3); }), ErrorCode::EmptySet);
    EXPECT_EQ(code_of([] { from_label_set({0, 3}, 3); }), ErrorCode::IndexOutOfRange);
}

TEST(Conversions, SingleLabelEqualsSingletonSet) {
    for (std::size_t c = 2; c < 8; ++c) {
        for (std::size_t j = 0; j < c; ++j) EXPECT_EQ(from_single_label(j, c), from_label_set({j}, c));
    }
}

TEST(Dataset, RejectsWrongShapes) {
    LdlDataset ds(2, 3);
    const std::vector<double> x2{1, 2}, x3{1, 2, 3};
    ds.add(x2, from_single_label(0, 3));
    EXPECT_EQ(code_of([&] { ds.add(x3, from_single_label(0, 3)); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([&] { ds.add(x2, from_single_label(0, 2)); }), ErrorCode::DimensionMismatch);
    const std::vector<double> bad{1, INFINITY};
    EXPECT_EQ(code_of([&] { ds.add(bad, from_single_label(0, 3)); }), ErrorCode::NonFiniteInput);
    EXPECT_EQ(code_of([] { LdlDataset(2, 3).require_nonempty(); }), ErrorCode::EmptyDataset);
}

TEST(Dataset, SubsetKeepsOrder) {
    LdlDataset ds(1, 2);
    for (int i = 0; i < 5; ++i) {
        const std::vector<double> x{static_cast<double>(i)};
        ds.add(x, from_single_label(static_cast<std::size_t>(i % 2), 2));
    }
    const std::vector<std::size_t> idx{4, 1};
    const auto sub = ds.subset(idx);
    ASSERT_EQ(sub.size(), 2u);
    EXPECT_EQ(sub.features(0)[0], 4.0);
    EXPECT_EQ(sub.features(1)[0], 1.0);
    EXPECT_EQ(sub.distribution(1), from_single_label(1, 2));
}

TEST(KlObjective, HandEvaluatedUniformPair) {
    LdlDataset ds(1, 2);
    const std::vector<double> x{0.0};
    ds.add(x, validate_distribution({0.5, 0.5}));
    EXPECT_NEAR(kl_objective(ds, Constant({0.5, 0.5}, 1)), std::log(0.5), 1e-15);
    EXPECT_NEAR(kl_objective(ds, Constant({0.5, 0.5}, 1)), -0.693147, 1e-6);
}

TEST(KlObjective, PerfectPredictorGivesNegativeEntropy) {
    LdlDataset ds(1, 3);
    const std::vector<double> x{0.0};
    ds.add(x, validate_distribution({0.2, 0.3, 0.5}));
    ds.add(x, validate_distribution({0.2, 0.3, 0.5}));
    const double expected = 2 * (0.2 * std::log(0.2) + 0.3 * std::log(0.3) + 0.5 * std::log(0.5));
    EXPECT_NEAR(kl_objective(ds, Constant({0.2, 0.3, 0.5}, 1)), expected, 1e-14);
}

TEST(KlObjective, ZeroPredictionFlooredAndZeroDegreeSkipped) {
    LdlDataset ds(1, 2);
    const std::vector<double> x{0.0};
    ds.add(x, from_single_label(0, 2));
    EXPECT_NEAR(kl_objective(ds, Constant({0.0, 1.0}, 1)), std::log(1e-12), 1e-9);
    EXPECT_EQ(kl_objective(ds, Constant({1.0, 0.0}, 1)), 0.0);
}

TEST(KlObjective, DimensionMismatch) {
    LdlDataset ds(1, 2);
    const std::vector<double> x{0.0};
    ds.add(x, from_single_label(0, 2));
    EXPECT_EQ(code_of([&] { kl_objective(ds, Constant({0.2, 0.3, 0.5}, 1)); }), ErrorCode::DimensionMismatch);
}

// The general objective collapses to the single-label log likelihood.
TEST(KlObjective, KroneckerReducesToLogLikelihood) {
    std::mt19937 gen(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t q = 3, c = 2 + static_cast<std::size_t>(trial % 4);
        Linear model(q, c, gen);
        LdlDataset ds(q, c);
        std::vector<std::size_t> labels;
        for (int i = 0; i < 30; ++i) {
            std::vector<double> x(q);
            for (double& v : x) v = n(gen);
            const std::size_t y = gen() % c;
            labels.push_back(y);
            ds.add(x, from_single_label(y, c));
        }
        long double ll = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            ll += std::log(static_cast<long double>(model.predict(ds.features(i))[labels[i]]));
        }
        EXPECT_NEAR(kl_objective(ds, model), static_cast<double>(ll), 1e-12);
    }
}

// ...and to the 1/|Y| weighted likelihood for multi-label annotations.
TEST(KlObjective, LabelSetReducesToWeightedLikelihood) {
    std::mt19937 gen(12);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t q = 2, c = 5;
        Linear model(q, c, gen);
        LdlDataset ds(q, c);
        std::vector<std::vector<std::size_t>> sets;
        for (int i = 0; i < 30; ++i) {
            std::vector<double> x(q);
            for (double& v : x) v = n(gen);
            std::vector<std::size_t> set;
            for (std::size_t j = 0; j < c; ++j) {
                if (gen() % 2) set.push_back(j);
            }
            if (set.empty()) set.push_back(gen() % c);
            ds.add(x, from_label_set(set, c));
            sets.push_back(set);
        }
        long double ll = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto p = model.predict(ds.features(i));
            for (std::size_t y : sets[i]) {
                ll += std::log(static_cast<long double>(p[y])) / static_cast<long double>(sets[i].size());
            }
        }
        EXPECT_NEAR(kl_objective(ds, model), static_cast<double>(ll), 1e-12);
    }
}

TEST(Softmax, StableForLargeLogits) {
    const std::vector<double> big{1000.0, 1000.0};
    const auto p = softmax(big);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Errors, CategoriesMapToExitClasses) {
    EXPECT_EQ(category(ErrorCode::LineSearchFailed), ErrorCategory::Convergence);
    EXPECT_EQ(category(ErrorCode::Diverged), ErrorCategory::Convergence);
    EXPECT_EQ(category(ErrorCode::DimensionMismatch), ErrorCategory::Data);
    EXPECT_EQ(category(ErrorCode::InvalidArgument), ErrorCategory::Usage);
    const Error e(ErrorCode::BadSum, "detail");
    EXPECT_STREQ(e.what(), "BadSum: detail");
    EXPECT_EQ(e.detail(), "detail");
}
