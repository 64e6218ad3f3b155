#include <random>

#include <gtest/gtest.h>

#include "ldl/neighbors.hpp"
#include "oracles.hpp"

using namespace ldl;

namespace {

LdlDataset random_dataset(std::mt19937& gen, std::size_t n, std::size_t q, std::size_t c) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LdlDataset ds(q, c);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(q);
        for (double& v : x) v = u(gen);
        ds.add(x, validate_distribution(oracle::random_simplex(gen, c)));
    }
    return ds;
}

}  // namespace

TEST(Knn, BadK) {
    std::mt19937 gen(1);
    const auto ds = random_dataset(gen, 5, 2, 3);
    EXPECT_THROW(neighbors::fit(ds, 0), Error);
    EXPECT_THROW(neighbors::fit(ds, 6), Error);
    try {
        neighbors::fit(ds, 0);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadK);
    }
}

TEST(Knn, KEqualsOneCopiesTrainingPoint) {
    std::mt19937 gen(2);
    const auto ds = random_dataset(gen, 30, 3, 4);
    const auto m = neighbors::fit(ds, 1);
    for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(m.predict(ds.features(i)), ds.distribution(i));
}

TEST(Knn, KEqualsNGivesGlobalMean) {
    std::mt19937 gen(3);
    const auto ds = random_dataset(gen, 20, 2, 3);
    const auto m = neighbors::fit(ds, ds.size());
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) mean[j] += ds.distribution(i)[j] / 20.0;
    }
    const std::vector<double> q1{5.0, 5.0}, q2{-3.0, 0.1};
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(m.predict(q1)[j], mean[j], 1e-15);
        EXPECT_NEAR(m.predict(q2)[j], mean[j], 1e-15);
    }
}

TEST(Knn, AveragesNeighbours) {
    LdlDataset ds(1, 2);
    const std::vector<double> a{0.0}, b{1.0}, far{10.0};
    ds.add(a, from_single_label(0, 2));
    ds.add(b, from_single_label(1, 2));
    ds.add(far, from_single_label(0, 2));
    const std::vector<double> x{0.4};
    const auto p = neighbors::fit(ds, 2).predict(x);
    EXPECT_EQ(p[0], 0.5);
    EXPECT_EQ(p[1], 0.5);
}

TEST(Knn, TiesGoToLowestIndex) {
    LdlDataset ds(1, 2);
    const std::vector<double> left{-1.0}, right{1.0};
    ds.add(right, from_single_label(1, 2));
    ds.add(left, from_single_label(0, 2));
    ds.add(right, from_single_label(0, 2));
    const std::vector<double> x{0.0};
    const auto m = neighbors::fit(ds, 2);
    EXPECT_EQ(m.neighbors(x), (std::vector<std::size_t>{0, 1}));
}

TEST(Knn, MatchesExhaustiveOracle) {
    std::mt19937 gen(4);
    const auto ds = random_dataset(gen, 300, 4, 3);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = 1 + static_cast<std::size_t>(t % 11);
        const auto m = neighbors::fit(ds, k);
        std::vector<double> x(4);
        for (double& v : x) v = u(gen);
        const auto want = oracle::knn(ds, x, k);
        EXPECT_EQ(m.neighbors(x), want);
        std::vector<double> mean(3, 0.0);
        for (std::size_t i : want) {
            for (std::size_t j = 0; j < 3; ++j) mean[j] += ds.distribution(i)[j];
        }
        for (double& v : mean) v /= static_cast<double>(k);
        const auto p = m.predict(x);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p[j], mean[j], 1e-15);
    }
}

TEST(Knn, NeighbourhoodsAreNested) {
    std::mt19937 gen(5);
    const auto ds = random_dataset(gen, 100, 2, 3);
    const std::vector<double> x{0.1, -0.2};
    for (std::size_t k = 1; k < 20; ++k) {
        const auto small = neighbors::fit(ds, k).neighbors(x);
        const auto big = neighbors::fit(ds, k + 1).neighbors(x);
        EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin()));
    }
}

TEST(Knn, DimensionMismatch) {
    std::mt19937 gen(6);
    const auto m = neighbors::fit(random_dataset(gen, 10, 2, 3), 3);
    const std::vector<double> x{0.0, 0.0, 0.0};
    EXPECT_THROW(m.predict(x), Error);
}
