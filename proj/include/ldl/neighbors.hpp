#pragma once

#include <vector>

#include "ldl/core.hpp"

namespace ldl::neighbors {

/// AA-kNN: predicts the mean label distribution of the k nearest training
/// examples (Euclidean distance, ties broken by lowest training index).
class KnnModel : public Predictor {
public:
    /// Throws BadK unless 1 <= k <= n.
    KnnModel(LdlDataset training, std::size_t k);

    std::size_t k() const noexcept { return k_; }
    const LdlDataset& training() const noexcept { return training_; }

    /// Indices of the k nearest training examples, nearest first.
    std::vector<std::size_t> neighbors(std::span<const double> x) const;

    LabelDistribution predict(std::span<const double> x) const override;
    std::string algorithm() const override { return "aa-knn"; }
    std::size_t num_features() const override { return training_.num_features(); }
    std::size_t num_labels() const override { return training_.num_labels(); }
    std::map<std::string, std::string> hyperparameters() const override {
        return {{"k", std::to_string(k_)}, {"metric", "euclidean"}};
    }

private:
    LdlDataset training_;
    std::size_t k_;
};

KnnModel fit(LdlDataset dataset, std::size_t k);

}  // namespace ldl::neighbors
