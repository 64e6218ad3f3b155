#pragma once

#include <vector>

#include "ldl/core.hpp"

namespace ldl {

/// Per-feature z-scoring fitted on a training set. Features with zero
/// spread keep scale 1 so they pass through centred.
class Standardizer {
public:
    Standardizer(std::vector<double> mean, std::vector<double> scale);

    static Standardizer fit(const LdlDataset& dataset);

    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& scale() const noexcept { return scale_; }

    std::vector<double> apply(std::span<const double> x) const;
    LdlDataset apply(const LdlDataset& dataset) const;

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

/// Applies a Standardizer before delegating to the wrapped model.
class StandardizedPredictor : public Predictor {
public:
    StandardizedPredictor(Standardizer standardizer, PredictorPtr inner);

    const Standardizer& standardizer() const noexcept { return standardizer_; }
    const Predictor& inner() const noexcept { return *inner_; }

    LabelDistribution predict(std::span<const double> x) const override;
    std::string algorithm() const override { return inner_->algorithm(); }
    std::size_t num_features() const override { return inner_->num_features(); }
    std::size_t num_labels() const override { return inner_->num_labels(); }
    std::map<std::string, std::string> hyperparameters() const override;

private:
    Standardizer standardizer_;
    PredictorPtr inner_;
};

}  // namespace ldl
