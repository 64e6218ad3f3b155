#include "ldl/standardize.hpp"

#include <cmath>

namespace ldl {

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
    if (mean_.size() != scale_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "mean and scale lengths differ");
    }
    check_finite(mean_);
    check_finite(scale_);
    for (double s : scale_) {
        if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    }
}

Standardizer Standardizer::fit(const LdlDataset& dataset) {
    dataset.require_nonempty();
    const std::size_t q = dataset.num_features();
    const auto n = static_cast<double>(dataset.size());
    std::vector<double> mean(q, 0.0), scale(q, 0.0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto x = dataset.features(i);
        for (std::size_t k = 0; k < q; ++k) mean[k] += x[k];
    }
    for (double& m : mean) m /= n;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto x = dataset.features(i);
        for (std::size_t k = 0; k < q; ++k) scale[k] += (x[k] - mean[k]) * (x[k] - mean[k]);
    }
    for (double& s : scale) {
        s = std::sqrt(s / n);
        if (!(s > 0.0)) s = 1.0;
    }
    return Standardizer(std::move(mean), std::move(scale));
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (x.size() != mean_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(mean_.size()) +
                                                      " features, got " + std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - mean_[k]) / scale_[k];
    return out;
}

LdlDataset Standardizer::apply(const LdlDataset& dataset) const {
    LdlDataset out(dataset.num_features(), dataset.num_labels(), dataset.label_names());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out.add(apply(dataset.features(i)), dataset.distribution(i));
    }
    return out;
}

StandardizedPredictor::StandardizedPredictor(Standardizer standardizer, PredictorPtr inner)
    : standardizer_(std::move(standardizer)), inner_(std::move(inner)) {
    if (!inner_) throw Error(ErrorCode::InvalidArgument, "null predictor");
    if (standardizer_.mean().size() != inner_->num_features()) {
        throw Error(ErrorCode::DimensionMismatch, "standardizer and model disagree on q");
    }
}

LabelDistribution StandardizedPredictor::predict(std::span<const double> x) const {
    check_finite(x);
    return inner_->predict(standardizer_.apply(x));
}

std::map<std::string, std::string> StandardizedPredictor::hyperparameters() const {
    auto h = inner_->hyperparameters();
    h["standardize"] = "true";
    return h;
}

}  // namespace ldl
