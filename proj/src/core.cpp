#include "ldl/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ldl {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NegativeDegree: return "NegativeDegree";
        case ErrorCode::BadSum: return "BadSum";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyTestSet: return "EmptyTestSet";
        case ErrorCode::MissingMeasure: return "MissingMeasure";
        case ErrorCode::NoSolution: return "NoSolution";
        case ErrorCode::NotDescentDirection: return "NotDescentDirection";
        case ErrorCode::LineSearchFailed: return "LineSearchFailed";
        case ErrorCode::CurvatureViolation: return "CurvatureViolation";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::BadK: return "BadK";
        case ErrorCode::ZeroTotalWeight: return "ZeroTotalWeight";
        case ErrorCode::EmptyClass: return "EmptyClass";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::DegenerateZero: return "DegenerateZero";
        case ErrorCode::WrongCellCount: return "WrongCellCount";
        case ErrorCode::WrongLabelCount: return "WrongLabelCount";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::TooFewExamples: return "TooFewExamples";
        case ErrorCode::UnknownAlgorithmTag: return "UnknownAlgorithmTag";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NoSolution:
        case ErrorCode::NotDescentDirection:
        case ErrorCode::LineSearchFailed:
        case ErrorCode::CurvatureViolation:
        case ErrorCode::Diverged:
            return ErrorCategory::Convergence;
        case ErrorCode::InvalidArgument:
        case ErrorCode::BadK:
            return ErrorCategory::Usage;
        default:
            return ErrorCategory::Data;
    }
}

LabelDistribution validate_distribution(std::span<const double> degrees) {
    if (degrees.size() < 2) {
        throw Error(ErrorCode::TooShort, "a label distribution needs at least 2 labels");
    }
    std::vector<double> d(degrees.begin(), degrees.end());
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (!std::isfinite(d[j])) {
            throw Error(ErrorCode::NonFiniteInput, "degree " + std::to_string(j) + " is not finite");
        }
        if (d[j] < -kNegativeDegreeTolerance) {
            throw Error(ErrorCode::NegativeDegree, "degree " + std::to_string(j) + " is negative");
        }
        d[j] = std::max(d[j], 0.0);
    }
    const double sum = std::accumulate(d.begin(), d.end(), 0.0);
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "degrees sum to " << sum;
        throw Error(ErrorCode::BadSum, msg.str());
    }
    if (std::abs(sum - 1.0) > kNormalisedTolerance) {
        for (double& v : d) v /= sum;
    }
    for (double& v : d) v = std::min(v, 1.0);
    return LabelDistribution(std::move(d));
}

LabelDistribution from_single_label(std::size_t index, std::size_t num_labels) {
    if (num_labels < 2) throw Error(ErrorCode::TooShort, "need at least 2 labels");
    if (index >= num_labels) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "label " + std::to_string(index) + " >= " + std::to_string(num_labels));
    }
    std::vector<double> d(num_labels, 0.0);
    d[index] = 1.0;
    return validate_distribution(d);
}

LabelDistribution from_label_set(std::span<const std::size_t> relevant, std::size_t num_labels) {
    if (num_labels < 2) throw Error(ErrorCode::TooShort, "need at least 2 labels");
    if (relevant.empty()) throw Error(ErrorCode::EmptySet, "relevant label set is empty");
    std::vector<bool> member(num_labels, false);
    for (std::size_t j : relevant) {
        if (j >= num_labels) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "label " + std::to_string(j) + " >= " + std::to_string(num_labels));
        }
        member[j] = true;
    }
    const auto count = static_cast<double>(std::count(member.begin(), member.end(), true));
    std::vector<double> d(num_labels, 0.0);
    for (std::size_t j = 0; j < num_labels; ++j) {
        if (member[j]) d[j] = 1.0 / count;
    }
    return validate_distribution(d);
}

void check_finite(std::span<const double> x) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(x[k])) {
            throw Error(ErrorCode::NonFiniteInput, "feature " + std::to_string(k) + " is not finite");
        }
    }
}

LdlDataset::LdlDataset(std::size_t num_features, std::size_t num_labels,
                       std::vector<std::string> label_names)
    : q_(num_features), c_(num_labels) {
    if (num_labels < 2) throw Error(ErrorCode::TooShort, "need at least 2 labels");
    set_label_names(std::move(label_names));
}

void LdlDataset::set_label_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != c_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(c_) + " label names, got " +
                        std::to_string(names.size()));
    }
    label_names_ = std::move(names);
}

void LdlDataset::add(std::span<const double> features, LabelDistribution distribution) {
    if (features.size() != q_) {
        throw Error(ErrorCode::DimensionMismatch, "feature vector has length " +
                                                      std::to_string(features.size()) +
                                                      ", expected " + std::to_string(q_));
    }
    if (distribution.size() != c_) {
        throw Error(ErrorCode::DimensionMismatch, "distribution has length " +
                                                      std::to_string(distribution.size()) +
                                                      ", expected " + std::to_string(c_));
    }
    check_finite(features);
    features_.insert(features_.end(), features.begin(), features.end());
    distributions_.push_back(std::move(distribution));
}

LdlDataset LdlDataset::subset(std::span<const std::size_t> indices) const {
    LdlDataset out(q_, c_, label_names_);
    out.features_.reserve(indices.size() * q_);
    out.distributions_.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= size()) throw Error(ErrorCode::IndexOutOfRange, "example " + std::to_string(i));
        out.add(features(i), distributions_[i]);
    }
    return out;
}

void LdlDataset::require_nonempty() const {
    if (empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no examples");
}

void check_dimensions(const Predictor& predictor, const LdlDataset& dataset) {
    if (predictor.num_features() != dataset.num_features() ||
        predictor.num_labels() != dataset.num_labels()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "model is q=" + std::to_string(predictor.num_features()) +
                        " c=" + std::to_string(predictor.num_labels()) + ", data is q=" +
                        std::to_string(dataset.num_features()) +
                        " c=" + std::to_string(dataset.num_labels()));
    }
}

double kl_objective(const LdlDataset& dataset, const Predictor& predictor) {
    check_dimensions(predictor, dataset);
    double total = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const LabelDistribution p = predictor.predict(dataset.features(i));
        const LabelDistribution& d = dataset.distribution(i);
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (d[j] > 0.0) total += d[j] * std::log(std::max(p[j], kLogFloor));
        }
    }
    return total;
}

double log_sum_exp(std::span<const double> values) {
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double s = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - m);
        s += out[j];
    }
    for (double& v : out) v /= s;
    return out;
}

}  // namespace ldl
