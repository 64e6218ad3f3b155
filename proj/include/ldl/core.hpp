#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldl/error.hpp"

namespace ldl {

/// Degrees below this are treated as rounding noise and clamped to zero.
inline constexpr double kNegativeDegreeTolerance = 1e-12;
/// Input sums further than this from 1 are rejected.
inline constexpr double kSumTolerance = 1e-6;
/// Sums within this distance of 1 are considered already normalised.
inline constexpr double kNormalisedTolerance = 1e-12;
/// Floor applied to predicted probabilities before taking logs.
inline constexpr double kLogFloor = 1e-12;

/// Description degrees over c >= 2 labels; each in [0,1], summing to 1.
class LabelDistribution {
public:
    const std::vector<double>& degrees() const noexcept { return degrees_; }
    std::span<const double> span() const noexcept { return degrees_; }
    std::size_t size() const noexcept { return degrees_.size(); }
    double operator[](std::size_t j) const { return degrees_[j]; }

    auto begin() const noexcept { return degrees_.begin(); }
    auto end() const noexcept { return degrees_.end(); }

    friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;

private:
    explicit LabelDistribution(std::vector<double> degrees) : degrees_(std::move(degrees)) {}
    std::vector<double> degrees_;

    friend LabelDistribution validate_distribution(std::span<const double>);
};

/// Checks the simplex constraints. Sums within kSumTolerance of one are
/// renormalised; sums already within kNormalisedTolerance keep their exact
/// values so validation is idempotent.
LabelDistribution validate_distribution(std::span<const double> degrees);

inline LabelDistribution validate_distribution(std::initializer_list<double> degrees) {
    return validate_distribution(std::span<const double>(degrees.begin(), degrees.size()));
}

/// Kronecker distribution: all mass on label `index`.
LabelDistribution from_single_label(std::size_t index, std::size_t num_labels);

/// Uniform mass 1/|relevant| over a multi-label annotation.
LabelDistribution from_label_set(std::span<const std::size_t> relevant, std::size_t num_labels);

inline LabelDistribution from_label_set(std::initializer_list<std::size_t> relevant,
                                        std::size_t num_labels) {
    return from_label_set(std::span<const std::size_t>(relevant.begin(), relevant.size()),
                          num_labels);
}

using FeatureVector = std::vector<double>;

/// Throws NonFiniteInput if any value is NaN or infinite.
void check_finite(std::span<const double> x);

/// Paired feature vectors and label distributions with fixed q and c.
class LdlDataset {
public:
    LdlDataset(std::size_t num_features, std::size_t num_labels,
               std::vector<std::string> label_names = {});

    void add(std::span<const double> features, LabelDistribution distribution);

    std::size_t size() const noexcept { return distributions_.size(); }
    bool empty() const noexcept { return distributions_.empty(); }
    std::size_t num_features() const noexcept { return q_; }
    std::size_t num_labels() const noexcept { return c_; }

    std::span<const double> features(std::size_t i) const {
        return {features_.data() + i * q_, q_};
    }
    const LabelDistribution& distribution(std::size_t i) const { return distributions_[i]; }
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }
    void set_label_names(std::vector<std::string> names);

    LdlDataset subset(std::span<const std::size_t> indices) const;

    /// Throws EmptyDataset when n == 0.
    void require_nonempty() const;

    friend bool operator==(const LdlDataset&, const LdlDataset&) = default;

private:
    std::size_t q_;
    std::size_t c_;
    std::vector<double> features_;
    std::vector<LabelDistribution> distributions_;
    std::vector<std::string> label_names_;
};

/// Uniform contract implemented by every learner.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual LabelDistribution predict(std::span<const double> x) const = 0;
    virtual std::string algorithm() const = 0;
    virtual std::size_t num_features() const = 0;
    virtual std::size_t num_labels() const = 0;
    virtual std::map<std::string, std::string> hyperparameters() const { return {}; }
};

using PredictorPtr = std::unique_ptr<Predictor>;

void check_dimensions(const Predictor& predictor, const LdlDataset& dataset);

/// Sum_i Sum_j d_ij ln p(y_j|x_i); zero degrees contribute nothing and
/// predictions are floored at kLogFloor.
double kl_objective(const LdlDataset& dataset, const Predictor& predictor);

/// Numerically stable softmax into a fresh vector.
std::vector<double> softmax(std::span<const double> logits);

/// log(sum(exp(v))) with max subtraction.
double log_sum_exp(std::span<const double> values);

}  // namespace ldl
