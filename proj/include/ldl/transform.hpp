#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ldl/core.hpp"

namespace ldl::transform {

/// One (x_i, y_j) copy of a label-distribution example, weighted by d_ij.
struct WeightedExample {
    std::vector<double> features;
    std::size_t label = 0;
    double weight = 0.0;
};

/// n·c weighted single-label examples, example-major then label order.
std::vector<WeightedExample> expand(const LdlDataset& dataset);

/// Ordinary single-label training data.
class SingleLabelDataset {
public:
    SingleLabelDataset(std::size_t num_features, std::size_t num_labels)
        : q_(num_features), c_(num_labels) {}

    void add(std::span<const double> features, std::size_t label);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t num_features() const noexcept { return q_; }
    std::size_t num_labels() const noexcept { return c_; }
    std::span<const double> features(std::size_t i) const { return {features_.data() + i * q_, q_}; }
    std::size_t label(std::size_t i) const { return labels_[i]; }
    std::vector<std::size_t> label_counts() const;

    friend bool operator==(const SingleLabelDataset&, const SingleLabelDataset&) = default;

private:
    std::size_t q_;
    std::size_t c_;
    std::vector<double> features_;
    std::vector<std::size_t> labels_;
};

enum class ResampleMode {
    Multinomial,       ///< seeded draws proportional to weight
    LargestRemainder,  ///< deterministic quota allocation, seed unused
};

/// Draws target_size examples proportional to weight. Zero-weight examples
/// are never drawn. Throws ZeroTotalWeight.
SingleLabelDataset resample(std::span<const WeightedExample> weighted, std::size_t num_labels,
                            std::size_t target_size, std::uint64_t seed,
                            ResampleMode mode = ResampleMode::Multinomial);

/// A single-label classifier that reports class posteriors.
class ProbabilisticClassifier {
public:
    virtual ~ProbabilisticClassifier() = default;
    virtual std::vector<double> posterior(std::span<const double> x) const = 0;
    virtual std::size_t num_features() const = 0;
    virtual std::size_t num_labels() const = 0;
};

/// Extension point: any learner producing class posteriors can be plugged
/// into the problem-transformation pipeline.
class SingleLabelLearner {
public:
    virtual ~SingleLabelLearner() = default;
    /// Short tag; the resulting predictor is named "pt-<tag>".
    virtual std::string tag() const = 0;
    virtual std::shared_ptr<const ProbabilisticClassifier> fit(const SingleLabelDataset& data) const = 0;
    virtual std::map<std::string, std::string> hyperparameters() const { return {}; }
};

/// Predictor whose description degrees are a single-label classifier's
/// posteriors.
class TransformedPredictor : public Predictor {
public:
    TransformedPredictor(std::shared_ptr<const ProbabilisticClassifier> classifier, std::string tag,
                         std::map<std::string, std::string> hyper = {});

    const ProbabilisticClassifier& classifier() const noexcept { return *classifier_; }
    std::shared_ptr<const ProbabilisticClassifier> shared_classifier() const { return classifier_; }

    LabelDistribution predict(std::span<const double> x) const override;
    std::string algorithm() const override { return "pt-" + tag_; }
    std::size_t num_features() const override { return classifier_->num_features(); }
    std::size_t num_labels() const override { return classifier_->num_labels(); }
    std::map<std::string, std::string> hyperparameters() const override { return hyper_; }

private:
    std::shared_ptr<const ProbabilisticClassifier> classifier_;
    std::string tag_;
    std::map<std::string, std::string> hyper_;
};

struct TransformOptions {
    std::uint64_t seed = 1;
    ResampleMode mode = ResampleMode::Multinomial;
};

/// expand → resample to c·n → learner.fit. Throws EmptyClass if a label that
/// carries weight was never drawn.
TransformedPredictor fit_transformed(const LdlDataset& dataset, const SingleLabelLearner& learner,
                                     const TransformOptions& options = {});

/// Per-class Gaussian with full covariance; posterior by Bayes' rule.
class GaussianClassModel : public ProbabilisticClassifier {
public:
    struct ClassDensity {
        double prior = 0.0;
        Eigen::VectorXd mean;
        Eigen::MatrixXd covariance;
    };

    /// Classes with prior 0 have empty mean/covariance and posterior 0.
    /// Throws NotPositiveDefinite if a covariance is not positive definite.
    explicit GaussianClassModel(std::vector<ClassDensity> classes);

    /// Maximum likelihood fit with shrinkage covariance + lambda I. When
    /// lambda is absent it defaults to 1e-3·trace(cov)/q per class; classes
    /// with at most q samples are shrunk with 0.1·trace(pooled)/q instead.
    static GaussianClassModel fit(const SingleLabelDataset& data,
                                  std::optional<double> lambda = std::nullopt);

    const std::vector<ClassDensity>& classes() const noexcept { return classes_; }

    std::vector<double> posterior(std::span<const double> x) const override;
    std::size_t num_features() const override { return q_; }
    std::size_t num_labels() const override { return classes_.size(); }

private:
    std::size_t q_ = 0;
    std::vector<ClassDensity> classes_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
    std::vector<double> log_norm_;  // log prior - 1/2 log det - q/2 log 2pi
};

class GaussianBayesLearner : public SingleLabelLearner {
public:
    explicit GaussianBayesLearner(std::optional<double> lambda = std::nullopt) : lambda_(lambda) {}
    std::string tag() const override { return "bayes"; }
    std::shared_ptr<const ProbabilisticClassifier> fit(const SingleLabelDataset& data) const override;
    std::map<std::string, std::string> hyperparameters() const override;

private:
    std::optional<double> lambda_;
};

TransformedPredictor fit_pt_bayes(const LdlDataset& dataset, std::optional<double> lambda,
                                  std::uint64_t seed,
                                  ResampleMode mode = ResampleMode::Multinomial);

LabelDistribution predict_pt_bayes(const GaussianClassModel& model, std::span<const double> x);

}  // namespace ldl::transform
