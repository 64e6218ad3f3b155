#include "ldl/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ldl/random.hpp"

namespace ldl::transform {

std::vector<WeightedExample> expand(const LdlDataset& dataset) {
    dataset.require_nonempty();
    std::vector<WeightedExample> out;
    out.reserve(dataset.size() * dataset.num_labels());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto x = dataset.features(i);
        const auto& d = dataset.distribution(i);
        for (std::size_t j = 0; j < d.size(); ++j) {
            out.push_back({std::vector<double>(x.begin(), x.end()), j, d[j]});
        }
    }
    return out;
}

void SingleLabelDataset::add(std::span<const double> features, std::size_t label) {
    if (features.size() != q_) throw Error(ErrorCode::DimensionMismatch, "feature length mismatch");
    if (label >= c_) throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(label));
    features_.insert(features_.end(), features.begin(), features.end());
    labels_.push_back(label);
}

std::vector<std::size_t> SingleLabelDataset::label_counts() const {
    std::vector<std::size_t> counts(c_, 0);
    for (std::size_t y : labels_) ++counts[y];
    return counts;
}

SingleLabelDataset resample(std::span<const WeightedExample> weighted, std::size_t num_labels,
                            std::size_t target_size, std::uint64_t seed, ResampleMode mode) {
    double total = 0.0;
    for (const auto& w : weighted) {
        if (!(w.weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative example weight");
        total += w.weight;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotalWeight, "weights sum to zero");
    const std::size_t q = weighted.front().features.size();
    SingleLabelDataset out(q, num_labels);

    if (mode == ResampleMode::LargestRemainder) {
        std::vector<std::size_t> counts(weighted.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t i = 0; i < weighted.size(); ++i) {
            const double quota = static_cast<double>(target_size) * weighted[i].weight / total;
            counts[i] = static_cast<std::size_t>(std::floor(quota));
            assigned += counts[i];
            if (weighted[i].weight > 0.0) remainders.emplace_back(quota - std::floor(quota), i);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < target_size && r < remainders.size(); ++r, ++assigned) {
            ++counts[remainders[r].second];
        }
        for (std::size_t i = 0; i < weighted.size(); ++i) {
            for (std::size_t t = 0; t < counts[i]; ++t) out.add(weighted[i].features, weighted[i].label);
        }
        return out;
    }

    std::vector<double> cumulative(weighted.size());
    double running = 0.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) {
        running += weighted[i].weight;
        cumulative[i] = running;
    }
    Rng rng(seed);
    for (std::size_t t = 0; t < target_size; ++t) {
        const double u = rng.uniform() * running;
        // First index whose cumulative weight exceeds u; zero-weight entries
        // have an empty interval and can never be selected.
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t i = it == cumulative.end() ? cumulative.size() - 1
                                                : static_cast<std::size_t>(it - cumulative.begin());
        while (weighted[i].weight == 0.0 && i > 0) --i;
        out.add(weighted[i].features, weighted[i].label);
    }
    return out;
}

TransformedPredictor::TransformedPredictor(std::shared_ptr<const ProbabilisticClassifier> classifier,
                                           std::string tag,
                                           std::map<std::string, std::string> hyper)
    : classifier_(std::move(classifier)), tag_(std::move(tag)), hyper_(std::move(hyper)) {
    if (!classifier_) throw Error(ErrorCode::InvalidArgument, "null classifier");
}

LabelDistribution TransformedPredictor::predict(std::span<const double> x) const {
    if (x.size() != num_features()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(num_features()) +
                                                      " features, got " + std::to_string(x.size()));
    }
    check_finite(x);
    return validate_distribution(classifier_->posterior(x));
}

TransformedPredictor fit_transformed(const LdlDataset& dataset, const SingleLabelLearner& learner,
                                     const TransformOptions& options) {
    const auto weighted = expand(dataset);
    const std::size_t c = dataset.num_labels();
    const SingleLabelDataset sampled =
        resample(weighted, c, c * dataset.size(), options.seed, options.mode);

    std::vector<double> label_weight(c, 0.0);
    for (const auto& w : weighted) label_weight[w.label] += w.weight;
    const auto counts = sampled.label_counts();
    for (std::size_t j = 0; j < c; ++j) {
        if (label_weight[j] > 0.0 && counts[j] == 0) {
            throw Error(ErrorCode::EmptyClass,
                        "label " + std::to_string(j) + " carries weight but was never resampled");
        }
    }
    auto hyper = learner.hyperparameters();
    hyper["seed"] = std::to_string(options.seed);
    hyper["resample"] = options.mode == ResampleMode::Multinomial ? "multinomial" : "largest-remainder";
    return TransformedPredictor(learner.fit(sampled), learner.tag(), std::move(hyper));
}

// ---------------------------------------------------------------------------

GaussianClassModel::GaussianClassModel(std::vector<ClassDensity> classes)
    : classes_(std::move(classes)) {
    if (classes_.size() < 2) throw Error(ErrorCode::TooShort, "need at least 2 classes");
    double prior_sum = 0.0;
    bool have_q = false;
    for (const auto& cls : classes_) {
        if (!(cls.prior >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative class prior");
        prior_sum += cls.prior;
        if (cls.prior > 0.0) {
            if (!have_q) {
                q_ = static_cast<std::size_t>(cls.mean.size());
                have_q = true;
            }
            if (static_cast<std::size_t>(cls.mean.size()) != q_ ||
                static_cast<std::size_t>(cls.covariance.rows()) != q_ ||
                static_cast<std::size_t>(cls.covariance.cols()) != q_) {
                throw Error(ErrorCode::DimensionMismatch, "class density shapes disagree");
            }
        }
    }
    if (std::abs(prior_sum - 1.0) > 1e-9) throw Error(ErrorCode::BadSum, "class priors must sum to 1");

    const double log_2pi = std::log(2.0 * std::numbers::pi);
    factors_.resize(classes_.size());
    log_norm_.assign(classes_.size(), 0.0);
    for (std::size_t j = 0; j < classes_.size(); ++j) {
        const auto& cls = classes_[j];
        if (cls.prior == 0.0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cls.covariance, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(lo > 1e-12 * std::max(hi, 1e-300)) || !(lo > 0.0)) {
            throw Error(ErrorCode::NotPositiveDefinite,
                        "covariance of class " + std::to_string(j) + " is not positive definite");
        }
        factors_[j].compute(cls.covariance);
        const Eigen::MatrixXd l = factors_[j].matrixL();
        const double log_det = 2.0 * l.diagonal().array().log().sum();
        log_norm_[j] = std::log(cls.prior) - 0.5 * log_det - 0.5 * static_cast<double>(q_) * log_2pi;
    }
}

GaussianClassModel GaussianClassModel::fit(const SingleLabelDataset& data,
                                           std::optional<double> lambda) {
    if (data.size() == 0) throw Error(ErrorCode::EmptyDataset, "no single-label examples");
    if (lambda && !(*lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
    const auto q = static_cast<Eigen::Index>(data.num_features());
    const std::size_t c = data.num_labels();
    const auto counts = data.label_counts();

    auto row = [&](std::size_t i) {
        return Eigen::Map<const Eigen::VectorXd>(data.features(i).data(), q);
    };

    Eigen::VectorXd pooled_mean = Eigen::VectorXd::Zero(q);
    for (std::size_t i = 0; i < data.size(); ++i) pooled_mean += row(i);
    pooled_mean /= static_cast<double>(data.size());
    double pooled_trace = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) pooled_trace += (row(i) - pooled_mean).squaredNorm();
    if (data.size() > 1) pooled_trace /= static_cast<double>(data.size() - 1);

    std::vector<ClassDensity> classes(c);
    for (std::size_t j = 0; j < c; ++j) {
        if (counts[j] == 0) continue;
        auto& cls = classes[j];
        cls.prior = static_cast<double>(counts[j]) / static_cast<double>(data.size());
        cls.mean = Eigen::VectorXd::Zero(q);
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.label(i) == j) cls.mean += row(i);
        }
        cls.mean /= static_cast<double>(counts[j]);
        cls.covariance = Eigen::MatrixXd::Zero(q, q);
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.label(i) != j) continue;
            const Eigen::VectorXd diff = row(i) - cls.mean;
            cls.covariance.noalias() += diff * diff.transpose();
        }
        if (counts[j] > 1) cls.covariance /= static_cast<double>(counts[j] - 1);

        double shrink;
        if (lambda) {
            shrink = *lambda;
        } else if (counts[j] <= static_cast<std::size_t>(q)) {
            shrink = 0.1 * pooled_trace / static_cast<double>(q);
        } else {
            shrink = 1e-3 * cls.covariance.trace() / static_cast<double>(q);
            if (!(shrink > 0.0)) shrink = 1e-3 * pooled_trace / static_cast<double>(q);
        }
        if (!lambda && !(shrink > 0.0)) shrink = 1e-9;
        cls.covariance.diagonal().array() += shrink;
    }
    return GaussianClassModel(std::move(classes));
}

std::vector<double> GaussianClassModel::posterior(std::span<const double> x) const {
    if (x.size() != q_) throw Error(ErrorCode::DimensionMismatch, "feature length mismatch");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(q_));
    std::vector<double> log_post;
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < classes_.size(); ++j) {
        if (classes_[j].prior == 0.0) continue;
        const Eigen::VectorXd z = factors_[j].matrixL().solve(v - classes_[j].mean);
        log_post.push_back(log_norm_[j] - 0.5 * z.squaredNorm());
        active.push_back(j);
    }
    const std::vector<double> p = softmax(log_post);
    std::vector<double> out(classes_.size(), 0.0);
    for (std::size_t t = 0; t < active.size(); ++t) out[active[t]] = p[t];
    return out;
}

std::shared_ptr<const ProbabilisticClassifier> GaussianBayesLearner::fit(
    const SingleLabelDataset& data) const {
    return std::make_shared<GaussianClassModel>(GaussianClassModel::fit(data, lambda_));
}

std::map<std::string, std::string> GaussianBayesLearner::hyperparameters() const {
    return {{"lambda", lambda_ ? std::to_string(*lambda_) : std::string("auto")}};
}

TransformedPredictor fit_pt_bayes(const LdlDataset& dataset, std::optional<double> lambda,
                                  std::uint64_t seed, ResampleMode mode) {
    return fit_transformed(dataset, GaussianBayesLearner(lambda), {seed, mode});
}

LabelDistribution predict_pt_bayes(const GaussianClassModel& model, std::span<const double> x) {
    check_finite(x);
    return validate_distribution(model.posterior(x));
}

}  // namespace ldl::transform
