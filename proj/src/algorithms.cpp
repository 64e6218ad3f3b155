#include "ldl/algorithms.hpp"

#include <algorithm>
#include <sstream>

#include "ldl/maxent.hpp"
#include "ldl/neighbors.hpp"
#include "ldl/neural.hpp"
#include "ldl/standardize.hpp"

namespace ldl {
namespace {

std::string format_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

/// Wraps a trainer so it fits a Standardizer on exactly the data it is given.
cv::Trainer maybe_standardized(cv::Trainer inner, bool standardize) {
    if (!standardize) return inner;
    return [inner = std::move(inner)](const LdlDataset& train, std::uint64_t seed) -> PredictorPtr {
        Standardizer s = Standardizer::fit(train);
        PredictorPtr model = inner(s.apply(train), seed);
        return std::make_unique<StandardizedPredictor>(std::move(s), std::move(model));
    };
}

}  // namespace

bool is_algorithm(std::string_view name) noexcept {
    return std::find(kAlgorithmNames.begin(), kAlgorithmNames.end(), name) != kAlgorithmNames.end();
}

cv::AlgorithmSpec make_spec(std::string_view name, const AlgorithmSettings& s) {
    cv::AlgorithmSpec spec{std::string(name), {}};
    auto add = [&](std::string label, cv::Trainer t) {
        spec.grid.push_back({std::move(label), maybe_standardized(std::move(t), s.standardize)});
    };

    if (name == "aa-knn") {
        const std::vector<std::size_t> ks = s.k ? std::vector<std::size_t>{*s.k}
                                                : std::vector<std::size_t>{3, 5, 7, 9, 11};
        for (std::size_t k : ks) {
            add("k=" + std::to_string(k), [k](const LdlDataset& train, std::uint64_t) {
                return std::make_unique<neighbors::KnnModel>(train, k);
            });
        }
    } else if (name == "aa-bp") {
        const std::vector<std::size_t> hs = s.hidden_units ? std::vector<std::size_t>{*s.hidden_units}
                                                           : std::vector<std::size_t>{32, 64};
        for (std::size_t h : hs) {
            neural::BpConfig cfg;
            cfg.hidden_units = h;
            if (s.epochs) cfg.epochs = *s.epochs;
            if (s.learning_rate) cfg.learning_rate = *s.learning_rate;
            add("hidden=" + std::to_string(h), [cfg](const LdlDataset& train, std::uint64_t seed) {
                neural::BpConfig c = cfg;
                c.seed = seed;
                return std::make_unique<neural::BpNetwork>(neural::train(train, c).network);
            });
        }
    } else if (name == "pt-bayes") {
        const auto lambda = s.lambda;
        const auto mode = s.resample;
        add(lambda ? "lambda=" + format_number(*lambda) : "lambda=auto",
            [lambda, mode](const LdlDataset& train, std::uint64_t seed) {
                return std::make_unique<transform::TransformedPredictor>(
                    transform::fit_pt_bayes(train, lambda, seed, mode));
            });
    } else if (name == "sa-iis") {
        maxent::IisConfig cfg;
        if (s.epsilon) cfg.epsilon = *s.epsilon;
        if (s.max_iters) cfg.max_outer_iters = *s.max_iters;
        add("epsilon=" + format_number(cfg.epsilon), [cfg](const LdlDataset& train, std::uint64_t) {
            return std::make_unique<maxent::MaxEntModel>(maxent::train_iis(train, cfg).model);
        });
    } else if (name == "sa-bfgs") {
        maxent::BfgsConfig cfg;
        if (s.epsilon) cfg.epsilon = *s.epsilon;
        if (s.max_iters) cfg.max_iters = *s.max_iters;
        add("epsilon=" + format_number(cfg.epsilon), [cfg](const LdlDataset& train, std::uint64_t) {
            return std::make_unique<maxent::MaxEntModel>(maxent::train_bfgs(train, cfg).model);
        });
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + std::string(name) + "'");
    }
    return spec;
}

std::string describe_grid(const cv::AlgorithmSpec& spec) {
    std::string out;
    for (const auto& c : spec.grid) {
        if (!out.empty()) out += '|';
        out += c.label;
    }
    return out;
}

}  // namespace ldl
