#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "ldl/cv.hpp"
#include "ldl/transform.hpp"

namespace ldl {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// The five implemented learners, in report order.
inline constexpr std::array<std::string_view, 5> kAlgorithmNames{"pt-bayes", "aa-knn", "aa-bp",
                                                                 "sa-iis", "sa-bfgs"};

bool is_algorithm(std::string_view name) noexcept;

/// Per-run knobs. An explicitly set value replaces the default grid for
/// that parameter with a single point.
struct AlgorithmSettings {
    bool standardize = false;
    // aa-knn
    std::optional<std::size_t> k;
    // aa-bp
    std::optional<std::size_t> hidden_units;
    std::optional<int> epochs;
    std::optional<double> learning_rate;
    // pt-bayes
    std::optional<double> lambda;
    transform::ResampleMode resample = transform::ResampleMode::Multinomial;
    // sa-iis / sa-bfgs
    std::optional<double> epsilon;
    std::optional<int> max_iters;
};

/// Default grids: aa-knn k in {3,5,7,9,11}; aa-bp hidden units in {32,64};
/// the others have a single setting. Throws InvalidArgument for unknown names.
cv::AlgorithmSpec make_spec(std::string_view name, const AlgorithmSettings& settings = {});

/// "k=3|k=5|..." for reports.
std::string describe_grid(const cv::AlgorithmSpec& spec);

}  // namespace ldl
