#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "ldl/core.hpp"

namespace ldl::datagen {

struct ToyParams {
    double a = 1.0;
    double b = 0.5;
    double c_coef = 0.2;
    double d = 1.0;
    std::array<double, 3> w1{4.0, 2.0, 1.0};
    std::array<double, 3> w2{1.0, 2.0, 4.0};
    std::array<double, 3> w3{1.0, 4.0, 2.0};
    double lambda1 = 0.01;
    double lambda2 = 0.01;
};

/// Ground-truth distribution of the artificial benchmark. The three
/// psi terms are chained so each label depends on the previous one.
/// Throws DegenerateZero when every psi vanishes.
LabelDistribution toy_distribution(std::span<const double> x, const ToyParams& params = {});

/// n points uniform on [-1,1]^3 with their ground-truth distributions.
LdlDataset sample_training(std::size_t n, std::uint64_t seed, const ToyParams& params = {});

inline constexpr std::size_t kGridSide = 201;
inline constexpr std::size_t kGridCells = kGridSide * kGridSide;

/// Grid coordinate -1 + 0.01 k, computed from the integer index.
double grid_coordinate(std::size_t k) noexcept;

/// 201 x 201 grid over (x1, x2) with x3 = sin((x1 + x2) pi); x1 is the outer loop.
LdlDataset test_manifold(const ToyParams& params = {});

struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB triples

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Channel = round(255 d). Row r follows x1 and column follows x2, so the
/// top-left pixel is (x1, x2) = (-1, -1). With stretch each channel is
/// linearly mapped so its minimum becomes 0 and its maximum 1; constant
/// channels are left alone.
RgbImage render_manifold(std::span<const LabelDistribution> distributions, bool stretch = false);

/// Binary PPM (P6, maxval 255).
void write_ppm(std::ostream& out, const RgbImage& image);

}  // namespace ldl::datagen
