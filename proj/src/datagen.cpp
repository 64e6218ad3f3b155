#include "ldl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldl/random.hpp"

namespace ldl::datagen {

LabelDistribution toy_distribution(std::span<const double> x, const ToyParams& p) {
    if (x.size() != 3) throw Error(ErrorCode::DimensionMismatch, "toy distribution needs 3 features");
    check_finite(x);
    std::array<double, 3> t{};
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = x[i];
        t[i] = p.a * v + p.b * v * v + p.c_coef * v * v * v + p.d;
    }
    auto dot = [&](const std::array<double, 3>& w) { return w[0] * t[0] + w[1] * t[1] + w[2] * t[2]; };
    const double psi1 = std::pow(dot(p.w1), 2);
    const double psi2 = std::pow(dot(p.w2) + p.lambda1 * psi1, 2);
    const double psi3 = std::pow(dot(p.w3) + p.lambda2 * psi2, 2);
    const double total = psi1 + psi2 + psi3;
    if (!(total > 0.0)) throw Error(ErrorCode::DegenerateZero, "all psi terms are zero");
    const std::array<double, 3> d{psi1 / total, psi2 / total, psi3 / total};
    return validate_distribution(d);
}

LdlDataset sample_training(std::size_t n, std::uint64_t seed, const ToyParams& params) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
    LdlDataset ds(3, 3);
    Rng rng(seed);
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        ds.add(x, toy_distribution(x, params));
    }
    return ds;
}

double grid_coordinate(std::size_t k) noexcept {
    return -1.0 + static_cast<double>(k) / 100.0;
}

LdlDataset test_manifold(const ToyParams& params) {
    LdlDataset ds(3, 3);
    for (std::size_t r = 0; r < kGridSide; ++r) {
        for (std::size_t s = 0; s < kGridSide; ++s) {
            const double x1 = grid_coordinate(r);
            const double x2 = grid_coordinate(s);
            const std::array<double, 3> x{x1, x2, std::sin((x1 + x2) * std::numbers::pi)};
            ds.add(x, toy_distribution(x, params));
        }
    }
    return ds;
}

RgbImage render_manifold(std::span<const LabelDistribution> distributions, bool stretch) {
    if (distributions.size() != kGridCells) {
        throw Error(ErrorCode::WrongCellCount, "expected " + std::to_string(kGridCells) +
                                                   " cells, got " +
                                                   std::to_string(distributions.size()));
    }
    for (const auto& d : distributions) {
        if (d.size() != 3) {
            throw Error(ErrorCode::WrongLabelCount,
                        "rendering needs 3 labels, got " + std::to_string(d.size()));
        }
    }
    std::array<double, 3> lo{1.0, 1.0, 1.0}, hi{0.0, 0.0, 0.0};
    if (stretch) {
        for (const auto& d : distributions) {
            for (std::size_t ch = 0; ch < 3; ++ch) {
                lo[ch] = std::min(lo[ch], d[ch]);
                hi[ch] = std::max(hi[ch], d[ch]);
            }
        }
    }
    RgbImage img{kGridSide, kGridSide, std::vector<std::uint8_t>(kGridCells * 3)};
    for (std::size_t i = 0; i < kGridCells; ++i) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
            double v = distributions[i][ch];
            if (stretch && hi[ch] > lo[ch]) v = (v - lo[ch]) / (hi[ch] - lo[ch]);
            img.pixels[i * 3 + ch] =
                static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }
    }
    return img;
}

void write_ppm(std::ostream& out, const RgbImage& image) {
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace ldl::datagen
