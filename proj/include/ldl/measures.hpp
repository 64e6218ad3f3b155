#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldl/core.hpp"

namespace ldl {

enum class MeasureId { Chebyshev, Clark, Canberra, KLDivergence, Cosine, Intersection };

enum class Polarity { Distance, Similarity };

inline constexpr std::array<MeasureId, 6> kAllMeasures = {
    MeasureId::Chebyshev, MeasureId::Clark,  MeasureId::Canberra,
    MeasureId::KLDivergence, MeasureId::Cosine, MeasureId::Intersection};

inline constexpr std::size_t kNumMeasures = kAllMeasures.size();

Polarity polarity(MeasureId id) noexcept;
std::string_view name(MeasureId id) noexcept;
/// True when `a` is strictly better than `b` under the measure's polarity.
bool better(MeasureId id, double a, double b) noexcept;

// Distances between a true distribution `d` and a prediction `p`.
// All throw DimensionMismatch on length mismatch.
double chebyshev(std::span<const double> d, std::span<const double> p);
double clark(std::span<const double> d, std::span<const double> p);
double canberra(std::span<const double> d, std::span<const double> p);
double kl_divergence(std::span<const double> d, std::span<const double> p);
double cosine(std::span<const double> d, std::span<const double> p);
double intersection(std::span<const double> d, std::span<const double> p);

double measure(MeasureId id, std::span<const double> d, std::span<const double> p);

using MeasureValues = std::array<double, kNumMeasures>;

MeasureValues measure_all(std::span<const double> d, std::span<const double> p);

/// Arithmetic mean of each measure over the test examples.
MeasureValues evaluate_all(const Predictor& predictor, const LdlDataset& test);

/// Same, for predictions that were already computed (one per test example).
MeasureValues evaluate_predictions(const LdlDataset& test,
                                   std::span<const LabelDistribution> predictions);

/// One algorithm's summary on one dataset; std is absent for single runs.
struct AlgorithmResult {
    std::string algorithm;
    MeasureValues mean{};
    std::optional<MeasureValues> std;
};

struct EvaluationReport {
    std::vector<AlgorithmResult> results;
    /// ranks[a][m]: rank of algorithm a on measure m (1 = best, ties averaged).
    std::vector<MeasureValues> ranks;
    std::vector<double> avg_rank;
};

/// Ranks algorithms per measure. Requires at least one algorithm; every
/// measure value must be finite (MissingMeasure otherwise).
EvaluationReport rank_report(std::vector<AlgorithmResult> results);

/// One block per measure, mean±std(rank) cells, then the
/// Avg. Rank row.
void render_text(std::ostream& out, const EvaluationReport& report,
                 std::string_view dataset_name);

/// CSV with columns algorithm,measure,mean,std,rank. Missing std is empty.
void render_csv(std::ostream& out, const EvaluationReport& report);

}  // namespace ldl
