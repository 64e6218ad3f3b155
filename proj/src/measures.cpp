#include "ldl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace ldl {
namespace {

void require_same_length(std::span<const double> d, std::span<const double> p) {
    if (d.size() != p.size()) {
        throw Error(ErrorCode::DimensionMismatch, "distributions have lengths " +
                                                      std::to_string(d.size()) + " and " +
                                                      std::to_string(p.size()));
    }
}

// |d - p| / (d + p) with the 0/0 case defined as 0.
double relative_gap(double d, double p) {
    const double s = d + p;
    return s > 0.0 ? std::abs(d - p) / s : 0.0;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string format_rank(double r) {
    char buf[32];
    if (r == std::floor(r)) {
        std::snprintf(buf, sizeof buf, "%d", static_cast<int>(r));
    } else {
        std::snprintf(buf, sizeof buf, "%.1f", r);
    }
    return buf;
}

}  // namespace

Polarity polarity(MeasureId id) noexcept {
    return (id == MeasureId::Cosine || id == MeasureId::Intersection) ? Polarity::Similarity
                                                                       : Polarity::Distance;
}

std::string_view name(MeasureId id) noexcept {
    switch (id) {
        case MeasureId::Chebyshev: return "Chebyshev";
        case MeasureId::Clark: return "Clark";
        case MeasureId::Canberra: return "Canberra";
        case MeasureId::KLDivergence: return "Kullback-Leibler";
        case MeasureId::Cosine: return "Cosine";
        case MeasureId::Intersection: return "Intersection";
    }
    return "?";
}

bool better(MeasureId id, double a, double b) noexcept {
    return polarity(id) == Polarity::Distance ? a < b : a > b;
}

double chebyshev(std::span<const double> d, std::span<const double> p) {
    require_same_length(d, p);
    double m = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) m = std::max(m, std::abs(d[j] - p[j]));
    return m;
}

double clark(std::span<const double> d, std::span<const double> p) {
    require_same_length(d, p);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double r = relative_gap(d[j], p[j]);
        s += r * r;
    }
    return std::sqrt(s);
}

double canberra(std::span<const double> d, std::span<const double> p) {
    require_same_length(d, p);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) s += relative_gap(d[j], p[j]);
    return s;
}

double kl_divergence(std::span<const double> d, std::span<const double> p) {
    require_same_length(d, p);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d[j] > 0.0) s += d[j] * std::log(d[j] / std::max(p[j], kLogFloor));
    }
    return s;
}

double cosine(std::span<const double> d, std::span<const double> p) {
    require_same_length(d, p);
    double dot = 0.0, nd = 0.0, np = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        dot += d[j] * p[j];
        nd += d[j] * d[j];
        np += p[j] * p[j];
    }
    return dot / (std::sqrt(nd) * std::sqrt(np));
}

double intersection(std::span<const double> d, std::span<const double> p) {
    require_same_length(d, p);
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) s += std::min(d[j], p[j]);
    return s;
}

double measure(MeasureId id, std::span<const double> d, std::span<const double> p) {
    switch (id) {
        case MeasureId::Chebyshev: return chebyshev(d, p);
        case MeasureId::Clark: return clark(d, p);
        case MeasureId::Canberra: return canberra(d, p);
        case MeasureId::KLDivergence: return kl_divergence(d, p);
        case MeasureId::Cosine: return cosine(d, p);
        case MeasureId::Intersection: return intersection(d, p);
    }
    return 0.0;
}

MeasureValues measure_all(std::span<const double> d, std::span<const double> p) {
    MeasureValues v{};
    for (std::size_t m = 0; m < kNumMeasures; ++m) v[m] = measure(kAllMeasures[m], d, p);
    return v;
}

MeasureValues evaluate_predictions(const LdlDataset& test,
                                   std::span<const LabelDistribution> predictions) {
    if (test.empty()) throw Error(ErrorCode::EmptyTestSet, "no test examples");
    if (predictions.size() != test.size()) {
        throw Error(ErrorCode::DimensionMismatch, "prediction count differs from test size");
    }
    MeasureValues sum{};
    for (std::size_t i = 0; i < test.size(); ++i) {
        const MeasureValues v = measure_all(test.distribution(i).span(), predictions[i].span());
        for (std::size_t m = 0; m < kNumMeasures; ++m) sum[m] += v[m];
    }
    for (double& s : sum) s /= static_cast<double>(test.size());
    return sum;
}

MeasureValues evaluate_all(const Predictor& predictor, const LdlDataset& test) {
    if (test.empty()) throw Error(ErrorCode::EmptyTestSet, "no test examples");
    check_dimensions(predictor, test);
    std::vector<LabelDistribution> predictions;
    predictions.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        predictions.push_back(predictor.predict(test.features(i)));
    }
    return evaluate_predictions(test, predictions);
}

EvaluationReport rank_report(std::vector<AlgorithmResult> results) {
    if (results.empty()) throw Error(ErrorCode::InvalidArgument, "no algorithms to rank");
    for (const auto& r : results) {
        for (std::size_t m = 0; m < kNumMeasures; ++m) {
            if (!std::isfinite(r.mean[m])) {
                throw Error(ErrorCode::MissingMeasure,
                            r.algorithm + " has no value for " + std::string(name(kAllMeasures[m])));
            }
        }
    }
    const std::size_t count = results.size();
    EvaluationReport report;
    report.ranks.assign(count, MeasureValues{});
    report.avg_rank.assign(count, 0.0);

    for (std::size_t m = 0; m < kNumMeasures; ++m) {
        const MeasureId id = kAllMeasures[m];
        std::vector<std::size_t> order(count);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return better(id, results[a].mean[m], results[b].mean[m]);
        });
        // Tied runs share the mean of the positions they span.
        for (std::size_t start = 0; start < count;) {
            std::size_t stop = start + 1;
            while (stop < count && results[order[stop]].mean[m] == results[order[start]].mean[m]) {
                ++stop;
            }
            const double rank = 0.5 * static_cast<double>(start + 1 + stop);
            for (std::size_t t = start; t < stop; ++t) report.ranks[order[t]][m] = rank;
            start = stop;
        }
    }
    for (std::size_t a = 0; a < count; ++a) {
        report.avg_rank[a] =
            std::accumulate(report.ranks[a].begin(), report.ranks[a].end(), 0.0) / kNumMeasures;
    }
    report.results = std::move(results);
    return report;
}

void render_text(std::ostream& out, const EvaluationReport& report,
                 std::string_view dataset_name) {
    const std::size_t count = report.results.size();
    std::vector<std::string> headers;
    for (const auto& r : report.results) headers.push_back(r.algorithm);

    auto cell = [&](std::size_t a, std::size_t m) {
        const auto& r = report.results[a];
        std::string s = format_value(r.mean[m]);
        if (r.std) s += "±" + format_value((*r.std)[m]);
        return s + "(" + format_rank(report.ranks[a][m]) + ")";
    };

    std::size_t width = 12;
    for (const auto& h : headers) width = std::max(width, h.size() + 2);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t m = 0; m < kNumMeasures; ++m) width = std::max(width, cell(a, m).size() + 2);
    }
    std::size_t first = std::max<std::size_t>(12, dataset_name.size() + 2);
    for (MeasureId id : kAllMeasures) first = std::max(first, name(id).size() + 2);

    auto pad = [](std::string s, std::size_t w) {
        // '±' is two bytes in UTF-8 but one column wide.
        std::size_t columns = 0;
        for (unsigned char ch : s) columns += (ch & 0xC0) != 0x80;
        if (columns < w) s.append(w - columns, ' ');
        return s;
    };

    for (std::size_t m = 0; m < kNumMeasures; ++m) {
        const MeasureId id = kAllMeasures[m];
        out << name(id) << (polarity(id) == Polarity::Distance ? " (lower is better)"
                                                               : " (higher is better)")
            << "\n";
        out << pad("Dataset", first);
        for (const auto& h : headers) out << pad(h, width);
        out << "\n" << pad(std::string(dataset_name), first);
        for (std::size_t a = 0; a < count; ++a) out << pad(cell(a, m), width);
        out << "\n" << pad("Avg. Rank", first);
        for (std::size_t a = 0; a < count; ++a) out << pad(format_rank(report.ranks[a][m]), width);
        out << "\n\n";
    }

    out << "Summary\n" << pad("Criterion", first);
    for (const auto& h : headers) out << pad(h, width);
    out << "\n";
    for (std::size_t m = 0; m < kNumMeasures; ++m) {
        out << pad(std::string(name(kAllMeasures[m])), first);
        for (std::size_t a = 0; a < count; ++a) out << pad(cell(a, m), width);
        out << "\n";
    }
    out << pad("Avg. Rank", first);
    for (std::size_t a = 0; a < count; ++a) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", report.avg_rank[a]);
        out << pad(buf, width);
    }
    out << "\n";
}

void render_csv(std::ostream& out, const EvaluationReport& report) {
    out << "algorithm,measure,mean,std,rank\n";
    for (std::size_t a = 0; a < report.results.size(); ++a) {
        const auto& r = report.results[a];
        for (std::size_t m = 0; m < kNumMeasures; ++m) {
            out << r.algorithm << ',' << name(kAllMeasures[m]) << ',' << std::setprecision(17)
                << r.mean[m] << ',';
            if (r.std) out << (*r.std)[m];
            out << ',' << std::setprecision(6) << report.ranks[a][m] << "\n";
        }
    }
}

}  // namespace ldl
