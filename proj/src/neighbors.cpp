#include "ldl/neighbors.hpp"

#include <algorithm>
#include <queue>
#include <utility>

namespace ldl::neighbors {

KnnModel::KnnModel(LdlDataset training, std::size_t k) : training_(std::move(training)), k_(k) {
    training_.require_nonempty();
    if (k_ < 1 || k_ > training_.size()) {
        throw Error(ErrorCode::BadK, "k=" + std::to_string(k_) + " outside [1, " +
                                         std::to_string(training_.size()) + "]");
    }
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> x) const {
    if (x.size() != num_features()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(num_features()) +
                                                      " features, got " + std::to_string(x.size()));
    }
    check_finite(x);
    // Max-heap on (squared distance, index): the top is the worst of the k
    // kept so far, and pair ordering gives the lowest-index tie-break.
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry> heap;
    for (std::size_t i = 0; i < training_.size(); ++i) {
        const auto f = training_.features(i);
        double dist = 0.0;
        for (std::size_t t = 0; t < f.size(); ++t) {
            const double diff = f[t] - x[t];
            dist += diff * diff;
        }
        if (heap.size() < k_) {
            heap.emplace(dist, i);
        } else if (Entry{dist, i} < heap.top()) {
            heap.pop();
            heap.emplace(dist, i);
        }
    }
    std::vector<std::size_t> out(heap.size());
    for (std::size_t r = out.size(); r-- > 0;) {
        out[r] = heap.top().second;
        heap.pop();
    }
    return out;
}

LabelDistribution KnnModel::predict(std::span<const double> x) const {
    std::vector<double> mean(num_labels(), 0.0);
    for (std::size_t i : neighbors(x)) {
        const auto& d = training_.distribution(i);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += d[j];
    }
    for (double& v : mean) v /= static_cast<double>(k_);
    return validate_distribution(mean);
}

KnnModel fit(LdlDataset dataset, std::size_t k) { return KnnModel(std::move(dataset), k); }

}  // namespace ldl::neighbors
