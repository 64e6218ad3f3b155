#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ldl/core.hpp"
#include "ldl/measures.hpp"

namespace ldl::cv {

/// Fold assignment for every example.
struct CvPlan {
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> fold_of;

    /// Indices in fold f, ascending.
    std::vector<std::size_t> members(std::size_t f) const;

    friend bool operator==(const CvPlan&, const CvPlan&) = default;
};

/// Seeded shuffle then round-robin, so fold sizes differ by at most one and
/// the leading folds take the remainder. Throws TooFewExamples if n < folds.
CvPlan make_cv_plan(std::size_t n, std::size_t folds = 10, std::uint64_t seed = 1);

/// Fold used for validation when fold f is the test fold.
inline std::size_t validation_fold(std::size_t f, std::size_t folds) noexcept {
    return (f + 1) % folds;
}

using Trainer = std::function<PredictorPtr(const LdlDataset& train, std::uint64_t seed)>;

/// One point of a parameter grid.
struct Candidate {
    std::string label;  ///< e.g. "k=5"
    Trainer train;
};

struct AlgorithmSpec {
    std::string name;
    std::vector<Candidate> grid;
};

enum class Phase { Selection, Final };

/// What a trainer saw during one call, for leakage audits.
struct TrainingView {
    std::size_t fold = 0;
    Phase phase = Phase::Selection;
    std::size_t candidate = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> eval_indices;
};

struct CvOptions {
    /// Worker threads; 0 runs sequentially on the calling thread.
    std::size_t threads = 0;
    /// Called once per trainer invocation. Must be thread-safe when threads > 0.
    std::function<void(const TrainingView&)> observer;
};

struct CvResult {
    std::string algorithm;
    std::size_t selected = 0;
    std::string selected_label;
    /// Mean validation KL per grid candidate, averaged over folds.
    std::vector<double> validation_kl;
    std::vector<MeasureValues> per_fold;
    MeasureValues mean{};
    MeasureValues std{};  ///< sample standard deviation across folds
    std::map<std::string, std::string> hyperparameters;  ///< reported by the final fold-0 model

    AlgorithmResult as_result() const { return {algorithm, mean, std}; }
};

/// Nested cross validation. For each test fold f the validation fold is
/// (f+1) mod F and the rest is training data. Every grid candidate is
/// trained on the training folds and scored by mean KL on the validation
/// fold; the candidate with the lowest KL averaged over all folds wins.
/// It is then retrained on training + validation and evaluated on fold f.
/// Trainer errors are rethrown with the fold index in the message.
CvResult nested_cv(const LdlDataset& dataset, const AlgorithmSpec& spec, const CvPlan& plan,
                   const CvOptions& options = {});

/// Picks a grid candidate by training on a random (1 - holdout) share of
/// the data and scoring mean KL on the rest. Returns the candidate index.
std::size_t select_by_holdout(const LdlDataset& dataset, const AlgorithmSpec& spec,
                              std::uint64_t seed, double holdout = 0.2);

/// Worker count from LDL_THREADS (unset or invalid means 0).
std::size_t threads_from_env();

/// Runs body(i) for i in [0, count) on up to `threads` workers; 0 means the
/// calling thread. The first exception by index is rethrown after all work stops.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ldl::cv
