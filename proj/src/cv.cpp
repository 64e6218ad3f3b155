#include "ldl/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "ldl/random.hpp"

namespace ldl::cv {
namespace {

double validation_kl(const Predictor& model, const LdlDataset& eval) {
    return evaluate_all(model, eval)[static_cast<std::size_t>(MeasureId::KLDivergence)];
}

[[noreturn]] void rethrow_with_fold(const Error& e, std::size_t fold) {
    throw Error(e.code(), "fold " + std::to_string(fold) + ": " + e.detail());
}

}  // namespace

std::vector<std::size_t> CvPlan::members(std::size_t f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == f) out.push_back(i);
    }
    return out;
}

CvPlan make_cv_plan(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
    if (n < folds) {
        throw Error(ErrorCode::TooFewExamples, std::to_string(n) + " examples cannot fill " +
                                                   std::to_string(folds) + " folds");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order.begin(), order.end());
    CvPlan plan{folds, seed, std::vector<std::size_t>(n)};
    for (std::size_t t = 0; t < n; ++t) plan.fold_of[order[t]] = t % folds;
    return plan;
}

std::size_t threads_from_env() {
    const char* v = std::getenv("LDL_THREADS");
    if (!v) return 0;
    char* end = nullptr;
    const long parsed = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || parsed < 0) return 0;
    return static_cast<std::size_t>(parsed);
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(count);
    if (threads == 0 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        auto worker = [&] {
            for (std::size_t i; !failed && (i = next++) < count;) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                    failed = true;
                }
            }
        };
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

CvResult nested_cv(const LdlDataset& dataset, const AlgorithmSpec& spec, const CvPlan& plan,
                   const CvOptions& options) {
    dataset.require_nonempty();
    if (spec.grid.empty()) throw Error(ErrorCode::InvalidArgument, spec.name + " has an empty grid");
    if (plan.fold_of.size() != dataset.size()) {
        throw Error(ErrorCode::DimensionMismatch, "plan covers " + std::to_string(plan.fold_of.size()) +
                                                      " examples, dataset has " +
                                                      std::to_string(dataset.size()));
    }
    const std::size_t folds = plan.folds;
    const std::size_t grid = spec.grid.size();

    auto split = [&](std::size_t f, Phase phase) {
        const std::size_t v = validation_fold(f, folds);
        std::vector<std::size_t> train, eval;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const std::size_t g = plan.fold_of[i];
            if (g == f) {
                if (phase == Phase::Final) eval.push_back(i);
            } else if (g == v && phase == Phase::Selection) {
                eval.push_back(i);
            } else {
                train.push_back(i);
            }
        }
        return std::pair{std::move(train), std::move(eval)};
    };

    auto run = [&](std::size_t f, Phase phase, std::size_t cand) {
        auto [train_idx, eval_idx] = split(f, phase);
        if (options.observer) options.observer({f, phase, cand, train_idx, eval_idx});
        const std::uint64_t seed = mix_seed(plan.seed, 2 * f + (phase == Phase::Final ? 1 : 0));
        const LdlDataset train = dataset.subset(train_idx);
        const LdlDataset eval = dataset.subset(eval_idx);
        try {
            PredictorPtr model = spec.grid[cand].train(train, seed);
            return std::pair{evaluate_all(*model, eval), model->hyperparameters()};
        } catch (const Error& e) {
            rethrow_with_fold(e, f);
        }
    };

    CvResult result;
    result.algorithm = spec.name;

    // A one-point grid needs no selection, which makes this plain F-fold CV.
    if (grid > 1) {
        std::vector<double> scores(folds * grid);
        parallel_for(folds * grid, options.threads, [&](std::size_t t) {
            const std::size_t f = t / grid, cand = t % grid;
            scores[t] = run(f, Phase::Selection, cand)
                            .first[static_cast<std::size_t>(MeasureId::KLDivergence)];
        });
        result.validation_kl.assign(grid, 0.0);
        for (std::size_t t = 0; t < scores.size(); ++t) result.validation_kl[t % grid] += scores[t];
        for (double& s : result.validation_kl) s /= static_cast<double>(folds);
        result.selected = static_cast<std::size_t>(
            std::min_element(result.validation_kl.begin(), result.validation_kl.end()) -
            result.validation_kl.begin());
    }
    result.selected_label = spec.grid[result.selected].label;

    result.per_fold.resize(folds);
    std::vector<std::map<std::string, std::string>> hyper(folds);
    parallel_for(folds, options.threads, [&](std::size_t f) {
        auto [values, h] = run(f, Phase::Final, result.selected);
        result.per_fold[f] = values;
        hyper[f] = std::move(h);
    });
    result.hyperparameters = std::move(hyper.front());

    for (std::size_t m = 0; m < kNumMeasures; ++m) {
        double mean = 0.0;
        for (const auto& v : result.per_fold) mean += v[m];
        mean /= static_cast<double>(folds);
        double ss = 0.0;
        for (const auto& v : result.per_fold) ss += (v[m] - mean) * (v[m] - mean);
        result.mean[m] = mean;
        result.std[m] = std::sqrt(ss / static_cast<double>(folds - 1));
    }
    return result;
}

std::size_t select_by_holdout(const LdlDataset& dataset, const AlgorithmSpec& spec,
                              std::uint64_t seed, double holdout) {
    if (spec.grid.empty()) throw Error(ErrorCode::InvalidArgument, spec.name + " has an empty grid");
    if (spec.grid.size() == 1) return 0;
    if (!(holdout > 0.0 && holdout < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "holdout share must lie in (0, 1)");
    }
    const std::size_t n = dataset.size();
    const auto n_eval = static_cast<std::size_t>(std::llround(holdout * static_cast<double>(n)));
    if (n_eval == 0 || n_eval >= n) throw Error(ErrorCode::TooFewExamples, "holdout split is empty");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, 0x401d));
    rng.shuffle(order.begin(), order.end());
    std::vector<std::size_t> eval_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_eval));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_eval), order.end());
    std::sort(eval_idx.begin(), eval_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    const LdlDataset train = dataset.subset(train_idx);
    const LdlDataset eval = dataset.subset(eval_idx);

    std::size_t best = 0;
    double best_kl = std::numeric_limits<double>::infinity();
    for (std::size_t cand = 0; cand < spec.grid.size(); ++cand) {
        const double kl = validation_kl(*spec.grid[cand].train(train, mix_seed(seed, 0x5e1)), eval);
        if (kl < best_kl) {
            best_kl = kl;
            best = cand;
        }
    }
    return best;
}

}  // namespace ldl::cv
