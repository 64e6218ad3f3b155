// ldl: command-line front end for training, evaluating and benchmarking
// label distribution learners.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ldl/algorithms.hpp"
#include "ldl/cv.hpp"
#include "ldl/datagen.hpp"
#include "ldl/io.hpp"
#include "ldl/maxent.hpp"
#include "ldl/measures.hpp"
#include "ldl/neural.hpp"
#include "ldl/standardize.hpp"

namespace {

using namespace ldl;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitConvergence = 3;

int exit_code(const Error& e) {
    switch (category(e.code())) {
        case ErrorCategory::Usage: return kExitUsage;
        case ErrorCategory::Convergence: return kExitConvergence;
        case ErrorCategory::Data: return kExitData;
    }
    return kExitData;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    return f;
}

void close_output(std::ofstream& f, const std::string& path) {
    f.close();
    if (!f) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

double millis_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string dataset_name(const std::string& path) {
    const std::filesystem::path p(path);
    return p.stem().empty() ? path : p.stem().string();
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::size_t n = 500;
    std::uint64_t seed = 1;
    std::string out;
    std::string test_out;
};

int cmd_synth(const SynthArgs& a) {
    if (a.out.empty() && a.test_out.empty()) throw UsageError("synth needs --out and/or --test-out");
    if (!a.out.empty()) {
        io::write_dataset(a.out, datagen::sample_training(a.n, a.seed));
        std::cout << "wrote " << a.n << " training examples to " << a.out << "\n";
    }
    if (!a.test_out.empty()) {
        io::write_dataset(a.test_out, datagen::test_manifold());
        std::cout << "wrote " << datagen::kGridCells << " grid examples to " << a.test_out << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct LearnerArgs {
    std::uint64_t seed = 1;
    bool standardize = false;
    std::optional<std::size_t> k;
    std::optional<std::size_t> hidden;
    std::optional<int> epochs;
    std::optional<double> learning_rate;
    std::optional<double> lambda;
    std::string resample = "multinomial";
    std::optional<double> epsilon;
    std::optional<int> max_iters;

    AlgorithmSettings settings() const {
        AlgorithmSettings s;
        s.standardize = standardize;
        s.k = k;
        s.hidden_units = hidden;
        s.epochs = epochs;
        s.learning_rate = learning_rate;
        s.lambda = lambda;
        s.resample = resample == "largest-remainder" ? transform::ResampleMode::LargestRemainder
                                                     : transform::ResampleMode::Multinomial;
        s.epsilon = epsilon;
        s.max_iters = max_iters;
        return s;
    }
};

void add_learner_flags(CLI::App* cmd, LearnerArgs& a) {
    cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    cmd->add_flag("--standardize", a.standardize, "Z-score features using training statistics");
    cmd->add_option("--k", a.k, "aa-knn: neighbour count (default: select from 3,5,7,9,11)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--hidden", a.hidden, "aa-bp: hidden units (default: select from 32,64)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--epochs", a.epochs, "aa-bp: training epochs")->check(CLI::PositiveNumber);
    cmd->add_option("--learning-rate", a.learning_rate, "aa-bp: step size")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", a.lambda, "pt-bayes: covariance ridge (default: trace based)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--resample", a.resample, "pt-bayes: multinomial or largest-remainder")
        ->check(CLI::IsMember({"multinomial", "largest-remainder"}))
        ->capture_default_str();
    cmd->add_option("--epsilon", a.epsilon, "sa-iis/sa-bfgs: stopping tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", a.max_iters, "sa-iis/sa-bfgs: iteration cap")
        ->check(CLI::PositiveNumber);
}

struct TrainArgs {
    std::string algo;
    std::string data;
    std::string model_out;
    std::string trace_out;
    LearnerArgs learner;
};

void train_maxent(const TrainArgs& a, const LdlDataset& data, PredictorPtr& model,
                  std::vector<maxent::TraceRecord>& trace, maxent::TrainStatus& status) {
    std::optional<Standardizer> st;
    std::optional<LdlDataset> scaled;
    if (a.learner.standardize) {
        st = Standardizer::fit(data);
        scaled = st->apply(data);
    }
    const LdlDataset* fit_on = scaled ? &*scaled : &data;
    maxent::TrainResult r = [&] {
        if (a.algo == "sa-iis") {
            maxent::IisConfig cfg;
            if (a.learner.epsilon) cfg.epsilon = *a.learner.epsilon;
            if (a.learner.max_iters) cfg.max_outer_iters = *a.learner.max_iters;
            return maxent::train_iis(*fit_on, cfg);
        }
        maxent::BfgsConfig cfg;
        if (a.learner.epsilon) cfg.epsilon = *a.learner.epsilon;
        if (a.learner.max_iters) cfg.max_iters = *a.learner.max_iters;
        return maxent::train_bfgs(*fit_on, cfg);
    }();
    trace = std::move(r.trace);
    status = r.status;
    model = std::make_unique<maxent::MaxEntModel>(std::move(r.model));
    if (st) model = std::make_unique<StandardizedPredictor>(std::move(*st), std::move(model));
}

int cmd_train(const TrainArgs& a) {
    const LdlDataset data = io::read_dataset(a.data);
    const auto t0 = std::chrono::steady_clock::now();
    PredictorPtr model;
    std::vector<maxent::TraceRecord> trace;
    maxent::TrainStatus status = maxent::TrainStatus::Converged;
    std::string selected;

    if (a.algo == "sa-iis" || a.algo == "sa-bfgs") {
        try {
            train_maxent(a, data, model, trace, status);
        } catch (const maxent::TrainingError& e) {
            if (!a.trace_out.empty()) {
                auto f = open_output(a.trace_out);
                maxent::write_trace_csv(f, e.trace());
                close_output(f, a.trace_out);
            }
            throw;
        }
    } else {
        const cv::AlgorithmSpec spec = make_spec(a.algo, a.learner.settings());
        const std::size_t pick = cv::select_by_holdout(data, spec, a.learner.seed);
        selected = spec.grid[pick].label;
        model = spec.grid[pick].train(data, a.learner.seed);
    }
    const double elapsed = millis_since(t0);

    if (!a.model_out.empty()) io::save_model(a.model_out, *model);
    if (!a.trace_out.empty() && !trace.empty()) {
        auto f = open_output(a.trace_out);
        maxent::write_trace_csv(f, trace);
        close_output(f, a.trace_out);
    }

    auto row = [](const char* label, const std::string& value) {
        std::printf("%-18s %s\n", label, value.c_str());
    };
    auto num = [](const char* f, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, v);
        return std::string(buf);
    };
    row("algorithm", model->algorithm());
    if (!selected.empty()) row("selected", selected);
    for (const auto& [key, value] : model->hyperparameters()) row(("  " + key).c_str(), value);
    if (!trace.empty()) {
        row("iterations", std::to_string(trace.back().iteration));
        row("final T", num("%.10g", trace.back().objective));
        row("grad norm", num("%.3g", trace.back().grad_norm));
    }
    row("KL objective", num("%.10g", kl_objective(data, *model)));
    row("Running Time (ms)", num("%.0f", elapsed));
    if (status == maxent::TrainStatus::PrecisionLimit) {
        std::printf("note: stopped at the floating-point precision limit of the objective\n");
    }
    if (status == maxent::TrainStatus::MaxItersReached) {
        std::fprintf(stderr, "warning: iteration cap reached before convergence\n");
        return kExitConvergence;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string model;
    std::string data;
    std::string report;
};

int cmd_eval(const EvalArgs& a) {
    const PredictorPtr model = io::load_model(std::filesystem::path(a.model));
    const LdlDataset data = io::read_dataset(a.data);
    const MeasureValues v = evaluate_all(*model, data);
    for (std::size_t m = 0; m < kNumMeasures; ++m) {
        std::printf("%-18s %.6f\n", std::string(name(kAllMeasures[m])).c_str(), v[m]);
    }
    if (!a.report.empty()) {
        auto f = open_output(a.report);
        f << "# tool ldl " << kToolVersion << "\n# model " << a.model << "\n# data " << a.data << "\n";
        render_csv(f, rank_report({{model->algorithm(), v, std::nullopt}}));
        close_output(f, a.report);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CvArgs {
    std::string data;
    std::vector<std::string> algos{kAlgorithmNames.begin(), kAlgorithmNames.end()};
    std::size_t folds = 10;
    std::string report;
    std::string text_out;
    LearnerArgs learner;
};

int cmd_cv(const CvArgs& a) {
    const LdlDataset data = io::read_dataset(a.data);
    const cv::CvPlan plan = cv::make_cv_plan(data.size(), a.folds, a.learner.seed);
    const AlgorithmSettings settings = a.learner.settings();
    cv::CvOptions options;
    options.threads = cv::threads_from_env();

    std::ostringstream meta;
    meta << "# tool ldl " << kToolVersion << "\n";
    meta << "# data " << a.data << " n=" << data.size() << " q=" << data.num_features()
         << " c=" << data.num_labels() << "\n";
    meta << "# seed " << a.learner.seed << "\n# folds " << a.folds << "\n";
    meta << "# standardize " << (a.learner.standardize ? "true" : "false") << "\n";

    std::vector<AlgorithmResult> results;
    std::vector<std::string> failures;
    for (const auto& name : a.algos) {
        const cv::AlgorithmSpec spec = make_spec(name, settings);
        meta << "# grid " << name << " " << describe_grid(spec) << "\n";
        try {
            const cv::CvResult r = cv::nested_cv(data, spec, plan, options);
            meta << "# selected " << name << " " << r.selected_label;
            for (std::size_t g = 0; g < r.validation_kl.size(); ++g) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " %s:%.6g", spec.grid[g].label.c_str(), r.validation_kl[g]);
                meta << buf;
            }
            meta << "\n";
            results.push_back(r.as_result());
        } catch (const Error& e) {
            meta << "# failed " << name << " " << e.what() << "\n";
            failures.push_back(name + ": " + e.what());
        }
    }

    std::cout << meta.str() << "\n";
    if (!results.empty()) {
        const EvaluationReport report = rank_report(results);
        std::ostringstream text;
        render_text(text, report, dataset_name(a.data));
        std::cout << text.str();
        if (!a.report.empty()) {
            auto f = open_output(a.report);
            f << meta.str();
            render_csv(f, report);
            close_output(f, a.report);
        }
        if (!a.text_out.empty()) {
            auto f = open_output(a.text_out);
            f << meta.str() << "\n" << text.str();
            close_output(f, a.text_out);
        }
    }
    for (const auto& msg : failures) std::cerr << "error: " << msg << "\n";
    return failures.empty() ? kExitOk : kExitConvergence;
}

// ---------------------------------------------------------------------------

struct RenderArgs {
    std::string model;
    bool ground_truth = false;
    std::string out;
    bool stretch = false;
};

int cmd_render(const RenderArgs& a) {
    if (a.ground_truth == !a.model.empty()) throw UsageError("render needs exactly one of --model or --ground-truth");
    const LdlDataset grid = datagen::test_manifold();
    std::vector<LabelDistribution> cells;
    cells.reserve(grid.size());
    if (a.ground_truth) {
        for (std::size_t i = 0; i < grid.size(); ++i) cells.push_back(grid.distribution(i));
    } else {
        const PredictorPtr model = io::load_model(std::filesystem::path(a.model));
        if (model->num_labels() != 3) {
            throw Error(ErrorCode::WrongLabelCount, "rendering needs a model with 3 labels, '" + a.model +
                                                        "' has " + std::to_string(model->num_labels()));
        }
        check_dimensions(*model, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) cells.push_back(model->predict(grid.features(i)));
    }
    const datagen::RgbImage img = datagen::render_manifold(cells, a.stretch);
    auto f = open_output(a.out);
    datagen::write_ppm(f, img);
    close_output(f, a.out);
    std::cout << "wrote " << img.width << "x" << img.height << " image to " << a.out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label distribution learning toolkit"};
    app.set_version_flag("--version", std::string(ldl::kToolVersion));
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate the artificial benchmark");
    synth_cmd->add_option("--n", synth.n, "Training examples")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Training set path");
    synth_cmd->add_option("--test-out", synth.test_out, "201x201 test grid path");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train and save a model");
    std::vector<std::string> names(kAlgorithmNames.begin(), kAlgorithmNames.end());
    train_cmd->add_option("--algo", train.algo, "Algorithm")->required()->check(CLI::IsMember(names));
    train_cmd->add_option("--data", train.data, "Training set")->required();
    train_cmd->add_option("--model-out", train.model_out, "Where to save the model");
    train_cmd->add_option("--trace-out", train.trace_out, "Per-iteration CSV for sa-iis/sa-bfgs");
    add_learner_flags(train_cmd, train.learner);

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model");
    eval_cmd->add_option("--model", eval.model, "Model file")->required();
    eval_cmd->add_option("--data", eval.data, "Test set")->required();
    eval_cmd->add_option("--report", eval.report, "CSV report path");

    CvArgs cvargs;
    auto* cv_cmd = app.add_subcommand("cv", "Nested cross validation over several algorithms");
    cv_cmd->add_option("--data", cvargs.data, "Dataset")->required();
    cv_cmd->add_option("--algos", cvargs.algos, "Algorithms to compare")
        ->delimiter(',')
        ->check(CLI::IsMember(names))
        ->capture_default_str();
    cv_cmd->add_option("--folds", cvargs.folds, "Fold count")->capture_default_str()->check(CLI::Range(2, 1000));
    cv_cmd->add_option("--report", cvargs.report, "CSV report path");
    cv_cmd->add_option("--text-out", cvargs.text_out, "Text table path");
    add_learner_flags(cv_cmd, cvargs.learner);

    RenderArgs render;
    auto* render_cmd = app.add_subcommand("render", "Render predictions over the test grid as PPM");
    render_cmd->add_option("--model", render.model, "Model file");
    render_cmd->add_flag("--ground-truth", render.ground_truth, "Render the true distributions");
    render_cmd->add_option("--out", render.out, "Output image (PPM)")->required();
    render_cmd->add_flag("--stretch", render.stretch, "Per-channel min-max stretch");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*train_cmd) return cmd_train(train);
        if (*eval_cmd) return cmd_eval(eval);
        if (*cv_cmd) return cmd_cv(cvargs);
        if (*render_cmd) return cmd_render(render);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ldl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
