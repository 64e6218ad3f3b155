#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ldl/core.hpp"

namespace ldl::maxent {

/// Conditional maximum-entropy model p(y_j|x) ∝ exp(theta_j · g(x)) with the
/// feature map g(x) = (1, x_1, ..., x_q). theta is c × (q+1).
class MaxEntModel : public Predictor {
public:
    explicit MaxEntModel(Eigen::MatrixXd theta, std::string trainer = "maxent");

    static MaxEntModel zeros(std::size_t num_features, std::size_t num_labels);

    const Eigen::MatrixXd& theta() const noexcept { return theta_; }

    LabelDistribution predict(std::span<const double> x) const override;
    std::string algorithm() const override { return trainer_; }
    std::size_t num_features() const override { return static_cast<std::size_t>(theta_.cols()) - 1; }
    std::size_t num_labels() const override { return static_cast<std::size_t>(theta_.rows()); }
    std::map<std::string, std::string> hyperparameters() const override { return hyper_; }

    void set_hyperparameters(std::map<std::string, std::string> h) { hyper_ = std::move(h); }

private:
    Eigen::MatrixXd theta_;
    std::string trainer_;
    std::map<std::string, std::string> hyper_;
};

/// g(x) = (1, x).
Eigen::VectorXd feature_map(std::span<const double> x);

/// T(theta): sum_ij d_ij theta_j·g(x_i) - sum_i log sum_j exp(theta_j·g(x_i)).
double objective_T(const MaxEntModel& model, const LdlDataset& dataset);

/// Gradient of T' = -T with respect to theta (same shape as theta).
Eigen::MatrixXd gradient_T_prime(const MaxEntModel& model, const LdlDataset& dataset);

struct TraceRecord {
    int iteration = 0;
    double objective = 0.0;  ///< T(theta) after this iteration
    double grad_norm = 0.0;  ///< ||grad T'||
    double alpha = 0.0;      ///< accepted step length (1 for IIS)
    double millis = 0.0;     ///< wall time since training started
};

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);

enum class TrainStatus {
    Converged,
    MaxItersReached,
    /// BFGS only: the line search failed with a predicted decrease below the
    /// rounding level of T', so no further step can be certified.
    PrecisionLimit,
};

struct TrainResult {
    MaxEntModel model;
    std::vector<TraceRecord> trace;
    TrainStatus status = TrainStatus::Converged;
};

/// Carries the partial trace of an aborted run.
class TrainingError : public Error {
public:
    TrainingError(const Error& cause, std::vector<TraceRecord> trace)
        : Error(cause), trace_(std::move(trace)) {}
    const std::vector<TraceRecord>& trace() const noexcept { return trace_; }

private:
    std::vector<TraceRecord> trace_;
};

// ---------------------------------------------------------------------------
// Improved iterative scaling

struct IisStep {
    int iteration = 0;
    Eigen::MatrixXd theta_before;
    Eigen::MatrixXd delta;
    double objective_before = 0.0;
    double objective_after = 0.0;
};

struct IisConfig {
    double epsilon = 1e-6;  ///< stop once T improves by less than this
    int max_outer_iters = 500;
    int newton_iters = 20;
    double newton_tol = 1e-10;
    double delta_max = 30.0;
    std::function<void(const IisStep&)> observer;
};

/// Per-coordinate solution of the decoupled IIS update equations, clamped to
/// [-delta_max, delta_max]. Throws NoSolution (naming the coordinate) when the
/// residual is not finite.
Eigen::MatrixXd iis_delta(const MaxEntModel& model, const LdlDataset& dataset,
                          const IisConfig& config = {});

/// Residual of the update equation for coordinate (label, k) at delta.
double iis_residual(const MaxEntModel& model, const LdlDataset& dataset, std::size_t label,
                    std::size_t k, double delta);

/// Jensen lower bound A(delta|theta) on T(theta+delta) - T(theta).
double iis_lower_bound(const MaxEntModel& model, const LdlDataset& dataset,
                       const Eigen::MatrixXd& delta);

TrainResult train_iis(const LdlDataset& dataset, const IisConfig& config = {});

// ---------------------------------------------------------------------------
// Quasi-Newton

struct LineSearchConfig {
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_steps = 50;
    double alpha_init = 1.0;
    double alpha_max = 1e10;
};

/// f(x) with gradient written to *grad when grad is non-null.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct LineSearchResult {
    double alpha = 0.0;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int evaluations = 0;
};

/// Bracketing + zoom search for a step satisfying the strong Wolfe conditions
/// along p from x. Throws NotDescentDirection or LineSearchFailed.
LineSearchResult line_search(const ObjectiveFn& f, const Eigen::VectorXd& x, double f0,
                             const Eigen::VectorXd& g0, const Eigen::VectorXd& p,
                             const LineSearchConfig& config = {});

struct BfgsStep {
    int iteration = 0;
    Eigen::VectorXd theta_before;  ///< flattened, column-major c × (q+1)
    Eigen::VectorXd direction;
    double alpha = 0.0;
    double value_before = 0.0;  ///< T'
    double value_after = 0.0;
    Eigen::VectorXd grad_before;
    Eigen::VectorXd grad_after;
    Eigen::MatrixXd b_before;
    Eigen::MatrixXd b_after;
    bool update_applied = false;
    bool reset = false;  ///< B was reset to identity before this step
};

/// Relative size of |grad . p| under which a failed line search is treated
/// as having reached the precision floor of T'.
inline constexpr double kPrecisionFloor = 1e-12;

struct BfgsConfig {
    double epsilon = 1e-6;  ///< stop once ||grad T'|| drops below this
    int max_iters = 300;
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_line_search_steps = 50;
    /// Optional ridge on the non-bias weights; 0 keeps the objective literal.
    double l2 = 0.0;
    std::function<void(const BfgsStep&)> observer;
};

/// Line search on T' for the maxent objective along `direction` (shape of theta).
LineSearchResult line_search(const MaxEntModel& model, const LdlDataset& dataset,
                             const Eigen::MatrixXd& direction, const BfgsConfig& config = {});

/// Inverse-Hessian update B' = (I - rho s u^T) B (I - rho u s^T) + rho s s^T.
/// Throws CurvatureViolation when s^T u <= 1e-12 ||s|| ||u||.
Eigen::MatrixXd bfgs_update(const Eigen::MatrixXd& b, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& u);

TrainResult train_bfgs(const LdlDataset& dataset, const BfgsConfig& config = {});

}  // namespace ldl::maxent
