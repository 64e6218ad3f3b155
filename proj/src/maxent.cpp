#include "ldl/maxent.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>

namespace ldl::maxent {
namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Dense design matrix G (n × (q+1)) and target matrix D (n × c).
struct Problem {
    Eigen::MatrixXd g;
    Eigen::MatrixXd d;

    explicit Problem(const LdlDataset& dataset) {
        dataset.require_nonempty();
        const auto n = static_cast<Eigen::Index>(dataset.size());
        const auto q = static_cast<Eigen::Index>(dataset.num_features());
        const auto c = static_cast<Eigen::Index>(dataset.num_labels());
        g.resize(n, q + 1);
        d.resize(n, c);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto x = dataset.features(static_cast<std::size_t>(i));
            g(i, 0) = 1.0;
            for (Eigen::Index k = 0; k < q; ++k) g(i, k + 1) = x[static_cast<std::size_t>(k)];
            const auto& dist = dataset.distribution(static_cast<std::size_t>(i));
            for (Eigen::Index j = 0; j < c; ++j) d(i, j) = dist[static_cast<std::size_t>(j)];
        }
    }

    Eigen::Index labels() const { return d.cols(); }
    Eigen::Index dims() const { return g.cols(); }

    void check(const Eigen::MatrixXd& theta) const {
        if (theta.rows() != labels() || theta.cols() != dims()) {
            throw Error(ErrorCode::DimensionMismatch, "theta shape does not match dataset");
        }
    }

    // Per-row log partition of the logits.
    static Eigen::VectorXd log_partition(const Eigen::MatrixXd& logits) {
        Eigen::VectorXd lse(logits.rows());
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            const double m = logits.row(i).maxCoeff();
            lse(i) = m + std::log((logits.row(i).array() - m).exp().sum());
        }
        return lse;
    }

    double objective(const Eigen::MatrixXd& theta) const {
        const Eigen::MatrixXd logits = g * theta.transpose();
        return (d.array() * logits.array()).sum() - log_partition(logits).sum();
    }

    Eigen::MatrixXd probabilities(const Eigen::MatrixXd& theta) const {
        Eigen::MatrixXd logits = g * theta.transpose();
        const Eigen::VectorXd lse = log_partition(logits);
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            logits.row(i) = (logits.row(i).array() - lse(i)).exp();
        }
        return logits;
    }

    // Returns T' = -T and fills its gradient.
    double value_and_gradient(const Eigen::MatrixXd& theta, Eigen::MatrixXd& grad) const {
        Eigen::MatrixXd logits = g * theta.transpose();
        const Eigen::VectorXd lse = log_partition(logits);
        const double t = (d.array() * logits.array()).sum() - lse.sum();
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            logits.row(i) = (logits.row(i).array() - lse(i)).exp();
        }
        grad = (logits - d).transpose() * g;
        return -t;
    }
};

Eigen::Map<const Eigen::MatrixXd> as_matrix(const Eigen::VectorXd& v, Eigen::Index rows,
                                            Eigen::Index cols) {
    return {v.data(), rows, cols};
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

// Scalar update equation for one (label, feature) coordinate:
//   f(delta) = sum_i a_i exp(delta e_i) - b
// with a_i = p_ij g_ik, e_i = sign(g_ik) g#(x_i), b = sum_i d_ij g_ik.
// Every a_i e_i >= 0, so f is non-decreasing.
struct ScalarEquation {
    std::vector<double> a;
    std::vector<double> e;
    double b = 0.0;

    double value(double delta) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != 0.0) s += a[i] * std::exp(delta * e[i]);
        }
        return s - b;
    }

    double derivative(double delta) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != 0.0) s += a[i] * e[i] * std::exp(delta * e[i]);
        }
        return s;
    }

    bool trivial() const {
        for (double v : a) {
            if (v != 0.0) return false;
        }
        return b == 0.0;
    }
};

ScalarEquation make_equation(const Problem& problem, const Eigen::MatrixXd& probs,
                             const Eigen::VectorXd& g_sharp, Eigen::Index j, Eigen::Index k) {
    ScalarEquation eq;
    const Eigen::Index n = problem.g.rows();
    eq.a.resize(static_cast<std::size_t>(n));
    eq.e.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double gk = problem.g(i, k);
        const auto idx = static_cast<std::size_t>(i);
        eq.a[idx] = probs(i, j) * gk;
        eq.e[idx] = (gk > 0.0 ? 1.0 : (gk < 0.0 ? -1.0 : 0.0)) * g_sharp(i);
        eq.b += problem.d(i, j) * gk;
    }
    return eq;
}

// Root of a monotone scalar equation on [-limit, limit]; clamps at the
// boundary when no sign change exists inside.
double solve_scalar(const ScalarEquation& eq, const IisConfig& config, Eigen::Index j,
                    Eigen::Index k) {
    if (eq.trivial()) return 0.0;
    const double f0 = eq.value(0.0);
    if (!std::isfinite(f0)) {
        throw Error(ErrorCode::NoSolution, "residual not finite at coordinate (" +
                                               std::to_string(j) + "," + std::to_string(k) + ")");
    }
    if (std::abs(f0) <= config.newton_tol) return 0.0;

    double lo = 0.0, hi = 0.0;
    if (f0 < 0.0) {
        hi = config.delta_max;
        double fh = eq.value(hi);
        while (std::isnan(fh) && hi > 1e-8) {
            hi *= 0.5;
            fh = eq.value(hi);
        }
        if (fh <= 0.0) return hi;
    } else {
        lo = -config.delta_max;
        double fl = eq.value(lo);
        while (std::isnan(fl) && lo < -1e-8) {
            lo *= 0.5;
            fl = eq.value(lo);
        }
        if (fl >= 0.0) return lo;
    }

    // Safeguarded Newton, then bisection until the residual is small or the
    // bracket cannot shrink further.
    double x = 0.0;
    double fx = f0;
    for (int it = 0; it < config.newton_iters; ++it) {
        if (fx < 0.0) lo = x; else hi = x;
        const double df = eq.derivative(x);
        double next = (df > 0.0 && std::isfinite(df)) ? x - fx / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
        fx = eq.value(x);
        if (!std::isfinite(fx)) {
            throw Error(ErrorCode::NoSolution, "residual diverged at coordinate (" +
                                                   std::to_string(j) + "," + std::to_string(k) +
                                                   ")");
        }
        if (std::abs(fx) <= config.newton_tol) return x;
    }
    for (int it = 0; it < 200; ++it) {
        if (fx < 0.0) lo = x; else hi = x;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        x = mid;
        fx = eq.value(x);
        if (std::abs(fx) <= config.newton_tol) break;
    }
    return x;
}

Eigen::VectorXd g_sharp_of(const Problem& problem) {
    return problem.g.cwiseAbs().rowwise().sum();
}

Eigen::MatrixXd iis_delta_impl(const Problem& problem, const Eigen::MatrixXd& theta,
                               const IisConfig& config) {
    const Eigen::MatrixXd probs = problem.probabilities(theta);
    const Eigen::VectorXd g_sharp = g_sharp_of(problem);
    Eigen::MatrixXd delta(problem.labels(), problem.dims());
    for (Eigen::Index j = 0; j < problem.labels(); ++j) {
        for (Eigen::Index k = 0; k < problem.dims(); ++k) {
            delta(j, k) = solve_scalar(make_equation(problem, probs, g_sharp, j, k), config, j, k);
        }
    }
    return delta;
}

double grad_norm_of(const Problem& problem, const Eigen::MatrixXd& theta) {
    Eigen::MatrixXd grad;
    problem.value_and_gradient(theta, grad);
    return grad.norm();
}

double l2_penalty(const Eigen::MatrixXd& theta, double l2) {
    if (l2 == 0.0) return 0.0;
    return 0.5 * l2 * theta.rightCols(theta.cols() - 1).squaredNorm();
}

}  // namespace

MaxEntModel::MaxEntModel(Eigen::MatrixXd theta, std::string trainer)
    : theta_(std::move(theta)), trainer_(std::move(trainer)) {
    if (theta_.rows() < 2 || theta_.cols() < 1) {
        throw Error(ErrorCode::TooShort, "theta must have at least 2 label rows");
    }
    if (!theta_.allFinite()) throw Error(ErrorCode::NonFiniteInput, "theta has non-finite entries");
}

MaxEntModel MaxEntModel::zeros(std::size_t num_features, std::size_t num_labels) {
    return MaxEntModel(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_labels),
                                             static_cast<Eigen::Index>(num_features) + 1));
}

Eigen::VectorXd feature_map(std::span<const double> x) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(x.size()) + 1);
    g(0) = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) g(static_cast<Eigen::Index>(k) + 1) = x[k];
    return g;
}

LabelDistribution MaxEntModel::predict(std::span<const double> x) const {
    if (x.size() != num_features()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(num_features()) +
                                                      " features, got " + std::to_string(x.size()));
    }
    check_finite(x);
    const Eigen::VectorXd logits = theta_ * feature_map(x);
    return validate_distribution(softmax(std::span<const double>(logits.data(), logits.size())));
}

double objective_T(const MaxEntModel& model, const LdlDataset& dataset) {
    check_dimensions(model, dataset);
    return Problem(dataset).objective(model.theta());
}

Eigen::MatrixXd gradient_T_prime(const MaxEntModel& model, const LdlDataset& dataset) {
    check_dimensions(model, dataset);
    Eigen::MatrixXd grad;
    Problem(dataset).value_and_gradient(model.theta(), grad);
    return grad;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
    out << "iteration,T,grad_norm,alpha,millis\n" << std::setprecision(17);
    for (const auto& r : trace) {
        out << r.iteration << ',' << r.objective << ',' << r.grad_norm << ',' << r.alpha << ','
            << r.millis << '\n';
    }
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd iis_delta(const MaxEntModel& model, const LdlDataset& dataset,
                          const IisConfig& config) {
    check_dimensions(model, dataset);
    return iis_delta_impl(Problem(dataset), model.theta(), config);
}

double iis_residual(const MaxEntModel& model, const LdlDataset& dataset, std::size_t label,
                    std::size_t k, double delta) {
    check_dimensions(model, dataset);
    const Problem problem(dataset);
    const auto j = static_cast<Eigen::Index>(label);
    const auto kk = static_cast<Eigen::Index>(k);
    if (j >= problem.labels() || kk >= problem.dims()) {
        throw Error(ErrorCode::IndexOutOfRange, "coordinate out of range");
    }
    return make_equation(problem, problem.probabilities(model.theta()), g_sharp_of(problem), j, kk)
        .value(delta);
}

double iis_lower_bound(const MaxEntModel& model, const LdlDataset& dataset,
                       const Eigen::MatrixXd& delta) {
    check_dimensions(model, dataset);
    const Problem problem(dataset);
    problem.check(delta);
    const Eigen::MatrixXd probs = problem.probabilities(model.theta());
    const Eigen::VectorXd g_sharp = g_sharp_of(problem);
    const Eigen::Index n = problem.g.rows();

    // sum_ij d_ij sum_k delta_jk g_ik
    const double linear = (problem.d.array() * (problem.g * delta.transpose()).array()).sum();
    double bound = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < problem.labels(); ++j) {
            double inner = 0.0;
            for (Eigen::Index k = 0; k < problem.dims(); ++k) {
                const double gk = problem.g(i, k);
                if (gk == 0.0) continue;
                const double sign = gk > 0.0 ? 1.0 : -1.0;
                inner += std::abs(gk) / g_sharp(i) * std::exp(delta(j, k) * sign * g_sharp(i));
            }
            bound += probs(i, j) * inner;
        }
    }
    return linear + static_cast<double>(n) - bound;
}

TrainResult train_iis(const LdlDataset& dataset, const IisConfig& config) {
    if (config.epsilon <= 0.0 || config.max_outer_iters <= 0 || config.newton_iters <= 0 ||
        config.newton_tol <= 0.0 || config.delta_max <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "IIS configuration values must be positive");
    }
    const auto start = Clock::now();
    const Problem problem(dataset);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(problem.labels(), problem.dims());
    double t = problem.objective(theta);

    std::vector<TraceRecord> trace;
    trace.push_back({0, t, grad_norm_of(problem, theta), 0.0, millis_since(start)});

    TrainStatus status = TrainStatus::MaxItersReached;
    for (int l = 1; l <= config.max_outer_iters; ++l) {
        Eigen::MatrixXd delta;
        try {
            delta = iis_delta_impl(problem, theta, config);
        } catch (const Error& e) {
            throw TrainingError(e, std::move(trace));
        }
        Eigen::MatrixXd next = theta + delta;
        const double t_next = problem.objective(next);
        if (config.observer) config.observer({l, theta, delta, t, t_next});
        const double gain = t_next - t;
        theta = std::move(next);
        t = t_next;
        trace.push_back({l, t, grad_norm_of(problem, theta), 1.0, millis_since(start)});
        if (gain < config.epsilon) {
            status = TrainStatus::Converged;
            break;
        }
    }
    MaxEntModel model(std::move(theta), "sa-iis");
    model.set_hyperparameters({{"epsilon", std::to_string(config.epsilon)},
                               {"max_outer_iters", std::to_string(config.max_outer_iters)}});
    return {std::move(model), std::move(trace), status};
}

// ---------------------------------------------------------------------------

namespace {

struct Sample {
    double alpha;
    double value;
    double slope;
    Eigen::VectorXd grad;
};

double cubic_minimiser(const Sample& a, const Sample& b) {
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
    return b.alpha -
           (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
}

}  // namespace

LineSearchResult line_search(const ObjectiveFn& f, const Eigen::VectorXd& x, double f0,
                             const Eigen::VectorXd& g0, const Eigen::VectorXd& p,
                             const LineSearchConfig& config) {
    if (!(0.0 < config.c1 && config.c1 < config.c2 && config.c2 < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Wolfe constants must satisfy 0 < c1 < c2 < 1");
    }
    const double slope0 = g0.dot(p);
    if (!(slope0 < 0.0)) {
        throw Error(ErrorCode::NotDescentDirection, "directional derivative is not negative");
    }

    int evaluations = 0;
    auto sample = [&](double alpha) {
        Sample s{alpha, 0.0, 0.0, Eigen::VectorXd()};
        s.value = f(x + alpha * p, &s.grad);
        s.slope = std::isfinite(s.value) ? s.grad.dot(p) : std::numeric_limits<double>::infinity();
        if (!std::isfinite(s.value)) s.value = std::numeric_limits<double>::infinity();
        ++evaluations;
        return s;
    };
    auto sufficient = [&](const Sample& s) { return s.value <= f0 + config.c1 * s.alpha * slope0; };
    auto curvature = [&](const Sample& s) {
        return std::abs(s.slope) <= -config.c2 * slope0;
    };
    auto done = [&](Sample&& s) {
        return LineSearchResult{s.alpha, s.value, std::move(s.grad), evaluations};
    };

    // Zoom between lo (satisfies sufficient decrease, lowest value so far)
    // and hi.
    auto zoom = [&](Sample lo, Sample hi) -> LineSearchResult {
        while (evaluations < config.max_steps) {
            const double width = hi.alpha - lo.alpha;
            double trial = std::isfinite(hi.value) ? cubic_minimiser(lo, hi)
                                                   : std::numeric_limits<double>::quiet_NaN();
            const double a = std::min(lo.alpha, hi.alpha) + 0.1 * std::abs(width);
            const double b = std::max(lo.alpha, hi.alpha) - 0.1 * std::abs(width);
            if (!std::isfinite(trial) || trial < a || trial > b) trial = lo.alpha + 0.5 * width;
            if (trial == lo.alpha || trial == hi.alpha) break;
            Sample s = sample(trial);
            if (!sufficient(s) || s.value >= lo.value) {
                hi = std::move(s);
            } else {
                if (curvature(s)) return done(std::move(s));
                if (s.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(s);
            }
        }
        throw Error(ErrorCode::LineSearchFailed, "zoom phase found no strong Wolfe point");
    };

    Sample prev{0.0, f0, slope0, g0};
    double alpha = std::min(config.alpha_init, config.alpha_max);
    for (int i = 0; evaluations < config.max_steps; ++i) {
        Sample s = sample(alpha);
        if (!sufficient(s) || (i > 0 && s.value >= prev.value)) return zoom(prev, s);
        if (curvature(s)) return done(std::move(s));
        if (s.slope >= 0.0) return zoom(s, prev);
        if (alpha >= config.alpha_max) break;
        prev = std::move(s);
        alpha = std::min(2.0 * alpha, config.alpha_max);
    }
    throw Error(ErrorCode::LineSearchFailed, "no strong Wolfe point within step budget");
}

LineSearchResult line_search(const MaxEntModel& model, const LdlDataset& dataset,
                             const Eigen::MatrixXd& direction, const BfgsConfig& config) {
    check_dimensions(model, dataset);
    const Problem problem(dataset);
    problem.check(direction);
    const Eigen::Index rows = problem.labels(), cols = problem.dims();
    ObjectiveFn fn = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
        const Eigen::MatrixXd theta = as_matrix(v, rows, cols);
        Eigen::MatrixXd gm;
        double value = problem.value_and_gradient(theta, gm);
        value += l2_penalty(theta, config.l2);
        if (config.l2 != 0.0) gm.rightCols(cols - 1) += config.l2 * theta.rightCols(cols - 1);
        if (grad) *grad = flatten(gm);
        return value;
    };
    const Eigen::VectorXd x = flatten(model.theta());
    Eigen::VectorXd g0;
    const double f0 = fn(x, &g0);
    return line_search(fn, x, f0, g0, flatten(direction),
                       {config.c1, config.c2, config.max_line_search_steps, 1.0, 1e10});
}

Eigen::MatrixXd bfgs_update(const Eigen::MatrixXd& b, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& u) {
    if (b.rows() != b.cols() || b.rows() != s.size() || s.size() != u.size()) {
        throw Error(ErrorCode::DimensionMismatch, "BFGS update operands have inconsistent sizes");
    }
    const double su = s.dot(u);
    if (!(su > 1e-12 * s.norm() * u.norm())) {
        throw Error(ErrorCode::CurvatureViolation, "s^T u is not positive");
    }
    const double rho = 1.0 / su;
    // Expanded product form; B u is shared between the two rank-one terms so
    // the result stays exactly symmetric when B is.
    const Eigen::VectorXd bu = b * u;
    const double ubu = u.dot(bu);
    Eigen::MatrixXd next = b;
    next.noalias() -= rho * (s * bu.transpose() + bu * s.transpose());
    next.noalias() += (rho * rho * ubu + rho) * (s * s.transpose());
    return next;
}

TrainResult train_bfgs(const LdlDataset& dataset, const BfgsConfig& config) {
    if (!(0.0 < config.c1 && config.c1 < config.c2 && config.c2 < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Wolfe constants must satisfy 0 < c1 < c2 < 1");
    }
    if (config.epsilon <= 0.0 || config.max_iters <= 0 || config.max_line_search_steps <= 0 ||
        config.l2 < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "invalid BFGS configuration");
    }
    const auto start = Clock::now();
    const Problem problem(dataset);
    const Eigen::Index rows = problem.labels(), cols = problem.dims();
    const Eigen::Index dim = rows * cols;

    ObjectiveFn fn = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
        const Eigen::MatrixXd theta = as_matrix(v, rows, cols);
        Eigen::MatrixXd gm;
        double value = problem.value_and_gradient(theta, gm);
        value += l2_penalty(theta, config.l2);
        if (config.l2 != 0.0) gm.rightCols(cols - 1) += config.l2 * theta.rightCols(cols - 1);
        if (grad) *grad = flatten(gm);
        return value;
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd grad;
    double value = fn(theta, &grad);

    std::vector<TraceRecord> trace;
    trace.push_back({0, -value, grad.norm(), 0.0, millis_since(start)});

    TrainStatus status = TrainStatus::MaxItersReached;
    bool fresh = true;  // B is the identity
    for (int l = 1; l <= config.max_iters; ++l) {
        if (grad.norm() < config.epsilon) {
            status = TrainStatus::Converged;
            break;
        }
        LineSearchResult step;
        Eigen::VectorXd p;
        bool reset = false;
        bool stalled = false;
        for (int attempt = 0;; ++attempt) {
            p = -(b * grad);
            // With B = I the natural unit step can be far too long.
            const double alpha0 = fresh ? std::min(1.0, 1.0 / grad.norm()) : 1.0;
            try {
                step = line_search(fn, theta, value, grad, p,
                                   {config.c1, config.c2, config.max_line_search_steps, alpha0,
                                    1e10});
                break;
            } catch (const Error& e) {
                if (attempt > 0 || fresh) {
                    // Near the optimum the whole available decrease can be a
                    // few ulps of T'; that is the end of the road, not a failure.
                    if (e.code() == ErrorCode::LineSearchFailed &&
                        -grad.dot(p) <= kPrecisionFloor * std::max(1.0, std::abs(value))) {
                        stalled = true;
                        break;
                    }
                    throw TrainingError(e, std::move(trace));
                }
                b = Eigen::MatrixXd::Identity(dim, dim);
                fresh = true;
                reset = true;
            }
        }
        if (stalled) {
            status = TrainStatus::PrecisionLimit;
            break;
        }

        Eigen::VectorXd s = step.alpha * p;
        Eigen::VectorXd u = step.gradient - grad;
        BfgsStep info;
        const bool observe = static_cast<bool>(config.observer);
        if (observe) {
            info.iteration = l;
            info.theta_before = theta;
            info.direction = p;
            info.alpha = step.alpha;
            info.value_before = value;
            info.value_after = step.value;
            info.grad_before = grad;
            info.grad_after = step.gradient;
            info.b_before = b;
            info.reset = reset;
        }
        try {
            b = bfgs_update(b, s, u);
            fresh = false;
            info.update_applied = true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CurvatureViolation) throw;
        }
        if (observe) {
            info.b_after = b;
            config.observer(info);
        }

        theta += s;
        value = step.value;
        grad = std::move(step.gradient);
        trace.push_back({l, -value, grad.norm(), step.alpha, millis_since(start)});
    }
    if (status == TrainStatus::MaxItersReached && grad.norm() < config.epsilon) {
        status = TrainStatus::Converged;
    }

    MaxEntModel model(Eigen::MatrixXd(as_matrix(theta, rows, cols)), "sa-bfgs");
    model.set_hyperparameters({{"epsilon", std::to_string(config.epsilon)},
                               {"max_iters", std::to_string(config.max_iters)},
                               {"l2", std::to_string(config.l2)}});
    return {std::move(model), std::move(trace), status};
}

}  // namespace ldl::maxent
