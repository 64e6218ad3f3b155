#include "ldl/neural.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>

#include "ldl/random.hpp"

namespace ldl::neural {
namespace {

struct Activations {
    Eigen::VectorXd input;   // (1, x)
    Eigen::VectorXd hidden;  // (1, sigmoid(...))
    Eigen::VectorXd output;  // softmax
};

Activations run(const BpNetwork& net, std::span<const double> x) {
    if (x.size() != net.num_features()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(net.num_features()) +
                                                      " features, got " + std::to_string(x.size()));
    }
    Activations a;
    a.input.resize(static_cast<Eigen::Index>(x.size()) + 1);
    a.input(0) = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) a.input(static_cast<Eigen::Index>(k) + 1) = x[k];

    const Eigen::VectorXd pre = net.w_in().transpose() * a.input;
    a.hidden.resize(pre.size() + 1);
    a.hidden(0) = 1.0;
    a.hidden.tail(pre.size()) = (1.0 + (-pre.array()).exp()).inverse();

    const Eigen::VectorXd eta = net.w_out().transpose() * a.hidden;
    const std::vector<double> z = softmax(std::span<const double>(eta.data(), eta.size()));
    a.output = Eigen::Map<const Eigen::VectorXd>(z.data(), eta.size());
    return a;
}

}  // namespace

BpNetwork::BpNetwork(Eigen::MatrixXd w_in, Eigen::MatrixXd w_out)
    : w_in_(std::move(w_in)), w_out_(std::move(w_out)) {
    if (w_in_.rows() < 1 || w_in_.cols() < 1 || w_out_.rows() != w_in_.cols() + 1 ||
        w_out_.cols() < 2) {
        throw Error(ErrorCode::DimensionMismatch, "inconsistent network weight shapes");
    }
    if (!w_in_.allFinite() || !w_out_.allFinite()) {
        throw Error(ErrorCode::NonFiniteInput, "network weights are not finite");
    }
}

BpNetwork BpNetwork::random(std::size_t num_features, std::size_t num_labels, std::size_t hidden,
                            double scale, std::uint64_t seed) {
    if (hidden < 1) throw Error(ErrorCode::InvalidArgument, "need at least one hidden unit");
    Rng rng(seed);
    const auto q1 = static_cast<Eigen::Index>(num_features) + 1;
    const auto h = static_cast<Eigen::Index>(hidden);
    const auto c = static_cast<Eigen::Index>(num_labels);
    Eigen::MatrixXd w_in(q1, h), w_out(h + 1, c);
    for (Eigen::Index col = 0; col < h; ++col) {
        for (Eigen::Index row = 0; row < q1; ++row) w_in(row, col) = rng.uniform(-scale, scale);
    }
    for (Eigen::Index col = 0; col < c; ++col) {
        for (Eigen::Index row = 0; row < h + 1; ++row) w_out(row, col) = rng.uniform(-scale, scale);
    }
    return BpNetwork(std::move(w_in), std::move(w_out));
}

Eigen::VectorXd BpNetwork::logits(std::span<const double> x) const {
    const Activations a = run(*this, x);
    return w_out_.transpose() * a.hidden;
}

LabelDistribution BpNetwork::predict(std::span<const double> x) const {
    check_finite(x);
    const Activations a = run(*this, x);
    return validate_distribution(std::span<const double>(a.output.data(), a.output.size()));
}

LabelDistribution forward(const BpNetwork& net, std::span<const double> x) { return net.predict(x); }

Gradient backprop(const BpNetwork& net, std::span<const double> x, std::span<const double> d) {
    if (d.size() != net.num_labels()) {
        throw Error(ErrorCode::DimensionMismatch, "target has wrong number of labels");
    }
    const Activations a = run(net, x);
    const Eigen::Map<const Eigen::VectorXd> target(d.data(), static_cast<Eigen::Index>(d.size()));
    const Eigen::VectorXd r = a.output - target;

    Gradient g;
    g.loss = 0.5 * r.squaredNorm();
    // Through the softmax Jacobian dz_j/deta_k = z_j (delta_jk - z_k).
    const Eigen::VectorXd d_eta = a.output.cwiseProduct(r - Eigen::VectorXd::Constant(r.size(), r.dot(a.output)));
    g.w_out = a.hidden * d_eta.transpose();

    const Eigen::Index h = static_cast<Eigen::Index>(net.hidden_units());
    const Eigen::VectorXd sig = a.hidden.tail(h);
    const Eigen::VectorXd d_hidden = net.w_out().bottomRows(h) * d_eta;
    const Eigen::VectorXd d_pre = d_hidden.cwiseProduct(sig.cwiseProduct((1.0 - sig.array()).matrix()));
    g.w_in = a.input * d_pre.transpose();
    return g;
}

double sum_squared_error(const BpNetwork& net, const LdlDataset& dataset) {
    double total = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Activations a = run(net, dataset.features(i));
        const auto& d = dataset.distribution(i);
        for (std::size_t j = 0; j < d.size(); ++j) {
            const double r = a.output(static_cast<Eigen::Index>(j)) - d[j];
            total += 0.5 * r * r;
        }
    }
    return total;
}

TrainResult train(const LdlDataset& dataset, const BpConfig& config) {
    dataset.require_nonempty();
    if (config.hidden_units < 1 || !(config.learning_rate > 0.0) || config.epochs < 1 ||
        !(config.init_scale > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "invalid BP configuration");
    }
    BpNetwork net = BpNetwork::random(dataset.num_features(), dataset.num_labels(),
                                      config.hidden_units, config.init_scale, config.seed);
    Rng order_rng(mix_seed(config.seed, 1));
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> loss{sum_squared_error(net, dataset)};
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        order_rng.shuffle(order.begin(), order.end());
        for (std::size_t i : order) {
            const Gradient g = backprop(net, dataset.features(i), dataset.distribution(i).span());
            net.w_in() -= config.learning_rate * g.w_in;
            net.w_out() -= config.learning_rate * g.w_out;
        }
        const double l = sum_squared_error(net, dataset);
        if (!std::isfinite(l)) {
            throw Error(ErrorCode::Diverged, "loss became non-finite at epoch " + std::to_string(epoch));
        }
        loss.push_back(l);
    }
    net.set_hyperparameters({{"hidden_units", std::to_string(config.hidden_units)},
                             {"learning_rate", std::to_string(config.learning_rate)},
                             {"epochs", std::to_string(config.epochs)},
                             {"seed", std::to_string(config.seed)}});
    return {std::move(net), std::move(loss)};
}

void write_loss_csv(std::ostream& out, std::span<const double> loss) {
    out << "epoch,sse\n" << std::setprecision(17);
    for (std::size_t e = 0; e < loss.size(); ++e) out << e << ',' << loss[e] << '\n';
}

}  // namespace ldl::neural
