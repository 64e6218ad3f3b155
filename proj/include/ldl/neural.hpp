#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ldl/core.hpp"

namespace ldl::neural {

struct BpConfig {
    std::size_t hidden_units = 64;
    double learning_rate = 0.01;
    int epochs = 500;
    std::uint64_t seed = 1;
    double init_scale = 0.1;
};

/// Three-layer network: sigmoid hidden layer, softmax output.
/// w_in is (q+1) × h and w_out is (h+1) × c; row 0 of each holds the bias.
class BpNetwork : public Predictor {
public:
    BpNetwork(Eigen::MatrixXd w_in, Eigen::MatrixXd w_out);

    /// Weights uniform on (-scale, scale).
    static BpNetwork random(std::size_t num_features, std::size_t num_labels, std::size_t hidden,
                            double scale, std::uint64_t seed);

    const Eigen::MatrixXd& w_in() const noexcept { return w_in_; }
    const Eigen::MatrixXd& w_out() const noexcept { return w_out_; }
    Eigen::MatrixXd& w_in() noexcept { return w_in_; }
    Eigen::MatrixXd& w_out() noexcept { return w_out_; }
    std::size_t hidden_units() const noexcept { return static_cast<std::size_t>(w_in_.cols()); }

    /// Output-layer net inputs eta for x.
    Eigen::VectorXd logits(std::span<const double> x) const;

    LabelDistribution predict(std::span<const double> x) const override;
    std::string algorithm() const override { return "aa-bp"; }
    std::size_t num_features() const override { return static_cast<std::size_t>(w_in_.rows()) - 1; }
    std::size_t num_labels() const override { return static_cast<std::size_t>(w_out_.cols()); }
    std::map<std::string, std::string> hyperparameters() const override { return hyper_; }
    void set_hyperparameters(std::map<std::string, std::string> h) { hyper_ = std::move(h); }

private:
    Eigen::MatrixXd w_in_;
    Eigen::MatrixXd w_out_;
    std::map<std::string, std::string> hyper_;
};

LabelDistribution forward(const BpNetwork& net, std::span<const double> x);

/// Per-example squared-error loss 1/2 ||z - d||^2 and its weight gradients.
struct Gradient {
    double loss = 0.0;
    Eigen::MatrixXd w_in;
    Eigen::MatrixXd w_out;
};

Gradient backprop(const BpNetwork& net, std::span<const double> x, std::span<const double> d);

/// 1/2 sum_i ||z(x_i) - d_i||^2 over the dataset.
double sum_squared_error(const BpNetwork& net, const LdlDataset& dataset);

struct TrainResult {
    BpNetwork network;
    /// loss[0] is before training, loss[e] after epoch e.
    std::vector<double> loss;
};

/// Per-example gradient descent, examples visited in a seeded shuffled order
/// each epoch. Throws Diverged if the loss stops being finite.
TrainResult train(const LdlDataset& dataset, const BpConfig& config = {});

void write_loss_csv(std::ostream& out, std::span<const double> loss);

}  // namespace ldl::neural
