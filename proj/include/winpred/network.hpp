#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace winpred {

// Feed-forward classifier: ReLU hidden layers, 2-way softmax output.
// Class 0 = window closed, class 1 = window open. Weight matrices are stored
// fan_in x fan_out, so a batch of B inputs (B x D) flows left to right:
// Z = A * W + b (row-wise bias).
struct Mlp {
  std::vector<std::size_t> widths;       // [input_dim, hidden..., 2]
  std::vector<Eigen::MatrixXd> weights;  // per layer, widths[n] x widths[n+1]
  std::vector<Eigen::VectorXd> biases;   // per layer, widths[n+1]
  std::uint64_t init_seed = 0;

  std::size_t n_layers() const { return weights.size(); }
  std::size_t input_dim() const { return widths.empty() ? 0 : widths.front(); }
  std::size_t weight_count() const;
  std::size_t parameter_count() const;  // weights + biases
  void validate() const;                // throws std::invalid_argument
};

// Per-layer pre- and post-activation values of one forward pass, consumed by
// backward().
struct ActivationCache {
  Eigen::MatrixXd input;              // batch x input_dim
  std::vector<Eigen::MatrixXd> pre;   // Z per layer
  std::vector<Eigen::MatrixXd> post;  // ReLU(Z), softmax for the last layer
};

// Gradients shaped exactly like the Mlp parameters.
struct GradientSet {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;
};

// He-initialized network: weights ~ N(0, 2/fan_in), biases zero,
// deterministic in the seed. Throws on an invalid width chain.
Mlp init_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed);

// Class probabilities for a batch (rows sum to 1; softmax uses
// max-subtraction). Pass a cache to keep the activations for backward().
// Throws on non-finite input or a dimension mismatch.
Eigen::MatrixXd forward(const Mlp& mlp, const Eigen::MatrixXd& X,
                        ActivationCache* cache = nullptr);

// Mean cross-entropy over the batch (probabilities clamped at 1e-12 before
// the log) plus l1_lambda * sum|W| over weights only. A positive_class_weight
// w != 1 turns the mean into a weighted mean where open-label samples count
// w times (weighted sum / total weight).
double loss(const Mlp& mlp, const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& y,
            double l1_lambda, double positive_class_weight = 1.0);

// Sum of |w| over all weight matrices (biases excluded).
double l1_weight_sum(const Mlp& mlp);

// Exact gradients of the mean cross-entropy (the smooth part of the loss;
// the L1 term is handled by prox_step). The cache must come from a forward
// pass of this mlp on the batch that produced y. positive_class_weight must
// match the value given to loss().
GradientSet backward(const Mlp& mlp, const ActivationCache& cache,
                     const std::vector<std::uint8_t>& y,
                     double positive_class_weight = 1.0);

// Proximal update: weights w <- soft_threshold(w - lr*g, lr*l1_lambda) with
// soft_threshold(v, tau) = sign(v) * max(|v| - tau, 0); biases take a plain
// gradient step. Weights landing inside the threshold become exactly 0.0.
Mlp prox_step(Mlp mlp, const GradientSet& grads, double lr, double l1_lambda);

// True ("open") iff the open-class probability is >= 0.5 (ties open).
bool predict(const Mlp& mlp, const std::vector<double>& x);

// Row-wise predictions for a batch, 0/1.
std::vector<std::uint8_t> predict_batch(const Mlp& mlp, const Eigen::MatrixXd& X);

}  // namespace winpred
