#include "winpred/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "winpred/rng.hpp"

namespace winpred {

namespace {

void check_batch(const Mlp& mlp, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != mlp.input_dim()) {
    throw std::invalid_argument("input dimension " + std::to_string(X.cols()) +
                                " does not match network input " +
                                std::to_string(mlp.input_dim()));
  }
  if (X.rows() == 0) throw std::invalid_argument("empty batch");
  if (!X.allFinite()) throw std::invalid_argument("non-finite value in network input");
}

}  // namespace

std::size_t Mlp::weight_count() const {
  std::size_t count = 0;
  for (const auto& w : weights) count += static_cast<std::size_t>(w.size());
  return count;
}

std::size_t Mlp::parameter_count() const {
  std::size_t count = weight_count();
  for (const auto& b : biases) count += static_cast<std::size_t>(b.size());
  return count;
}

void Mlp::validate() const {
  if (widths.size() < 3) {
    throw std::invalid_argument("network needs at least one hidden layer");
  }
  if (widths.back() != 2) throw std::invalid_argument("output layer must have 2 units");
  for (std::size_t w : widths) {
    if (w < 1) throw std::invalid_argument("layer width must be >= 1");
  }
  if (weights.size() != widths.size() - 1 || biases.size() != widths.size() - 1) {
    throw std::invalid_argument("parameter count does not match width chain");
  }
  for (std::size_t n = 0; n + 1 < widths.size(); ++n) {
    if (static_cast<std::size_t>(weights[n].rows()) != widths[n] ||
        static_cast<std::size_t>(weights[n].cols()) != widths[n + 1] ||
        static_cast<std::size_t>(biases[n].size()) != widths[n + 1]) {
      throw std::invalid_argument("layer " + std::to_string(n) + " has mismatched shapes");
    }
    if (!weights[n].allFinite() || !biases[n].allFinite()) {
      throw std::invalid_argument("layer " + std::to_string(n) + " has non-finite parameters");
    }
  }
}

Mlp init_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed) {
  Mlp mlp;
  mlp.widths = widths;
  mlp.init_seed = seed;
  if (widths.size() < 3) {
    throw std::invalid_argument("network needs at least one hidden layer");
  }
  if (widths.back() != 2) throw std::invalid_argument("output layer must have 2 units");
  for (std::size_t w : widths) {
    if (w < 1) throw std::invalid_argument("layer width must be >= 1");
  }
  Rng rng(seed);
  for (std::size_t n = 0; n + 1 < widths.size(); ++n) {
    const auto fan_in = static_cast<Eigen::Index>(widths[n]);
    const auto fan_out = static_cast<Eigen::Index>(widths[n + 1]);
    Eigen::MatrixXd w(fan_in, fan_out);
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    // fill in storage order (column-major) so the draw sequence is pinned
    for (Eigen::Index j = 0; j < fan_out; ++j) {
      for (Eigen::Index i = 0; i < fan_in; ++i) {
        w(i, j) = rng.next_gaussian(0.0, stddev);
      }
    }
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return mlp;
}

Eigen::MatrixXd forward(const Mlp& mlp, const Eigen::MatrixXd& X, ActivationCache* cache) {
  check_batch(mlp, X);
  const std::size_t L = mlp.n_layers();
  if (cache) {
    cache->input = X;
    cache->pre.assign(L, {});
    cache->post.assign(L, {});
  }
  Eigen::MatrixXd a = X;
  for (std::size_t n = 0; n < L; ++n) {
    Eigen::MatrixXd z = a * mlp.weights[n];
    z.rowwise() += mlp.biases[n].transpose();
    if (n + 1 < L) {
      a = z.cwiseMax(0.0);  // ReLU; derivative at exactly 0 is taken as 0
    } else {
      // softmax with per-row max subtraction for overflow safety
      const Eigen::VectorXd row_max = z.rowwise().maxCoeff();
      a = (z.colwise() - row_max).array().exp().matrix();
      const Eigen::VectorXd row_sum = a.rowwise().sum();
      a.array().colwise() /= row_sum.array();
    }
    if (cache) {
      cache->pre[n] = std::move(z);
      cache->post[n] = a;
    }
  }
  return a;
}

double l1_weight_sum(const Mlp& mlp) {
  double sum = 0.0;
  for (const auto& w : mlp.weights) sum += w.cwiseAbs().sum();
  return sum;
}

double loss(const Mlp& mlp, const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& y,
            double l1_lambda, double positive_class_weight) {
  if (y.size() != static_cast<std::size_t>(X.rows())) {
    throw std::invalid_argument("label count does not match batch size");
  }
  if (!(positive_class_weight > 0.0)) {
    throw std::invalid_argument("positive class weight must be > 0");
  }
  const Eigen::MatrixXd probs = forward(mlp, X);
  double ce = 0.0;
  double total_weight = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const bool open = y[static_cast<std::size_t>(r)] != 0;
    const double w = open ? positive_class_weight : 1.0;
    const double p = probs(r, open ? 1 : 0);
    ce -= w * std::log(std::max(p, 1e-12));
    total_weight += w;
  }
  ce /= total_weight;
  return ce + l1_lambda * l1_weight_sum(mlp);
}

GradientSet backward(const Mlp& mlp, const ActivationCache& cache,
                     const std::vector<std::uint8_t>& y,
                     double positive_class_weight) {
  if (!(positive_class_weight > 0.0)) {
    throw std::invalid_argument("positive class weight must be > 0");
  }
  const std::size_t L = mlp.n_layers();
  if (cache.pre.size() != L || cache.post.size() != L) {
    throw std::invalid_argument("activation cache does not match network depth");
  }
  const Eigen::Index B = cache.input.rows();
  if (y.size() != static_cast<std::size_t>(B)) {
    throw std::invalid_argument("label count does not match cached batch size");
  }
  if (cache.post.back().cols() != 2) {
    throw std::invalid_argument("activation cache output width must be 2");
  }
  for (std::size_t n = 0; n < L; ++n) {
    if (static_cast<std::size_t>(cache.pre[n].cols()) != mlp.widths[n + 1] ||
        cache.pre[n].rows() != B) {
      throw std::invalid_argument("activation cache layer " + std::to_string(n) +
                                  " has mismatched shape");
    }
  }

  GradientSet grads;
  grads.d_weights.resize(L);
  grads.d_biases.resize(L);

  // dL/dZ for the softmax + cross-entropy head: (P - onehot(y)) / B, or the
  // sample-weighted analogue w_r * (P - onehot(y)) / sum(w) when open-label
  // samples are upweighted
  Eigen::MatrixXd dz = cache.post.back();
  for (Eigen::Index r = 0; r < B; ++r) {
    dz(r, y[static_cast<std::size_t>(r)] ? 1 : 0) -= 1.0;
  }
  if (positive_class_weight == 1.0) {
    dz /= static_cast<double>(B);
  } else {
    double total_weight = 0.0;
    for (Eigen::Index r = 0; r < B; ++r) {
      total_weight += y[static_cast<std::size_t>(r)] ? positive_class_weight : 1.0;
    }
    for (Eigen::Index r = 0; r < B; ++r) {
      const double w = y[static_cast<std::size_t>(r)] ? positive_class_weight : 1.0;
      dz.row(r) *= w / total_weight;
    }
  }

  for (std::size_t n = L; n-- > 0;) {
    const Eigen::MatrixXd& a_prev = n == 0 ? cache.input : cache.post[n - 1];
    grads.d_weights[n].noalias() = a_prev.transpose() * dz;
    grads.d_biases[n] = dz.colwise().sum().transpose();
    if (n > 0) {
      Eigen::MatrixXd da;
      da.noalias() = dz * mlp.weights[n].transpose();
      // ReLU gate: gradient flows only where the pre-activation was positive
      dz = ((cache.pre[n - 1].array() > 0.0).cast<double>() * da.array()).matrix();
    }
  }
  return grads;
}

Mlp prox_step(Mlp mlp, const GradientSet& grads, double lr, double l1_lambda) {
  if (grads.d_weights.size() != mlp.n_layers() || grads.d_biases.size() != mlp.n_layers()) {
    throw std::invalid_argument("gradient set does not match network depth");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (l1_lambda < 0.0) throw std::invalid_argument("l1 penalty must be >= 0");
  const double tau = lr * l1_lambda;
  for (std::size_t n = 0; n < mlp.n_layers(); ++n) {
    if (grads.d_weights[n].rows() != mlp.weights[n].rows() ||
        grads.d_weights[n].cols() != mlp.weights[n].cols() ||
        grads.d_biases[n].size() != mlp.biases[n].size()) {
      throw std::invalid_argument("gradient layer " + std::to_string(n) +
                                  " has mismatched shape");
    }
    if (l1_lambda == 0.0) {
      mlp.weights[n] -= lr * grads.d_weights[n];
    } else {
      Eigen::MatrixXd v = mlp.weights[n] - lr * grads.d_weights[n];
      mlp.weights[n] =
          (v.array().sign() * (v.array().abs() - tau).max(0.0)).matrix();
    }
    mlp.biases[n] -= lr * grads.d_biases[n];
  }
  return mlp;
}

bool predict(const Mlp& mlp, const std::vector<double>& x) {
  Eigen::MatrixXd X(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t d = 0; d < x.size(); ++d) {
    X(0, static_cast<Eigen::Index>(d)) = x[d];
  }
  const Eigen::MatrixXd probs = forward(mlp, X);
  return probs(0, 1) >= 0.5;
}

std::vector<std::uint8_t> predict_batch(const Mlp& mlp, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd probs = forward(mlp, X);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = probs(r, 1) >= 0.5 ? 1 : 0;
  }
  return out;
}

}  // namespace winpred
