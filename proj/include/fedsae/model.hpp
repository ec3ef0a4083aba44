#pragma once

// Multinomial logistic regression: softmax(W x + b) with mean cross-entropy loss.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "fedsae/dataset.hpp"
#include "fedsae/errors.hpp"
#include "fedsae/random.hpp"

namespace fedsae {

/// Parameters of a C-class linear classifier: W is C x d, b has C entries.
template <typename Scalar>
struct BasicModelWeights {
  MatrixX<Scalar> weight;
  VectorX<Scalar> bias;

  static BasicModelWeights zeros(Eigen::Index num_classes, Eigen::Index dim) {
    return {MatrixX<Scalar>::Zero(num_classes, dim), VectorX<Scalar>::Zero(num_classes)};
  }

  Eigen::Index num_classes() const { return weight.rows(); }
  Eigen::Index dim() const { return weight.cols(); }
  Eigen::Index num_parameters() const { return weight.size() + bias.size(); }

  bool all_finite() const { return weight.allFinite() && bias.allFinite(); }

  bool operator==(const BasicModelWeights& other) const {
    return weight.rows() == other.weight.rows() && weight.cols() == other.weight.cols() &&
           bias.size() == other.bias.size() && weight == other.weight && bias == other.bias;
  }
};

using ModelWeights = BasicModelWeights<double>;

struct TrainingConfig {
  double learning_rate = 0.01;
  int batch_size = 10;
};

template <typename Scalar>
struct LossAccuracy {
  Scalar loss = 0;
  double accuracy = 0;
};

namespace detail {

template <typename Scalar>
void check_compatible(const BasicModelWeights<Scalar>& w, const MatrixX<Scalar>& x,
                      const Eigen::VectorXi& y) {
  if (x.rows() != y.size()) throw DimensionMismatch("feature rows and label count differ");
  if (x.cols() != w.dim()) throw DimensionMismatch("feature dimension does not match model");
  if (w.bias.size() != w.num_classes()) throw DimensionMismatch("bias length does not match classes");
  if (y.size() > 0 && (y.minCoeff() < 0 || y.maxCoeff() >= w.num_classes())) {
    throw DimensionMismatch("label outside [0, num_classes)");
  }
}

template <typename Scalar>
MatrixX<Scalar> logits(const BasicModelWeights<Scalar>& w, const MatrixX<Scalar>& x) {
  MatrixX<Scalar> z = x * w.weight.transpose();
  z.rowwise() += w.bias.transpose();
  return z;
}

}  // namespace detail

/// Mean cross-entropy and top-1 accuracy of `w` on the rows of `x`.
template <typename Scalar>
LossAccuracy<Scalar> loss_and_accuracy(const BasicModelWeights<Scalar>& w, const MatrixX<Scalar>& x,
                                       const Eigen::VectorXi& y) {
  detail::check_compatible(w, x, y);
  if (y.size() == 0) throw DataError("loss_and_accuracy: empty data");
  const MatrixX<Scalar> z = detail::logits(w, x);
  Scalar total = 0;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::Index arg = 0;
    const Scalar m = z.row(i).maxCoeff(&arg);
    const Scalar lse = m + std::log((z.row(i).array() - m).exp().sum());
    total += lse - z(i, y(i));
    if (arg == y(i)) ++correct;
  }
  const auto n = static_cast<Scalar>(z.rows());
  return {total / n, static_cast<double>(correct) / static_cast<double>(z.rows())};
}

template <typename Scalar>
LossAccuracy<Scalar> loss_and_accuracy(const BasicModelWeights<Scalar>& w,
                                       const BasicDataset<Scalar>& data) {
  return loss_and_accuracy(w, data.features, data.labels);
}

/// Row-wise softmax of W x + b.
template <typename Scalar>
MatrixX<Scalar> predict_proba(const BasicModelWeights<Scalar>& w, const MatrixX<Scalar>& x) {
  MatrixX<Scalar> z = detail::logits(w, x);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Scalar m = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - m).exp().matrix();
    z.row(i) /= z.row(i).sum();
  }
  return z;
}

/// Gradient of the mean cross-entropy over the batch, shaped like the weights.
template <typename Scalar>
BasicModelWeights<Scalar> gradient(const BasicModelWeights<Scalar>& w, const MatrixX<Scalar>& x,
                                   const Eigen::VectorXi& y) {
  detail::check_compatible(w, x, y);
  if (y.size() == 0) throw DataError("gradient: empty batch");
  MatrixX<Scalar> residual = predict_proba(w, x);
  for (Eigen::Index i = 0; i < residual.rows(); ++i) residual(i, y(i)) -= Scalar(1);
  const auto n = static_cast<Scalar>(x.rows());
  return {(residual.transpose() * x) / n, residual.colwise().sum().transpose() / n};
}

template <typename Scalar>
BasicModelWeights<Scalar> gradient(const BasicModelWeights<Scalar>& w,
                                   const BasicDataset<Scalar>& batch) {
  return gradient(w, batch.features, batch.labels);
}

/// How a real-valued epoch count maps to SGD iterations on n samples.
struct IterationPlan {
  long full_epochs = 0;
  long iterations_per_epoch = 0;
  long extra_iterations = 0;

  long total() const { return full_epochs * iterations_per_epoch + extra_iterations; }
};

inline IterationPlan plan_iterations(double epochs, std::size_t num_samples, int batch_size) {
  if (!(epochs >= 0.0) || !std::isfinite(epochs)) throw Error("epochs must be finite and >= 0");
  if (batch_size <= 0) throw Error("batch size must be positive");
  IterationPlan plan;
  const double whole = std::floor(epochs);
  plan.full_epochs = static_cast<long>(whole);
  plan.iterations_per_epoch =
      static_cast<long>((num_samples + static_cast<std::size_t>(batch_size) - 1) /
                        static_cast<std::size_t>(batch_size));
  plan.extra_iterations =
      std::lround((epochs - whole) * static_cast<double>(plan.iterations_per_epoch));
  return plan;
}

template <typename Scalar>
struct LocalTrainResult {
  BasicModelWeights<Scalar> weights;
  Scalar initial_loss = 0;  // mean training loss at the input weights
  long iterations = 0;
};

/// Mini-batch SGD for a real number of epochs. Each pass (including the
/// trailing partial one) uses a fresh shuffle drawn from `rng`.
template <typename Scalar>
LocalTrainResult<Scalar> local_train(const BasicModelWeights<Scalar>& start,
                                     const BasicDataset<Scalar>& train, double epochs,
                                     const TrainingConfig& cfg, Rng& rng) {
  if (train.empty()) throw DataError("local_train: empty training set");
  const IterationPlan plan = plan_iterations(epochs, train.size(), cfg.batch_size);

  LocalTrainResult<Scalar> out{start, loss_and_accuracy(start, train).loss, 0};
  const std::size_t n = train.size();
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const auto eta = static_cast<Scalar>(cfg.learning_rate);
  std::vector<std::size_t> order(n);
  MatrixX<Scalar> xb;
  Eigen::VectorXi yb;

  auto run_pass = [&](long iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (long it = 0; it < iterations; ++it) {
      const std::size_t lo = static_cast<std::size_t>(it) * batch;
      const std::size_t hi = std::min(n, lo + batch);
      const auto rows = static_cast<Eigen::Index>(hi - lo);
      xb.resize(rows, train.dim());
      yb.resize(rows);
      for (std::size_t r = lo; r < hi; ++r) {
        const auto dst = static_cast<Eigen::Index>(r - lo);
        xb.row(dst) = train.features.row(static_cast<Eigen::Index>(order[r]));
        yb(dst) = train.labels(static_cast<Eigen::Index>(order[r]));
      }
      const BasicModelWeights<Scalar> g = gradient(out.weights, xb, yb);
      out.weights.weight -= eta * g.weight;
      out.weights.bias -= eta * g.bias;
      ++out.iterations;
    }
  };

  for (long e = 0; e < plan.full_epochs; ++e) run_pass(plan.iterations_per_epoch);
  if (plan.extra_iterations > 0) run_pass(plan.extra_iterations);
  return out;
}

}  // namespace fedsae
