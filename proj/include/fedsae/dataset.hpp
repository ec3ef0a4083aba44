#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fedsae/errors.hpp"

namespace fedsae {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One labeled feature vector.
template <typename Scalar>
struct BasicSample {
  VectorX<Scalar> features;
  int label = 0;
};

/// Row-major view of many samples: row i of `features` is sample i.
template <typename Scalar>
struct BasicDataset {
  MatrixX<Scalar> features;
  Eigen::VectorXi labels;

  BasicDataset() = default;
  BasicDataset(MatrixX<Scalar> x, Eigen::VectorXi y) : features(std::move(x)), labels(std::move(y)) {
    if (features.rows() != labels.size()) {
      throw DimensionMismatch("dataset: feature rows and label count differ");
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
  bool empty() const { return labels.size() == 0; }
  Eigen::Index dim() const { return features.cols(); }

  BasicSample<Scalar> sample(std::size_t i) const {
    return {features.row(static_cast<Eigen::Index>(i)).transpose(),
            labels(static_cast<Eigen::Index>(i))};
  }

  static BasicDataset from_samples(std::span<const BasicSample<Scalar>> samples) {
    BasicDataset out;
    if (samples.empty()) return out;
    const Eigen::Index d = samples.front().features.size();
    out.features.resize(static_cast<Eigen::Index>(samples.size()), d);
    out.labels.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].features.size() != d) {
        throw DimensionMismatch("dataset: inconsistent feature length");
      }
      out.features.row(static_cast<Eigen::Index>(i)) = samples[i].features.transpose();
      out.labels(static_cast<Eigen::Index>(i)) = samples[i].label;
    }
    return out;
  }

  std::vector<BasicSample<Scalar>> to_samples() const {
    std::vector<BasicSample<Scalar>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(sample(i));
    return out;
  }

  BasicDataset subset(std::span<const std::size_t> rows) const {
    BasicDataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(rows[i]);
      out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
      out.labels(static_cast<Eigen::Index>(i)) = labels(r);
    }
    return out;
  }
};

using Sample = BasicSample<double>;
using Dataset = BasicDataset<double>;

/// A client's local data. `train` is never empty.
struct ClientShard {
  int client_id = 0;
  Dataset train;
  Dataset test;

  std::size_t num_train() const { return train.size(); }
};

}  // namespace fedsae
