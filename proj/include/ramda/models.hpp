#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

#include "ramda/data.hpp"
#include "ramda/param_space.hpp"

namespace ramda {

// Optional per-sample per-draw feature perturbation, a deterministic
// function of (sample id, draw seed). Makes the training objective a
// genuine expectation; off by default.
struct Augmentation {
  double noise_std = 0.0;
  bool enabled() const { return noise_std > 0.0; }
};

// Differentiable training objective with exact batch-mean gradients.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  virtual const LayoutPtr& layout() const = 0;
  virtual Eigen::Index num_samples() const = 0;

  virtual std::pair<double, Eigen::VectorXd> loss_and_grad(
      const Eigen::VectorXd& w, const std::vector<int>& batch,
      std::uint64_t seed) const = 0;

  virtual double accuracy(const Eigen::VectorXd& w,
                          const std::vector<int>& batch) const = 0;

  std::pair<double, Eigen::VectorXd> full_loss_and_grad(
      const Eigen::VectorXd& w, std::uint64_t seed = 0) const;
};

// Multinomial logistic regression: penalized weight matrix (classes x
// features) plus an unpenalized bias.
class LogisticRegression final : public LossOracle {
 public:
  LogisticRegression(const Dataset& data, Augmentation aug = {});

  const LayoutPtr& layout() const override { return layout_; }
  Eigen::Index num_samples() const override { return data_->size(); }
  const Dataset& data() const { return *data_; }

  std::pair<double, Eigen::VectorXd> loss_and_grad(
      const Eigen::VectorXd& w, const std::vector<int>& batch,
      std::uint64_t seed) const override;
  double accuracy(const Eigen::VectorXd& w,
                  const std::vector<int>& batch) const override;

 private:
  const Dataset* data_;
  Augmentation aug_;
  LayoutPtr layout_;
};

// Fully-connected ReLU network with softmax cross-entropy. The ReLU
// subgradient at 0 is taken as 0. Weight layers are penalized; biases
// are not.
class MlpClassifier final : public LossOracle {
 public:
  // sizes = {features, hidden..., classes}
  MlpClassifier(const Dataset& data, std::vector<Eigen::Index> sizes,
                Augmentation aug = {});

  const LayoutPtr& layout() const override { return layout_; }
  Eigen::Index num_samples() const override { return data_->size(); }

  std::pair<double, Eigen::VectorXd> loss_and_grad(
      const Eigen::VectorXd& w, const std::vector<int>& batch,
      std::uint64_t seed) const override;
  double accuracy(const Eigen::VectorXd& w,
                  const std::vector<int>& batch) const override;

 private:
  Eigen::MatrixXd forward_scores(const Eigen::VectorXd& w,
                                 const Eigen::MatrixXd& x) const;

  const Dataset* data_;
  Augmentation aug_;
  std::vector<Eigen::Index> sizes_;
  LayoutPtr layout_;
};

}  // namespace ramda
