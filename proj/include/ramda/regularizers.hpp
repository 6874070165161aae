#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

#include "ramda/param_space.hpp"

namespace ramda {

// Discrete encoding of the structure of a point: which groups are
// exactly zero, or the per-layer rank for spectral penalties.
struct StructurePattern {
  std::vector<std::uint8_t> group_zero;  // 1 = group is exactly zero
  std::vector<int> layer_rank;

  std::uint64_t hash() const;
  bool operator==(const StructurePattern&) const = default;
};

class UnsupportedOperation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The nonsmooth term psi. value(w) >= 0 with value(0) = 0; prox is the
// exact minimizer of tau*psi(z) + 0.5*||z - x||^2 and writes exact 0.0
// into fully shrunk coordinates.
class Regularizer {
 public:
  virtual ~Regularizer() = default;

  virtual bool convex() const { return true; }
  virtual double value(const Eigen::VectorXd& w) const = 0;
  virtual void prox_inplace(Eigen::VectorXd& x, double tau) const = 0;

  Eigen::VectorXd prox(const Eigen::VectorXd& x, double tau) const {
    Eigen::VectorXd z = x;
    prox_inplace(z, tau);
    return z;
  }

  // min over s in d(psi)(w) of ||v + s||, exact and per-group for the
  // separable convex kinds. Throws UnsupportedOperation otherwise.
  virtual double dist_to_subdiff(const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& v) const;

  virtual StructurePattern extract_pattern(const Eigen::VectorXd& w,
                                           double rank_tol = 1e-8) const = 0;
};

class NoneRegularizer final : public Regularizer {
 public:
  double value(const Eigen::VectorXd&) const override { return 0.0; }
  void prox_inplace(Eigen::VectorXd&, double tau) const override;
  double dist_to_subdiff(const Eigen::VectorXd& w,
                         const Eigen::VectorXd& v) const override;
  StructurePattern extract_pattern(const Eigen::VectorXd&,
                                   double = 1e-8) const override {
    return {};
  }
};

// lambda * sum |w_i| over the penalized coordinates (all by default).
class L1Regularizer final : public Regularizer {
 public:
  L1Regularizer(Eigen::Index dim, double lambda);
  L1Regularizer(Eigen::Index dim, double lambda, Eigen::VectorXi penalized);

  double value(const Eigen::VectorXd& w) const override;
  void prox_inplace(Eigen::VectorXd& x, double tau) const override;
  double dist_to_subdiff(const Eigen::VectorXd& w,
                         const Eigen::VectorXd& v) const override;
  StructurePattern extract_pattern(const Eigen::VectorXd& w,
                                   double = 1e-8) const override;

 private:
  Eigen::Index dim_;
  double lambda_;
  Eigen::VectorXi penalized_;
};

// sum_g lambda_g * ||w_g||_2 over the disjoint groups of a GroupLayout.
class GroupLassoRegularizer final : public Regularizer {
 public:
  explicit GroupLassoRegularizer(GroupLayout groups);

  const GroupLayout& groups() const { return groups_; }

  double value(const Eigen::VectorXd& w) const override;
  void prox_inplace(Eigen::VectorXd& x, double tau) const override;
  double dist_to_subdiff(const Eigen::VectorXd& w,
                         const Eigen::VectorXd& v) const override;
  StructurePattern extract_pattern(const Eigen::VectorXd& w,
                                   double = 1e-8) const override;

 private:
  GroupLayout groups_;
};

// lambda * nuclear norm, one term per penalized 2-D layer of the layout.
// Prox shrinks singular values by tau*lambda via a full SVD per layer.
class NuclearNormRegularizer final : public Regularizer {
 public:
  NuclearNormRegularizer(LayoutPtr layout, double lambda);

  double value(const Eigen::VectorXd& w) const override;
  void prox_inplace(Eigen::VectorXd& x, double tau) const override;
  // Not available for spectral penalties; callers use the PG-step bound.
  double dist_to_subdiff(const Eigen::VectorXd&,
                         const Eigen::VectorXd&) const override;
  StructurePattern extract_pattern(const Eigen::VectorXd& w,
                                   double rank_tol = 1e-8) const override;

  double lambda() const { return lambda_; }

 private:
  struct MatrixBlock {
    Eigen::Index offset, rows, cols;
  };
  LayoutPtr layout_;
  double lambda_;
  std::vector<MatrixBlock> blocks_;
};

}  // namespace ramda
