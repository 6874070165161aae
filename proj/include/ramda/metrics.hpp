#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "ramda/models.hpp"
#include "ramda/param_space.hpp"
#include "ramda/regularizers.hpp"

namespace ramda {

// Fraction of penalized parameters that lie in zero groups, each group
// weighted by its parameter count.
double weighted_group_sparsity(const StructurePattern& pattern,
                               const GroupLayout& layout);

// Fraction of discarded singular directions across the penalized matrix
// layers: 1 - sum(rank) / sum(min(m, n)).
double low_rank_level(const StructurePattern& pattern,
                      const std::vector<std::pair<Eigen::Index, Eigen::Index>>&
                          matrix_shapes);

struct IdentificationResult {
  bool identified = false;
  int first_stable_epoch = -1;  // earliest epoch from which the hash is fixed
};

// Identified iff the last K epochs share one pattern hash.
IdentificationResult identification_window(
    const std::vector<std::uint64_t>& pattern_hashes, int last_k);

// ||grad f(W) + s*|| with s* the per-group minimizer over the
// subdifferential of psi.
double stationarity_gap(const LossOracle& loss, const Regularizer& reg,
                        const Eigen::VectorXd& w);

struct OracleOptions {
  double step = 0.0;  // <= 0: use 1/L from a power-iteration estimate
  int max_iters = 100000;
  double tol = 1e-8;
};

struct OracleResult {
  Eigen::VectorXd w;
  StructurePattern pattern;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Deterministic full-batch proximal gradient to a reference stationary
// point; convex models only. If tol is not reached within max_iters the
// best gap is reported with converged = false.
OracleResult oracle_solve(const LossOracle& loss, const Regularizer& reg,
                          const OracleOptions& opts = {});

// Conservative Lipschitz estimate for the softmax data term:
// 0.5 * lambda_max(X^T X) / n by power iteration.
double lipschitz_estimate(const Eigen::MatrixXd& features, int iters = 100);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  double group_sparsity = 0.0;
  double rank_level = 0.0;
  double pg_iters_mean = 0.0;
  double cert_mean = 0.0;
  std::uint64_t pattern_hash = 0;
};

}  // namespace ramda
