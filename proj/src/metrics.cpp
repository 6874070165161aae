#include "ramda/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ramda {

double weighted_group_sparsity(const StructurePattern& pattern,
                               const GroupLayout& layout) {
  if (static_cast<int>(pattern.group_zero.size()) != layout.num_groups())
    throw std::invalid_argument("pattern does not match group layout");
  if (layout.num_groups() == 0) return 0.0;
  Eigen::Index zero = 0, total = 0;
  for (int g = 0; g < layout.num_groups(); ++g) {
    const Eigen::Index sz = layout.group(g).indices.size();
    total += sz;
    if (pattern.group_zero[g]) zero += sz;
  }
  return static_cast<double>(zero) / static_cast<double>(total);
}

double low_rank_level(
    const StructurePattern& pattern,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& matrix_shapes) {
  if (pattern.layer_rank.size() != matrix_shapes.size())
    throw std::invalid_argument("pattern does not match matrix shapes");
  if (matrix_shapes.empty()) return 0.0;
  Eigen::Index rank = 0, full = 0;
  for (size_t i = 0; i < matrix_shapes.size(); ++i) {
    rank += pattern.layer_rank[i];
    full += std::min(matrix_shapes[i].first, matrix_shapes[i].second);
  }
  return 1.0 - static_cast<double>(rank) / static_cast<double>(full);
}

IdentificationResult identification_window(
    const std::vector<std::uint64_t>& pattern_hashes, int last_k) {
  IdentificationResult out;
  const int n = static_cast<int>(pattern_hashes.size());
  if (n == 0 || last_k <= 0 || last_k > n) return out;
  const std::uint64_t final_hash = pattern_hashes.back();
  for (int e = n - last_k; e < n; ++e)
    if (pattern_hashes[e] != final_hash) return out;
  out.identified = true;
  int first = n - 1;
  while (first > 0 && pattern_hashes[first - 1] == final_hash) --first;
  out.first_stable_epoch = first;
  return out;
}

double stationarity_gap(const LossOracle& loss, const Regularizer& reg,
                        const Eigen::VectorXd& w) {
  const auto [value, grad] = loss.full_loss_and_grad(w);
  (void)value;
  return reg.dist_to_subdiff(w, grad);
}

double lipschitz_estimate(const Eigen::MatrixXd& features, int iters) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(features.cols());
  v.normalize();
  double lam = 0.0;
  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXd av = features.transpose() * (features * v);
    lam = av.norm();
    if (lam == 0.0) break;
    v = av / lam;
  }
  return 0.5 * lam / static_cast<double>(features.rows());
}

OracleResult oracle_solve(const LossOracle& loss, const Regularizer& reg,
                          const OracleOptions& opts) {
  const auto* logreg = dynamic_cast<const LogisticRegression*>(&loss);
  if (logreg == nullptr)
    throw std::invalid_argument("oracle_solve requires a convex model");

  double step = opts.step;
  if (step <= 0.0) step = 1.0 / lipschitz_estimate(logreg->data().features);

  OracleResult out;
  out.w = Eigen::VectorXd::Zero(loss.layout()->total_size());

  for (int it = 0; it < opts.max_iters; ++it) {
    const auto [value, grad] = loss.full_loss_and_grad(out.w);
    (void)value;
    out.gap = reg.dist_to_subdiff(out.w, grad);
    out.iterations = it;
    if (out.gap <= opts.tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd next = out.w - step * grad;
    reg.prox_inplace(next, step);
    out.w = std::move(next);
  }
  out.pattern = reg.extract_pattern(out.w);
  return out;
}

}  // namespace ramda
