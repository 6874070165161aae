#include "ramda/regularizers.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ramda {

std::uint64_t StructurePattern::hash() const {
  // FNV-1a over the flag bytes and ranks
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t b) {
    h ^= b;
    h *= 1099511628211ULL;
  };
  mix(group_zero.size());
  for (std::uint8_t f : group_zero) mix(f);
  mix(layer_rank.size());
  for (int r : layer_rank) mix(static_cast<std::uint64_t>(r));
  return h;
}

double Regularizer::dist_to_subdiff(const Eigen::VectorXd&,
                                    const Eigen::VectorXd&) const {
  throw UnsupportedOperation("dist_to_subdiff not available for this kind");
}

void NoneRegularizer::prox_inplace(Eigen::VectorXd&, double tau) const {
  if (tau < 0.0) throw std::invalid_argument("prox: tau < 0");
}

double NoneRegularizer::dist_to_subdiff(const Eigen::VectorXd& w,
                                        const Eigen::VectorXd& v) const {
  check_same_length(w, v);
  return v.norm();
}

L1Regularizer::L1Regularizer(Eigen::Index dim, double lambda)
    : L1Regularizer(dim, lambda,
                    Eigen::VectorXi::LinSpaced(dim, 0,
                                               static_cast<int>(dim - 1))) {}

L1Regularizer::L1Regularizer(Eigen::Index dim, double lambda,
                             Eigen::VectorXi penalized)
    : dim_(dim), lambda_(lambda), penalized_(std::move(penalized)) {
  if (lambda_ < 0.0) throw std::invalid_argument("l1: lambda < 0");
  for (int i = 0; i < penalized_.size(); ++i)
    if (penalized_[i] < 0 || penalized_[i] >= dim_)
      throw std::invalid_argument("l1: penalized index out of range");
}

double L1Regularizer::value(const Eigen::VectorXd& w) const {
  if (w.size() != dim_) throw std::invalid_argument("l1: layout mismatch");
  double s = 0.0;
  for (int i = 0; i < penalized_.size(); ++i) s += std::abs(w[penalized_[i]]);
  return lambda_ * s;
}

void L1Regularizer::prox_inplace(Eigen::VectorXd& x, double tau) const {
  if (tau < 0.0) throw std::invalid_argument("prox: tau < 0");
  if (x.size() != dim_) throw std::invalid_argument("l1: layout mismatch");
  const double t = tau * lambda_;
  for (int i = 0; i < penalized_.size(); ++i) {
    double& xi = x[penalized_[i]];
    const double a = std::abs(xi);
    xi = a <= t ? 0.0 : (xi > 0 ? xi - t : xi + t);
  }
}

double L1Regularizer::dist_to_subdiff(const Eigen::VectorXd& w,
                                      const Eigen::VectorXd& v) const {
  check_same_length(w, v);
  if (w.size() != dim_) throw std::invalid_argument("l1: layout mismatch");
  Eigen::VectorXd r = v;
  for (int i = 0; i < penalized_.size(); ++i) {
    const int k = penalized_[i];
    if (w[k] != 0.0) {
      r[k] = v[k] + lambda_ * (w[k] > 0 ? 1.0 : -1.0);
    } else {
      r[k] = std::max(0.0, std::abs(v[k]) - lambda_);
    }
  }
  return r.norm();
}

StructurePattern L1Regularizer::extract_pattern(const Eigen::VectorXd& w,
                                                double) const {
  StructurePattern p;
  p.group_zero.resize(penalized_.size());
  for (int i = 0; i < penalized_.size(); ++i)
    p.group_zero[i] = w[penalized_[i]] == 0.0 ? 1 : 0;
  return p;
}

GroupLassoRegularizer::GroupLassoRegularizer(GroupLayout groups)
    : groups_(std::move(groups)) {}

namespace {

double group_norm(const Eigen::VectorXd& w, const Group& g) {
  double s = 0.0;
  for (int i = 0; i < g.indices.size(); ++i) {
    const double wi = w[g.indices[i]];
    s += wi * wi;
  }
  return std::sqrt(s);
}

}  // namespace

double GroupLassoRegularizer::value(const Eigen::VectorXd& w) const {
  if (w.size() != groups_.dim())
    throw std::invalid_argument("group-lasso: layout mismatch");
  double v = 0.0;
  for (const Group& g : groups_.groups()) v += g.weight * group_norm(w, g);
  return v;
}

void GroupLassoRegularizer::prox_inplace(Eigen::VectorXd& x, double tau) const {
  if (tau < 0.0) throw std::invalid_argument("prox: tau < 0");
  if (x.size() != groups_.dim())
    throw std::invalid_argument("group-lasso: layout mismatch");
  for (const Group& g : groups_.groups()) {
    const double n = group_norm(x, g);
    const double t = tau * g.weight;
    if (n <= t) {
      for (int i = 0; i < g.indices.size(); ++i) x[g.indices[i]] = 0.0;
    } else {
      const double f = 1.0 - t / n;
      for (int i = 0; i < g.indices.size(); ++i) x[g.indices[i]] *= f;
    }
  }
}

double GroupLassoRegularizer::dist_to_subdiff(const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& v) const {
  check_same_length(w, v);
  if (w.size() != groups_.dim())
    throw std::invalid_argument("group-lasso: layout mismatch");
  // Unpenalized coordinates carry s = 0.
  std::vector<char> covered(static_cast<size_t>(w.size()), 0);
  double sq = 0.0;
  for (const Group& g : groups_.groups()) {
    double vg_sq = 0.0, wg_sq = 0.0;
    for (int i = 0; i < g.indices.size(); ++i) {
      const double vi = v[g.indices[i]], wi = w[g.indices[i]];
      vg_sq += vi * vi;
      wg_sq += wi * wi;
      covered[static_cast<size_t>(g.indices[i])] = 1;
    }
    if (wg_sq > 0.0) {
      // gradient is the unique subgradient: s = lambda_g * w_g / ||w_g||
      const double wn = std::sqrt(wg_sq);
      for (int i = 0; i < g.indices.size(); ++i) {
        const double r =
            v[g.indices[i]] + g.weight * w[g.indices[i]] / wn;
        sq += r * r;
      }
    } else {
      // distance from -v_g to the ball of radius lambda_g
      const double d = std::max(0.0, std::sqrt(vg_sq) - g.weight);
      sq += d * d;
    }
  }
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!covered[static_cast<size_t>(i)]) sq += v[i] * v[i];
  return std::sqrt(sq);
}

StructurePattern GroupLassoRegularizer::extract_pattern(
    const Eigen::VectorXd& w, double) const {
  StructurePattern p;
  p.group_zero.resize(groups_.num_groups());
  for (int gi = 0; gi < groups_.num_groups(); ++gi) {
    const Group& g = groups_.group(gi);
    bool zero = true;
    for (int i = 0; i < g.indices.size() && zero; ++i)
      zero = w[g.indices[i]] == 0.0;
    p.group_zero[gi] = zero ? 1 : 0;
  }
  return p;
}

NuclearNormRegularizer::NuclearNormRegularizer(LayoutPtr layout, double lambda)
    : layout_(std::move(layout)), lambda_(lambda) {
  if (lambda_ < 0.0) throw std::invalid_argument("nuclear: lambda < 0");
  for (int i = 0; i < layout_->num_layers(); ++i) {
    const LayerSpec& l = layout_->layer(i);
    if (!l.penalized) continue;
    if (l.shape.size() != 2)
      throw std::invalid_argument("nuclear: penalized layer " + l.name +
                                  " is not a matrix");
    blocks_.push_back({layout_->offset(i), l.shape[0], l.shape[1]});
  }
}

double NuclearNormRegularizer::value(const Eigen::VectorXd& w) const {
  if (w.size() != layout_->total_size())
    throw std::invalid_argument("nuclear: layout mismatch");
  double v = 0.0;
  for (const MatrixBlock& b : blocks_) {
    Eigen::Map<const Eigen::MatrixXd> m(w.data() + b.offset, b.rows, b.cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    v += svd.singularValues().sum();
  }
  return lambda_ * v;
}

void NuclearNormRegularizer::prox_inplace(Eigen::VectorXd& x,
                                          double tau) const {
  if (tau < 0.0) throw std::invalid_argument("prox: tau < 0");
  if (x.size() != layout_->total_size())
    throw std::invalid_argument("nuclear: layout mismatch");
  if (tau == 0.0) return;
  const double t = tau * lambda_;
  for (const MatrixBlock& b : blocks_) {
    Eigen::Map<Eigen::MatrixXd> m(x.data() + b.offset, b.rows, b.cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      sv[i] = std::max(0.0, sv[i] - t);
      if (sv[i] > 0.0) r = i + 1;
    }
    if (r == 0) {
      m.setZero();
    } else {
      m.noalias() = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal() *
                    svd.matrixV().leftCols(r).transpose();
    }
  }
}

double NuclearNormRegularizer::dist_to_subdiff(const Eigen::VectorXd&,
                                               const Eigen::VectorXd&) const {
  throw UnsupportedOperation(
      "dist_to_subdiff unsupported for the nuclear norm");
}

StructurePattern NuclearNormRegularizer::extract_pattern(
    const Eigen::VectorXd& w, double rank_tol) const {
  if (rank_tol < 0.0) throw std::invalid_argument("rank_tol < 0");
  StructurePattern p;
  for (const MatrixBlock& b : blocks_) {
    Eigen::Map<const Eigen::MatrixXd> m(w.data() + b.offset, b.rows, b.cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > rank_tol) ++r;
    p.layer_rank.push_back(r);
  }
  return p;
}

}  // namespace ramda
