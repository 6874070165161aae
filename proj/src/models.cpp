#include "ramda/models.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ramda {

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x,
                            const std::vector<int>& batch,
                            const Augmentation& aug, std::uint64_t seed) {
  Eigen::MatrixXd out(batch.size(), x.cols());
  for (size_t i = 0; i < batch.size(); ++i) {
    const int id = batch[i];
    if (id < 0 || id >= x.rows())
      throw std::out_of_range("batch index out of range");
    out.row(static_cast<Eigen::Index>(i)) = x.row(id);
    if (aug.enabled()) {
      std::mt19937_64 rng(derive_seed(seed, /*purpose=*/0x41554731ULL,
                                      static_cast<std::uint64_t>(id)));
      std::normal_distribution<double> normal(0.0, aug.noise_std);
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        out(static_cast<Eigen::Index>(i), j) += normal(rng);
    }
  }
  return out;
}

// Row-wise softmax with the row max subtracted; also returns the
// mean cross-entropy against the given labels.
double softmax_xent_inplace(Eigen::MatrixXd& scores,
                            const std::vector<int>& batch,
                            const Eigen::VectorXi& labels) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    scores.row(i) = (scores.row(i).array() - mx).exp();
    const double z = scores.row(i).sum();
    scores.row(i) /= z;
    const int y = labels[batch[static_cast<size_t>(i)]];
    loss -= std::log(scores(i, y));
  }
  return loss / static_cast<double>(scores.rows());
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

}  // namespace

std::pair<double, Eigen::VectorXd> LossOracle::full_loss_and_grad(
    const Eigen::VectorXd& w, std::uint64_t seed) const {
  std::vector<int> all(num_samples());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return loss_and_grad(w, all, seed);
}

LogisticRegression::LogisticRegression(const Dataset& data, Augmentation aug)
    : data_(&data), aug_(aug) {
  data.validate();
  layout_ = std::make_shared<const ModelLayout>(std::vector<LayerSpec>{
      {"weight", {data.classes, data.dim()}, true},
      {"bias", {data.classes}, false},
  });
}

std::pair<double, Eigen::VectorXd> LogisticRegression::loss_and_grad(
    const Eigen::VectorXd& w, const std::vector<int>& batch,
    std::uint64_t seed) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (w.size() != layout_->total_size())
    throw std::invalid_argument("logreg: parameter size mismatch");
  const Eigen::Index k = data_->classes, d = data_->dim();
  Eigen::Map<const Eigen::MatrixXd> wm(w.data(), k, d);
  Eigen::Map<const Eigen::VectorXd> b(w.data() + k * d, k);

  const Eigen::MatrixXd x = gather_rows(data_->features, batch, aug_, seed);
  Eigen::MatrixXd p = x * wm.transpose();          // B x k
  p.rowwise() += b.transpose();
  const double loss = softmax_xent_inplace(p, batch, data_->labels);

  for (Eigen::Index i = 0; i < p.rows(); ++i)
    p(i, data_->labels[batch[static_cast<size_t>(i)]]) -= 1.0;
  p /= static_cast<double>(batch.size());

  Eigen::VectorXd grad(w.size());
  Eigen::Map<Eigen::MatrixXd> gw(grad.data(), k, d);
  Eigen::Map<Eigen::VectorXd> gb(grad.data() + k * d, k);
  gw.noalias() = p.transpose() * x;
  gb = p.colwise().sum().transpose();
  return {loss, std::move(grad)};
}

double LogisticRegression::accuracy(const Eigen::VectorXd& w,
                                    const std::vector<int>& batch) const {
  if (batch.empty()) throw std::invalid_argument("empty index set");
  const Eigen::Index k = data_->classes, d = data_->dim();
  Eigen::Map<const Eigen::MatrixXd> wm(w.data(), k, d);
  Eigen::Map<const Eigen::VectorXd> b(w.data() + k * d, k);
  int correct = 0;
  for (int id : batch) {
    Eigen::VectorXd s = wm * data_->features.row(id).transpose() + b;
    if (argmax_lowest(s) == data_->labels[id]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

MlpClassifier::MlpClassifier(const Dataset& data,
                             std::vector<Eigen::Index> sizes, Augmentation aug)
    : data_(&data), aug_(aug), sizes_(std::move(sizes)) {
  data.validate();
  if (sizes_.size() < 2) throw std::invalid_argument("mlp: need >= 2 sizes");
  if (sizes_.front() != data.dim() || sizes_.back() != data.classes)
    throw std::invalid_argument("mlp: sizes must match data dims");
  std::vector<LayerSpec> layers;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const std::string tag = std::to_string(l);
    layers.push_back({"layer" + tag + ".weight", {sizes_[l + 1], sizes_[l]}, true});
    layers.push_back({"layer" + tag + ".bias", {sizes_[l + 1]}, false});
  }
  layout_ = std::make_shared<const ModelLayout>(std::move(layers));
}

std::pair<double, Eigen::VectorXd> MlpClassifier::loss_and_grad(
    const Eigen::VectorXd& w, const std::vector<int>& batch,
    std::uint64_t seed) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (w.size() != layout_->total_size())
    throw std::invalid_argument("mlp: parameter size mismatch");

  const size_t num_layers = sizes_.size() - 1;
  const Eigen::MatrixXd x = gather_rows(data_->features, batch, aug_, seed);

  std::vector<Eigen::MatrixXd> acts;  // activations per layer, acts[0] = input
  acts.reserve(num_layers + 1);
  acts.push_back(x);
  for (size_t l = 0; l < num_layers; ++l) {
    const Eigen::Index out = sizes_[l + 1], in = sizes_[l];
    const Eigen::Index off = layout_->offset(static_cast<int>(2 * l));
    Eigen::Map<const Eigen::MatrixXd> wm(w.data() + off, out, in);
    Eigen::Map<const Eigen::VectorXd> b(w.data() + off + out * in, out);
    Eigen::MatrixXd z = acts.back() * wm.transpose();
    z.rowwise() += b.transpose();
    if (l + 1 < num_layers)
      z = z.array().max(0.0);  // ReLU; subgradient 0 at the kink
    acts.push_back(std::move(z));
  }

  Eigen::MatrixXd delta = acts.back();
  const double loss = softmax_xent_inplace(delta, batch, data_->labels);
  for (Eigen::Index i = 0; i < delta.rows(); ++i)
    delta(i, data_->labels[batch[static_cast<size_t>(i)]]) -= 1.0;
  delta /= static_cast<double>(batch.size());

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(w.size());
  for (size_t l = num_layers; l-- > 0;) {
    const Eigen::Index out = sizes_[l + 1], in = sizes_[l];
    const Eigen::Index off = layout_->offset(static_cast<int>(2 * l));
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + off, out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + off + out * in, out);
    gw.noalias() = delta.transpose() * acts[l];
    gb = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::Map<const Eigen::MatrixXd> wm(w.data() + off, out, in);
      Eigen::MatrixXd back = delta * wm;
      // acts[l] is already rectified; positive entries carry gradient
      back.array() *= (acts[l].array() > 0.0).cast<double>();
      delta = std::move(back);
    }
  }
  return {loss, std::move(grad)};
}

Eigen::MatrixXd MlpClassifier::forward_scores(const Eigen::VectorXd& w,
                                              const Eigen::MatrixXd& x) const {
  const size_t num_layers = sizes_.size() - 1;
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l < num_layers; ++l) {
    const Eigen::Index out = sizes_[l + 1], in = sizes_[l];
    const Eigen::Index off = layout_->offset(static_cast<int>(2 * l));
    Eigen::Map<const Eigen::MatrixXd> wm(w.data() + off, out, in);
    Eigen::Map<const Eigen::VectorXd> b(w.data() + off + out * in, out);
    Eigen::MatrixXd z = a * wm.transpose();
    z.rowwise() += b.transpose();
    if (l + 1 < num_layers) z = z.array().max(0.0);
    a = std::move(z);
  }
  return a;
}

double MlpClassifier::accuracy(const Eigen::VectorXd& w,
                               const std::vector<int>& batch) const {
  if (batch.empty()) throw std::invalid_argument("empty index set");
  int correct = 0;
  for (int id : batch) {
    const Eigen::MatrixXd s = forward_scores(w, data_->features.row(id));
    if (argmax_lowest(s.row(0).transpose()) == data_->labels[id]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

}  // namespace ramda
