#include "ramda/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ramda {

void Dataset::validate() const {
  if (features.rows() != labels.size())
    throw std::invalid_argument("dataset: image/label count mismatch");
  if (!features.allFinite())
    throw std::invalid_argument("dataset: non-finite feature");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= classes)
      throw std::invalid_argument("dataset: label out of range");
}

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

// gzopen reads plain files as well, which gives the transparent
// decompression the interface promises.
std::vector<unsigned char> read_all(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path);
  std::vector<unsigned char> out;
  unsigned char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0)
    out.insert(out.end(), buf, buf + n);
  const bool bad = n < 0;
  gzclose(f);
  if (bad) throw std::runtime_error("decompression error in " + path);
  return out;
}

std::uint32_t be32(const std::vector<unsigned char>& b, size_t off,
                   const std::string& path) {
  if (off + 4 > b.size()) throw std::runtime_error("truncated file " + path);
  return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
         (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

void put_be32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Dataset read_idx(const std::string& images_path,
                 const std::string& labels_path) {
  const auto img = read_all(images_path);
  const auto lab = read_all(labels_path);

  if (be32(img, 0, images_path) != kImagesMagic)
    throw std::runtime_error("bad magic in " + images_path);
  if (be32(lab, 0, labels_path) != kLabelsMagic)
    throw std::runtime_error("bad magic in " + labels_path);

  const std::uint32_t n = be32(img, 4, images_path);
  const std::uint32_t rows = be32(img, 8, images_path);
  const std::uint32_t cols = be32(img, 12, images_path);
  const std::uint32_t nl = be32(lab, 4, labels_path);
  if (n != nl)
    throw std::runtime_error("image/label count mismatch: " + images_path);

  const size_t pix = static_cast<size_t>(rows) * cols;
  if (img.size() != 16 + static_cast<size_t>(n) * pix)
    throw std::runtime_error("truncated file " + images_path);
  if (lab.size() != 8 + static_cast<size_t>(n))
    throw std::runtime_error("truncated file " + labels_path);

  Dataset ds;
  ds.features.resize(n, static_cast<Eigen::Index>(pix));
  ds.labels.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (size_t p = 0; p < pix; ++p)
      ds.features(i, static_cast<Eigen::Index>(p)) =
          img[16 + static_cast<size_t>(i) * pix + p] / 255.0;
    ds.labels[i] = lab[8 + i];
  }
  int max_label = 0;
  for (std::uint32_t i = 0; i < n; ++i)
    max_label = std::max(max_label, ds.labels[i]);
  ds.classes = n == 0 ? 0 : max_label + 1;
  return ds;
}

void write_idx(const Dataset& ds, const std::string& images_path,
               const std::string& labels_path, Eigen::Index rows,
               Eigen::Index cols) {
  if (rows * cols != ds.dim())
    throw std::invalid_argument("write_idx: rows*cols != feature dim");
  std::ofstream imgs(images_path, std::ios::binary);
  std::ofstream labs(labels_path, std::ios::binary);
  if (!imgs || !labs) throw std::runtime_error("cannot open output files");

  put_be32(imgs, kImagesMagic);
  put_be32(imgs, static_cast<std::uint32_t>(ds.size()));
  put_be32(imgs, static_cast<std::uint32_t>(rows));
  put_be32(imgs, static_cast<std::uint32_t>(cols));
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    for (Eigen::Index p = 0; p < ds.dim(); ++p) {
      const auto b = static_cast<unsigned char>(
          std::lround(ds.features(i, p) * 255.0));
      imgs.write(reinterpret_cast<const char*>(&b), 1);
    }

  put_be32(labs, kLabelsMagic);
  put_be32(labs, static_cast<std::uint32_t>(ds.size()));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const auto b = static_cast<unsigned char>(ds.labels[i]);
    labs.write(reinterpret_cast<const char*>(&b), 1);
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ purpose);
  h = splitmix(h ^ a);
  h = splitmix(h ^ b);
  return h;
}

SynthResult synth_planted(const SynthSpec& spec) {
  if (spec.n <= 0 || spec.d <= 0 || spec.groups <= 0 || spec.classes < 2)
    throw std::invalid_argument("synth: degenerate sizes");
  if (spec.d % spec.groups != 0)
    throw std::invalid_argument("synth: d must be divisible by groups");
  if (spec.active_fraction <= 0.0 || spec.active_fraction > 1.0)
    throw std::invalid_argument("synth: active_fraction must be in (0,1]");

  std::mt19937_64 rng(derive_seed(spec.seed, /*purpose=*/0x5354594eULL));
  std::normal_distribution<double> normal(0.0, 1.0);

  const Eigen::Index per = spec.d / spec.groups;
  const int active = std::max(
      1, static_cast<int>(std::lround(spec.active_fraction * spec.groups)));

  std::vector<int> order(spec.groups);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  StructurePattern planted;
  planted.group_zero.assign(spec.groups, 1);
  Eigen::MatrixXd w_true = Eigen::MatrixXd::Zero(spec.classes, spec.d);
  for (int a = 0; a < active; ++a) {
    const int g = order[a];
    planted.group_zero[g] = 0;
    for (Eigen::Index j = g * per; j < (g + 1) * per; ++j)
      for (int k = 0; k < spec.classes; ++k) w_true(k, j) = normal(rng);
  }

  SynthResult out;
  out.planted = std::move(planted);
  out.data.classes = spec.classes;
  out.data.features.resize(spec.n, spec.d);
  out.data.labels.resize(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index j = 0; j < spec.d; ++j)
      out.data.features(i, j) = normal(rng);
    Eigen::VectorXd scores = w_true * out.data.features.row(i).transpose();
    if (spec.noise > 0.0)
      for (int k = 0; k < spec.classes; ++k) scores[k] += spec.noise * normal(rng);
    Eigen::Index best;
    scores.maxCoeff(&best);
    out.data.labels[i] = static_cast<int>(best);
  }
  out.data.validate();
  return out;
}

std::vector<std::vector<int>> batches(Eigen::Index n, int batch_size, int epoch,
                                      std::uint64_t seed) {
  if (n <= 0 || batch_size <= 0)
    throw std::invalid_argument("batches: n and batch_size must be positive");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, /*purpose=*/0x42415443ULL,
                                  static_cast<std::uint64_t>(epoch)));
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::vector<int>> out;
  for (Eigen::Index start = 0; start < n; start += batch_size) {
    const Eigen::Index end = std::min<Eigen::Index>(start + batch_size, n);
    out.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return out;
}

}  // namespace ramda
