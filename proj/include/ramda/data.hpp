#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "ramda/regularizers.hpp"

namespace ramda {

// Row-per-sample feature matrix with integer class labels.
struct Dataset {
  Eigen::MatrixXd features;  // n x d, finite
  Eigen::VectorXi labels;    // values in [0, classes)
  int classes = 0;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  void validate() const;
};

// IDX readers. Gzip-compressed files are decompressed transparently.
// Pixels are scaled to [0,1] by /255.
Dataset read_idx(const std::string& images_path,
                 const std::string& labels_path);

// Inverse of read_idx for round-trip checks; writes uncompressed IDX.
void write_idx(const Dataset& ds, const std::string& images_path,
               const std::string& labels_path,
               Eigen::Index rows, Eigen::Index cols);

// Synthetic classification data with an exactly group-sparse planted
// weight matrix; labels are the noisy argmax of the planted scores.
struct SynthSpec {
  std::uint64_t seed = 0;
  Eigen::Index n = 1000;
  Eigen::Index d = 100;
  int groups = 10;  // equal column groups; d must be divisible
  double active_fraction = 0.5;
  double noise = 0.0;
  int classes = 2;
};

struct SynthResult {
  Dataset data;
  StructurePattern planted;  // per-group zero flags
};

SynthResult synth_planted(const SynthSpec& spec);

// Seeded permutation of [0,n) chunked into batches; the last partial
// chunk is kept. Different epochs permute differently for one seed.
std::vector<std::vector<int>> batches(Eigen::Index n, int batch_size, int epoch,
                                      std::uint64_t seed);

// Deterministic sub-seed derivation used everywhere stochastic draws
// are needed: splitmix64 over the running combination of the inputs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t a = 0, std::uint64_t b = 0);

}  // namespace ramda
