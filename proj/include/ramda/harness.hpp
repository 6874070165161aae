#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ramda/data.hpp"
#include "ramda/optimizers.hpp"

namespace ramda {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully-resolved run description. Defaults are filled at parse time and
// the resolved snapshot is emitted next to the results.
struct RunConfig {
  std::string name = "run";

  std::string model_kind = "logreg";  // logreg | mlp
  std::vector<Eigen::Index> hidden;   // mlp hidden layer sizes
  double init_scale = 0.0;            // 0: start from the origin

  std::string data_kind = "synth";  // mnist | synth
  std::string data_dir;             // mnist IDX directory
  SynthSpec synth;
  double val_fraction = 0.2;  // synth train/validation split

  std::string reg_kind = "group-lasso";  // none | l1 | group-lasso | nuclear
  double lambda = 1e-4;
  std::string grouping = "input-wise";
  double rank_tol = 1e-8;

  std::string optimizer = "ramda";  // ramda | rmda | proxgen | proxsgd
  Schedule schedule;
  std::string eps_rule = "1/t";
  double rho0 = 0.9;
  double mu = 0.9999;
  double proxsgd_rho = 0.9;
  int t2 = 100;
  int min_pg_iters = 1;
  bool early_stop = true;

  int batch_size = 128;
  std::uint64_t seed = 1;
  double augment_noise = 0.0;
  std::string out_dir = ".";

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j, const std::string& name);
  nlohmann::json to_json() const;
  void validate() const;

  std::string csv_path() const;
  std::string summary_path() const;
  std::string resolved_config_path() const;
};

// Resolves data_dir against the RAMDA_DATA_ROOT environment variable
// when the configured path is relative and does not exist as given.
std::string resolve_data_dir(const std::string& dir);

// Executes the training loop, streaming one CSV row per epoch and a JSON
// summary at the end. Exit codes: 0 success, 2 invalid config, 3 missing
// data, 4 numeric failure.
int run_training(const RunConfig& cfg, std::ostream& log);

// Runs the full-batch reference solver and emits W*, pattern, and gap.
int run_oracle(const RunConfig& cfg, std::ostream& log);

// Aligned table of one row per (config, optimizer) group; groups with
// multiple summaries report mean and sample standard deviation.
int compare_summaries(const std::vector<std::string>& paths, std::ostream& os);

}  // namespace ramda
