#include "ramda/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>

#include "ramda/metrics.hpp"
#include "ramda/models.hpp"

namespace ramda {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j, fs::path(path).stem().string());
}

RunConfig RunConfig::from_json(const json& j, const std::string& name) {
  check_keys(j,
             {"model", "data", "regularizer", "optimizer", "schedule",
              "batch_size", "seed", "augment_noise", "out_dir", "name"},
             "config");
  RunConfig c;
  c.name = get_or<std::string>(j, "name", name);

  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, {"kind", "hidden", "init_scale"}, "model");
    c.model_kind = get_or<std::string>(m, "kind", c.model_kind);
    if (m.contains("hidden"))
      for (const auto& h : m.at("hidden"))
        c.hidden.push_back(h.get<Eigen::Index>());
    c.init_scale = get_or<double>(m, "init_scale", c.init_scale);
  }

  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d,
               {"kind", "dir", "n", "d", "groups", "active_fraction", "noise",
                "classes", "val_fraction"},
               "data");
    c.data_kind = get_or<std::string>(d, "kind", c.data_kind);
    c.data_dir = get_or<std::string>(d, "dir", c.data_dir);
    c.synth.n = get_or<Eigen::Index>(d, "n", c.synth.n);
    c.synth.d = get_or<Eigen::Index>(d, "d", c.synth.d);
    c.synth.groups = get_or<int>(d, "groups", c.synth.groups);
    c.synth.active_fraction =
        get_or<double>(d, "active_fraction", c.synth.active_fraction);
    c.synth.noise = get_or<double>(d, "noise", c.synth.noise);
    c.synth.classes = get_or<int>(d, "classes", c.synth.classes);
    c.val_fraction = get_or<double>(d, "val_fraction", c.val_fraction);
  }

  if (j.contains("regularizer")) {
    const json& r = j.at("regularizer");
    check_keys(r, {"kind", "lambda", "grouping", "rank_tol"}, "regularizer");
    c.reg_kind = get_or<std::string>(r, "kind", c.reg_kind);
    c.lambda = get_or<double>(r, "lambda", c.lambda);
    c.grouping = get_or<std::string>(r, "grouping", c.grouping);
    c.rank_tol = get_or<double>(r, "rank_tol", c.rank_tol);
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o,
               {"kind", "rho0", "mu", "momentum", "t2", "min_pg_iters",
                "early_stop"},
               "optimizer");
    c.optimizer = get_or<std::string>(o, "kind", c.optimizer);
    c.rho0 = get_or<double>(o, "rho0", c.rho0);
    c.mu = get_or<double>(o, "mu", c.mu);
    c.proxsgd_rho = get_or<double>(o, "momentum", c.proxsgd_rho);
    c.t2 = get_or<int>(o, "t2", c.t2);
    c.min_pg_iters = get_or<int>(o, "min_pg_iters", c.min_pg_iters);
    c.early_stop = get_or<bool>(o, "early_stop", c.early_stop);
  }

  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    check_keys(s,
               {"stage_epochs", "etas", "c0", "eps0", "eps_rule", "eps_stab",
                "eps_stab_decay"},
               "schedule");
    if (s.contains("stage_epochs"))
      c.schedule.stage_epochs = s.at("stage_epochs").get<std::vector<int>>();
    if (s.contains("etas"))
      c.schedule.etas = s.at("etas").get<std::vector<double>>();
    c.schedule.c0 = get_or<double>(s, "c0", c.schedule.c0);
    c.schedule.eps0 = get_or<double>(s, "eps0", c.schedule.eps0);
    c.eps_rule = get_or<std::string>(s, "eps_rule", c.eps_rule);
    c.schedule.eps_stab0 = get_or<double>(s, "eps_stab", c.schedule.eps_stab0);
    c.schedule.eps_stab_decay =
        get_or<double>(s, "eps_stab_decay", c.schedule.eps_stab_decay);
  }
  if (c.schedule.stage_epochs.empty()) c.schedule.stage_epochs = {10};
  if (c.schedule.etas.empty())
    c.schedule.etas.assign(c.schedule.stage_epochs.size(), 0.1);

  c.batch_size = get_or<int>(j, "batch_size", c.batch_size);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.augment_noise = get_or<double>(j, "augment_noise", c.augment_noise);
  c.out_dir = get_or<std::string>(j, "out_dir", c.out_dir);

  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (model_kind != "logreg" && model_kind != "mlp")
    throw ConfigError("unknown model kind: " + model_kind);
  if (data_kind != "mnist" && data_kind != "synth")
    throw ConfigError("unknown data kind: " + data_kind);
  if (reg_kind != "none" && reg_kind != "l1" && reg_kind != "group-lasso" &&
      reg_kind != "nuclear")
    throw ConfigError("unknown regularizer kind: " + reg_kind);
  if (optimizer != "ramda" && optimizer != "rmda" && optimizer != "proxgen" &&
      optimizer != "proxsgd")
    throw ConfigError("unknown optimizer: " + optimizer);
  if (reg_kind != "none" && lambda <= 0.0)
    throw ConfigError("lambda must be > 0");
  if (eps_rule != "1/t")
    throw ConfigError(
        "eps_rule '" + eps_rule +
        "' rejected: inner tolerances must have summable squares "
        "(sum over t of eps_t^2 finite); only the '1/t' rule satisfies this");
  if (batch_size <= 0) throw ConfigError("batch_size must be > 0");
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw ConfigError("val_fraction must be in (0,1)");
  if (t2 < 1) throw ConfigError("t2 must be >= 1");
  if (min_pg_iters < 1) throw ConfigError("min_pg_iters must be >= 1");
  try {
    schedule.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (model_kind == "mlp" && hidden.empty())
    throw ConfigError("mlp model needs at least one hidden size");
}

json RunConfig::to_json() const {
  json j;
  j["name"] = name;
  j["model"] = {{"kind", model_kind}, {"init_scale", init_scale}};
  if (!hidden.empty()) j["model"]["hidden"] = hidden;
  if (data_kind == "mnist") {
    j["data"] = {{"kind", data_kind}, {"dir", data_dir}};
  } else {
    j["data"] = {{"kind", data_kind},          {"n", synth.n},
                 {"d", synth.d},               {"groups", synth.groups},
                 {"active_fraction", synth.active_fraction},
                 {"noise", synth.noise},       {"classes", synth.classes},
                 {"val_fraction", val_fraction}};
  }
  j["regularizer"] = {{"kind", reg_kind},
                      {"lambda", lambda},
                      {"grouping", grouping},
                      {"rank_tol", rank_tol}};
  j["optimizer"] = {{"kind", optimizer},   {"rho0", rho0},
                    {"mu", mu},            {"momentum", proxsgd_rho},
                    {"t2", t2},            {"min_pg_iters", min_pg_iters},
                    {"early_stop", early_stop}};
  j["schedule"] = {{"stage_epochs", schedule.stage_epochs},
                   {"etas", schedule.etas},
                   {"c0", schedule.c0},
                   {"eps0", schedule.eps0},
                   {"eps_rule", eps_rule},
                   {"eps_stab", schedule.eps_stab0},
                   {"eps_stab_decay", schedule.eps_stab_decay}};
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["augment_noise"] = augment_noise;
  j["out_dir"] = out_dir;
  return j;
}

std::string RunConfig::csv_path() const {
  return (fs::path(out_dir) / (name + ".csv")).string();
}
std::string RunConfig::summary_path() const {
  return (fs::path(out_dir) / (name + "_summary.json")).string();
}
std::string RunConfig::resolved_config_path() const {
  return (fs::path(out_dir) / (name + "_config.json")).string();
}

std::string resolve_data_dir(const std::string& dir) {
  if (!dir.empty() && fs::exists(dir)) return dir;
  const char* root = std::getenv("RAMDA_DATA_ROOT");
  if (root != nullptr) {
    const fs::path joined = fs::path(root) / dir;
    if (fs::exists(joined)) return joined.string();
    if (dir.empty()) return root;
  }
  return dir;
}

namespace {

std::string find_idx_file(const fs::path& dir, const std::string& base) {
  for (const char* suffix : {"", ".gz"}) {
    const fs::path p = dir / (base + suffix);
    if (fs::exists(p)) return p.string();
  }
  throw DataError("missing data file " + (dir / base).string());
}

struct Problem {
  Dataset train, val;
  std::unique_ptr<LossOracle> loss;      // training objective
  std::unique_ptr<LossOracle> val_eval;  // validation metric
  std::unique_ptr<Regularizer> reg;
  const GroupLayout* group_layout = nullptr;  // group-lasso only
  std::vector<std::pair<Eigen::Index, Eigen::Index>> matrix_shapes;
};

std::unique_ptr<LossOracle> make_oracle(const RunConfig& cfg,
                                        const Dataset& ds, Augmentation aug) {
  if (cfg.model_kind == "logreg")
    return std::make_unique<LogisticRegression>(ds, aug);
  std::vector<Eigen::Index> sizes;
  sizes.push_back(ds.dim());
  for (Eigen::Index h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(ds.classes);
  return std::make_unique<MlpClassifier>(ds, std::move(sizes), aug);
}

Problem build_problem(const RunConfig& cfg) {
  Problem p;
  if (cfg.data_kind == "mnist") {
    const fs::path dir = resolve_data_dir(cfg.data_dir);
    p.train = read_idx(find_idx_file(dir, "train-images-idx3-ubyte"),
                       find_idx_file(dir, "train-labels-idx1-ubyte"));
    p.val = read_idx(find_idx_file(dir, "t10k-images-idx3-ubyte"),
                     find_idx_file(dir, "t10k-labels-idx1-ubyte"));
  } else {
    SynthSpec spec = cfg.synth;
    spec.seed = cfg.seed;
    SynthResult sr = synth_planted(spec);
    const Eigen::Index n_val = static_cast<Eigen::Index>(
        std::max<double>(1.0, cfg.val_fraction * static_cast<double>(spec.n)));
    const Eigen::Index n_train = spec.n - n_val;
    if (n_train <= 0) throw ConfigError("val_fraction leaves no training data");
    p.train.features = sr.data.features.topRows(n_train);
    p.train.labels = sr.data.labels.head(n_train);
    p.val.features = sr.data.features.bottomRows(n_val);
    p.val.labels = sr.data.labels.tail(n_val);
    p.train.classes = p.val.classes = sr.data.classes;
  }
  const int classes = std::max(p.train.classes, p.val.classes);
  p.train.classes = p.val.classes = std::max(classes, 2);
  p.train.validate();
  p.val.validate();

  Augmentation aug{cfg.augment_noise};
  p.loss = make_oracle(cfg, p.train, aug);
  p.val_eval = make_oracle(cfg, p.val, Augmentation{});

  const LayoutPtr& layout = p.loss->layout();
  if (cfg.reg_kind == "none") {
    p.reg = std::make_unique<NoneRegularizer>();
  } else if (cfg.reg_kind == "l1") {
    std::vector<int> idx;
    for (int li = 0; li < layout->num_layers(); ++li)
      if (layout->layer(li).penalized)
        for (Eigen::Index k = 0; k < layout->layer(li).size(); ++k)
          idx.push_back(static_cast<int>(layout->offset(li) + k));
    Eigen::VectorXi penalized(idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
      penalized[static_cast<int>(i)] = idx[i];
    p.reg = std::make_unique<L1Regularizer>(layout->total_size(), cfg.lambda,
                                            std::move(penalized));
  } else if (cfg.reg_kind == "group-lasso") {
    auto gl = std::make_unique<GroupLassoRegularizer>(make_group_layout(
        *layout, parse_grouping_rule(cfg.grouping), cfg.lambda));
    p.group_layout = &gl->groups();
    p.reg = std::move(gl);
  } else {
    for (int li = 0; li < layout->num_layers(); ++li)
      if (layout->layer(li).penalized)
        p.matrix_shapes.emplace_back(layout->layer(li).shape[0],
                                     layout->layer(li).shape[1]);
    p.reg = std::make_unique<NuclearNormRegularizer>(layout, cfg.lambda);
  }
  return p;
}

Eigen::VectorXd initial_point(const RunConfig& cfg, Eigen::Index dim) {
  if (cfg.init_scale <= 0.0) return Eigen::VectorXd::Zero(dim);
  std::mt19937_64 rng(derive_seed(cfg.seed, /*purpose=*/0x494e4954ULL));
  std::normal_distribution<double> normal(0.0, cfg.init_scale);
  Eigen::VectorXd w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w[i] = normal(rng);
  return w;
}

double pattern_sparsity(const RunConfig& cfg, const Problem& p,
                        const StructurePattern& pat) {
  if (cfg.reg_kind == "group-lasso")
    return weighted_group_sparsity(pat, *p.group_layout);
  if (cfg.reg_kind == "l1") {
    if (pat.group_zero.empty()) return 0.0;
    double z = 0;
    for (auto f : pat.group_zero) z += f;
    return z / static_cast<double>(pat.group_zero.size());
  }
  return 0.0;
}

}  // namespace

int run_training(const RunConfig& cfg, std::ostream& log) {
  const auto t_start = std::chrono::steady_clock::now();
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    Problem p = build_problem(cfg);
    const Eigen::Index dim = p.loss->layout()->total_size();
    Eigen::VectorXd w = initial_point(cfg, dim);
    Eigen::VectorXd w_hat = w;

    SolveOptions pg{.max_iters = cfg.t2, .tol = 1e-6,
                    .early_stop = cfg.early_stop, .min_iters = cfg.min_pg_iters};
    std::unique_ptr<RamdaOptimizer> ramda;
    std::unique_ptr<RmdaOptimizer> rmda;
    std::unique_ptr<ProxGenOptimizer> proxgen;
    std::unique_ptr<ProxSgdOptimizer> proxsgd;
    if (cfg.optimizer == "ramda") {
      ramda = std::make_unique<RamdaOptimizer>(p.reg.get(), w,
                                               cfg.schedule.eps_stab0, pg);
    } else if (cfg.optimizer == "rmda") {
      rmda = std::make_unique<RmdaOptimizer>(p.reg.get(), w);
    } else if (cfg.optimizer == "proxgen") {
      ProxGenOptimizer::Options opts;
      opts.rho0 = cfg.rho0;
      opts.mu = cfg.mu;
      opts.pg = pg;
      opts.pg.min_iters = std::max(2, cfg.min_pg_iters);
      proxgen = std::make_unique<ProxGenOptimizer>(p.reg.get(), dim, opts);
    } else {
      proxsgd =
          std::make_unique<ProxSgdOptimizer>(p.reg.get(), dim, cfg.proxsgd_rho);
    }

    fs::create_directories(cfg.out_dir);
    {
      std::ofstream snap(cfg.resolved_config_path());
      snap << cfg.to_json().dump(2) << "\n";
    }
    std::ofstream csv(cfg.csv_path());
    if (!csv) throw DataError("cannot open " + cfg.csv_path());
    csv << "epoch,train_loss,val_metric,group_sparsity,rank_level,"
           "pg_iters_mean,cert_mean,pattern_hash\n";

    const Schedule& sched = cfg.schedule;
    const int total_epochs = sched.total_epochs();
    std::vector<int> val_idx(p.val.size());
    for (size_t i = 0; i < val_idx.size(); ++i) val_idx[i] = static_cast<int>(i);

    std::vector<std::uint64_t> hashes;
    std::vector<EpochRecord> records;
    long global_t = 0, final_stage_step = 0;
    int prev_stage = 0;
    double best_sparsity = 0.0;
    double pg_iters_total = 0.0;
    long steps_total = 0;

    for (int epoch = 0; epoch < total_epochs; ++epoch) {
      const int stage = sched.stage_of_epoch(epoch);
      if (epoch > 0 && stage != prev_stage) {
        if (ramda) ramda->restart(w, sched.eps_stab_decay);
        if (rmda) rmda->restart(w);
      }
      prev_stage = stage;
      const double eta = sched.eta(stage);

      double loss_sum = 0.0, iters_sum = 0.0, cert_sum = 0.0;
      const auto epoch_batches =
          batches(p.train.size(), cfg.batch_size, epoch, cfg.seed);
      for (size_t k = 0; k < epoch_batches.size(); ++k) {
        ++global_t;
        if (sched.is_final_stage(stage)) ++final_stage_step;
        const double c = sched.momentum_c(stage, final_stage_step);
        const double eps_t = sched.eps_t(global_t);
        const std::uint64_t draw = derive_seed(
            cfg.seed, /*purpose=*/0x47524144ULL,
            static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(k));
        auto [loss, grad] = p.loss->loss_and_grad(w, epoch_batches[k], draw);
        loss_sum += loss;

        if (ramda) {
          StepResult r = ramda->step(w, grad, eta, c, eps_t);
          w = std::move(r.w);
          w_hat = std::move(r.w_hat);
          iters_sum += r.report.iterations;
          cert_sum += r.report.certificate;
        } else if (rmda) {
          StepResult r = rmda->step(w, grad, eta, c);
          w = std::move(r.w);
          w_hat = std::move(r.w_hat);
        } else if (proxgen) {
          StepResult r = proxgen->step(w, grad, eta, eps_t);
          w = std::move(r.w);
          w_hat = w;
          iters_sum += r.report.iterations;
          cert_sum += r.report.certificate;
        } else {
          w = proxsgd->step(w, grad, eta);
          w_hat = w;
        }
      }
      const auto n_steps = static_cast<double>(epoch_batches.size());
      pg_iters_total += iters_sum;
      steps_total += static_cast<long>(epoch_batches.size());

      EpochRecord rec;
      rec.epoch = epoch;
      rec.train_loss = loss_sum / n_steps;
      rec.val_metric = p.val_eval->accuracy(w, val_idx);
      const StructurePattern pat = p.reg->extract_pattern(w_hat, cfg.rank_tol);
      rec.group_sparsity = pattern_sparsity(cfg, p, pat);
      rec.rank_level = cfg.reg_kind == "nuclear"
                           ? low_rank_level(pat, p.matrix_shapes)
                           : 0.0;
      rec.pg_iters_mean = iters_sum / n_steps;
      rec.cert_mean = cert_sum / n_steps;
      rec.pattern_hash = pat.hash();
      best_sparsity = std::max(best_sparsity, rec.group_sparsity);
      hashes.push_back(rec.pattern_hash);
      records.push_back(rec);

      csv << rec.epoch << ',' << fmt_double(rec.train_loss) << ','
          << fmt_double(rec.val_metric) << ','
          << fmt_double(rec.group_sparsity) << ','
          << fmt_double(rec.rank_level) << ','
          << fmt_double(rec.pg_iters_mean) << ',' << fmt_double(rec.cert_mean)
          << ',' << rec.pattern_hash << '\n';
      log << "epoch " << rec.epoch << " loss " << rec.train_loss << " val "
          << rec.val_metric << " sparsity " << rec.group_sparsity << "\n";
    }

    const int window = std::max(1, static_cast<int>(std::lround(
                                       0.3 * static_cast<double>(total_epochs))));
    const IdentificationResult ident = identification_window(hashes, window);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();

    json summary;
    summary["config_name"] = cfg.name;
    summary["optimizer"] = cfg.optimizer;
    summary["seed"] = cfg.seed;
    summary["epochs"] = total_epochs;
    summary["final"] = {
        {"train_loss", records.back().train_loss},
        {"val_metric", records.back().val_metric},
        {"group_sparsity", records.back().group_sparsity},
        {"rank_level", records.back().rank_level},
        {"pattern_hash", records.back().pattern_hash},
    };
    summary["best_sparsity"] = best_sparsity;
    summary["identified"] = ident.identified;
    summary["first_stable_epoch"] = ident.first_stable_epoch;
    summary["identification_window"] = window;
    summary["mean_pg_iters"] =
        steps_total > 0 ? pg_iters_total / static_cast<double>(steps_total) : 0.0;
    summary["wall_time_sec"] = wall;
    summary["csv"] = cfg.csv_path();
    std::ofstream sf(cfg.summary_path());
    sf << summary.dump(2) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    log << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    log << "error: " << msg << "\n";
    if (msg.find("non-finite") != std::string::npos) return 4;
    if (msg.find("cannot open") != std::string::npos ||
        msg.find("missing data") != std::string::npos ||
        msg.find("truncated") != std::string::npos ||
        msg.find("bad magic") != std::string::npos)
      return 3;
    return 1;
  }
}

int run_oracle(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
    if (cfg.model_kind != "logreg")
      throw ConfigError("oracle requires the convex logreg model");
    Problem p = build_problem(cfg);
    OracleOptions opts;
    OracleResult res = oracle_solve(*p.loss, *p.reg, opts);

    fs::create_directories(cfg.out_dir);
    json out;
    out["config_name"] = cfg.name;
    out["gap"] = res.gap;
    out["iterations"] = res.iterations;
    out["converged"] = res.converged;
    out["pattern_hash"] = res.pattern.hash();
    out["group_zero"] = res.pattern.group_zero;
    out["layer_rank"] = res.pattern.layer_rank;
    out["w"] = std::vector<double>(res.w.data(), res.w.data() + res.w.size());
    const std::string path =
        (fs::path(cfg.out_dir) / (cfg.name + "_oracle.json")).string();
    std::ofstream f(path);
    f << out.dump() << "\n";
    log << "oracle gap " << res.gap << " after " << res.iterations
        << " iterations -> " << path << "\n";
    return res.converged ? 0 : 1;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    log << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int compare_summaries(const std::vector<std::string>& paths, std::ostream& os) {
  struct Row {
    std::vector<double> val, sparsity, pg_iters;
    int identified = 0, n = 0;
  };
  std::map<std::string, Row> groups;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) {
      os << "cannot open " << path << "\n";
      return 1;
    }
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      os << "bad summary " << path << ": " << e.what() << "\n";
      return 1;
    }
    const std::string key = j.value("config_name", std::string("?")) + "/" +
                            j.value("optimizer", std::string("?"));
    Row& r = groups[key];
    r.val.push_back(j.at("final").value("val_metric", 0.0));
    r.sparsity.push_back(j.at("final").value("group_sparsity", 0.0));
    r.pg_iters.push_back(j.value("mean_pg_iters", 0.0));
    r.identified += j.value("identified", false) ? 1 : 0;
    r.n += 1;
  }

  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  auto stdev = [&](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  char line[256];
  std::snprintf(line, sizeof(line), "%-40s %-18s %-18s %-11s %s",
                "run/optimizer", "val_metric", "group_sparsity", "identified",
                "pg_iters");
  os << line << "\n";
  for (const auto& [key, r] : groups) {
    std::string val, sp;
    if (r.n > 1) {
      std::snprintf(line, sizeof(line), "%.4f +- %.4f", mean(r.val),
                    stdev(r.val));
      val = line;
      std::snprintf(line, sizeof(line), "%.4f +- %.4f", mean(r.sparsity),
                    stdev(r.sparsity));
      sp = line;
    } else {
      std::snprintf(line, sizeof(line), "%.4f", mean(r.val));
      val = line;
      std::snprintf(line, sizeof(line), "%.4f", mean(r.sparsity));
      sp = line;
    }
    std::snprintf(line, sizeof(line), "%-40s %-18s %-18s %d/%-9d %.2f",
                  key.c_str(), val.c_str(), sp.c_str(), r.identified, r.n,
                  mean(r.pg_iters));
    os << line << "\n";
  }
  return 0;
}

}  // namespace ramda
