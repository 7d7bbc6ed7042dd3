#include "plmcl/harness.hpp"

#include "plmcl/error.hpp"
#include "plmcl/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace plmcl {
namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;

constexpr Real kLabelSmoothingEps = 0.1;

Real wan_default_weight(Index classes) {
  return classes > 1 ? 1.0 / static_cast<Real>(classes - 1) : 1.0;
}

struct PseudoSummary {
  Real confidence = 1.0;  // degenerate when nothing is unobserved
  Real agreement = 1.0;
};

PseudoSummary summarize_pseudo(const std::vector<PseudoState>& pseudo,
                               const GroundTruthMatrix& gt) {
  Real conf_sum = 0.0;
  Real agree_sum = 0.0;
  long long count = 0;
  for (std::size_t i = 0; i < pseudo.size(); ++i) {
    const PseudoState& state = pseudo[i];
    for (Index j = 0; j < state.classes(); ++j) {
      if (state.observed(j)) continue;
      conf_sum += std::abs(2.0 * state.soft(j) - 1.0);
      const bool predicted_positive = state.soft(j) > 0.5;
      const bool truly_positive = gt.labels(static_cast<Index>(i), j) == 1;
      agree_sum += predicted_positive == truly_positive ? 1.0 : 0.0;
      ++count;
    }
  }
  PseudoSummary out;
  if (count > 0) {
    out.confidence = conf_sum / static_cast<Real>(count);
    out.agreement = agree_sum / static_cast<Real>(count);
  }
  return out;
}

std::string sanitize_csv_field(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

Real median(std::vector<Real> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return std::numeric_limits<Real>::quiet_NaN();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kPlmcl: return "plmcl";
    case LossKind::kAn: return "an";
    case LossKind::kAnLs: return "an_ls";
    case LossKind::kWan: return "wan";
  }
  return "?";
}

std::string to_string(SettingKind kind) {
  switch (kind) {
    case SettingKind::kFfl: return "ffl";
    case SettingKind::kFpl: return "fpl";
    case SettingKind::kFspl: return "fspl";
    case SettingKind::kSspl: return "sspl";
    case SettingKind::kSfl: return "sfl";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "plmcl") return LossKind::kPlmcl;
  if (name == "an") return LossKind::kAn;
  if (name == "an_ls") return LossKind::kAnLs;
  if (name == "wan") return LossKind::kWan;
  throw ConfigError("unknown loss `" + name + "` (expected plmcl, an, an_ls, wan)");
}

SettingKind setting_kind_from_string(const std::string& name) {
  if (name == "ffl") return SettingKind::kFfl;
  if (name == "fpl") return SettingKind::kFpl;
  if (name == "fspl") return SettingKind::kFspl;
  if (name == "sspl") return SettingKind::kSspl;
  if (name == "sfl") return SettingKind::kSfl;
  throw ConfigError("unknown setting `" + name +
                    "` (expected ffl, fpl, fspl, sspl, sfl)");
}

void validate(const TrainConfig& config) {
  if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(config.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0)) {
    throw ConfigError("beta1 must lie in [0, 1)");
  }
  if (!(config.beta2 > 0.0)) throw ConfigError("beta2 must be positive");
  if (!(config.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(config.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (config.n < 1) throw ConfigError("n must be a positive integer");
  if (config.reg_weight < 0.0) throw ConfigError("reg_weight must be >= 0");
  if (!(config.expected_positives > 0.0)) {
    throw ConfigError("expected_positives must be positive");
  }
  if (config.hidden_width < 0) throw ConfigError("hidden_width must be >= 0");
  if (!(config.fraction > 0.0 && config.fraction <= 1.0)) {
    throw ConfigError("fraction must lie in (0, 1]");
  }
  if (config.two_phase) {
    if (config.two_phase->head_epochs < 1 || config.two_phase->finetune_epochs < 1) {
      throw ConfigError("two_phase epochs must be >= 1");
    }
  }
}

TrainConfig train_config_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& origin) {
  TrainConfig config;
  bool two_phase = false;
  TwoPhaseConfig phases;
  for (const auto& [key, value] : kv) {
    if (key == "loss") {
      config.loss = loss_kind_from_string(value);
    } else if (key == "setting") {
      config.setting = setting_kind_from_string(value);
    } else if (key == "fraction") {
      config.fraction = parse_real(value, key);
    } else if (key == "epochs") {
      config.epochs = static_cast<int>(parse_int(value, key));
    } else if (key == "batch_size") {
      config.batch_size = static_cast<int>(parse_int(value, key));
    } else if (key == "lr") {
      config.lr = parse_real(value, key);
    } else if (key == "beta1") {
      config.beta1 = parse_real(value, key);
    } else if (key == "beta2") {
      config.beta2 = parse_real(value, key);
    } else if (key == "alpha") {
      config.alpha = parse_real(value, key);
    } else if (key == "lambda") {
      config.lambda = parse_real(value, key);
    } else if (key == "n") {
      config.n = static_cast<int>(parse_int(value, key));
    } else if (key == "reg_weight") {
      config.reg_weight = parse_real(value, key);
    } else if (key == "expected_positives") {
      config.expected_positives = parse_real(value, key);
    } else if (key == "hidden_width") {
      config.hidden_width = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "two_phase") {
      two_phase = parse_bool(value, key);
    } else if (key == "head_epochs") {
      phases.head_epochs = static_cast<int>(parse_int(value, key));
    } else if (key == "finetune_epochs") {
      phases.finetune_epochs = static_cast<int>(parse_int(value, key));
    } else {
      throw ConfigError(origin + ": unknown config key `" + key + "`");
    }
  }
  if (!two_phase && (kv.count("head_epochs") || kv.count("finetune_epochs"))) {
    throw ConfigError(origin + ": head_epochs/finetune_epochs require two_phase = true");
  }
  if (two_phase) config.two_phase = phases;
  validate(config);
  return config;
}

TrainConfig load_train_config(const std::string& path) {
  return train_config_from_kv(parse_kv_file(path), path);
}

ObservationMatrix make_observations(SettingKind setting, Real fraction,
                                    const GroundTruthMatrix& gt, const Rng& rng) {
  switch (setting) {
    case SettingKind::kFfl: return mask_ffl(gt);
    case SettingKind::kFpl: return mask_fpl(gt, fraction, rng);
    case SettingKind::kFspl: return mask_fspl(gt, rng);
    case SettingKind::kSspl: return mask_sspl(gt, fraction, rng);
    case SettingKind::kSfl: return mask_sfl(gt, fraction, rng);
  }
  throw ConfigError("make_observations: bad setting");
}

TrainResult train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset& test_data, const ObservationMatrix& observations,
                  const EpochCallback& on_epoch_end) {
  validate(config);
  const Index n_images = train_data.images();
  const Index n_features = train_data.features_dim();
  const Index n_classes = train_data.classes();
  if (n_images == 0) throw DataError("train: empty training set");
  if (observations.images() != n_images || observations.classes() != n_classes) {
    throw DataError("train: observations are " + std::to_string(observations.images()) +
                    "x" + std::to_string(observations.classes()) + ", dataset is " +
                    std::to_string(n_images) + "x" + std::to_string(n_classes));
  }
  if (test_data.images() == 0) throw DataError("train: empty test set");
  if (test_data.features_dim() != n_features || test_data.classes() != n_classes) {
    throw DataError("train: test set shape does not match the training set");
  }

  const int total_epochs = config.total_epochs();
  const Rng root(config.seed);
  Rng init_rng = root.split(kInitStream);
  MlpParams params =
      random_mlp(n_features, config.hidden_width, n_classes, init_rng);

  std::vector<PseudoState> pseudo;
  pseudo.reserve(static_cast<std::size_t>(n_images));
  for (Index i = 0; i < n_images; ++i) {
    pseudo.push_back(init_pseudo(observations.obs.row(i).transpose()));
  }

  const PseudoHyper hyper{config.beta1, config.alpha, config.lambda, config.n};
  const PlmclLossParams loss_params{config.beta2, config.reg_weight,
                                    config.expected_positives};
  const Real gamma_w = wan_default_weight(n_classes);

  TrainResult result;
  result.report.best_test_map = -1.0;

  const Rng shuffle_root = root.split(kShuffleStream);
  for (int epoch = 0; epoch < total_epochs; ++epoch) {
    const Real phi = static_cast<Real>(epoch) / static_cast<Real>(total_epochs);
    const bool head_phase =
        config.two_phase && epoch < config.two_phase->head_epochs;

    Rng epoch_rng = shuffle_root.split(static_cast<std::uint64_t>(epoch));
    const std::vector<Index> order = epoch_rng.permutation(n_images);

    LossBreakdown epoch_loss;
    Index cursor = 0;
    int batch_index = 0;
    while (cursor < n_images) {
      const Index batch_end = std::min<Index>(cursor + config.batch_size, n_images);
      const Real batch_scale = 1.0 / static_cast<Real>(batch_end - cursor);
      MlpParams batch_grad = zeros_like(params);

      for (Index b = cursor; b < batch_end; ++b) {
        const Index image = order[static_cast<std::size_t>(b)];
        const ForwardCache cache =
            forward(params, train_data.features.row(image).transpose());
        const IntRowRef obs_row(observations.obs.row(image).transpose());

        LossBreakdown breakdown;
        Vector grad;
        if (config.loss == LossKind::kPlmcl) {
          auto& state = pseudo[static_cast<std::size_t>(image)];
          state = epoch_update(std::move(state), cache.probs, hyper);
          breakdown = loss_plmcl(cache.probs, state, obs_row, phi, loss_params);
          grad = loss_plmcl_grad(cache.probs, state, obs_row, phi, loss_params);
        } else if (config.loss == LossKind::kAn) {
          breakdown.obs_term = loss_an(cache.probs, obs_row);
          breakdown.total = breakdown.obs_term;
          grad = loss_an_grad(cache.probs, obs_row);
        } else if (config.loss == LossKind::kAnLs) {
          breakdown.obs_term = loss_an_ls(cache.probs, obs_row, kLabelSmoothingEps);
          breakdown.total = breakdown.obs_term;
          grad = loss_an_ls_grad(cache.probs, obs_row, kLabelSmoothingEps);
        } else {
          breakdown.obs_term = loss_wan(cache.probs, obs_row, gamma_w);
          breakdown.total = breakdown.obs_term;
          grad = loss_wan_grad(cache.probs, obs_row, gamma_w);
        }

        if (!std::isfinite(breakdown.total)) {
          throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batch_index) + ", image " +
                             std::to_string(image));
        }
        epoch_loss.obs_term += breakdown.obs_term;
        epoch_loss.unobs_term += breakdown.unobs_term;
        epoch_loss.regularizer += breakdown.regularizer;
        epoch_loss.total += breakdown.total;

        accumulate(batch_grad, backward(params, cache, grad), batch_scale);
      }

      if (head_phase && params.hidden() > 0) {
        batch_grad.w1.setZero();
        batch_grad.b1.setZero();
      }
      if (!all_finite(batch_grad)) {
        throw NumericError("train: non-finite gradient at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      params = sgd_step(std::move(params), batch_grad, config.lr);
      cursor = batch_end;
      ++batch_index;
    }

    EpochRow row;
    row.epoch = epoch;
    row.phi = phi;
    const Real image_scale = 1.0 / static_cast<Real>(n_images);
    row.train_loss.obs_term = epoch_loss.obs_term * image_scale;
    row.train_loss.unobs_term = epoch_loss.unobs_term * image_scale;
    row.train_loss.regularizer = epoch_loss.regularizer * image_scale;
    row.train_loss.total = epoch_loss.total * image_scale;

    const Matrix train_scores = predict_batch(params, train_data.features);
    row.train_map =
        mean_average_precision({train_scores, train_data.gt.labels}).map;
    const Matrix test_scores = predict_batch(params, test_data.features);
    const MapResult test_eval =
        mean_average_precision({test_scores, test_data.gt.labels});
    row.test_map = test_eval.map;
    row.test_per_class_ap = test_eval.per_class_ap;

    const PseudoSummary pseudo_summary = summarize_pseudo(pseudo, train_data.gt);
    row.pseudo_confidence = pseudo_summary.confidence;
    row.pseudo_agreement = pseudo_summary.agreement;

    result.report.rows.push_back(std::move(row));
    if (test_eval.map > result.report.best_test_map) {
      result.report.best_test_map = test_eval.map;
      result.report.best_epoch = epoch;
      result.best_params = params;
    }
    if (on_epoch_end) on_epoch_end(epoch, params, pseudo);
  }

  result.report.final_test_map = result.report.rows.back().test_map;
  result.final_params = params;
  result.pseudo = std::move(pseudo);
  return result;
}

EvalResult evaluate(const MlpParams& params, const Dataset& dataset) {
  if (dataset.images() == 0) throw DataError("evaluate: empty dataset");
  const Matrix scores = predict_batch(params, dataset.features);
  const MapResult eval = mean_average_precision({scores, dataset.gt.labels});
  return EvalResult{eval.map, eval.per_class_ap};
}

SweepResult sweep(const TrainConfig& base, const SweepAxes& axes,
                  const Dataset& train_data, const Dataset& test_data) {
  if (axes.settings.empty() || axes.losses.empty() || axes.seeds.empty()) {
    throw ConfigError("sweep: every axis needs at least one value");
  }
  SweepResult result;
  for (const auto& [setting, fraction] : axes.settings) {
    for (const LossKind loss : axes.losses) {
      for (const std::uint64_t seed : axes.seeds) {
        SweepRunRow row;
        row.setting = setting;
        row.fraction = fraction;
        row.loss = loss;
        row.seed = seed;
        try {
          TrainConfig config = base;
          config.setting = setting;
          config.fraction = fraction;
          config.loss = loss;
          config.seed = seed;
          const ObservationMatrix obs =
              make_observations(setting, fraction, train_data.gt, Rng(seed));
          const TrainResult run = train(config, train_data, test_data, obs);
          row.ok = true;
          row.best_epoch = run.report.best_epoch;
          row.best_test_map = run.report.best_test_map;
          row.final_test_map = run.report.final_test_map;
        } catch (const std::exception& e) {
          row.ok = false;
          row.error = e.what();
        }
        result.rows.push_back(std::move(row));
      }
    }
  }

  for (const auto& [setting, fraction] : axes.settings) {
    for (const LossKind loss : axes.losses) {
      SweepPivotCell cell;
      cell.setting = setting;
      cell.fraction = fraction;
      cell.loss = loss;
      std::vector<Real> values;
      for (const SweepRunRow& row : result.rows) {
        if (row.setting == setting && row.fraction == fraction && row.loss == loss &&
            row.ok) {
          values.push_back(row.best_test_map);
        }
      }
      cell.runs_ok = static_cast<int>(values.size());
      cell.median_best_test_map = median(std::move(values));
      result.pivot.push_back(cell);
    }
  }
  return result;
}

SweepConfig load_sweep_config(const std::string& path) {
  auto kv = parse_kv_file(path);
  SweepConfig config;

  const auto take = [&kv](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string value = it->second;
    kv.erase(it);
    return value;
  };

  if (auto dir = take("data_dir")) {
    config.data_dir = *dir;
  } else {
    throw ConfigError(path + ": sweep config needs `data_dir`");
  }
  const auto settings = take("sweep_settings");
  const auto losses = take("sweep_losses");
  const auto seeds = take("sweep_seeds");

  config.base = train_config_from_kv(kv, path);

  if (settings) {
    for (const std::string& item : split(*settings, ',')) {
      const std::string entry = trim(item);
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      if (colon == std::string::npos) {
        config.axes.settings.emplace_back(setting_kind_from_string(entry), 1.0);
      } else {
        config.axes.settings.emplace_back(
            setting_kind_from_string(trim(entry.substr(0, colon))),
            parse_real(trim(entry.substr(colon + 1)), "sweep_settings"));
      }
    }
  }
  if (config.axes.settings.empty()) {
    config.axes.settings.emplace_back(config.base.setting, config.base.fraction);
  }

  if (losses) {
    for (const std::string& item : split(*losses, ',')) {
      const std::string entry = trim(item);
      if (!entry.empty()) config.axes.losses.push_back(loss_kind_from_string(entry));
    }
  }
  if (config.axes.losses.empty()) config.axes.losses.push_back(config.base.loss);

  if (seeds) {
    for (const std::string& item : split(*seeds, ',')) {
      const std::string entry = trim(item);
      if (!entry.empty()) {
        config.axes.seeds.push_back(
            static_cast<std::uint64_t>(parse_int(entry, "sweep_seeds")));
      }
    }
  }
  if (config.axes.seeds.empty()) config.axes.seeds.push_back(config.base.seed);

  return config;
}

std::string metrics_csv(const MetricsReport& report) {
  std::ostringstream out;
  const Index n_classes =
      report.rows.empty() ? 0 : report.rows.front().test_per_class_ap.size();
  out << "epoch,phi,loss_total,loss_obs,loss_unobs,loss_reg,train_map,test_map,"
         "pseudo_confidence,pseudo_agreement";
  for (Index c = 0; c < n_classes; ++c) out << ",ap" << c;
  out << "\n";
  for (const EpochRow& row : report.rows) {
    out << row.epoch << ',' << format_real(row.phi) << ','
        << format_real(row.train_loss.total) << ',' << format_real(row.train_loss.obs_term)
        << ',' << format_real(row.train_loss.unobs_term) << ','
        << format_real(row.train_loss.regularizer) << ',' << format_real(row.train_map)
        << ',' << format_real(row.test_map) << ',' << format_real(row.pseudo_confidence)
        << ',' << format_real(row.pseudo_agreement);
    for (Index c = 0; c < row.test_per_class_ap.size(); ++c) {
      out << ',' << format_real(row.test_per_class_ap(c));
    }
    out << "\n";
  }
  return out.str();
}

std::string summary_json(const TrainConfig& config, const MetricsReport& report,
                         const Dataset& train_data, const Dataset& test_data) {
  nlohmann::ordered_json doc;
  doc["best_epoch"] = report.best_epoch;
  doc["best_test_map"] = report.best_test_map;
  doc["final_test_map"] = report.final_test_map;
  doc["epochs_run"] = report.rows.size();

  nlohmann::ordered_json cfg;
  cfg["loss"] = to_string(config.loss);
  cfg["setting"] = to_string(config.setting);
  cfg["fraction"] = config.fraction;
  cfg["epochs"] = config.epochs;
  cfg["batch_size"] = config.batch_size;
  cfg["lr"] = config.lr;
  cfg["beta1"] = config.beta1;
  cfg["beta2"] = config.beta2;
  cfg["alpha"] = config.alpha;
  cfg["lambda"] = config.lambda;
  cfg["n"] = config.n;
  cfg["reg_weight"] = config.reg_weight;
  cfg["expected_positives"] = config.expected_positives;
  cfg["hidden_width"] = config.hidden_width;
  cfg["seed"] = config.seed;
  if (config.two_phase) {
    cfg["two_phase"] = {{"head_epochs", config.two_phase->head_epochs},
                        {"finetune_epochs", config.two_phase->finetune_epochs}};
  } else {
    cfg["two_phase"] = nullptr;
  }
  doc["config"] = std::move(cfg);

  nlohmann::ordered_json data;
  data["train_images"] = train_data.images();
  data["test_images"] = test_data.images();
  data["features"] = train_data.features_dim();
  data["classes"] = train_data.classes();
  doc["data"] = std::move(data);

  return doc.dump(2) + "\n";
}

std::string sweep_runs_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "setting,fraction,loss,seed,status,best_epoch,best_test_map,final_test_map\n";
  for (const SweepRunRow& row : result.rows) {
    out << to_string(row.setting) << ',' << format_real(row.fraction) << ','
        << to_string(row.loss) << ',' << row.seed << ','
        << (row.ok ? "ok" : "error: " + sanitize_csv_field(row.error)) << ','
        << row.best_epoch << ',' << format_real(row.best_test_map) << ','
        << format_real(row.final_test_map) << "\n";
  }
  return out.str();
}

std::string sweep_summary_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "setting,fraction,loss,runs_ok,median_best_test_map\n";
  for (const SweepPivotCell& cell : result.pivot) {
    out << to_string(cell.setting) << ',' << format_real(cell.fraction) << ','
        << to_string(cell.loss) << ',' << cell.runs_ok << ','
        << format_real(cell.median_best_test_map) << "\n";
  }
  return out.str();
}

}  // namespace plmcl
