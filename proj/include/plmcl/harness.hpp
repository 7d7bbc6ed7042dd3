#pragma once

#include "plmcl/datagen.hpp"
#include "plmcl/labelsettings.hpp"
#include "plmcl/losses.hpp"
#include "plmcl/metrics.hpp"
#include "plmcl/ndcore.hpp"
#include "plmcl/pseudo.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plmcl {

enum class LossKind { kPlmcl, kAn, kAnLs, kWan };
enum class SettingKind { kFfl, kFpl, kFspl, kSspl, kSfl };

std::string to_string(LossKind kind);
std::string to_string(SettingKind kind);
LossKind loss_kind_from_string(const std::string& name);
SettingKind setting_kind_from_string(const std::string& name);

struct TwoPhaseConfig {
  int head_epochs = 5;      // output layer only
  int finetune_epochs = 5;  // all parameters
};

struct TrainConfig {
  LossKind loss = LossKind::kPlmcl;
  SettingKind setting = SettingKind::kSspl;
  Real fraction = 1.0;
  int epochs = 10;
  int batch_size = 16;
  Real lr = 1e-2;
  Real beta1 = 0.7;
  Real beta2 = 0.6;
  Real alpha = 1.0;
  Real lambda = 4.0;
  int n = 2;
  Real reg_weight = 0.1;
  Real expected_positives = 1.0;
  int hidden_width = 0;
  std::uint64_t seed = 1;
  std::optional<TwoPhaseConfig> two_phase;

  // Epochs actually run; phi is measured against this.
  int total_epochs() const {
    return two_phase ? two_phase->head_epochs + two_phase->finetune_epochs : epochs;
  }
};

void validate(const TrainConfig& config);
TrainConfig train_config_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& origin);
TrainConfig load_train_config(const std::string& path);

struct EpochRow {
  int epoch = 0;
  Real phi = 0.0;
  LossBreakdown train_loss;
  Real train_map = 0.0;
  Real test_map = 0.0;
  Real pseudo_confidence = 0.0;  // mean |2 soft - 1| over unobserved entries
  Real pseudo_agreement = 0.0;   // fraction of unobserved entries matching gt
  ArrayX test_per_class_ap;
};

struct MetricsReport {
  std::vector<EpochRow> rows;
  int best_epoch = -1;
  Real best_test_map = 0.0;
  Real final_test_map = 0.0;
};

using EpochCallback =
    std::function<void(int epoch, const MlpParams& params,
                       const std::vector<PseudoState>& pseudo)>;

struct TrainResult {
  MlpParams best_params;
  MlpParams final_params;
  std::vector<PseudoState> pseudo;
  MetricsReport report;
};

// Algorithm: per epoch, over a seeded shuffle in mini-batches — forward,
// pseudo-label epoch update (PLMCL only), loss, classifier backprop, SGD
// step. Holds exactly one PseudoState per image for the whole run.
TrainResult train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset& test_data, const ObservationMatrix& observations,
                  const EpochCallback& on_epoch_end = {});

struct EvalResult {
  Real map = 0.0;
  ArrayX per_class_ap;
};

EvalResult evaluate(const MlpParams& params, const Dataset& dataset);

// Mask generation dispatch used by the CLI and the sweep.
ObservationMatrix make_observations(SettingKind setting, Real fraction,
                                    const GroundTruthMatrix& gt, const Rng& rng);

struct SweepAxes {
  std::vector<std::pair<SettingKind, Real>> settings;  // (setting, fraction)
  std::vector<LossKind> losses;
  std::vector<std::uint64_t> seeds;
};

struct SweepRunRow {
  SettingKind setting = SettingKind::kSspl;
  Real fraction = 1.0;
  LossKind loss = LossKind::kPlmcl;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int best_epoch = -1;
  Real best_test_map = 0.0;
  Real final_test_map = 0.0;
};

struct SweepPivotCell {
  SettingKind setting = SettingKind::kSspl;
  Real fraction = 1.0;
  LossKind loss = LossKind::kPlmcl;
  int runs_ok = 0;
  Real median_best_test_map = 0.0;
};

struct SweepResult {
  std::vector<SweepRunRow> rows;
  std::vector<SweepPivotCell> pivot;  // median over seeds per cell
};

// Cross-product of the axes; per-run failures are recorded in the row and
// the sweep continues.
SweepResult sweep(const TrainConfig& base, const SweepAxes& axes,
                  const Dataset& train_data, const Dataset& test_data);

struct SweepConfig {
  TrainConfig base;
  SweepAxes axes;
  std::string data_dir;
};

SweepConfig load_sweep_config(const std::string& path);

// Deterministic text renderings of the run outputs.
std::string metrics_csv(const MetricsReport& report);
std::string summary_json(const TrainConfig& config, const MetricsReport& report,
                         const Dataset& train_data, const Dataset& test_data);
std::string sweep_runs_csv(const SweepResult& result);
std::string sweep_summary_csv(const SweepResult& result);

}  // namespace plmcl
