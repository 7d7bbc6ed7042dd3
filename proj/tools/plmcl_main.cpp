// Command line for the partial-label momentum curriculum lab: synthetic data
// generation, observation masking, training, evaluation, and grid sweeps.

#include "plmcl/datagen.hpp"
#include "plmcl/error.hpp"
#include "plmcl/harness.hpp"
#include "plmcl/io.hpp"
#include "plmcl/model_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace plmcl;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitNumericError = 4;

struct CliOptions {
  std::string spec_path;
  std::string config_path;
  std::string data_path;
  std::string obs_path;
  std::string model_path;
  std::string in_path;
  std::string out_path;
  std::string setting = "fspl";
  double fraction = 1.0;
  std::uint64_t seed = 1;
  bool pseudo_trace = false;
};

void ensure_directory(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw DataError("cannot create directory " + path + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

Dataset load_split(const std::string& data_dir, const std::string& name) {
  return load_dataset_csv(join(data_dir, name));
}

void run_gen_data(const CliOptions& opt) {
  const SyntheticSpec spec = load_synthetic_spec(opt.spec_path);
  const GeneratedData data = generate(spec);
  ensure_directory(opt.out_path);
  save_dataset_csv(data.train, join(opt.out_path, "train.csv"));
  save_dataset_csv(data.test, join(opt.out_path, "test.csv"));
  save_mlp_json(data.teacher, join(opt.out_path, "teacher.json"));
  std::cout << "wrote " << data.train.images() << " train and " << data.test.images()
            << " test images (" << data.train.features_dim() << " features, "
            << data.train.classes() << " classes) to " << opt.out_path << "\n";
}

void run_mask(const CliOptions& opt) {
  const Dataset dataset = load_dataset_csv(opt.in_path);
  const SettingKind setting = setting_kind_from_string(opt.setting);
  const ObservationMatrix obs =
      make_observations(setting, opt.fraction, dataset.gt, Rng(opt.seed));
  save_observations_csv(obs, dataset.ids, opt.out_path);
  Index observed = 0;
  for (Index i = 0; i < obs.images(); ++i)
    for (Index j = 0; j < obs.classes(); ++j)
      if (obs.obs(i, j) != kUnobserved) ++observed;
  std::cout << "wrote " << opt.out_path << ": " << obs.labeled_set.size()
            << " labeled images, " << observed << " observed labels\n";
}

void check_observation_ids(const ObservationFile& obs, const Dataset& train_data,
                           const std::string& obs_path) {
  if (obs.ids.size() != train_data.ids.size()) {
    throw DataError(obs_path + ": " + std::to_string(obs.ids.size()) +
                    " rows for a training set of " + std::to_string(train_data.ids.size()));
  }
  for (std::size_t i = 0; i < obs.ids.size(); ++i) {
    if (obs.ids[i] != train_data.ids[i]) {
      throw DataError(obs_path + ": row " + std::to_string(i) + " has id " +
                      std::to_string(obs.ids[i]) + ", training set has " +
                      std::to_string(train_data.ids[i]));
    }
  }
}

void run_train(const CliOptions& opt) {
  const TrainConfig config = load_train_config(opt.config_path);
  const Dataset train_data = load_split(opt.data_path, "train.csv");
  const Dataset test_data = load_split(opt.data_path, "test.csv");
  const ObservationFile obs = load_observations_csv(opt.obs_path);
  check_observation_ids(obs, train_data, opt.obs_path);

  ensure_directory(opt.out_path);

  std::ofstream trace;
  EpochCallback on_epoch_end;
  if (opt.pseudo_trace) {
    trace.open(join(opt.out_path, "pseudo_trace.jsonl"), std::ios::binary);
    if (!trace) throw DataError("cannot write pseudo trace in " + opt.out_path);
    on_epoch_end = [&trace](int epoch, const MlpParams&,
                            const std::vector<PseudoState>& pseudo) {
      for (std::size_t i = 0; i < pseudo.size(); ++i) {
        nlohmann::ordered_json line;
        line["epoch"] = epoch;
        line["image"] = i;
        const PseudoState& state = pseudo[i];
        line["latent"] = std::vector<Real>(state.latent.data(),
                                           state.latent.data() + state.latent.size());
        line["soft"] =
            std::vector<Real>(state.soft.data(), state.soft.data() + state.soft.size());
        line["momentum"] = std::vector<Real>(
            state.momentum.data(), state.momentum.data() + state.momentum.size());
        trace << line.dump() << "\n";
      }
    };
  }

  const auto started = std::chrono::steady_clock::now();
  const TrainResult result =
      train(config, train_data, test_data, obs.observations, on_epoch_end);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  write_text_file(join(opt.out_path, "metrics.csv"), metrics_csv(result.report));
  write_text_file(join(opt.out_path, "summary.json"),
                  summary_json(config, result.report, train_data, test_data));
  save_mlp_json(result.best_params, join(opt.out_path, "model_best.json"));
  save_mlp_json(result.final_params, join(opt.out_path, "model_final.json"));

  std::cout << "best test mAP " << format_real(result.report.best_test_map) << " (epoch "
            << result.report.best_epoch << "), final "
            << format_real(result.report.final_test_map) << "; wall time "
            << elapsed.count() << " s\n";
}

void run_eval(const CliOptions& opt) {
  const MlpParams params = load_mlp_json(opt.model_path);
  const Dataset dataset = fs::is_directory(opt.data_path)
                              ? load_split(opt.data_path, "test.csv")
                              : load_dataset_csv(opt.data_path);
  const EvalResult result = evaluate(params, dataset);
  std::cout << "mAP " << format_real(result.map) << " over " << dataset.images()
            << " images\n";
  for (Index c = 0; c < result.per_class_ap.size(); ++c) {
    std::cout << "ap" << c << " " << format_real(result.per_class_ap(c)) << "\n";
  }
}

void run_sweep(const CliOptions& opt) {
  const SweepConfig config = load_sweep_config(opt.config_path);
  const Dataset train_data = load_split(config.data_dir, "train.csv");
  const Dataset test_data = load_split(config.data_dir, "test.csv");

  const auto started = std::chrono::steady_clock::now();
  const SweepResult result = sweep(config.base, config.axes, train_data, test_data);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  ensure_directory(opt.out_path);
  write_text_file(join(opt.out_path, "sweep_runs.csv"), sweep_runs_csv(result));
  write_text_file(join(opt.out_path, "sweep_summary.csv"), sweep_summary_csv(result));

  int failures = 0;
  for (const SweepRunRow& row : result.rows) {
    if (!row.ok) ++failures;
  }
  std::cout << result.rows.size() << " runs (" << failures << " failed) in "
            << elapsed.count() << " s; results in " << opt.out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-label momentum curriculum learning lab"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen->add_option("--spec", opt.spec_path, "Synthetic spec file (key = value)")->required();
  gen->add_option("--out", opt.out_path, "Output directory")->required();

  CLI::App* mask = app.add_subcommand("mask", "Derive an observation file from labels");
  mask->add_option("--setting", opt.setting, "ffl, fpl, fspl, sspl, or sfl")->required();
  mask->add_option("--fraction", opt.fraction, "Labeled fraction (default 1.0)");
  mask->add_option("--seed", opt.seed, "Mask seed (default 1)");
  mask->add_option("--in", opt.in_path, "Ground-truth CSV")->required();
  mask->add_option("--out", opt.out_path, "Observation CSV to write")->required();

  CLI::App* train_cmd = app.add_subcommand("train", "Train a classifier");
  train_cmd->add_option("--config", opt.config_path, "Train config file")->required();
  train_cmd->add_option("--data", opt.data_path, "Directory with train.csv/test.csv")
      ->required();
  train_cmd->add_option("--obs", opt.obs_path, "Observation CSV")->required();
  train_cmd->add_option("--out", opt.out_path, "Output directory")->required();
  train_cmd->add_flag("--pseudo-trace", opt.pseudo_trace,
                      "Also write pseudo_trace.jsonl (per-epoch pseudo-label states)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model");
  eval_cmd->add_option("--model", opt.model_path, "Model JSON")->required();
  eval_cmd->add_option("--data", opt.data_path, "Data directory or dataset CSV")
      ->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a grid of experiments");
  sweep_cmd->add_option("--config", opt.config_path, "Sweep config file")->required();
  sweep_cmd->add_option("--out", opt.out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (gen->parsed()) {
      run_gen_data(opt);
    } else if (mask->parsed()) {
      run_mask(opt);
    } else if (train_cmd->parsed()) {
      run_train(opt);
    } else if (eval_cmd->parsed()) {
      run_eval(opt);
    } else if (sweep_cmd->parsed()) {
      run_sweep(opt);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
