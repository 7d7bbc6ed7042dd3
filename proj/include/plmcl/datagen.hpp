#pragma once

#include "plmcl/labelsettings.hpp"
#include "plmcl/ndcore.hpp"
#include "plmcl/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plmcl {

struct SyntheticSpec {
  Index n_images = 2000;
  Index n_features = 20;
  Index n_classes = 10;
  Real target_label_cardinality = 2.5;  // mean positives per image, in [1, L]
  Real noise_std = 0.1;
  std::uint64_t seed = 1;
};

SyntheticSpec load_synthetic_spec(const std::string& path);

struct Dataset {
  Matrix features;  // N x d
  GroundTruthMatrix gt;
  std::string split;      // "train" or "test"
  std::vector<long> ids;  // row ids, unique across the train/test pair

  Index images() const { return features.rows(); }
  Index features_dim() const { return features.cols(); }
  Index classes() const { return gt.classes(); }
};

struct GeneratedData {
  Dataset train;
  Dataset test;
  MlpParams teacher;  // linear classifier that produced the labels
};

// Standard-normal features, random linear teacher, per-class bias calibrated
// by quantile so the empirical label cardinality tracks the target. Labels
// flip where Gaussian noise crosses the margin; rows left without a positive
// get their max-margin class forced positive.
GeneratedData generate(const SyntheticSpec& spec);

// Dataset CSV: header `id,f0..f{d-1},y0..y{L-1}`, decimal reals, labels
// {1,0}; UTF-8, LF, no quoting.
void save_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

struct ObservationFile {
  ObservationMatrix observations;
  std::vector<long> ids;
};

// Observation CSV: header `id,y0..y{L-1}`, labels {1,0,-1}.
void save_observations_csv(const ObservationMatrix& obs, const std::vector<long>& ids,
                           const std::string& path);
ObservationFile load_observations_csv(const std::string& path);

}  // namespace plmcl
