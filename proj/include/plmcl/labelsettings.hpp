#pragma once

#include "plmcl/rng.hpp"
#include "plmcl/types.hpp"

#include <vector>

namespace plmcl {

// Per-(image, class) observation state, stored as int so the matrices
// round-trip the CSV encoding unchanged.
enum Observation : int {
  kNegative = 0,
  kPositive = 1,
  kUnobserved = -1,
};

struct GroundTruthMatrix {
  IntMatrix labels;  // N x L, entries in {0, 1}; every row has >= 1 positive

  Index images() const { return labels.rows(); }
  Index classes() const { return labels.cols(); }
};

struct ObservationMatrix {
  IntMatrix obs;                   // N x L, entries in {1, 0, -1}
  std::vector<Index> labeled_set;  // rows with >= 1 observation, ascending

  Index images() const { return obs.rows(); }
  Index classes() const { return obs.cols(); }
};

// All five generators are pure given the Rng value: they derive per-row
// substreams via Rng::split and never advance the caller's stream, so a
// given (gt, parameters, seed) always produces the same matrix.

// Every label observed.
ObservationMatrix mask_ffl(const GroundTruthMatrix& gt);

// Exactly one positive per row, chosen uniformly among that row's positives.
ObservationMatrix mask_fspl(const GroundTruthMatrix& gt, const Rng& rng);

// floor(labeled_fraction * N) rows get a single positive, the rest are fully
// unobserved. Fraction 1 reduces bit-exactly to mask_fspl.
ObservationMatrix mask_sspl(const GroundTruthMatrix& gt, Real labeled_fraction,
                            const Rng& rng);

// Each row keeps ceil(per_image_fraction * L) uniformly chosen entries
// (positives and negatives mixed). Fraction 1 equals mask_ffl.
ObservationMatrix mask_fpl(const GroundTruthMatrix& gt, Real per_image_fraction,
                           const Rng& rng);

// A sampled subset of rows fully observed, the rest fully unobserved.
ObservationMatrix mask_sfl(const GroundTruthMatrix& gt, Real labeled_fraction,
                           const Rng& rng);

}  // namespace plmcl
