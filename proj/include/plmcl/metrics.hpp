#pragma once

#include "plmcl/types.hpp"

namespace plmcl {

struct EvalBatch {
  Matrix scores;    // N x L
  IntMatrix truth;  // N x L, entries in {0, 1}
};

// Precision averaged at positive ranks, descending score order with ties
// broken by original index (stable). Throws on zero positives.
Real average_precision(const Vector& scores, const IntVector& truth);

struct MapResult {
  Real map = 0.0;
  ArrayX per_class_ap;  // NaN for classes with no positives
  Index classes_evaluated = 0;
};

// Unweighted mean of per-class AP over classes with at least one positive;
// classes without positives are skipped and flagged with NaN. Throws when
// every class is empty.
MapResult mean_average_precision(const EvalBatch& batch);

}  // namespace plmcl
