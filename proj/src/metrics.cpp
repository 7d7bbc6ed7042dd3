#include "plmcl/metrics.hpp"

#include "plmcl/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace plmcl {

Real average_precision(const Vector& scores, const IntVector& truth) {
  if (scores.size() != truth.size()) {
    throw DataError("average_precision: scores/truth size mismatch");
  }
  if (!scores.allFinite()) {
    throw DataError("average_precision: non-finite score");
  }
  const Index n = scores.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&scores](Index a, Index b) { return scores(a) > scores(b); });

  Index positives = 0;
  Real sum = 0.0;
  Index seen_positives = 0;
  for (Index rank = 1; rank <= n; ++rank) {
    const Index item = order[static_cast<std::size_t>(rank - 1)];
    if (truth(item) == 1) {
      ++seen_positives;
      sum += static_cast<Real>(seen_positives) / static_cast<Real>(rank);
    }
  }
  positives = seen_positives;
  if (positives == 0) {
    throw DataError("average_precision: no positive items");
  }
  return sum / static_cast<Real>(positives);
}

MapResult mean_average_precision(const EvalBatch& batch) {
  if (batch.scores.rows() != batch.truth.rows() ||
      batch.scores.cols() != batch.truth.cols()) {
    throw DataError("mean_average_precision: scores/truth shape mismatch");
  }
  const Index L = batch.scores.cols();
  MapResult result;
  result.per_class_ap = ArrayX::Constant(L, std::numeric_limits<Real>::quiet_NaN());
  Real sum = 0.0;
  for (Index c = 0; c < L; ++c) {
    const IntVector truth_col = batch.truth.col(c);
    if (truth_col.sum() == 0) continue;  // skipped, flagged as NaN
    const Real ap = average_precision(batch.scores.col(c), truth_col);
    result.per_class_ap(c) = ap;
    sum += ap;
    ++result.classes_evaluated;
  }
  if (result.classes_evaluated == 0) {
    throw DataError("mean_average_precision: no class has a positive item");
  }
  result.map = sum / static_cast<Real>(result.classes_evaluated);
  return result;
}

}  // namespace plmcl
