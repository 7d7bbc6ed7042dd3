#include "plmcl/labelsettings.hpp"

#include "plmcl/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plmcl {
namespace {

// Substream key for row subset sampling; row substreams use the row index,
// so subset draws never interfere with per-row draws. This is what makes
// mask_sspl(1.0) coincide bit-for-bit with mask_fspl.
constexpr std::uint64_t kSubsetStreamKey = 0xa11ce5ULL << 32;

void check_fraction(Real fraction, const char* op) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError(std::string(op) + ": fraction must be in (0, 1], got " +
                      std::to_string(fraction));
  }
}

std::vector<Index> positive_indices(const GroundTruthMatrix& gt, Index row) {
  std::vector<Index> idx;
  for (Index j = 0; j < gt.classes(); ++j)
    if (gt.labels(row, j) == 1) idx.push_back(j);
  return idx;
}

// Writes the single-positive mask for one row using its dedicated substream.
void apply_single_positive(const GroundTruthMatrix& gt, Index row, const Rng& rng,
                           IntMatrix& obs) {
  const std::vector<Index> positives = positive_indices(gt, row);
  if (positives.empty()) {
    throw DataError("single-positive mask: row " + std::to_string(row) +
                    " has no positive label");
  }
  Rng row_rng = rng.split(static_cast<std::uint64_t>(row));
  const Index pick = positives[static_cast<std::size_t>(
      row_rng.uniform_index(static_cast<Index>(positives.size())))];
  obs(row, pick) = kPositive;
}

// Sorted sample of floor(fraction * n) rows, uniform without replacement.
std::vector<Index> sample_rows(Index n, Real fraction, const Rng& rng) {
  const Index k = static_cast<Index>(std::floor(fraction * static_cast<Real>(n)));
  Rng subset_rng = rng.split(kSubsetStreamKey);
  std::vector<Index> perm = subset_rng.permutation(n);
  std::vector<Index> rows(perm.begin(), perm.begin() + k);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

ObservationMatrix mask_ffl(const GroundTruthMatrix& gt) {
  ObservationMatrix out;
  out.obs = gt.labels;
  out.labeled_set.resize(static_cast<std::size_t>(gt.images()));
  for (Index i = 0; i < gt.images(); ++i) out.labeled_set[static_cast<std::size_t>(i)] = i;
  return out;
}

ObservationMatrix mask_fspl(const GroundTruthMatrix& gt, const Rng& rng) {
  ObservationMatrix out;
  out.obs = IntMatrix::Constant(gt.images(), gt.classes(), kUnobserved);
  for (Index i = 0; i < gt.images(); ++i) {
    apply_single_positive(gt, i, rng, out.obs);
    out.labeled_set.push_back(i);
  }
  return out;
}

ObservationMatrix mask_sspl(const GroundTruthMatrix& gt, Real labeled_fraction,
                            const Rng& rng) {
  check_fraction(labeled_fraction, "mask_sspl");
  ObservationMatrix out;
  out.obs = IntMatrix::Constant(gt.images(), gt.classes(), kUnobserved);
  out.labeled_set = sample_rows(gt.images(), labeled_fraction, rng);
  for (Index row : out.labeled_set) {
    apply_single_positive(gt, row, rng, out.obs);
  }
  return out;
}

ObservationMatrix mask_fpl(const GroundTruthMatrix& gt, Real per_image_fraction,
                           const Rng& rng) {
  check_fraction(per_image_fraction, "mask_fpl");
  const Index L = gt.classes();
  const Index keep = static_cast<Index>(
      std::ceil(per_image_fraction * static_cast<Real>(L)));
  ObservationMatrix out;
  out.obs = IntMatrix::Constant(gt.images(), L, kUnobserved);
  for (Index i = 0; i < gt.images(); ++i) {
    Rng row_rng = rng.split(static_cast<std::uint64_t>(i));
    const std::vector<Index> perm = row_rng.permutation(L);
    for (Index k = 0; k < keep; ++k) {
      const Index j = perm[static_cast<std::size_t>(k)];
      out.obs(i, j) = gt.labels(i, j) == 1 ? kPositive : kNegative;
    }
    out.labeled_set.push_back(i);
  }
  return out;
}

ObservationMatrix mask_sfl(const GroundTruthMatrix& gt, Real labeled_fraction,
                           const Rng& rng) {
  check_fraction(labeled_fraction, "mask_sfl");
  ObservationMatrix out;
  out.obs = IntMatrix::Constant(gt.images(), gt.classes(), kUnobserved);
  out.labeled_set = sample_rows(gt.images(), labeled_fraction, rng);
  for (Index row : out.labeled_set) {
    for (Index j = 0; j < gt.classes(); ++j) {
      out.obs(row, j) = gt.labels(row, j) == 1 ? kPositive : kNegative;
    }
  }
  return out;
}

}  // namespace plmcl
