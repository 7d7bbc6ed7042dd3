#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plmcl/error.hpp"
#include "plmcl/labelsettings.hpp"
#include "plmcl/rng.hpp"

#include <string>
#include <vector>

using namespace plmcl;

namespace {

GroundTruthMatrix make_gt(std::initializer_list<std::initializer_list<int>> rows) {
  GroundTruthMatrix gt;
  const Index n = static_cast<Index>(rows.size());
  const Index l = static_cast<Index>(rows.begin()->size());
  gt.labels.resize(n, l);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (int v : row) gt.labels(i, j++) = v;
    ++i;
  }
  return gt;
}

GroundTruthMatrix random_gt(Index n, Index l, Rng& rng) {
  GroundTruthMatrix gt;
  gt.labels.resize(n, l);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < l; ++j) gt.labels(i, j) = rng.uniform_real() < 0.3 ? 1 : 0;
    if (gt.labels.row(i).sum() == 0) gt.labels(i, rng.uniform_index(l)) = 1;
  }
  return gt;
}

Index observed_count(const ObservationMatrix& obs) {
  Index count = 0;
  for (Index i = 0; i < obs.images(); ++i)
    for (Index j = 0; j < obs.classes(); ++j)
      if (obs.obs(i, j) != kUnobserved) ++count;
  return count;
}

void check_consistent_with_gt(const ObservationMatrix& obs, const GroundTruthMatrix& gt) {
  for (Index i = 0; i < obs.images(); ++i) {
    for (Index j = 0; j < obs.classes(); ++j) {
      if (obs.obs(i, j) == kUnobserved) continue;
      CHECK(obs.obs(i, j) == gt.labels(i, j));
    }
  }
}

}  // namespace

TEST_CASE("mask_ffl observes everything") {
  const GroundTruthMatrix ones = make_gt({{1, 1, 1}, {1, 1, 1}});
  const ObservationMatrix all = mask_ffl(ones);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) CHECK(all.obs(i, j) == kPositive);

  const GroundTruthMatrix mixed = make_gt({{1, 0, 1}, {0, 1, 0}});
  const ObservationMatrix obs = mask_ffl(mixed);
  CHECK(obs.obs(0, 0) == kPositive);
  CHECK(obs.obs(0, 1) == kNegative);
  CHECK(obs.obs(1, 1) == kPositive);
  CHECK(observed_count(obs) == 6);
  CHECK(obs.labeled_set.size() == 2);
}

TEST_CASE("mask_fspl forced choice and counting") {
  const GroundTruthMatrix gt = make_gt({{0, 0, 0, 0, 1, 0}});
  const ObservationMatrix obs = mask_fspl(gt, Rng(42));
  CHECK(obs.obs(0, 4) == kPositive);
  CHECK(observed_count(obs) == 1);

  Rng rng(1);
  const GroundTruthMatrix big = random_gt(50, 8, rng);
  const ObservationMatrix mask = mask_fspl(big, Rng(9));
  CHECK(observed_count(mask) == 50);  // one per image
  for (Index i = 0; i < 50; ++i) {
    Index positives = 0;
    for (Index j = 0; j < 8; ++j)
      if (mask.obs(i, j) == kPositive) ++positives;
    CHECK(positives == 1);
  }
  check_consistent_with_gt(mask, big);
}

TEST_CASE("mask_fspl picks uniformly among positives") {
  const GroundTruthMatrix gt = make_gt({{0, 1, 0, 1, 0}});
  int picked_first = 0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    const ObservationMatrix obs = mask_fspl(gt, Rng(static_cast<std::uint64_t>(seed)));
    if (obs.obs(0, 1) == kPositive) ++picked_first;
  }
  const double freq = static_cast<double>(picked_first) / trials;
  CHECK(freq > 0.48);
  CHECK(freq < 0.52);
}

TEST_CASE("mask_fspl rejects rows without positives") {
  const GroundTruthMatrix gt = make_gt({{1, 0}, {0, 0}});
  CHECK_THROWS_WITH_AS(static_cast<void>(mask_fspl(gt, Rng(1))),
                       doctest::Contains("row 1"), DataError);
}

TEST_CASE("mask_sspl reduces to mask_fspl at fraction 1") {
  Rng rng(2);
  const GroundTruthMatrix gt = random_gt(40, 6, rng);
  const ObservationMatrix fspl = mask_fspl(gt, Rng(77));
  const ObservationMatrix sspl = mask_sspl(gt, 1.0, Rng(77));
  CHECK(fspl.obs == sspl.obs);
  CHECK(fspl.labeled_set == sspl.labeled_set);
}

TEST_CASE("mask_sspl row counting") {
  Rng rng(3);
  const GroundTruthMatrix gt10 = random_gt(10, 5, rng);
  const ObservationMatrix obs = mask_sspl(gt10, 0.2, Rng(5));
  CHECK(obs.labeled_set.size() == 2);

  const GroundTruthMatrix gt1000 = random_gt(1000, 5, rng);
  const ObservationMatrix obs60 = mask_sspl(gt1000, 0.6, Rng(5));
  CHECK(observed_count(obs60) == 600);  // one label per labeled image
  check_consistent_with_gt(obs60, gt1000);
}

TEST_CASE("mask_sspl labeled rows are valid single-positive rows") {
  Rng rng(4);
  const GroundTruthMatrix gt = random_gt(60, 7, rng);
  const ObservationMatrix obs = mask_sspl(gt, 0.4, Rng(11));
  for (Index row : obs.labeled_set) {
    Index positives = 0;
    Index negatives = 0;
    for (Index j = 0; j < 7; ++j) {
      if (obs.obs(row, j) == kPositive) ++positives;
      if (obs.obs(row, j) == kNegative) ++negatives;
    }
    CHECK(positives == 1);
    CHECK(negatives == 0);
  }
  // unlabeled rows carry nothing
  std::vector<bool> labeled(60, false);
  for (Index row : obs.labeled_set) labeled[static_cast<std::size_t>(row)] = true;
  for (Index i = 0; i < 60; ++i) {
    if (labeled[static_cast<std::size_t>(i)]) continue;
    for (Index j = 0; j < 7; ++j) CHECK(obs.obs(i, j) == kUnobserved);
  }
}

TEST_CASE("mask fractions are validated") {
  Rng rng(5);
  const GroundTruthMatrix gt = random_gt(4, 3, rng);
  CHECK_THROWS_AS(static_cast<void>(mask_sspl(gt, 0.0, Rng(1))), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(mask_sspl(gt, 1.5, Rng(1))), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(mask_sspl(gt, -0.3, Rng(1))), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(mask_fpl(gt, 0.0, Rng(1))), ConfigError);
  CHECK_THROWS_AS(static_cast<void>(mask_sfl(gt, 2.0, Rng(1))), ConfigError);
}

TEST_CASE("mask_fpl keeps the requested share per row") {
  Rng rng(6);
  const GroundTruthMatrix gt = random_gt(30, 20, rng);
  const ObservationMatrix obs = mask_fpl(gt, 0.1, Rng(21));
  for (Index i = 0; i < 30; ++i) {
    Index observed = 0;
    for (Index j = 0; j < 20; ++j)
      if (obs.obs(i, j) != kUnobserved) ++observed;
    CHECK(observed == 2);  // ceil(0.1 * 20)
  }
  check_consistent_with_gt(obs, gt);

  const ObservationMatrix full = mask_fpl(gt, 1.0, Rng(21));
  const ObservationMatrix ffl = mask_ffl(gt);
  CHECK(full.obs == ffl.obs);
  CHECK(full.labeled_set == ffl.labeled_set);
}

TEST_CASE("mask_fpl guarantees at least one observation") {
  Rng rng(7);
  const GroundTruthMatrix gt = random_gt(10, 9, rng);
  const ObservationMatrix obs = mask_fpl(gt, 0.01, Rng(2));
  for (Index i = 0; i < 10; ++i) {
    Index observed = 0;
    for (Index j = 0; j < 9; ++j)
      if (obs.obs(i, j) != kUnobserved) ++observed;
    CHECK(observed == 1);  // ceil rounding of a tiny fraction
  }
}

TEST_CASE("mask_sfl fully observes a subset") {
  Rng rng(8);
  const GroundTruthMatrix gt = random_gt(4, 5, rng);
  const ObservationMatrix obs = mask_sfl(gt, 0.5, Rng(3));
  CHECK(obs.labeled_set.size() == 2);
  for (Index row : obs.labeled_set) {
    for (Index j = 0; j < 5; ++j) CHECK(obs.obs(row, j) != kUnobserved);
  }
  Index unlabeled_obs = 0;
  std::vector<bool> labeled(4, false);
  for (Index row : obs.labeled_set) labeled[static_cast<std::size_t>(row)] = true;
  for (Index i = 0; i < 4; ++i) {
    if (labeled[static_cast<std::size_t>(i)]) continue;
    for (Index j = 0; j < 5; ++j)
      if (obs.obs(i, j) != kUnobserved) ++unlabeled_obs;
  }
  CHECK(unlabeled_obs == 0);

  const ObservationMatrix full = mask_sfl(gt, 1.0, Rng(3));
  CHECK(full.obs == mask_ffl(gt).obs);
}

TEST_CASE("determinism: same seed, same mask") {
  Rng rng(9);
  const GroundTruthMatrix gt = random_gt(25, 6, rng);
  for (std::uint64_t seed : {std::uint64_t{1}, std::uint64_t{99}, std::uint64_t{12345}}) {
    CHECK(mask_fspl(gt, Rng(seed)).obs == mask_fspl(gt, Rng(seed)).obs);
    CHECK(mask_sspl(gt, 0.4, Rng(seed)).obs == mask_sspl(gt, 0.4, Rng(seed)).obs);
    CHECK(mask_fpl(gt, 0.3, Rng(seed)).obs == mask_fpl(gt, 0.3, Rng(seed)).obs);
    CHECK(mask_sfl(gt, 0.5, Rng(seed)).obs == mask_sfl(gt, 0.5, Rng(seed)).obs);
  }
  // different seeds almost surely differ
  CHECK(mask_fspl(gt, Rng(1)).obs != mask_fspl(gt, Rng(2)).obs);
}

TEST_CASE("no fabricated labels across every generator") {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const GroundTruthMatrix gt = random_gt(20, 8, rng);
    const Rng seed(static_cast<std::uint64_t>(trial));
    check_consistent_with_gt(mask_ffl(gt), gt);
    check_consistent_with_gt(mask_fspl(gt, seed), gt);
    check_consistent_with_gt(mask_sspl(gt, 0.5, seed), gt);
    check_consistent_with_gt(mask_fpl(gt, 0.25, seed), gt);
    check_consistent_with_gt(mask_sfl(gt, 0.5, seed), gt);
  }
}

TEST_CASE("setting containment: single-positive rows fit inside partial rows") {
  Rng rng(12);
  const GroundTruthMatrix gt = random_gt(15, 10, rng);
  const ObservationMatrix fspl = mask_fspl(gt, Rng(5));
  const ObservationMatrix fpl = mask_fpl(gt, 0.3, Rng(5));
  for (Index i = 0; i < 15; ++i) {
    Index fspl_count = 0;
    Index fpl_count = 0;
    for (Index j = 0; j < 10; ++j) {
      if (fspl.obs(i, j) != kUnobserved) ++fspl_count;
      if (fpl.obs(i, j) != kUnobserved) ++fpl_count;
    }
    CHECK(fspl_count <= fpl_count);
  }
}
