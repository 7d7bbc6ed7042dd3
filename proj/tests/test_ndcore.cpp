#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "plmcl/error.hpp"
#include "plmcl/ndcore.hpp"
#include "plmcl/rng.hpp"

#include <cmath>
#include <limits>

using namespace plmcl;

namespace {

MlpParams random_case(Index inputs, Index hidden, Index outputs, Rng& rng, Real scale) {
  MlpParams params = random_mlp(inputs, hidden, outputs, rng);
  params.b1 = params.b1.unaryExpr([&rng, scale](Real) { return scale * rng.normal(); });
  params.b2 = params.b2.unaryExpr([&rng, scale](Real) { return scale * rng.normal(); });
  return params;
}

Vector random_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("sigmoid anchors and saturation") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(50.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigmoid(-50.0) < 1e-20);
  // logit of 0.25
  CHECK(sigmoid(-1.0986122886681097) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::isfinite(sigmoid(750.0)));
  CHECK(std::isfinite(sigmoid(-750.0)));
}

TEST_CASE("sigmoid symmetry and monotonicity") {
  Rng rng(7);
  Real prev = sigmoid(-20.0);
  for (int i = 0; i < 200; ++i) {
    const Real x = -20.0 + 0.2 * i;
    const Real s = sigmoid(x);
    CHECK(s >= prev);
    prev = s;
  }
  for (int i = 0; i < 1000; ++i) {
    const Real x = 30.0 * (rng.uniform_real() - 0.5);
    CHECK(std::abs(sigmoid(-x) - (1.0 - sigmoid(x))) <= 1e-15);
  }
}

TEST_CASE("bce fixed values") {
  CHECK(bce(1.0, 0.5) == doctest::Approx(0.69314718055994531).epsilon(1e-12));
  CHECK(bce(0.0, 0.0) < 1e-6);  // clamp residual only
  CHECK(bce(1.0, 1.0) < 1e-6);
  CHECK(bce(0.3, 0.7) == doctest::Approx(0.94978344620977491).epsilon(1e-12));
}

TEST_CASE("bce minimal at q = p") {
  for (int pi = 0; pi <= 100; ++pi) {
    const Real p = 0.01 * pi;
    const Real base = bce(p, p);
    for (int qi = 0; qi <= 100; ++qi) {
      const Real q = 0.01 * qi;
      CHECK(bce(p, q) >= base - 1e-9);
    }
  }
}

TEST_CASE("forward trivial anchors") {
  MlpParams zero;
  zero.w1 = Matrix::Zero(3, 4);
  zero.b1 = Vector::Zero(3);
  zero.w2 = Matrix::Zero(2, 3);
  zero.b2 = Vector::Zero(2);
  const ForwardCache cache = forward(zero, Vector::Ones(4));
  for (Index c = 0; c < 2; ++c) CHECK(cache.probs(c) == 0.5);

  MlpParams linear;
  linear.w1.resize(0, 3);
  linear.b1.resize(0);
  linear.w2 = Matrix::Zero(2, 3);
  linear.w2(0, 0) = 1.0;  // row = e_1
  linear.b2 = Vector::Zero(2);
  Vector x(3);
  x << 2.0, 0.0, 0.0;
  CHECK(forward(linear, x).probs(0) == doctest::Approx(sigmoid(2.0)).epsilon(1e-15));
}

TEST_CASE("forward matches an independent reimplementation") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 1 + rng.uniform_index(6);
    const Index h = trial % 2 == 0 ? 0 : 1 + rng.uniform_index(5);
    const Index L = 1 + rng.uniform_index(4);
    const MlpParams params = random_case(d, h, L, rng, 0.5);
    const Vector x = random_vector(d, rng);
    const ForwardCache cache = forward(params, x);
    const std::vector<Real> reference = oracles::forward_reference(
        params, std::vector<Real>(x.data(), x.data() + x.size()));
    for (Index c = 0; c < L; ++c) {
      CHECK(cache.probs(c) == doctest::Approx(reference[static_cast<std::size_t>(c)])
                                  .epsilon(1e-12));
      CHECK(cache.probs(c) >= 0.0);
      CHECK(cache.probs(c) <= 1.0);
    }
  }
}

TEST_CASE("forward rejects shape mismatch") {
  Rng rng(3);
  const MlpParams params = random_mlp(4, 3, 2, rng);
  CHECK_THROWS_AS(forward(params, Vector::Zero(5)), DataError);
  CHECK_THROWS_AS(backward(params, forward(params, Vector::Zero(4)), Vector::Zero(3)),
                  DataError);
}

TEST_CASE("backward of zero loss gradient is zero") {
  Rng rng(5);
  const MlpParams params = random_case(4, 3, 2, rng, 0.5);
  const ForwardCache cache = forward(params, random_vector(4, rng));
  const MlpParams grads = backward(params, cache, Vector::Zero(2));
  CHECK(grads.w1.isZero(0.0));
  CHECK(grads.b1.isZero(0.0));
  CHECK(grads.w2.isZero(0.0));
  CHECK(grads.b2.isZero(0.0));
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(13);
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Index d = 1 + rng.uniform_index(5);
    const Index h = trial % 2 == 0 ? 0 : 1 + rng.uniform_index(4);
    const Index L = 1 + rng.uniform_index(3);
    const MlpParams params = random_case(d, h, L, rng, 0.5);
    const Vector x = random_vector(d, rng);

    // Random BCE-style targets keep the probed loss generic.
    Vector targets(L);
    for (Index c = 0; c < L; ++c) targets(c) = rng.uniform_real();

    const auto loss = [&x, &targets](const MlpParams& p) {
      const Vector probs = predict(p, x);
      Real sum = 0.0;
      for (Index c = 0; c < probs.size(); ++c) sum += bce(targets(c), probs(c));
      return sum;
    };

    const ForwardCache cache = forward(params, x);
    Vector dloss(L);
    for (Index c = 0; c < L; ++c) dloss(c) = bce_grad_q(targets(c), cache.probs(c));
    const MlpParams analytic = backward(params, cache, dloss);
    const MlpParams numeric = oracles::finite_difference_params(loss, params, 1e-5);

    const auto check_tensor = [&checked](const Matrix& a, const Matrix& b) {
      for (Index i = 0; i < a.size(); ++i) {
        CHECK(oracles::rel_close(a.data()[i], b.data()[i], 1e-4, 1e-6));
        ++checked;
      }
    };
    check_tensor(analytic.w1, numeric.w1);
    check_tensor(analytic.w2, numeric.w2);
    check_tensor(Matrix(analytic.b1), Matrix(numeric.b1));
    check_tensor(Matrix(analytic.b2), Matrix(numeric.b2));
  }
  CHECK(checked > 100);
}

TEST_CASE("linear model BCE gradient has the closed form (q - p) x") {
  Rng rng(17);
  const Index d = 6;
  const Index L = 3;
  const MlpParams params = random_case(d, 0, L, rng, 0.5);
  const Vector x = random_vector(d, rng);
  Vector targets(L);
  for (Index c = 0; c < L; ++c) targets(c) = rng.uniform_real();

  const ForwardCache cache = forward(params, x);
  Vector dloss(L);
  for (Index c = 0; c < L; ++c) dloss(c) = bce_grad_q(targets(c), cache.probs(c));
  const MlpParams grads = backward(params, cache, dloss);

  for (Index c = 0; c < L; ++c) {
    const Vector expected = (cache.probs(c) - targets(c)) * x;
    for (Index j = 0; j < d; ++j) {
      CHECK(grads.w2(c, j) == doctest::Approx(expected(j)).epsilon(1e-9));
    }
    CHECK(grads.b2(c) == doctest::Approx(cache.probs(c) - targets(c)).epsilon(1e-9));
  }
}

TEST_CASE("sgd_step basics") {
  Rng rng(19);
  MlpParams params = random_case(3, 2, 2, rng, 0.5);
  const MlpParams zero_grads = zeros_like(params);
  const MlpParams stepped = sgd_step(params, zero_grads, 0.1);
  CHECK(stepped.w1 == params.w1);
  CHECK(stepped.b2 == params.b2);

  MlpParams scalar;
  scalar.w1.resize(0, 1);
  scalar.b1.resize(0);
  scalar.w2 = Matrix::Constant(1, 1, 1.0);
  scalar.b2 = Vector::Zero(1);
  MlpParams grad = zeros_like(scalar);
  grad.w2(0, 0) = 2.0;
  CHECK(sgd_step(scalar, grad, 0.1).w2(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("sgd_step linearity over two steps") {
  Rng rng(23);
  const MlpParams params = random_case(4, 3, 2, rng, 0.5);
  MlpParams g1 = random_case(4, 3, 2, rng, 1.0);
  MlpParams g2 = random_case(4, 3, 2, rng, 1.0);
  const MlpParams twice = sgd_step(sgd_step(params, g1, 0.05), g2, 0.05);
  MlpParams summed = g1;
  accumulate(summed, g2, 1.0);
  const MlpParams once = sgd_step(params, summed, 0.05);
  CHECK((twice.w1 - once.w1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((twice.w2 - once.w2).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((twice.b1 - once.b1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((twice.b2 - once.b2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sgd_step rejects non-finite gradients") {
  Rng rng(29);
  const MlpParams params = random_case(3, 0, 2, rng, 0.5);
  MlpParams grads = zeros_like(params);
  grads.w2(0, 0) = std::numeric_limits<Real>::quiet_NaN();
  CHECK_THROWS_AS(sgd_step(params, grads, 0.1), NumericError);
}

TEST_CASE("predict_batch agrees with per-sample forward") {
  Rng rng(31);
  const MlpParams params = random_case(5, 4, 3, rng, 0.5);
  Matrix features(7, 5);
  for (Index i = 0; i < features.size(); ++i) features.data()[i] = rng.normal();
  const Matrix batch = predict_batch(params, features);
  for (Index i = 0; i < features.rows(); ++i) {
    const Vector single = predict(params, features.row(i).transpose());
    for (Index c = 0; c < 3; ++c) {
      CHECK(batch(i, c) == doctest::Approx(single(c)).epsilon(1e-12));
    }
  }
}
