#pragma once

#include "plmcl/rng.hpp"
#include "plmcl/types.hpp"

#include <cmath>

namespace plmcl {

// Probability clamp applied before any log.
inline constexpr Real kProbEps = 1e-7;

// Numerically stable logistic function; never forms exp of a large positive
// argument.
template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) {
    return Scalar(1) / (Scalar(1) + std::exp(-x));
  }
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// Binary cross-entropy -p log q - (1-p) log(1-q) with q clamped to
// [kProbEps, 1-kProbEps].
Real bce(Real p, Real q);

// d bce / d q, consistent with the clamp (zero in the clamped region).
Real bce_grad_q(Real p, Real q);

// Two-layer tanh classifier; hidden width 0 degenerates to a linear model
// (w1/b1 empty, w2 maps inputs directly to logits).
struct MlpParams {
  Matrix w1;  // h x d
  Vector b1;  // h
  Matrix w2;  // L x h, or L x d when h == 0
  Vector b2;  // L

  Index hidden() const { return w1.rows(); }
  Index inputs() const { return hidden() > 0 ? w1.cols() : w2.cols(); }
  Index outputs() const { return w2.rows(); }
};

MlpParams zeros_like(const MlpParams& params);
bool all_finite(const MlpParams& params);

// Weights ~ N(0, 1/sqrt(fan_in)), biases zero.
MlpParams random_mlp(Index inputs, Index hidden, Index outputs, Rng& rng);

struct ForwardCache {
  Vector input;
  Vector hidden_pre;  // empty for linear models
  Vector hidden_act;
  Vector logits;
  Vector probs;
};

// probs = sigmoid(w2 tanh(w1 x + b1) + b2); cache holds every intermediate
// needed by backward.
ForwardCache forward(const MlpParams& params, const Vector& x);

// Convenience when no gradient is needed.
Vector predict(const MlpParams& params, const Vector& x);

// Row-wise probabilities for a whole feature matrix (N x d -> N x L).
Matrix predict_batch(const MlpParams& params, const Matrix& features);

// Analytic gradients of a scalar loss given dLoss/dProbs; cache must come
// from forward() on the same params.
MlpParams backward(const MlpParams& params, const ForwardCache& cache,
                   const Vector& dloss_dprobs);

void accumulate(MlpParams& acc, const MlpParams& grads, Real scale);

// params - lr * grads. Throws NumericError on non-finite gradients.
MlpParams sgd_step(MlpParams params, const MlpParams& grads, Real lr);

}  // namespace plmcl
