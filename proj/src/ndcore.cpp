#include "plmcl/ndcore.hpp"

#include "plmcl/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plmcl {
namespace {

void check_input_dim(const MlpParams& params, const Vector& x) {
  if (x.size() != params.inputs()) {
    throw DataError("forward: input has " + std::to_string(x.size()) +
                    " features, classifier expects " + std::to_string(params.inputs()));
  }
}

}  // namespace

Real bce(Real p, Real q) {
  const Real qc = std::clamp(q, kProbEps, 1.0 - kProbEps);
  return -p * std::log(qc) - (1.0 - p) * std::log(1.0 - qc);
}

Real bce_grad_q(Real p, Real q) {
  if (q <= kProbEps || q >= 1.0 - kProbEps) return 0.0;
  return -p / q + (1.0 - p) / (1.0 - q);
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams out;
  out.w1 = Matrix::Zero(params.w1.rows(), params.w1.cols());
  out.b1 = Vector::Zero(params.b1.size());
  out.w2 = Matrix::Zero(params.w2.rows(), params.w2.cols());
  out.b2 = Vector::Zero(params.b2.size());
  return out;
}

bool all_finite(const MlpParams& params) {
  return params.w1.allFinite() && params.b1.allFinite() && params.w2.allFinite() &&
         params.b2.allFinite();
}

MlpParams random_mlp(Index inputs, Index hidden, Index outputs, Rng& rng) {
  MlpParams params;
  const auto fill = [&rng](Matrix& m, Real scale) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.normal();
  };
  if (hidden > 0) {
    params.w1.resize(hidden, inputs);
    fill(params.w1, 1.0 / std::sqrt(static_cast<Real>(inputs)));
    params.b1 = Vector::Zero(hidden);
    params.w2.resize(outputs, hidden);
    fill(params.w2, 1.0 / std::sqrt(static_cast<Real>(hidden)));
  } else {
    params.w1.resize(0, inputs);
    params.b1.resize(0);
    params.w2.resize(outputs, inputs);
    fill(params.w2, 1.0 / std::sqrt(static_cast<Real>(inputs)));
  }
  params.b2 = Vector::Zero(outputs);
  return params;
}

ForwardCache forward(const MlpParams& params, const Vector& x) {
  check_input_dim(params, x);
  ForwardCache cache;
  cache.input = x;
  if (params.hidden() > 0) {
    cache.hidden_pre = params.w1 * x + params.b1;
    cache.hidden_act = cache.hidden_pre.array().tanh();
    cache.logits = params.w2 * cache.hidden_act + params.b2;
  } else {
    cache.logits = params.w2 * x + params.b2;
  }
  cache.probs = cache.logits.unaryExpr([](Real v) { return sigmoid(v); });
  return cache;
}

Vector predict(const MlpParams& params, const Vector& x) {
  return forward(params, x).probs;
}

Matrix predict_batch(const MlpParams& params, const Matrix& features) {
  if (features.cols() != params.inputs()) {
    throw DataError("predict_batch: features have " + std::to_string(features.cols()) +
                    " columns, classifier expects " + std::to_string(params.inputs()));
  }
  Matrix logits;
  if (params.hidden() > 0) {
    Matrix hidden =
        ((features * params.w1.transpose()).rowwise() + params.b1.transpose());
    hidden = hidden.array().tanh();
    logits = (hidden * params.w2.transpose()).rowwise() + params.b2.transpose();
  } else {
    logits = (features * params.w2.transpose()).rowwise() + params.b2.transpose();
  }
  return logits.unaryExpr([](Real v) { return sigmoid(v); });
}

MlpParams backward(const MlpParams& params, const ForwardCache& cache,
                   const Vector& dloss_dprobs) {
  if (dloss_dprobs.size() != params.outputs()) {
    throw DataError("backward: loss gradient has " + std::to_string(dloss_dprobs.size()) +
                    " entries, classifier has " + std::to_string(params.outputs()) +
                    " outputs");
  }
  MlpParams grads = zeros_like(params);
  // d probs / d logits = probs (1 - probs)
  const Vector dlogits =
      (dloss_dprobs.array() * cache.probs.array() * (1.0 - cache.probs.array())).matrix();
  grads.b2 = dlogits;
  if (params.hidden() > 0) {
    grads.w2 = dlogits * cache.hidden_act.transpose();
    const Vector dhidden = params.w2.transpose() * dlogits;
    const Vector dpre =
        (dhidden.array() * (1.0 - cache.hidden_act.array().square())).matrix();
    grads.w1 = dpre * cache.input.transpose();
    grads.b1 = dpre;
  } else {
    grads.w2 = dlogits * cache.input.transpose();
  }
  return grads;
}

void accumulate(MlpParams& acc, const MlpParams& grads, Real scale) {
  acc.w1 += scale * grads.w1;
  acc.b1 += scale * grads.b1;
  acc.w2 += scale * grads.w2;
  acc.b2 += scale * grads.b2;
}

MlpParams sgd_step(MlpParams params, const MlpParams& grads, Real lr) {
  if (!all_finite(grads)) {
    throw NumericError("sgd_step: non-finite gradient");
  }
  params.w1 -= lr * grads.w1;
  params.b1 -= lr * grads.b1;
  params.w2 -= lr * grads.w2;
  params.b2 -= lr * grads.b2;
  return params;
}

}  // namespace plmcl
