#include "plmcl/losses.hpp"

#include "plmcl/error.hpp"
#include "plmcl/labelsettings.hpp"
#include "plmcl/ndcore.hpp"

#include <cmath>
#include <string>

namespace plmcl {
namespace {

void check_row(const Vector& pred, const IntRowRef& obs_row, const char* op) {
  if (pred.size() != obs_row.size()) {
    throw DataError(std::string(op) + ": prediction has " + std::to_string(pred.size()) +
                    " entries, observation row has " + std::to_string(obs_row.size()));
  }
}

Real positive_count_regularizer(const Vector& pred, Real reg_weight,
                                Real expected_positives) {
  const Real dev = (pred.sum() - expected_positives) / static_cast<Real>(pred.size());
  return reg_weight * dev * dev;
}

}  // namespace

Real scheduler_xi(Real soft_j, Real phi, Real beta2) {
  const Real e = std::exp(-10.0 * std::abs(2.0 * soft_j - 1.0));
  const Real gamma = 1.0 - phi;
  return beta2 * (1.0 - gamma * e) / (1.0 + gamma * e);
}

Real loss_obs(const Vector& pred, const IntRowRef& obs_row, Real reg_weight,
              Real expected_positives) {
  check_row(pred, obs_row, "loss_obs");
  Real sum = 0.0;
  Index n_observed = 0;
  for (Index j = 0; j < pred.size(); ++j) {
    if (obs_row(j) == kUnobserved) continue;
    sum += bce(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j));
    ++n_observed;
  }
  const Real observed_term = n_observed > 0 ? sum / static_cast<Real>(n_observed) : 0.0;
  return observed_term + positive_count_regularizer(pred, reg_weight, expected_positives);
}

Real loss_unobs(const Vector& pred, const PseudoState& state, Real phi, Real beta2) {
  if (pred.size() != state.classes()) {
    throw DataError("loss_unobs: prediction/state size mismatch");
  }
  Real sum = 0.0;
  for (Index j = 0; j < pred.size(); ++j) {
    if (state.observed(j)) continue;
    sum += scheduler_xi(state.soft(j), phi, beta2) * bce(state.soft(j), pred(j));
  }
  return sum;
}

LossBreakdown loss_plmcl(const Vector& pred, const PseudoState& state,
                         const IntRowRef& obs_row, Real phi,
                         const PlmclLossParams& params) {
  check_row(pred, obs_row, "loss_plmcl");
  LossBreakdown out;
  Real obs_sum = 0.0;
  Index n_observed = 0;
  for (Index j = 0; j < pred.size(); ++j) {
    if (obs_row(j) == kUnobserved) continue;
    obs_sum += bce(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j));
    ++n_observed;
  }
  out.obs_term = n_observed > 0 ? obs_sum / static_cast<Real>(n_observed) : 0.0;
  out.unobs_term = loss_unobs(pred, state, phi, params.beta2);
  out.regularizer =
      positive_count_regularizer(pred, params.reg_weight, params.expected_positives);
  out.total = out.obs_term + out.unobs_term + out.regularizer;
  return out;
}

Vector loss_plmcl_grad(const Vector& pred, const PseudoState& state,
                       const IntRowRef& obs_row, Real phi,
                       const PlmclLossParams& params) {
  check_row(pred, obs_row, "loss_plmcl_grad");
  const Index L = pred.size();
  Index n_observed = 0;
  for (Index j = 0; j < L; ++j)
    if (obs_row(j) != kUnobserved) ++n_observed;

  Vector grad = Vector::Zero(L);
  const Real reg_common = params.reg_weight * 2.0 *
                          (pred.sum() - params.expected_positives) /
                          (static_cast<Real>(L) * static_cast<Real>(L));
  for (Index j = 0; j < L; ++j) {
    Real g = reg_common;
    if (obs_row(j) != kUnobserved) {
      g += bce_grad_q(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j)) /
           static_cast<Real>(n_observed);
    } else {
      g += scheduler_xi(state.soft(j), phi, params.beta2) *
           bce_grad_q(state.soft(j), pred(j));
    }
    grad(j) = g;
  }
  return grad;
}

Real loss_an(const Vector& pred, const IntRowRef& obs_row) {
  check_row(pred, obs_row, "loss_an");
  Real sum = 0.0;
  for (Index j = 0; j < pred.size(); ++j) {
    sum += bce(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j));
  }
  return sum / static_cast<Real>(pred.size());
}

Vector loss_an_grad(const Vector& pred, const IntRowRef& obs_row) {
  check_row(pred, obs_row, "loss_an_grad");
  Vector grad(pred.size());
  const Real scale = 1.0 / static_cast<Real>(pred.size());
  for (Index j = 0; j < pred.size(); ++j) {
    grad(j) = scale * bce_grad_q(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j));
  }
  return grad;
}

Real loss_an_ls(const Vector& pred, const IntRowRef& obs_row, Real eps) {
  check_row(pred, obs_row, "loss_an_ls");
  Real sum = 0.0;
  for (Index j = 0; j < pred.size(); ++j) {
    const Real target = obs_row(j) == kPositive ? 1.0 - eps : eps;
    sum += bce(target, pred(j));
  }
  return sum / static_cast<Real>(pred.size());
}

Vector loss_an_ls_grad(const Vector& pred, const IntRowRef& obs_row, Real eps) {
  check_row(pred, obs_row, "loss_an_ls_grad");
  Vector grad(pred.size());
  const Real scale = 1.0 / static_cast<Real>(pred.size());
  for (Index j = 0; j < pred.size(); ++j) {
    const Real target = obs_row(j) == kPositive ? 1.0 - eps : eps;
    grad(j) = scale * bce_grad_q(target, pred(j));
  }
  return grad;
}

Real loss_wan(const Vector& pred, const IntRowRef& obs_row, Real gamma_w) {
  check_row(pred, obs_row, "loss_wan");
  Real sum = 0.0;
  for (Index j = 0; j < pred.size(); ++j) {
    const Real term = bce(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j));
    sum += obs_row(j) == kUnobserved ? gamma_w * term : term;
  }
  return sum / static_cast<Real>(pred.size());
}

Vector loss_wan_grad(const Vector& pred, const IntRowRef& obs_row, Real gamma_w) {
  check_row(pred, obs_row, "loss_wan_grad");
  Vector grad(pred.size());
  const Real scale = 1.0 / static_cast<Real>(pred.size());
  for (Index j = 0; j < pred.size(); ++j) {
    const Real g = bce_grad_q(obs_row(j) == kPositive ? 1.0 : 0.0, pred(j));
    grad(j) = scale * (obs_row(j) == kUnobserved ? gamma_w * g : g);
  }
  return grad;
}

}  // namespace plmcl
