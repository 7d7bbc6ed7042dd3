#pragma once

#include "plmcl/pseudo.hpp"
#include "plmcl/types.hpp"

namespace plmcl {

struct LossBreakdown {
  Real obs_term = 0.0;
  Real unobs_term = 0.0;
  Real regularizer = 0.0;
  Real total = 0.0;
};

struct PlmclLossParams {
  Real beta2 = 0.6;
  Real reg_weight = 0.1;
  Real expected_positives = 1.0;
};

// Confidence-aware curriculum weight on an unobserved label:
// beta2 * (1 - g e) / (1 + g e) with e = exp(-10 |2 soft - 1|), g = 1 - phi.
// Zero at (soft 0.5, phi 0); beta2 at phi 1 regardless of soft.
Real scheduler_xi(Real soft_j, Real phi, Real beta2);

// Mean BCE over the observed entries (0 when none are observed) plus the
// expected-positive-count regularizer
// reg_weight * ((sum_j pred_j - expected_positives) / L)^2.
Real loss_obs(const Vector& pred, const IntRowRef& obs_row, Real reg_weight,
              Real expected_positives);

// Sum over unobserved entries of xi(soft_j, phi) * bce(soft_j, pred_j);
// the soft pseudo labels are the targets.
Real loss_unobs(const Vector& pred, const PseudoState& state, Real phi, Real beta2);

// Observed + unobserved + regularizer, reported term by term. Pseudo labels
// are constants here; only pred carries gradient.
LossBreakdown loss_plmcl(const Vector& pred, const PseudoState& state,
                         const IntRowRef& obs_row, Real phi, const PlmclLossParams& params);

// d loss_plmcl / d pred, for the classifier backward pass.
Vector loss_plmcl_grad(const Vector& pred, const PseudoState& state,
                       const IntRowRef& obs_row, Real phi, const PlmclLossParams& params);

// Baselines. All are means over the L classes.
// AN treats every unobserved label as an observed negative.
Real loss_an(const Vector& pred, const IntRowRef& obs_row);
Vector loss_an_grad(const Vector& pred, const IntRowRef& obs_row);

// AN with targets smoothed to 1-eps / eps.
Real loss_an_ls(const Vector& pred, const IntRowRef& obs_row, Real eps);
Vector loss_an_ls_grad(const Vector& pred, const IntRowRef& obs_row, Real eps);

// AN with the assumed-negative terms down-weighted by gamma_w; observed
// labels keep full weight.
Real loss_wan(const Vector& pred, const IntRowRef& obs_row, Real gamma_w);
Vector loss_wan_grad(const Vector& pred, const IntRowRef& obs_row, Real gamma_w);

}  // namespace plmcl
