#pragma once

#include "plmcl/types.hpp"

namespace plmcl {

struct PseudoHyper {
  Real beta1 = 0.7;   // moving-average decay of the momentum
  Real alpha = 1.0;   // curriculum learning rate (peak of the self-guided factor)
  Real lambda = 4.0;  // confidence penalty inside the self-guided factor
  int n = 2;          // confidence exponent
};

// Live pseudo-label allocation accounting. The training loop keeps exactly
// one state per image; the peak counters let tests verify that no per-epoch
// label history accumulates.
struct PseudoMemoryStats {
  long long live_states = 0;
  long long peak_states = 0;
  long long live_scalars = 0;
  long long peak_scalars = 0;
};

PseudoMemoryStats pseudo_memory_stats();
void reset_pseudo_memory_peaks();

// Per-image pseudo-label state. Unobserved entries carry a free latent
// parameter with soft = sigmoid(latent); observed entries are pinned to the
// observed value, keep latent at 0 as a sentinel, and hold zero momentum.
class PseudoState {
 public:
  PseudoState();
  PseudoState(const PseudoState& other);
  PseudoState(PseudoState&& other) noexcept;
  PseudoState& operator=(const PseudoState& other);
  PseudoState& operator=(PseudoState&& other) noexcept;
  ~PseudoState();

  Vector latent;
  Vector soft;
  Vector momentum;
  BoolArray observed;
  BoolArray observed_values;

  Index classes() const { return soft.size(); }

  // Re-registers this state with the allocation counters after its vectors
  // were resized directly.
  void sync_allocation_tracking();

 private:
  long long tracked_scalars_ = 0;
};

// Unobserved entries start at soft 0.5 (latent 0, momentum 0); observed
// entries are pinned to 1 or 0. obs_row entries are {1, 0, -1}.
PseudoState init_pseudo(const IntRowRef& obs_row);

// Closed form of d/d latent of the mean prediction/pseudo-label BCE:
// (soft - pred) / L on unobserved entries, 0 on observed ones.
Vector grad_lcs(const Vector& pred, const PseudoState& state);

// momentum <- beta1 * momentum + (1 - beta1) * grad; observed entries stay 0.
void momentum_step(PseudoState& state, const Vector& grad, Real beta1);

// alpha * exp(-lambda * |2 soft - 1|^n) element-wise: maximal (= alpha) at
// soft 0.5, minimal (= alpha exp(-lambda)) at soft 0 or 1.
ArrayX self_guided_factor(const Vector& soft, const PseudoHyper& hyper);

// latent -= psi(soft) * momentum on unobserved entries, then soft is
// re-regulated to sigmoid(latent). psi is evaluated at the pre-update soft.
void latent_update(PseudoState& state, const PseudoHyper& hyper);

// One epoch of the pseudo-label recurrence: gradient, momentum, latent
// update, regulation — in that order.
PseudoState epoch_update(PseudoState state, const Vector& pred, const PseudoHyper& hyper);

}  // namespace plmcl
