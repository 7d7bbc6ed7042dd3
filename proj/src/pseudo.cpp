#include "plmcl/pseudo.hpp"

#include "plmcl/error.hpp"
#include "plmcl/labelsettings.hpp"
#include "plmcl/ndcore.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <utility>

namespace plmcl {
namespace {

std::atomic<long long> g_live_states{0};
std::atomic<long long> g_peak_states{0};
std::atomic<long long> g_live_scalars{0};
std::atomic<long long> g_peak_scalars{0};

void bump_peak(std::atomic<long long>& peak, long long value) {
  long long current = peak.load(std::memory_order_relaxed);
  while (current < value &&
         !peak.compare_exchange_weak(current, value, std::memory_order_relaxed)) {
  }
}

long long scalar_count(const PseudoState& s) {
  return static_cast<long long>(s.latent.size() + s.soft.size() + s.momentum.size());
}

void add_state() {
  bump_peak(g_peak_states, g_live_states.fetch_add(1, std::memory_order_relaxed) + 1);
}

void remove_state() { g_live_states.fetch_sub(1, std::memory_order_relaxed); }

void adjust_scalars(long long delta) {
  const long long now = g_live_scalars.fetch_add(delta, std::memory_order_relaxed) + delta;
  if (delta > 0) bump_peak(g_peak_scalars, now);
}

void check_pred(const Vector& pred, const PseudoState& state, const char* op) {
  if (pred.size() != state.classes()) {
    throw DataError(std::string(op) + ": prediction has " + std::to_string(pred.size()) +
                    " entries, state has " + std::to_string(state.classes()));
  }
}

}  // namespace

PseudoMemoryStats pseudo_memory_stats() {
  PseudoMemoryStats stats;
  stats.live_states = g_live_states.load(std::memory_order_relaxed);
  stats.peak_states = g_peak_states.load(std::memory_order_relaxed);
  stats.live_scalars = g_live_scalars.load(std::memory_order_relaxed);
  stats.peak_scalars = g_peak_scalars.load(std::memory_order_relaxed);
  return stats;
}

void reset_pseudo_memory_peaks() {
  g_peak_states.store(g_live_states.load(std::memory_order_relaxed),
                      std::memory_order_relaxed);
  g_peak_scalars.store(g_live_scalars.load(std::memory_order_relaxed),
                       std::memory_order_relaxed);
}

void PseudoState::sync_allocation_tracking() {
  const long long now = scalar_count(*this);
  adjust_scalars(now - tracked_scalars_);
  tracked_scalars_ = now;
}

PseudoState::PseudoState() { add_state(); }

PseudoState::PseudoState(const PseudoState& other)
    : latent(other.latent),
      soft(other.soft),
      momentum(other.momentum),
      observed(other.observed),
      observed_values(other.observed_values) {
  add_state();
  sync_allocation_tracking();
}

PseudoState::PseudoState(PseudoState&& other) noexcept
    : latent(std::move(other.latent)),
      soft(std::move(other.soft)),
      momentum(std::move(other.momentum)),
      observed(std::move(other.observed)),
      observed_values(std::move(other.observed_values)) {
  add_state();
  sync_allocation_tracking();
  other.sync_allocation_tracking();  // its vectors are empty now
}

PseudoState& PseudoState::operator=(const PseudoState& other) {
  if (this != &other) {
    latent = other.latent;
    soft = other.soft;
    momentum = other.momentum;
    observed = other.observed;
    observed_values = other.observed_values;
    sync_allocation_tracking();
  }
  return *this;
}

PseudoState& PseudoState::operator=(PseudoState&& other) noexcept {
  if (this != &other) {
    latent = std::move(other.latent);
    soft = std::move(other.soft);
    momentum = std::move(other.momentum);
    observed = std::move(other.observed);
    observed_values = std::move(other.observed_values);
    sync_allocation_tracking();
    other.sync_allocation_tracking();
  }
  return *this;
}

PseudoState::~PseudoState() {
  adjust_scalars(-tracked_scalars_);
  remove_state();
}

PseudoState init_pseudo(const IntRowRef& obs_row) {
  const Index L = obs_row.size();
  PseudoState state;
  state.latent = Vector::Zero(L);
  state.soft = Vector::Constant(L, 0.5);
  state.momentum = Vector::Zero(L);
  state.observed = BoolArray::Constant(L, false);
  state.observed_values = BoolArray::Constant(L, false);
  for (Index j = 0; j < L; ++j) {
    const int o = obs_row(j);
    if (o == kUnobserved) continue;
    if (o != kPositive && o != kNegative) {
      throw DataError("init_pseudo: observation value " + std::to_string(o) +
                      " at class " + std::to_string(j) + " is not in {1, 0, -1}");
    }
    state.observed(j) = true;
    state.observed_values(j) = (o == kPositive);
    state.soft(j) = (o == kPositive) ? 1.0 : 0.0;
  }
  state.sync_allocation_tracking();
  return state;
}

Vector grad_lcs(const Vector& pred, const PseudoState& state) {
  check_pred(pred, state, "grad_lcs");
  const Real scale = 1.0 / static_cast<Real>(state.classes());
  Vector grad = Vector::Zero(state.classes());
  for (Index j = 0; j < state.classes(); ++j) {
    if (!state.observed(j)) grad(j) = scale * (state.soft(j) - pred(j));
  }
  return grad;
}

void momentum_step(PseudoState& state, const Vector& grad, Real beta1) {
  if (!grad.allFinite()) throw NumericError("momentum_step: non-finite gradient");
  check_pred(grad, state, "momentum_step");
  for (Index j = 0; j < state.classes(); ++j) {
    state.momentum(j) =
        state.observed(j) ? 0.0 : beta1 * state.momentum(j) + (1.0 - beta1) * grad(j);
  }
}

ArrayX self_guided_factor(const Vector& soft, const PseudoHyper& hyper) {
  // Scalar std::exp/std::pow so the printed extremes (alpha at soft 0.5,
  // alpha exp(-lambda) at soft 0 or 1) hold bit for bit.
  ArrayX psi(soft.size());
  for (Index j = 0; j < soft.size(); ++j) {
    const Real confidence = std::abs(2.0 * soft(j) - 1.0);
    psi(j) = hyper.alpha *
             std::exp(-hyper.lambda * std::pow(confidence, static_cast<Real>(hyper.n)));
  }
  return psi;
}

void latent_update(PseudoState& state, const PseudoHyper& hyper) {
  const ArrayX psi = self_guided_factor(state.soft, hyper);
  for (Index j = 0; j < state.classes(); ++j) {
    if (state.observed(j)) continue;
    state.latent(j) -= psi(j) * state.momentum(j);
    if (!std::isfinite(state.latent(j))) {
      throw NumericError("latent_update: non-finite latent at class " + std::to_string(j));
    }
    state.soft(j) = sigmoid(state.latent(j));
  }
}

PseudoState epoch_update(PseudoState state, const Vector& pred, const PseudoHyper& hyper) {
  const Vector grad = grad_lcs(pred, state);
  momentum_step(state, grad, hyper.beta1);
  latent_update(state, hyper);
  return state;
}

}  // namespace plmcl
