#pragma once

#include "wlvm/types.hpp"

namespace wlvm {

struct EmConfig {
  int max_iters = 1000;
  // Threshold on the relative change of the -2 log marginal pseudo-likelihood
  // between successive iterations: |f_prev - f| / max(1, |f_prev|).
  double tol = 1e-8;
  // Max |delta alpha_h| for the final latent-score refinement loop.
  double alpha_tol = 1e-6;
  double sigma2_floor = 1e-8;

  void validate() const;
};

// Moment-based starting point: per indicator, mu is the weighted mean and the
// weighted variance is split evenly between loading^2 and residual variance.
ModelParams default_init(const IndicatorPanel& panel,
                         const WeightMatrix& weights);

// One M-step given posterior moments, updating coordinates in the fixed order
// mu -> gamma -> sigma2, each using the freshest values:
//   mu_j     = sum_h w_jh (Y_jh - gamma_j x_h) / sum_h w_jh
//   gamma_j  = sum_h w_jh x_h (Y_jh - mu_j) / sum_h w_jh z_h
//   sigma2_j = sum_h w_jh [(Y_jh-mu_j)^2 - 2 (Y_jh-mu_j) gamma_j x_h
//              + gamma_j^2 z_h] / sum_h w_jh, clamped at sigma2_floor.
ModelParams m_step(const IndicatorPanel& panel, const WeightMatrix& weights,
                   const PosteriorMoments& post, const ModelParams& current,
                   double sigma2_floor = 1e-8);

// Alternates posterior moments (E) and m_step (M) until the relative change
// of the marginal objective drops below tol or max_iters is hit, then refines
// the latent scores until they are stable. Non-convergence is reported via
// converged=false, not an error. The result is sign-canonicalized.
FitResult fit_em(const IndicatorPanel& panel, const WeightMatrix& weights,
                 const ModelParams& init, const EmConfig& config = {});

}  // namespace wlvm
