#pragma once

#include "wlvm/types.hpp"

namespace wlvm {

struct OptConfig {
  int max_iters = 500;
  // Convergence threshold on the max-norm of the projected gradient divided
  // by the subject count.
  double grad_tol = 1e-7;
  // Convergence threshold on the max-norm of an accepted step.
  double step_tol = 1e-10;
  double sigma2_floor = 1e-8;

  void validate() const;
};

// Minimizes the -2 log marginal pseudo-likelihood over (mu, gamma,
// log sigma2) by BFGS with an Armijo backtracking line search, projecting
// log sigma2 onto [log sigma2_floor, inf). Latent scores and their posterior
// variances are computed from the fitted parameters; the result is
// sign-canonicalized. Line-search failure yields converged=false with
// diagnostics, never an exception.
FitResult fit_marginal(const IndicatorPanel& panel, const WeightMatrix& weights,
                       const ModelParams& init, const OptConfig& config = {});

// Objective slice along one of the 3m coordinates, ordered
// (mu_1..mu_m, gamma_1..gamma_m, sigma2_1..sigma2_m), holding the others
// fixed. Grid points with sigma2 at or below the evaluable floor are skipped
// with a NaN marker.
Vector profile_objective(const IndicatorPanel& panel,
                         const WeightMatrix& weights, const ModelParams& params,
                         Index coordinate, const Vector& grid);

}  // namespace wlvm
