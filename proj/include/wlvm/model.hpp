#pragma once

#include "wlvm/types.hpp"

namespace wlvm {

// Closed-form likelihood and posterior formulas of the single-factor model
// with measure-specific weights. All functions are pure; inputs are shared
// freely across threads.
//
// Per subject h the weighted conditional log-density is
//   sum_j w_jh [ -log sigma_j - (Y_jh - mu_j - gamma_j a)^2 / (2 sigma_j^2)
//                - log(2 pi)/2 ],
// the latent factor has a standard normal prior, and integrating it out gives
// the -2 log marginal pseudo-likelihood per subject
//   W_h log 2pi + log(1 + A_h) + sum_j w_jh log sigma_j^2 + C_h
//     - B_h^2 / (1 + A_h)
// with W_h = sum_j w_jh, A_h = sum_j w_jh gamma_j^2/sigma_j^2,
// B_h = sum_j w_jh (Y_jh - mu_j) gamma_j / sigma_j^2,
// C_h = sum_j w_jh (Y_jh - mu_j)^2 / sigma_j^2.

// Weighted conditional log-density of subject h's indicators given the latent
// score. Unobserved entries carry weight zero and contribute nothing.
double conditional_log_density(const IndicatorPanel& panel,
                               const WeightMatrix& weights,
                               const ModelParams& params, const Vector& alpha,
                               Index h);

// Negative log joint pseudo-density of data and latent scores, summed over
// subjects: sum_h [ a_h^2/2 + log(2 pi)/2 - conditional_log_density(h) ].
double joint_neg_log_density(const IndicatorPanel& panel,
                             const WeightMatrix& weights,
                             const ModelParams& params, const Vector& alpha);

// Posterior mean, variance and second moment of the latent factor for every
// subject. A subject with no effective weight gets the prior (x=0, v=1, z=1).
PosteriorMoments posterior_moments(const IndicatorPanel& panel,
                                   const WeightMatrix& weights,
                                   const ModelParams& params);

// Per-subject contributions to the -2 log marginal pseudo-likelihood.
Vector marginal_neg2_pll_terms(const IndicatorPanel& panel,
                               const WeightMatrix& weights,
                               const ModelParams& params);

// Total -2 log marginal pseudo-likelihood (fixed-order pairwise reduction of
// the per-subject terms).
double marginal_neg2_pll(const IndicatorPanel& panel,
                         const WeightMatrix& weights,
                         const ModelParams& params);

// Exact gradient of marginal_neg2_pll with respect to
// (mu_1..mu_m, gamma_1..gamma_m, log sigma_1^2..log sigma_m^2), in that
// order. The log-variance coordinates keep the optimizer unconstrained.
Vector marginal_neg2_pll_gradient(const IndicatorPanel& panel,
                                  const WeightMatrix& weights,
                                  const ModelParams& params);

}  // namespace wlvm
