#pragma once

#include "wlvm/rng.hpp"
#include "wlvm/types.hpp"

namespace wlvm {

// Closed-form large-H limits of the expected negative (weighted) marginal
// log-likelihood per subject, plus a multivariate-normal oracle computed on a
// code path independent of the marginal formulas. These serve as ground truth
// for the likelihood code.

// Almost-sure limit of the per-subject expected negative marginal
// log-likelihood under unit weights:
//   (1/2) log[(1 + sum gamma^2/sigma^2) prod sigma^2] + (m/2)(log 2pi + 1).
double enmll_limit(const ModelParams& params);

// Convention for the log(2pi) constant in the weighted limit. kFullWeight
// (sum_j w_j log 2pi) is the variant consistent with the rescaling identity:
// it reduces exactly to enmll_limit at unit weights. kWeightMinusOne
// (sum_j (w_j - 1) log 2pi) differs by the constant m log 2pi.
enum class Log2PiConstant { kFullWeight, kWeightMinusOne };

// Almost-sure limit of the per-subject expected negative weighted marginal
// log-likelihood under constant per-indicator weights w:
//   (1/2) [ m + log((1 + sum w gamma^2/sigma^2) prod sigma^2/w)
//           + sum (w-1) log sigma^2 + sum log w + constant ].
double enwmll_limit(const ModelParams& params, const Vector& w,
                    Log2PiConstant constant = Log2PiConstant::kFullWeight);

// Exact negative log-likelihood of a fully observed panel under
// N(mu, gamma gamma' + diag(sigma2)), via a dense Cholesky solve on the m x m
// covariance. Shares no formulas with the marginal pseudo-likelihood path.
double mvn_nll_oracle(const IndicatorPanel& panel, const ModelParams& params);

struct LimitConvergenceReport {
  double sample_mean = 0.0;
  double limit = 0.0;
  double sample_sd = 0.0;
  double z = 0.0;  // sqrt(H) (sample_mean - limit) / sample_sd
};

// Simulates H subjects from the model with constant per-indicator weights,
// computes the mean per-subject negative weighted marginal log-likelihood,
// and standardizes its deviation from the closed-form limit. Requires
// H >= 1000 so the CLT regime applies.
LimitConvergenceReport check_limit_convergence(const ModelParams& params,
                                               const Vector& w_const, int H,
                                               Rng& rng);

// Unit-weight variant against enmll_limit.
LimitConvergenceReport check_limit_convergence(const ModelParams& params,
                                               int H, Rng& rng);

}  // namespace wlvm
