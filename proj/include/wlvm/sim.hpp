#pragma once

#include "wlvm/rng.hpp"
#include "wlvm/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wlvm {

// Replication studies on equicorrelated Gaussian panels with Gamma-distributed
// measure-specific weights. Replications run on a worker pool; every panel and
// every weight row draws from its own counter-based substream of the scenario
// seed, and aggregation walks replications in index order, so results are
// bit-identical for a given seed regardless of thread count, and adding
// replications never perturbs earlier ones.

enum class WeightKind { kGamma, kUniform };

struct SimScenario {
  int m = 3;
  int H = 1000;
  double rho = 0.5;
  Vector gamma_shapes;  // m entries
  Vector gamma_scales;  // m entries
  double weight_coeff = 1.0;  // applied after mean-1 normalization
  int reps = 100;
  std::uint64_t seed = 1;
  WeightKind weight_kind = WeightKind::kGamma;

  void validate() const;
};

struct RepRecord {
  int rep = 0;
  bool ok = false;         // fit produced a result (exceptions mark failure)
  bool converged = false;
  Vector abs_gamma;        // |gamma_hat|, sign-canonicalized
  Vector sigma;            // sqrt(sigma2_hat)
  double alpha_sd = 0.0;   // sample sd of the fitted latent scores
};

struct SimSummary {
  Vector mean_gamma;   // mean |gamma_hat| over successful replications
  Vector mean_sigma;   // mean sigma_hat over successful replications
  double mean_alpha_sd = 0.0;
  std::vector<RepRecord> per_rep;
  int failed = 0;
};

struct ExtremeCell {
  double coeff = 0.0;
  int H = 0;
  double mean_sigma1 = 0.0;  // replication-average fitted sigma_1
  int ok_reps = 0;
};

using Fitter =
    std::function<FitResult(const IndicatorPanel&, const WeightMatrix&)>;

// EM / quasi-Newton fitters starting from default_init.
Fitter make_em_fitter(int max_iters = 1000, double tol = 1e-8,
                      double sigma2_floor = 1e-8);
Fitter make_marginal_fitter(int max_iters = 500, double grad_tol = 1e-7,
                            double sigma2_floor = 1e-8);

// H draws from N(0, Sigma) with unit variances and constant pairwise
// correlation rho, built as Y_j = sqrt(rho) a + sqrt(1-rho) e_j.
IndicatorPanel gen_equicorrelated_panel(int m, int H, double rho, Rng& rng);

// H independent Gamma(shape, scale) draws.
Vector gen_gamma_weights(double shape, double scale, int H, Rng& rng);

enum class DegenerateKind { kIdenticalPair, kCorrProduct };

// m=3 unit-variance Gaussian panels whose correlation structure drives the
// smallest residual variance to zero: either a duplicated indicator pair, or
// corr(1,2)*corr(1,3) > corr(2,3). Throws if the requested correlation matrix
// is not positive definite.
IndicatorPanel gen_degenerate_panel(DegenerateKind kind, int H, Rng& rng,
                                    double r12 = 0.8, double r13 = 0.8,
                                    double r23 = 0.5);

// Per replication: generate panel and weights, normalize weights to mean 1,
// apply the scenario coefficient, fit, and record |gamma_hat| and sigma_hat.
// Replications that throw are recorded as failed and excluded from the means.
SimSummary run_regular_study(const SimScenario& scenario, const Fitter& fitter,
                             int threads = 0);

// Replication-average fitted sigma_1 for every (weight coefficient, H) pair.
// The same generated panel and weights are reused across coefficients within
// a replication.
std::vector<ExtremeCell> run_extreme_study(const SimScenario& base,
                                           const std::vector<double>& coeffs,
                                           const std::vector<int>& H_list,
                                           const Fitter& fitter,
                                           int threads = 0);

// Plain-text key = value scenario files; keys mirror the SimScenario fields
// (m, H, rho, gamma_shapes, gamma_scales, weight_coeff, reps, seed,
// weight_kind) plus weight_coeffs / H_list for the extreme study.
struct ScenarioFile {
  SimScenario scenario;
  std::vector<double> weight_coeffs;  // extreme study only
  std::vector<int> H_list;            // extreme study only
};
ScenarioFile load_scenario_file(const std::string& path);

}  // namespace wlvm
