#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace wlvm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

// Malformed in-memory inputs: non-finite scores, shape mismatches, bad ranges.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameter vector outside the evaluable domain (sigma^2 at or below the floor).
struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An indicator that carries no weight (or too few observations) to estimate.
struct UnidentifiableIndicator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An indicator with no variability; its variance cannot be split.
struct DegenerateIndicator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File-level problems: malformed CSV, duplicate keys, unparsable numbers.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest residual variance the likelihood code will evaluate. Fitters clamp
// at a configurable floor that must sit at or above this.
inline constexpr double kSigma2EvalFloor = 1e-10;

// Observed indicator scores, m indicators by H subjects. Unobserved cells
// store score 0 and are never read; every sum is gated by the mask and by the
// companion weights being zero there.
struct IndicatorPanel {
  Matrix scores;       // m x H
  BoolMask observed;   // m x H
  std::vector<std::string> indicator_names;  // m labels
  std::vector<std::string> subject_ids;      // H labels

  Index num_indicators() const { return scores.rows(); }
  Index num_subjects() const { return scores.cols(); }

  // Shape/finiteness invariants. Throws InvalidInput.
  void validate() const;
  // validate() plus estimability: every subject has an observed indicator and
  // every indicator at least two observed subjects. Fitters call this.
  void validate_for_fit() const;
};

// Measure-specific sample weights aligned to a panel. Entries are nonnegative
// and exactly zero wherever the panel is unobserved.
struct WeightMatrix {
  Matrix weights;  // m x H

  static WeightMatrix ones(Index m, Index H);
  static WeightMatrix ones_like(const IndicatorPanel& panel);

  Index num_indicators() const { return weights.rows(); }
  Index num_subjects() const { return weights.cols(); }

  void validate_against(const IndicatorPanel& panel) const;
};

// Per-indicator parameter triples (mu_j, gamma_j, sigma_j^2).
struct ModelParams {
  Vector mu;      // intercepts
  Vector gamma;   // factor loadings
  Vector sigma2;  // residual variances, strictly positive

  Index size() const { return mu.size(); }

  // Equal sizes, finite entries, sigma2 >= kSigma2EvalFloor. Throws
  // InvalidParams.
  void validate() const;

  // Fitted results are normalized so sum(gamma) >= 0; the likelihood is
  // invariant under (gamma, alpha) -> (-gamma, -alpha).
  bool is_sign_canonical() const { return gamma.sum() >= 0.0; }
};

// Posterior moments of the latent factor per subject.
struct PosteriorMoments {
  Vector x;  // posterior means
  Vector v;  // posterior variances, in (0, 1]
  Vector z;  // posterior second moments, x^2 + v exactly
};

struct FitResult {
  ModelParams params;
  Vector alpha;      // latent scores at the fitted parameters
  Vector alpha_var;  // posterior variances of the latent scores
  std::vector<double> objective_trace;  // -2 log pseudo-likelihood per iteration
  bool converged = false;
  int iterations = 0;
  std::vector<bool> boundary_flags;  // indicator sits at the sigma^2 floor
  std::string diagnostics;           // set when the fit stopped abnormally

  double final_objective() const { return objective_trace.back(); }
};

}  // namespace wlvm
