#include "wlvm/em.hpp"

#include "wlvm/model.hpp"
#include "wlvm/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace wlvm {

void EmConfig::validate() const {
  if (max_iters < 1) throw InvalidInput("max_iters must be positive");
  if (!(tol > 0.0) || !(tol < 1.0)) throw InvalidInput("tol must lie in (0, 1)");
  if (!(alpha_tol > 0.0)) throw InvalidInput("alpha_tol must be positive");
  if (!(sigma2_floor >= kSigma2EvalFloor)) {
    throw InvalidInput("sigma2_floor must be at least the evaluable floor");
  }
}

ModelParams default_init(const IndicatorPanel& panel,
                         const WeightMatrix& weights) {
  panel.validate_for_fit();
  weights.validate_against(panel);
  const Index m = panel.num_indicators();
  const Index H = panel.num_subjects();

  ModelParams p;
  p.mu.resize(m);
  p.gamma.resize(m);
  p.sigma2.resize(m);
  for (Index j = 0; j < m; ++j) {
    long double sum_w = 0.0L, sum_wy = 0.0L;
    for (Index h = 0; h < H; ++h) {
      sum_w += weights.weights(j, h);
      sum_wy += weights.weights(j, h) * panel.scores(j, h);
    }
    if (!(sum_w > 0.0L)) {
      throw UnidentifiableIndicator("indicator " + panel.indicator_names[j] +
                                    " carries no weight");
    }
    const double mean = static_cast<double>(sum_wy / sum_w);
    long double sum_wd2 = 0.0L;
    for (Index h = 0; h < H; ++h) {
      const double d = panel.scores(j, h) - mean;
      sum_wd2 += weights.weights(j, h) * d * d;
    }
    const double var = static_cast<double>(sum_wd2 / sum_w);
    if (var <= 1e-15 * std::max(1.0, mean * mean)) {
      throw DegenerateIndicator("indicator " + panel.indicator_names[j] +
                                " has zero weighted variance");
    }
    p.mu[j] = mean;
    p.gamma[j] = std::sqrt(0.5 * var);
    p.sigma2[j] = 0.5 * var;
  }
  return p;
}

ModelParams m_step(const IndicatorPanel& panel, const WeightMatrix& weights,
                   const PosteriorMoments& post, const ModelParams& current,
                   double sigma2_floor) {
  const Index m = panel.num_indicators();
  const Index H = panel.num_subjects();
  if (post.x.size() != H || post.v.size() != H || post.z.size() != H) {
    throw InvalidInput("posterior moments do not match subject count");
  }

  ModelParams next = current;
  for (Index j = 0; j < m; ++j) {
    long double sum_w = 0.0L;
    for (Index h = 0; h < H; ++h) sum_w += weights.weights(j, h);
    if (!(sum_w > 0.0L)) {
      throw UnidentifiableIndicator("indicator " + panel.indicator_names[j] +
                                    " carries no weight");
    }

    const double g_old = current.gamma[j];
    long double acc = 0.0L;
    for (Index h = 0; h < H; ++h) {
      acc += weights.weights(j, h) * (panel.scores(j, h) - g_old * post.x[h]);
    }
    const double mu = static_cast<double>(acc / sum_w);

    long double num = 0.0L, den = 0.0L;
    for (Index h = 0; h < H; ++h) {
      const double w = weights.weights(j, h);
      num += w * post.x[h] * (panel.scores(j, h) - mu);
      den += w * post.z[h];
    }
    const double g = static_cast<double>(num / den);

    acc = 0.0L;
    for (Index h = 0; h < H; ++h) {
      const double w = weights.weights(j, h);
      const double r = panel.scores(j, h) - mu;
      acc += w * (r * r - 2.0 * r * g * post.x[h] + g * g * post.z[h]);
    }
    const double s2 = static_cast<double>(acc / sum_w);

    next.mu[j] = mu;
    next.gamma[j] = g;
    next.sigma2[j] = std::max(s2, sigma2_floor);
  }
  return next;
}

FitResult fit_em(const IndicatorPanel& panel, const WeightMatrix& weights,
                 const ModelParams& init, const EmConfig& config) {
  config.validate();
  panel.validate_for_fit();
  weights.validate_against(panel);

  ModelParams params = init;
  params.sigma2 = params.sigma2.cwiseMax(config.sigma2_floor);
  params.validate();

  FitResult result;
  result.objective_trace.push_back(marginal_neg2_pll(panel, weights, params));

  for (int it = 1; it <= config.max_iters; ++it) {
    const PosteriorMoments post = posterior_moments(panel, weights, params);
    params = m_step(panel, weights, post, params, config.sigma2_floor);

    const double prev = result.objective_trace.back();
    const double obj = marginal_neg2_pll(panel, weights, params);
    result.objective_trace.push_back(obj);
    result.iterations = it;

    if (std::abs(prev - obj) / std::max(1.0, std::abs(prev)) < config.tol) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    result.diagnostics = "max_iters reached before the objective settled";
  }

  // Latent-score refinement at the converged parameters. The posterior-mean
  // update does not feed back into itself, so the loop stabilizes quickly;
  // capped at 100 passes.
  PosteriorMoments post = posterior_moments(panel, weights, params);
  Vector alpha = post.x;
  for (int pass = 0; pass < 100; ++pass) {
    const Vector refreshed = posterior_moments(panel, weights, params).x;
    const double delta = (refreshed - alpha).cwiseAbs().maxCoeff();
    alpha = refreshed;
    if (delta < config.alpha_tol) break;
  }

  if (!(params.gamma.sum() >= 0.0)) {
    params.gamma = -params.gamma;
    alpha = -alpha;
  }

  result.params = params;
  result.alpha = alpha;
  result.alpha_var = post.v;
  result.boundary_flags.resize(static_cast<size_t>(params.size()));
  for (Index j = 0; j < params.size(); ++j) {
    result.boundary_flags[static_cast<size_t>(j)] =
        params.sigma2[j] <= config.sigma2_floor * (1.0 + 1e-12);
  }
  return result;
}

}  // namespace wlvm
