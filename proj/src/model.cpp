#include "wlvm/model.hpp"

#include "wlvm/numeric.hpp"

#include <cmath>

namespace wlvm {

namespace {

// Within-subject sums over indicators, accumulated in extended precision.
// Adding +0.0 at the end normalizes a possible -0.0 so that a weight-zero
// entry and a deleted entry produce bit-identical results.
struct SubjectSums {
  long double sum_w;   // sum_j w
  long double a;       // sum_j w gamma^2 / sigma^2
  long double b;       // sum_j w (y - mu) gamma / sigma^2
  long double c;       // sum_j w (y - mu)^2 / sigma^2
  long double log_s;   // sum_j w log sigma^2
};

SubjectSums accumulate_subject(const IndicatorPanel& panel,
                               const WeightMatrix& weights,
                               const ModelParams& params, Index h) {
  const Index m = panel.num_indicators();
  long double sum_w = 0.0L, a = 0.0L, b = 0.0L, c = 0.0L, log_s = 0.0L;
  for (Index j = 0; j < m; ++j) {
    const double w = weights.weights(j, h);
    const double r = panel.scores(j, h) - params.mu[j];
    const double g = params.gamma[j];
    const double s2 = params.sigma2[j];
    sum_w += w;
    a += w * (g * g / s2);
    b += w * (r * g / s2);
    c += w * (r * r / s2);
    log_s += w * std::log(s2);
  }
  return {sum_w + 0.0L, a + 0.0L, b + 0.0L, c + 0.0L, log_s + 0.0L};
}

void check_subject_scores(const IndicatorPanel& panel, Index h) {
  for (Index j = 0; j < panel.num_indicators(); ++j) {
    if (panel.observed(j, h) && !std::isfinite(panel.scores(j, h))) {
      throw InvalidInput("non-finite score among observed entries");
    }
  }
}

}  // namespace

double conditional_log_density(const IndicatorPanel& panel,
                               const WeightMatrix& weights,
                               const ModelParams& params, const Vector& alpha,
                               Index h) {
  params.validate();
  if (h < 0 || h >= panel.num_subjects()) {
    throw InvalidInput("subject index out of range");
  }
  if (alpha.size() != panel.num_subjects()) {
    throw InvalidInput("alpha length does not match subject count");
  }
  check_subject_scores(panel, h);

  const Index m = panel.num_indicators();
  const double a_h = alpha[h];
  long double acc = 0.0L;
  for (Index j = 0; j < m; ++j) {
    const double w = weights.weights(j, h);
    const double s2 = params.sigma2[j];
    const double resid = panel.scores(j, h) - params.mu[j] - params.gamma[j] * a_h;
    acc -= w * (0.5 * std::log(s2));
    acc -= w * (resid * resid / (2.0 * s2));
    acc -= w * (0.5 * kLog2Pi);
  }
  return static_cast<double>(acc + 0.0L);
}

double joint_neg_log_density(const IndicatorPanel& panel,
                             const WeightMatrix& weights,
                             const ModelParams& params, const Vector& alpha) {
  params.validate();
  if (alpha.size() != panel.num_subjects()) {
    throw InvalidInput("alpha length does not match subject count");
  }
  const Index H = panel.num_subjects();
  Vector terms(H);
  for (Index h = 0; h < H; ++h) {
    const double a_h = alpha[h];
    terms[h] = 0.5 * a_h * a_h + 0.5 * kLog2Pi -
               conditional_log_density(panel, weights, params, alpha, h);
  }
  return pairwise_sum(terms);
}

PosteriorMoments posterior_moments(const IndicatorPanel& panel,
                                   const WeightMatrix& weights,
                                   const ModelParams& params) {
  params.validate();
  const Index H = panel.num_subjects();
  PosteriorMoments post;
  post.x.resize(H);
  post.v.resize(H);
  post.z.resize(H);
  for (Index h = 0; h < H; ++h) {
    const SubjectSums s = accumulate_subject(panel, weights, params, h);
    const double precision = static_cast<double>(1.0L + s.a);
    const double x = static_cast<double>(s.b) / precision;
    const double v = 1.0 / precision;
    post.x[h] = x;
    post.v[h] = v;
    post.z[h] = x * x + v;
  }
  return post;
}

Vector marginal_neg2_pll_terms(const IndicatorPanel& panel,
                               const WeightMatrix& weights,
                               const ModelParams& params) {
  params.validate();
  const Index H = panel.num_subjects();
  Vector terms(H);
  for (Index h = 0; h < H; ++h) {
    const SubjectSums s = accumulate_subject(panel, weights, params, h);
    const long double d = 1.0L + s.a;
    const long double t = s.sum_w * static_cast<long double>(kLog2Pi) +
                          std::log(d) + s.log_s + s.c - s.b * s.b / d;
    terms[h] = static_cast<double>(t);
  }
  return terms;
}

double marginal_neg2_pll(const IndicatorPanel& panel,
                         const WeightMatrix& weights,
                         const ModelParams& params) {
  return pairwise_sum(marginal_neg2_pll_terms(panel, weights, params));
}

Vector marginal_neg2_pll_gradient(const IndicatorPanel& panel,
                                  const WeightMatrix& weights,
                                  const ModelParams& params) {
  params.validate();
  const Index m = panel.num_indicators();
  const Index H = panel.num_subjects();

  const PosteriorMoments post = posterior_moments(panel, weights, params);

  // The partials collapse onto the posterior moments:
  //   d/dmu_j         = -(2/sigma_j^2) sum_h w_jh (r_jh - gamma_j x_h)
  //   d/dgamma_j      =  (2/sigma_j^2) sum_h w_jh (gamma_j z_h - r_jh x_h)
  //   d/dlog sigma_j^2 = sum_h w_jh
  //                      - (1/sigma_j^2) sum_h w_jh (r_jh^2 - 2 r_jh gamma_j x_h
  //                                                  + gamma_j^2 z_h)
  Vector grad(3 * m);
  for (Index j = 0; j < m; ++j) {
    const double g = params.gamma[j];
    const double s2 = params.sigma2[j];
    long double acc_mu = 0.0L, acc_gamma = 0.0L, acc_w = 0.0L, acc_s = 0.0L;
    for (Index h = 0; h < H; ++h) {
      const double w = weights.weights(j, h);
      const double r = panel.scores(j, h) - params.mu[j];
      const double x = post.x[h];
      const double z = post.z[h];
      acc_mu += w * (r - g * x);
      acc_gamma += w * (g * z - r * x);
      acc_w += w;
      acc_s += w * (r * r - 2.0 * r * g * x + g * g * z);
    }
    grad[j] = static_cast<double>(-2.0L * acc_mu / s2);
    grad[m + j] = static_cast<double>(2.0L * acc_gamma / s2);
    grad[2 * m + j] = static_cast<double>(acc_w - acc_s / s2);
  }
  return grad;
}

}  // namespace wlvm
