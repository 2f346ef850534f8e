#include "wlvm/asymptotics.hpp"

#include "wlvm/model.hpp"
#include "wlvm/numeric.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace wlvm {

namespace {

// Shared core of both limits, written so the weighted version at w = 1
// reproduces the unweighted one bit for bit.
double limit_core(const ModelParams& params, const Vector* w,
                  double log2pi_constant) {
  const Index m = params.size();
  long double quad = 0.0L;   // sum w gamma^2 / sigma^2
  long double prod = 1.0L;   // prod sigma^2 / w
  long double s_sig = 0.0L;  // sum (w - 1) log sigma^2
  long double s_w = 0.0L;    // sum log w
  for (Index j = 0; j < m; ++j) {
    const double wj = w ? (*w)[j] : 1.0;
    const double g = params.gamma[j];
    const double s2 = params.sigma2[j];
    quad += wj * (g * g / s2);
    prod *= s2 / wj;
    s_sig += (wj - 1.0) * std::log(s2);
    s_w += std::log(wj);
  }
  const long double core = static_cast<long double>(m) +
                           std::log((1.0L + quad) * prod) + s_sig + s_w +
                           static_cast<long double>(log2pi_constant);
  return 0.5 * static_cast<double>(core);
}

}  // namespace

double enmll_limit(const ModelParams& params) {
  params.validate();
  return limit_core(params, nullptr,
                    static_cast<double>(params.size()) * kLog2Pi);
}

double enwmll_limit(const ModelParams& params, const Vector& w,
                    Log2PiConstant constant) {
  params.validate();
  if (w.size() != params.size()) {
    throw InvalidInput("weight vector length must match indicator count");
  }
  for (Index j = 0; j < w.size(); ++j) {
    if (!(w[j] > 0.0) || !std::isfinite(w[j])) {
      throw InvalidInput("constant weights must be positive and finite");
    }
  }
  long double sum_w = 0.0L;
  for (Index j = 0; j < w.size(); ++j) sum_w += w[j];
  const double total = static_cast<double>(sum_w);
  const double c = constant == Log2PiConstant::kFullWeight
                       ? total * kLog2Pi
                       : (total - static_cast<double>(w.size())) * kLog2Pi;
  return limit_core(params, &w, c);
}

double mvn_nll_oracle(const IndicatorPanel& panel, const ModelParams& params) {
  params.validate();
  panel.validate();
  const Index m = panel.num_indicators();
  const Index H = panel.num_subjects();
  if (m < 2) throw InvalidInput("oracle needs at least two indicators");
  if (!panel.observed.all()) {
    throw InvalidInput("oracle requires a fully observed panel");
  }
  if (params.size() != m) {
    throw InvalidInput("parameter length must match indicator count");
  }

  Matrix cov = params.gamma * params.gamma.transpose();
  cov.diagonal() += params.sigma2;

  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("covariance is numerically singular");
  }
  double log_det = 0.0;
  for (Index j = 0; j < m; ++j) {
    log_det += 2.0 * std::log(llt.matrixL()(j, j));
  }

  Vector terms(H);
  for (Index h = 0; h < H; ++h) {
    const Vector centered = panel.scores.col(h) - params.mu;
    const double quad = centered.dot(llt.solve(centered));
    terms[h] = 0.5 * (log_det + quad + static_cast<double>(m) * kLog2Pi);
  }
  return pairwise_sum(terms);
}

namespace {

LimitConvergenceReport limit_convergence_impl(const ModelParams& params,
                                              const Vector& w_const, int H,
                                              Rng& rng, double limit) {
  params.validate();
  if (H < 1000) throw InvalidInput("limit convergence check needs H >= 1000");
  const Index m = params.size();

  IndicatorPanel panel;
  panel.scores.resize(m, H);
  panel.observed = BoolMask::Constant(m, H, true);
  panel.indicator_names.resize(static_cast<size_t>(m));
  panel.subject_ids.resize(static_cast<size_t>(H));
  for (Index j = 0; j < m; ++j) {
    panel.indicator_names[static_cast<size_t>(j)] = "y" + std::to_string(j + 1);
  }
  for (Index h = 0; h < H; ++h) {
    panel.subject_ids[static_cast<size_t>(h)] = "s" + std::to_string(h + 1);
  }

  const Vector sd = params.sigma2.cwiseSqrt();
  for (Index h = 0; h < H; ++h) {
    const double a = rng.normal();
    for (Index j = 0; j < m; ++j) {
      panel.scores(j, h) = params.mu[j] + params.gamma[j] * a + sd[j] * rng.normal();
    }
  }

  WeightMatrix weights{w_const * Eigen::RowVectorXd::Ones(H)};
  const Vector terms = marginal_neg2_pll_terms(panel, weights, params);

  LimitConvergenceReport report;
  report.limit = limit;
  report.sample_mean = 0.5 * pairwise_sum(terms) / static_cast<double>(H);
  const Vector centered =
      (0.5 * terms.array() - report.sample_mean).matrix();
  report.sample_sd =
      std::sqrt(centered.squaredNorm() / static_cast<double>(H - 1));
  report.z = std::sqrt(static_cast<double>(H)) *
             (report.sample_mean - report.limit) / report.sample_sd;
  return report;
}

}  // namespace

LimitConvergenceReport check_limit_convergence(const ModelParams& params,
                                               const Vector& w_const, int H,
                                               Rng& rng) {
  return limit_convergence_impl(
      params, w_const, H, rng,
      enwmll_limit(params, w_const, Log2PiConstant::kFullWeight));
}

LimitConvergenceReport check_limit_convergence(const ModelParams& params,
                                               int H, Rng& rng) {
  const Vector ones = Vector::Ones(params.size());
  return limit_convergence_impl(params, ones, H, rng, enmll_limit(params));
}

}  // namespace wlvm
