#include "wlvm/marginal.hpp"

#include "wlvm/model.hpp"
#include "wlvm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wlvm {

void OptConfig::validate() const {
  if (max_iters < 1) throw InvalidInput("max_iters must be positive");
  if (!(grad_tol > 0.0)) throw InvalidInput("grad_tol must be positive");
  if (!(step_tol > 0.0)) throw InvalidInput("step_tol must be positive");
  if (!(sigma2_floor >= kSigma2EvalFloor)) {
    throw InvalidInput("sigma2_floor must be at least the evaluable floor");
  }
}

namespace {

ModelParams unpack(const Vector& theta, Index m) {
  ModelParams p;
  p.mu = theta.segment(0, m);
  p.gamma = theta.segment(m, m);
  p.sigma2 = theta.segment(2 * m, m).array().exp().matrix();
  return p;
}

Vector pack(const ModelParams& p) {
  const Index m = p.size();
  Vector theta(3 * m);
  theta.segment(0, m) = p.mu;
  theta.segment(m, m) = p.gamma;
  theta.segment(2 * m, m) = p.sigma2.array().log().matrix();
  return theta;
}

}  // namespace

FitResult fit_marginal(const IndicatorPanel& panel, const WeightMatrix& weights,
                       const ModelParams& init, const OptConfig& config) {
  config.validate();
  panel.validate_for_fit();
  weights.validate_against(panel);

  const Index m = panel.num_indicators();
  const Index H = panel.num_subjects();
  const int n = static_cast<int>(3 * m);
  const double log_floor = std::log(config.sigma2_floor);

  ModelParams start = init;
  start.sigma2 = start.sigma2.cwiseMax(config.sigma2_floor);
  start.validate();

  const auto project = [&](Vector theta) {
    for (Index j = 2 * m; j < 3 * m; ++j) theta[j] = std::max(theta[j], log_floor);
    return theta;
  };
  const auto objective = [&](const Vector& theta) {
    return marginal_neg2_pll(panel, weights, unpack(theta, m));
  };
  const auto gradient = [&](const Vector& theta) {
    return marginal_neg2_pll_gradient(panel, weights, unpack(theta, m));
  };
  // Zero out gradient components pressing into the active floor; what
  // remains is the feasible first-order residual.
  const auto projected_gradient = [&](const Vector& theta, Vector g) {
    for (Index j = 2 * m; j < 3 * m; ++j) {
      if (theta[j] <= log_floor && g[j] > 0.0) g[j] = 0.0;
    }
    return g;
  };

  Vector theta = project(pack(start));
  double f = objective(theta);
  Vector g = gradient(theta);

  FitResult result;
  result.objective_trace.push_back(f);

  Matrix Hinv = Matrix::Identity(n, n);
  bool first_update = true;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;

  for (int it = 1; it <= config.max_iters; ++it) {
    result.iterations = it;

    const Vector gp = projected_gradient(theta, g);
    if (gp.cwiseAbs().maxCoeff() / static_cast<double>(H) < config.grad_tol) {
      result.converged = true;
      break;
    }

    Vector direction = -(Hinv * gp);
    if (direction.dot(gp) >= 0.0) {
      Hinv = Matrix::Identity(n, n);
      first_update = true;
      direction = -gp;
    }

    // Keep the very first trial step at unit length; afterwards the BFGS
    // scaling makes step 1 the natural trial.
    double step = 1.0;
    if (it == 1) {
      const double dnorm = direction.cwiseAbs().maxCoeff();
      if (dnorm > 1.0) step = 1.0 / dnorm;
    }

    bool accepted = false;
    Vector theta_new;
    double f_new = f;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      theta_new = project(theta + step * direction);
      f_new = objective(theta_new);
      const double decrease = g.dot(theta_new - theta);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.diagnostics = "line search failed after " +
                           std::to_string(kMaxBacktracks) + " backtracks";
      break;
    }

    const Vector s = theta_new - theta;
    const Vector g_new = gradient(theta_new);
    const Vector y = g_new - g;
    const double ys = y.dot(s);

    theta = theta_new;
    f = f_new;
    g = g_new;
    result.objective_trace.push_back(f);

    if (s.cwiseAbs().maxCoeff() < config.step_tol) {
      result.converged = true;
      break;
    }

    if (ys > 1e-12 * y.norm() * s.norm()) {
      if (first_update) {
        Hinv = (ys / y.squaredNorm()) * Matrix::Identity(n, n);
        first_update = false;
      }
      const double rho = 1.0 / ys;
      const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
      Hinv = left * Hinv * left.transpose() + rho * s * s.transpose();
    } else {
      Hinv = Matrix::Identity(n, n);
      first_update = true;
    }
  }

  if (!result.converged && result.diagnostics.empty()) {
    result.diagnostics = "max_iters reached before convergence";
  }

  ModelParams params = unpack(theta, m);
  params.sigma2 = params.sigma2.cwiseMax(config.sigma2_floor);

  PosteriorMoments post = posterior_moments(panel, weights, params);
  Vector alpha = post.x;
  if (!(params.gamma.sum() >= 0.0)) {
    params.gamma = -params.gamma;
    alpha = -alpha;
  }

  result.params = params;
  result.alpha = alpha;
  result.alpha_var = post.v;
  result.boundary_flags.resize(static_cast<size_t>(m));
  for (Index j = 0; j < m; ++j) {
    result.boundary_flags[static_cast<size_t>(j)] =
        params.sigma2[j] <= config.sigma2_floor * (1.0 + 1e-12);
  }
  return result;
}

Vector profile_objective(const IndicatorPanel& panel,
                         const WeightMatrix& weights, const ModelParams& params,
                         Index coordinate, const Vector& grid) {
  params.validate();
  const Index m = params.size();
  if (coordinate < 0 || coordinate >= 3 * m) {
    throw InvalidInput("coordinate must index one of the 3m parameters");
  }
  Vector values(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    ModelParams p = params;
    if (coordinate < m) {
      p.mu[coordinate] = grid[i];
    } else if (coordinate < 2 * m) {
      p.gamma[coordinate - m] = grid[i];
    } else {
      if (grid[i] <= kSigma2EvalFloor) {
        values[i] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      p.sigma2[coordinate - 2 * m] = grid[i];
    }
    values[i] = marginal_neg2_pll(panel, weights, p);
  }
  return values;
}

}  // namespace wlvm
