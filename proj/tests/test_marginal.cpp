#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

#include "wlvm/em.hpp"
#include "wlvm/marginal.hpp"
#include "wlvm/model.hpp"
#include "wlvm/sim.hpp"
#include "wlvm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace wlvm;
using namespace wlvm::testutil;

namespace {

// Cyclic per-coordinate exhaustive grid descent on the marginal objective at
// a fixed resolution; the reference the optimizer has to beat.
ModelParams grid_search_fit(const IndicatorPanel& panel,
                            const WeightMatrix& weights, ModelParams start,
                            double resolution) {
  const Index m = start.size();
  const auto eval = [&](const ModelParams& p) {
    return marginal_neg2_pll(panel, weights, p);
  };
  double best = eval(start);
  for (int cycle = 0; cycle < 200; ++cycle) {
    bool moved = false;
    for (Index coord = 0; coord < 3 * m; ++coord) {
      const Index j = coord % m;
      double lo, hi;
      if (coord < m) {
        lo = -1.5;
        hi = 1.5;
      } else if (coord < 2 * m) {
        lo = -1.5;
        hi = 1.5;
      } else {
        lo = 0.02;
        hi = 2.5;
      }
      ModelParams candidate = start;
      double coord_best = best;
      double coord_arg = coord < m ? start.mu[j]
                         : coord < 2 * m ? start.gamma[j]
                                         : start.sigma2[j];
      const int steps = static_cast<int>((hi - lo) / resolution);
      for (int k = 0; k <= steps; ++k) {
        const double value = lo + resolution * k;
        if (coord < m) {
          candidate.mu[j] = value;
        } else if (coord < 2 * m) {
          candidate.gamma[j] = value;
        } else {
          candidate.sigma2[j] = value;
        }
        const double obj = eval(candidate);
        if (obj < coord_best - 1e-12) {
          coord_best = obj;
          coord_arg = value;
        }
      }
      if (coord_best < best - 1e-12) {
        best = coord_best;
        moved = true;
      }
      if (coord < m) {
        start.mu[j] = coord_arg;
      } else if (coord < 2 * m) {
        start.gamma[j] = coord_arg;
      } else {
        start.sigma2[j] = coord_arg;
      }
      candidate = start;
    }
    if (!moved) break;
  }
  return start;
}

}  // namespace

TEST_CASE("marginal fitting") {
  SUBCASE("starting at the truth stays stationary and converges") {
    Rng rng(101);
    const double r = 1.0 / std::sqrt(2.0);
    auto truth = params_of({0.0, 0.0, 0.0}, {r, r, r}, {0.5, 0.5, 0.5});
    auto panel = simulate_model_panel(truth, 800, rng);
    auto weights = WeightMatrix::ones(3, 800);
    const auto fit = fit_marginal(panel, weights, truth);
    REQUIRE(fit.converged);
    for (size_t i = 1; i < fit.objective_trace.size(); ++i) {
      CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-9);
    }
    const Vector grad =
        marginal_neg2_pll_gradient(panel, weights, fit.params);
    CHECK(grad.cwiseAbs().maxCoeff() / 800.0 < 1e-7);
  }

  SUBCASE("beats exhaustive coordinate grid search on a tiny instance") {
    Rng rng(102);
    auto truth = params_of({0.1, -0.2}, {0.8, 0.6}, {0.5, 0.7});
    auto panel = simulate_model_panel(truth, 50, rng);
    auto weights = random_weights(2, 50, rng, 0.5, 2.5);
    const auto init = default_init(panel, weights);
    const auto fit = fit_marginal(panel, weights, init);
    REQUIRE(fit.converged);

    ModelParams grid = grid_search_fit(panel, weights, init, 1e-2);
    if (grid.gamma.sum() < 0.0) grid.gamma = (-grid.gamma).eval();
    const double fit_obj = marginal_neg2_pll(panel, weights, fit.params);
    const double grid_obj = marginal_neg2_pll(panel, weights, grid);
    CHECK(fit_obj <= grid_obj + 1e-9);
    for (Index j = 0; j < 2; ++j) {
      CHECK(std::abs(fit.params.mu[j] - grid.mu[j]) <= 1e-2 + 1e-12);
      CHECK(std::abs(fit.params.gamma[j] - grid.gamma[j]) <= 1e-2 + 1e-12);
      CHECK(std::abs(fit.params.sigma2[j] - grid.sigma2[j]) <= 1e-2 + 1e-12);
    }
  }

  SUBCASE("no worse than the EM fixed point") {
    Rng rng(103);
    for (int c = 0; c < 4; ++c) {
      auto params = random_params(3, rng);
      auto panel = simulate_model_panel(params, 300, rng);
      auto weights = random_weights(3, 300, rng, 0.3, 2.0);
      const auto init = default_init(panel, weights);
      const auto em = fit_em(panel, weights, init);
      const auto marginal = fit_marginal(panel, weights, init);
      CHECK(marginal.final_objective() <=
            em.final_objective() + 1e-6 * 300.0);
    }
  }

  SUBCASE("invariant under subject relabeling") {
    Rng rng(104);
    auto truth = random_params(3, rng);
    auto panel = simulate_model_panel(truth, 200, rng);
    auto weights = random_weights(3, 200, rng, 0.3, 2.0);

    std::vector<Index> perm(200);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1],
                perm[static_cast<size_t>(rng.uniform01() * i)]);
    }
    IndicatorPanel shuffled = panel;
    WeightMatrix shuffled_w = weights;
    for (Index h = 0; h < 200; ++h) {
      shuffled.scores.col(h) = panel.scores.col(perm[static_cast<size_t>(h)]);
      shuffled.subject_ids[static_cast<size_t>(h)] =
          panel.subject_ids[static_cast<size_t>(perm[static_cast<size_t>(h)])];
      shuffled_w.weights.col(h) =
          weights.weights.col(perm[static_cast<size_t>(h)]);
    }

    const auto fit = fit_marginal(panel, weights, default_init(panel, weights));
    const auto fit_shuffled =
        fit_marginal(shuffled, shuffled_w, default_init(shuffled, shuffled_w));
    CHECK((fit.params.mu - fit_shuffled.params.mu).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((fit.params.gamma - fit_shuffled.params.gamma).cwiseAbs().maxCoeff() <
          1e-8);
    CHECK((fit.params.sigma2 - fit_shuffled.params.sigma2)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
  }

  SUBCASE("iteration cap reports non-convergence with diagnostics") {
    Rng rng(105);
    auto params = random_params(2, rng);
    auto panel = simulate_model_panel(params, 60, rng);
    OptConfig config;
    config.max_iters = 1;
    config.grad_tol = 1e-14;
    const auto fit = fit_marginal(panel, WeightMatrix::ones(2, 60),
                                  default_init(panel, WeightMatrix::ones(2, 60)),
                                  config);
    CHECK_FALSE(fit.converged);
    CHECK_FALSE(fit.diagnostics.empty());
  }

  SUBCASE("config validation") {
    OptConfig config;
    config.grad_tol = 0.0;
    CHECK_THROWS_AS(config.validate(), InvalidInput);
  }
}

TEST_CASE("degenerate correlation structures at the variance boundary") {
  Rng rng(106);
  auto panel = gen_degenerate_panel(DegenerateKind::kCorrProduct, 4000, rng);

  SUBCASE("unit mean weights land on the floor with the flag raised") {
    auto weights = WeightMatrix::ones(3, 4000);
    const auto fit = fit_marginal(panel, weights, default_init(panel, weights));
    CHECK(fit.boundary_flags[0]);
    CHECK(fit.params.sigma2[0] <= 1e-8 * (1.0 + 1e-9));
    CHECK_FALSE(fit.boundary_flags[1]);
    CHECK_FALSE(fit.boundary_flags[2]);

    // Profile along sigma_1^2 decreases monotonically toward the floor.
    Vector grid(25);
    for (int i = 0; i < 25; ++i) {
      grid[i] = std::pow(10.0, -6.0 + 5.3 * i / 24.0);  // 1e-6 .. ~0.2
    }
    const Vector profile =
        profile_objective(panel, weights, fit.params, 2 * 3, grid);
    for (int i = 1; i < 25; ++i) CHECK(profile[i] >= profile[i - 1] - 1e-9);
  }

  SUBCASE("coefficient 0.9 weights keep the variance away from zero") {
    const auto weights = scale_weights(WeightMatrix::ones(3, 4000), 0.9);
    const auto fit = fit_marginal(panel, weights, default_init(panel, weights));
    CHECK(fit.params.sigma2[0] > 0.01);
    CHECK_FALSE(fit.boundary_flags[0]);
  }
}

TEST_CASE("profile objective") {
  SUBCASE("single-point grid reproduces the objective") {
    Rng rng(107);
    auto params = random_params(2, rng);
    auto panel = simulate_model_panel(params, 40, rng);
    auto weights = WeightMatrix::ones(2, 40);
    Vector grid(1);
    grid << params.gamma[1];
    const Vector profile = profile_objective(panel, weights, params, 3, grid);
    CHECK(profile[0] == marginal_neg2_pll(panel, weights, params));
  }

  SUBCASE("even in a loading when the other loadings vanish") {
    Rng rng(108);
    auto params = random_params(3, rng);
    params.gamma.setZero();
    auto panel = simulate_model_panel(params, 30, rng);
    auto weights = random_weights(3, 30, rng, 0.2, 2.0);
    Vector grid(9);
    grid << -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0;
    const Vector profile =
        profile_objective(panel, weights, params, 3 + 1, grid);
    for (int i = 0; i < 4; ++i) CHECK(profile[i] == profile[8 - i]);
  }

  SUBCASE("grid entries at or below the floor are NaN-marked") {
    Rng rng(109);
    auto params = random_params(2, rng);
    auto panel = simulate_model_panel(params, 10, rng);
    Vector grid(3);
    grid << 1e-12, 0.0, 0.5;
    const Vector profile =
        profile_objective(panel, WeightMatrix::ones(2, 10), params, 4, grid);
    CHECK(std::isnan(profile[0]));
    CHECK(std::isnan(profile[1]));
    CHECK(std::isfinite(profile[2]));
  }

  SUBCASE("coordinate out of range is rejected") {
    Rng rng(110);
    auto params = random_params(2, rng);
    auto panel = simulate_model_panel(params, 10, rng);
    Vector grid(1);
    grid << 0.0;
    CHECK_THROWS_AS(
        profile_objective(panel, WeightMatrix::ones(2, 10), params, 6, grid),
        InvalidInput);
  }
}
