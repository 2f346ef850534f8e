#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

#include "wlvm/asymptotics.hpp"
#include "wlvm/model.hpp"
#include "wlvm/numeric.hpp"
#include "wlvm/rng.hpp"

#include <cmath>
#include <limits>

using namespace wlvm;
using namespace wlvm::testutil;

TEST_CASE("conditional log density: hand-computed values") {
  SUBCASE("standard normal at zero") {
    auto panel = panel_from(Matrix::Zero(1, 1));
    auto params = params_of({0.0}, {0.0}, {1.0});
    const double value = conditional_log_density(
        panel, WeightMatrix::ones(1, 1), params, vec({0.0}), 0);
    CHECK(value == doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-14));
  }

  SUBCASE("weight zero annihilates the contribution") {
    Matrix scores(1, 1);
    scores << 7.3;
    auto panel = panel_from(scores);
    auto params = params_of({0.0}, {2.0}, {0.5});
    // Zero weight on an observed entry and a masked entry behave the same.
    CHECK(conditional_log_density(panel, WeightMatrix{Matrix::Zero(1, 1)},
                                  params, vec({1.7}), 0) == 0.0);
    auto masked = panel_from(scores, BoolMask::Constant(1, 1, false));
    CHECK(conditional_log_density(masked, WeightMatrix{Matrix::Zero(1, 1)},
                                  params, vec({1.7}), 0) == 0.0);
  }

  SUBCASE("two indicators with zero residuals keep only log terms") {
    Matrix scores(2, 1);
    scores << 1.0, 1.0;
    auto panel = panel_from(scores);
    auto params = params_of({0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0});
    Matrix w(2, 1);
    w << 2.0, 1.0;
    const double value = conditional_log_density(panel, WeightMatrix{w},
                                                 params, vec({1.0}), 0);
    CHECK(value == doctest::Approx(-1.5 * kLog2Pi).epsilon(1e-14));
  }

  SUBCASE("non-finite observed score is rejected") {
    Matrix scores(1, 1);
    scores << std::numeric_limits<double>::quiet_NaN();
    IndicatorPanel panel;
    panel.scores = scores;
    panel.observed = BoolMask::Constant(1, 1, true);
    panel.indicator_names = {"y1"};
    panel.subject_ids = {"s1"};
    auto params = params_of({0.0}, {0.0}, {1.0});
    CHECK_THROWS_AS(conditional_log_density(panel, WeightMatrix::ones(1, 1),
                                            params, vec({0.0}), 0),
                    InvalidInput);
  }
}

TEST_CASE("joint negative log density") {
  SUBCASE("two standard normals at zero") {
    auto panel = panel_from(Matrix::Zero(1, 1));
    auto params = params_of({0.0}, {0.0}, {1.0});
    CHECK(joint_neg_log_density(panel, WeightMatrix::ones(1, 1), params,
                                vec({0.0})) ==
          doctest::Approx(kLog2Pi).epsilon(1e-14));
  }

  SUBCASE("hand-evaluated single subject") {
    Matrix scores(1, 1);
    scores << 2.0;
    auto panel = panel_from(scores);
    auto params = params_of({0.0}, {1.0}, {1.0});
    CHECK(joint_neg_log_density(panel, WeightMatrix::ones(1, 1), params,
                                vec({1.0})) ==
          doctest::Approx(1.0 + kLog2Pi).epsilon(1e-14));
  }

  SUBCASE("minimized exactly at the posterior mean") {
    Rng rng(77);
    auto params = random_params(3, rng);
    auto panel = simulate_model_panel(params, 6, rng);
    auto weights = random_weights(3, 6, rng, 0.0, 2.5);
    const PosteriorMoments post = posterior_moments(panel, weights, params);
    const double at_mean = joint_neg_log_density(panel, weights, params, post.x);
    for (int trial = 0; trial < 20; ++trial) {
      Vector alpha = post.x;
      for (Index h = 0; h < alpha.size(); ++h) {
        alpha[h] += 0.3 * (rng.uniform01() - 0.5);
      }
      CHECK(joint_neg_log_density(panel, weights, params, alpha) >= at_mean);
    }
  }
}

TEST_CASE("posterior moments") {
  SUBCASE("zero residuals give zero posterior mean") {
    Rng rng(3);
    auto params = random_params(2, rng);
    Matrix scores(2, 3);
    scores.row(0).setConstant(params.mu[0]);
    scores.row(1).setConstant(params.mu[1]);
    auto panel = panel_from(scores);
    const auto post = posterior_moments(panel, WeightMatrix::ones(2, 3), params);
    for (Index h = 0; h < 3; ++h) {
      CHECK(post.x[h] == 0.0);
      CHECK(post.z[h] == post.v[h]);
    }
  }

  SUBCASE("one-term closed form") {
    Matrix scores(1, 1);
    scores << 2.0;
    auto panel = panel_from(scores);
    auto params = params_of({0.0}, {1.0}, {1.0});
    const auto post = posterior_moments(panel, WeightMatrix::ones(1, 1), params);
    CHECK(post.x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(post.v[0] == doctest::Approx(0.5).epsilon(1e-15));
    // Posterior second moment is x^2 + v.
    CHECK(post.z[0] == doctest::Approx(1.5).epsilon(1e-15));
  }

  SUBCASE("subject with no effective weight falls back to the prior") {
    Matrix scores(2, 2);
    scores << 1.0, 0.4, -0.3, 1.2;
    auto panel = panel_from(scores);
    Matrix w(2, 2);
    w << 1.0, 0.0, 0.5, 0.0;
    auto params = params_of({0.0, 0.0}, {0.7, 0.7}, {0.5, 0.5});
    const auto post = posterior_moments(panel, WeightMatrix{w}, params);
    CHECK(post.x[1] == 0.0);
    CHECK(post.v[1] == 1.0);
    CHECK(post.z[1] == 1.0);
  }

  SUBCASE("variance bounds and second-moment identity") {
    Rng rng(11);
    for (int c = 0; c < 25; ++c) {
      auto params = random_params(3, rng);
      auto panel = simulate_model_panel(params, 8, rng);
      auto weights = random_weights(3, 8, rng, 0.0, 3.0);
      const auto post = posterior_moments(panel, weights, params);
      for (Index h = 0; h < 8; ++h) {
        CHECK(post.v[h] > 0.0);
        CHECK(post.v[h] <= 1.0);
        CHECK(post.z[h] == post.x[h] * post.x[h] + post.v[h]);
      }
    }
  }

  SUBCASE("v equals one exactly when loadings vanish") {
    Rng rng(12);
    auto params = random_params(2, rng);
    params.gamma.setZero();
    auto panel = simulate_model_panel(params, 5, rng);
    const auto post = posterior_moments(panel, WeightMatrix::ones(2, 5), params);
    for (Index h = 0; h < 5; ++h) CHECK(post.v[h] == 1.0);
  }
}

TEST_CASE("marginal -2 log pseudo-likelihood") {
  SUBCASE("degenerates to the standard normal") {
    auto panel = panel_from(Matrix::Zero(1, 1));
    auto params = params_of({0.0}, {0.0}, {1.0});
    CHECK(marginal_neg2_pll(panel, WeightMatrix::ones(1, 1), params) ==
          doctest::Approx(kLog2Pi).epsilon(1e-14));
  }

  SUBCASE("equicorrelated three-indicator value") {
    auto panel = panel_from(Matrix::Zero(3, 1));
    const double r = 1.0 / std::sqrt(2.0);
    auto params = params_of({0.0, 0.0, 0.0}, {r, r, r}, {0.5, 0.5, 0.5});
    const double expected = 3.0 * kLog2Pi + std::log(4.0) + 3.0 * std::log(0.5);
    const double value =
        marginal_neg2_pll(panel, WeightMatrix::ones(3, 1), params);
    CHECK(value == doctest::Approx(expected).epsilon(1e-14));
    // Same number through the dense multivariate-normal route.
    CHECK(value ==
          doctest::Approx(2.0 * mvn_nll_oracle(panel, params)).epsilon(1e-12));
  }

  SUBCASE("invalid variances are rejected") {
    auto panel = panel_from(Matrix::Zero(1, 1));
    auto params = params_of({0.0}, {0.0}, {1.0});
    params.sigma2[0] = 0.0;
    CHECK_THROWS_AS(marginal_neg2_pll(panel, WeightMatrix::ones(1, 1), params),
                    InvalidParams);
    params.sigma2[0] = 1e-12;  // below the evaluable floor
    CHECK_THROWS_AS(marginal_neg2_pll(panel, WeightMatrix::ones(1, 1), params),
                    InvalidParams);
  }

  SUBCASE("matches per-subject quadrature on random weighted cases") {
    Rng rng(2024);
    for (int c = 0; c < 12; ++c) {
      const int m = 1 + static_cast<int>(rng.uniform01() * 3.0);
      const int H = 1 + static_cast<int>(rng.uniform01() * 5.0);
      auto params = random_params(m, rng);
      auto panel = simulate_model_panel(params, H, rng);
      auto weights = random_weights(m, H, rng, 0.0, 3.0);
      const Vector terms = marginal_neg2_pll_terms(panel, weights, params);
      for (Index h = 0; h < H; ++h) {
        const double oracle =
            neg2_marginal_by_quadrature(panel, weights, params, h);
        CHECK(rel_error(terms[h], oracle) < 1e-8);
      }
    }
  }

  SUBCASE("missing entry and zero-weighted entry are bit-identical") {
    Rng rng(5);
    auto params = random_params(3, rng);
    auto full = simulate_model_panel(params, 7, rng);
    auto weights = random_weights(3, 7, rng, 0.2, 2.0);

    // Variant A: entries stay observed but lose their weight.
    WeightMatrix wa = weights;
    wa.weights(0, 2) = 0.0;
    wa.weights(2, 5) = 0.0;

    // Variant B: the same entries are deleted outright.
    IndicatorPanel masked = full;
    masked.observed(0, 2) = false;
    masked.observed(2, 5) = false;
    masked.scores(0, 2) = 0.0;
    masked.scores(2, 5) = 0.0;

    CHECK(marginal_neg2_pll(full, wa, params) ==
          marginal_neg2_pll(masked, wa, params));
    const auto pa = posterior_moments(full, wa, params);
    const auto pb = posterior_moments(masked, wa, params);
    for (Index h = 0; h < 7; ++h) {
      CHECK(pa.x[h] == pb.x[h]);
      CHECK(pa.v[h] == pb.v[h]);
      CHECK(pa.z[h] == pb.z[h]);
    }
  }

  SUBCASE("power-of-two weight scaling maps posterior variances exactly") {
    Rng rng(6);
    auto params = random_params(3, rng);
    auto panel = simulate_model_panel(params, 9, rng);
    auto weights = random_weights(3, 9, rng, 0.1, 2.0);
    const double c = 2.0;
    const auto before = posterior_moments(panel, weights, params);
    const auto after = posterior_moments(
        panel, WeightMatrix{(weights.weights * c).eval()}, params);
    for (Index h = 0; h < 9; ++h) {
      // Doubling every weight scales the precision excess exactly; only the
      // final reciprocals round.
      const double expected = 1.0 / (1.0 + c * (1.0 / before.v[h] - 1.0));
      CHECK(after.v[h] == doctest::Approx(expected).epsilon(4e-16));
    }
  }
}

TEST_CASE("analytic gradient") {
  SUBCASE("matches central finite differences on random cases") {
    Rng rng(42);
    for (int c = 0; c < 8; ++c) {
      const int m = 2 + static_cast<int>(rng.uniform01() * 2.0);
      const int H = 20 + static_cast<int>(rng.uniform01() * 30.0);
      auto params = random_params(m, rng);
      auto panel = simulate_model_panel(params, H, rng);
      auto weights = random_weights(m, H, rng, 0.05, 2.5);
      const Vector analytic = marginal_neg2_pll_gradient(panel, weights, params);
      const Vector fd = fd_gradient(panel, weights, params);
      for (Index k = 0; k < analytic.size(); ++k) {
        CHECK(rel_error(analytic[k], fd[k]) < 1e-6);
      }
    }
  }

  SUBCASE("all-zero loadings sit at a stationary point in gamma") {
    Rng rng(43);
    auto params = random_params(3, rng);
    params.gamma.setZero();
    auto panel = simulate_model_panel(params, 25, rng);
    auto weights = random_weights(3, 25, rng, 0.2, 2.0);
    const Vector grad = marginal_neg2_pll_gradient(panel, weights, params);
    for (Index j = 0; j < 3; ++j) CHECK(grad[3 + j] == 0.0);

    // Reflecting the data about the intercepts flips the loading gradient.
    IndicatorPanel reflected = panel;
    for (Index j = 0; j < 3; ++j) {
      reflected.scores.row(j) =
          (2.0 * params.mu[j] - panel.scores.row(j).array()).matrix();
    }
    const Vector grad_reflected =
        marginal_neg2_pll_gradient(reflected, weights, params);
    for (Index j = 0; j < 3; ++j) CHECK(grad_reflected[3 + j] == -grad[3 + j]);
  }

  SUBCASE("vanishes per subject at the population truth") {
    Rng rng(44);
    const double r = 1.0 / std::sqrt(2.0);
    auto params = params_of({0.0, 0.0, 0.0}, {r, r, r}, {0.5, 0.5, 0.5});
    // The scaled norm decays like 1/sqrt(H); at H = 1.6e6 the CLT scale is
    // sqrt(sum of per-term variances / H) ~ 4e-3, inside the 0.01 budget.
    double previous = 0.0;
    for (const int H : {100000, 1600000}) {
      auto panel = simulate_model_panel(params, H, rng);
      const Vector grad =
          marginal_neg2_pll_gradient(panel, WeightMatrix::ones(3, H), params);
      const double scaled = grad.norm() / H;
      if (previous > 0.0) CHECK(scaled < previous);
      previous = scaled;
    }
    CHECK(previous < 0.01);
  }
}

TEST_CASE("per-subject terms reduce by fixed-order pairwise summation") {
  Rng rng(7);
  auto params = random_params(2, rng);
  auto panel = simulate_model_panel(params, 33, rng);
  auto weights = random_weights(2, 33, rng, 0.0, 2.0);
  const Vector terms = marginal_neg2_pll_terms(panel, weights, params);
  CHECK(marginal_neg2_pll(panel, weights, params) == pairwise_sum(terms));
}
