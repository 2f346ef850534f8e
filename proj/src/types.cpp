#include "wlvm/types.hpp"

#include <cmath>

namespace wlvm {

void IndicatorPanel::validate() const {
  const Index m = num_indicators();
  const Index H = num_subjects();
  if (m < 1 || H < 1) {
    throw InvalidInput("panel must have at least one indicator and one subject");
  }
  if (observed.rows() != m || observed.cols() != H) {
    throw InvalidInput("panel mask shape does not match scores");
  }
  if (static_cast<Index>(indicator_names.size()) != m ||
      static_cast<Index>(subject_ids.size()) != H) {
    throw InvalidInput("panel label count does not match shape");
  }
  for (Index j = 0; j < m; ++j) {
    for (Index h = 0; h < H; ++h) {
      if (observed(j, h) && !std::isfinite(scores(j, h))) {
        throw InvalidInput("non-finite score for observed entry (" +
                           indicator_names[j] + ", " + subject_ids[h] + ")");
      }
    }
  }
}

void IndicatorPanel::validate_for_fit() const {
  validate();
  const Index m = num_indicators();
  const Index H = num_subjects();
  for (Index h = 0; h < H; ++h) {
    if (!observed.col(h).any()) {
      throw InvalidInput("subject " + subject_ids[h] + " has no observed indicator");
    }
  }
  for (Index j = 0; j < m; ++j) {
    Index n_obs = 0;
    for (Index h = 0; h < H; ++h) n_obs += observed(j, h) ? 1 : 0;
    if (n_obs < 2) {
      throw UnidentifiableIndicator("indicator " + indicator_names[j] +
                                    " has fewer than two observed subjects");
    }
  }
}

WeightMatrix WeightMatrix::ones(Index m, Index H) {
  return WeightMatrix{Matrix::Ones(m, H)};
}

WeightMatrix WeightMatrix::ones_like(const IndicatorPanel& panel) {
  Matrix w = Matrix::Ones(panel.num_indicators(), panel.num_subjects());
  w = panel.observed.select(w, Matrix::Zero(w.rows(), w.cols()));
  return WeightMatrix{std::move(w)};
}

void WeightMatrix::validate_against(const IndicatorPanel& panel) const {
  if (weights.rows() != panel.num_indicators() ||
      weights.cols() != panel.num_subjects()) {
    throw InvalidInput("weight matrix shape does not match panel");
  }
  for (Index j = 0; j < weights.rows(); ++j) {
    for (Index h = 0; h < weights.cols(); ++h) {
      const double w = weights(j, h);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidInput("weights must be finite and nonnegative");
      }
      if (!panel.observed(j, h) && w != 0.0) {
        throw InvalidInput("unobserved entries must carry weight zero");
      }
    }
  }
}

void ModelParams::validate() const {
  const Index m = size();
  if (m < 1 || gamma.size() != m || sigma2.size() != m) {
    throw InvalidParams("parameter vectors must share a positive length");
  }
  for (Index j = 0; j < m; ++j) {
    if (!std::isfinite(mu[j]) || !std::isfinite(gamma[j]) ||
        !std::isfinite(sigma2[j])) {
      throw InvalidParams("parameters must be finite");
    }
    if (sigma2[j] < kSigma2EvalFloor) {
      throw InvalidParams("sigma2 below the evaluable floor");
    }
  }
}

}  // namespace wlvm
