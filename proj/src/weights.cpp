#include "wlvm/weights.hpp"

#include <cmath>

namespace wlvm {

namespace {

void check_nonnegative(const Matrix& w) {
  for (Index j = 0; j < w.rows(); ++j) {
    for (Index h = 0; h < w.cols(); ++h) {
      if (!std::isfinite(w(j, h)) || w(j, h) < 0.0) {
        throw InvalidInput("weights must be finite and nonnegative");
      }
    }
  }
}

}  // namespace

WeightMatrix normalize_by_indicator_mean(const WeightMatrix& raw) {
  check_nonnegative(raw.weights);
  Matrix out = raw.weights;
  for (Index j = 0; j < out.rows(); ++j) {
    long double sum = 0.0L;
    Index count = 0;
    for (Index h = 0; h < out.cols(); ++h) {
      if (out(j, h) > 0.0) {
        sum += out(j, h);
        ++count;
      }
    }
    if (count == 0) {
      throw UnidentifiableIndicator("indicator row " + std::to_string(j) +
                                    " has no positive weights");
    }
    const double mean = static_cast<double>(sum / count);
    for (Index h = 0; h < out.cols(); ++h) out(j, h) /= mean;
  }
  return WeightMatrix{std::move(out)};
}

WeightMatrix scale_weights(const WeightMatrix& w, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidInput("scale factor must be positive and finite");
  }
  return WeightMatrix{w.weights * c};
}

WeightMatrix log_transform_volumes(const Matrix& volumes) {
  check_nonnegative(volumes);
  Matrix logged = Matrix::Zero(volumes.rows(), volumes.cols());
  for (Index j = 0; j < volumes.rows(); ++j) {
    for (Index h = 0; h < volumes.cols(); ++h) {
      const double v = volumes(j, h);
      if (v == 0.0) continue;  // missing
      if (v < 1.0) {
        throw InvalidInput("observed volume below 1 at row " +
                           std::to_string(j) + ", column " + std::to_string(h));
      }
      logged(j, h) = std::log(v);
    }
  }
  return scale_weights(normalize_by_indicator_mean(WeightMatrix{logged}), 0.99);
}

WeightMatrix zero_missing(const IndicatorPanel& panel, const WeightMatrix& w) {
  if (w.weights.rows() != panel.num_indicators() ||
      w.weights.cols() != panel.num_subjects()) {
    throw InvalidInput("weight matrix shape does not match panel");
  }
  Matrix out = panel.observed.select(
      w.weights, Matrix::Zero(w.weights.rows(), w.weights.cols()));
  return WeightMatrix{std::move(out)};
}

}  // namespace wlvm
