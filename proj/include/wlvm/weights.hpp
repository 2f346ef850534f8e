#pragma once

#include "wlvm/types.hpp"

namespace wlvm {

// Weight construction and adjustment. Zero entries mark missing data and are
// preserved by every operation; means are taken over the positive entries.

// Rescales each indicator row so its mean over positive entries is 1.
// Throws UnidentifiableIndicator on an all-zero row.
WeightMatrix normalize_by_indicator_mean(const WeightMatrix& raw);

// Multiplies every entry by c > 0.
WeightMatrix scale_weights(const WeightMatrix& w, double c);

// Admission-volume smoothing: entrywise log, then mean-1 normalization, then
// a 0.99 global scale. Zeros (missing) pass through; positive volumes below 1
// are rejected since their log would turn a valid weight negative.
WeightMatrix log_transform_volumes(const Matrix& volumes);

// Zeroes weights wherever the panel is unobserved; everything else unchanged.
WeightMatrix zero_missing(const IndicatorPanel& panel, const WeightMatrix& w);

}  // namespace wlvm
