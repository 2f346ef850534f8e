#pragma once

#include "wlvm/types.hpp"

#include <string>
#include <utility>

namespace wlvm {

// One row of the long-format input file.
struct RawPanelRecord {
  std::string subject_id;
  std::string indicator_id;
  double score = 0.0;
  double weight = 0.0;  // raw denominator / volume
};

struct LoadedPanel {
  IndicatorPanel panel;
  WeightMatrix weights;
};

// Reads a UTF-8 CSV with header `subject_id,indicator_id,score,weight`.
// Indicator and subject order follow first appearance in the file. An absent
// (subject, indicator) pair means missing; a present row with weight 0 loads
// identically to an absent row. Duplicate pairs, non-numeric fields and empty
// files raise DataError with the offending line numbers.
LoadedPanel load_long_csv(const std::string& path);

// Writes the observed entries back out in the same long format, with
// round-trip-exact number formatting.
void save_long_csv(const IndicatorPanel& panel, const WeightMatrix& weights,
                   const std::string& path);

// Per-indicator transforms recorded by standardize_indicators, for mapping
// standardized scores back to the raw scale.
struct Standardization {
  Vector mean;
  Vector sd;
};

// Centers and scales each indicator to mean 0 / variance 1 over its observed
// entries (unweighted, sd with denominator n_obs - 1). Masked entries are
// ignored and stay masked. Throws DegenerateIndicator when an indicator has
// fewer than two observations or zero variance.
std::pair<IndicatorPanel, Standardization> standardize_indicators(
    const IndicatorPanel& panel);

// Shortest-width formatting that still round-trips a double exactly.
std::string format_double(double value);

}  // namespace wlvm
