#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numbers>

namespace wlvm {

inline const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Fixed-order pairwise summation. The split points depend only on n, so the
// result is bit-identical no matter how the terms were produced.
double pairwise_sum(const double* data, Eigen::Index n);
double pairwise_sum(const Eigen::VectorXd& v);

// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
// Each index is self-contained; callers aggregate in index order afterwards.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace wlvm
