#include "wlvm/numeric.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace wlvm {

namespace {
constexpr Eigen::Index kPairwiseBase = 16;
}

double pairwise_sum(const double* data, Eigen::Index n) {
  if (n <= kPairwiseBase) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const Eigen::Index half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const Eigen::VectorXd& v) {
  return pairwise_sum(v.data(), v.size());
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  pool.reserve(static_cast<size_t>(count));
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace wlvm
