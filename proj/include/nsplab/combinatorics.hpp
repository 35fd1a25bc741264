#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace nsplab {

// C(n, r), saturating at SIZE_MAX.
inline std::size_t binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::size_t out = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    const std::size_t num = n - r + i;
    if (out > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
    out = out * num / i;  // exact: out * num is divisible by i at every step
  }
  return out;
}

// Calls fn(const std::vector<int>&) on every r-subset of {0..n-1} in
// lexicographic order; stops early when fn returns false.
template <typename Fn>
void for_each_combination(int n, int r, Fn&& fn) {
  if (r < 0 || r > n) return;
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    if (!fn(static_cast<const std::vector<int>&>(idx))) return;
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace nsplab
