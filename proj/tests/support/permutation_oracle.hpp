#pragma once

// Reference two-sided exact Mann-Whitney p-value for cross-checking
// mann_whitney_u's exact branch.
//
// Independent construction: the U statistic is computed by direct pairwise
// comparison (count of x>y pairs plus half the ties) instead of rank sums,
// and group relabelings are enumerated as bitmask subsets of the pooled
// sample instead of lexicographic combinations. Cost is C(m+n, m) subsets,
// so callers keep m+n small (<= ~16).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace testsupport {

namespace detail {

inline double pairwise_u(const std::vector<double>& x, const std::vector<double>& y) {
  double u = 0.0;
  for (double xv : x)
    for (double yv : y) {
      if (xv > yv)
        u += 1.0;
      else if (xv == yv)
        u += 0.5;
    }
  return u;
}

inline int popcount64(std::uint64_t v) {
  int c = 0;
  while (v) {
    v &= v - 1;
    ++c;
  }
  return c;
}

}  // namespace detail

// Probability, under random relabeling of the pooled observations, that the
// U statistic deviates from its mean m*n/2 by at least as much as observed.
// Matches the production convention: comparisons use a 1e-9 slack so equal
// deviations count as extreme despite floating-point noise.
inline double permutation_p_value(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const std::size_t m = x.size();
  const std::size_t n = y.size();
  if (m == 0 || n == 0) throw std::invalid_argument("empty sample");
  if (m + n > 24) throw std::invalid_argument("pooled sample too large for enumeration");

  std::vector<double> pooled;
  pooled.reserve(m + n);
  pooled.insert(pooled.end(), x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());

  const double mean_u = static_cast<double>(m) * static_cast<double>(n) / 2.0;
  const double observed_dev = std::fabs(detail::pairwise_u(x, y) - mean_u);

  const std::uint64_t total = std::uint64_t{1} << (m + n);
  std::uint64_t splits = 0;
  std::uint64_t extreme = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (detail::popcount64(mask) != static_cast<int>(m)) continue;
    ++splits;
    std::vector<double> gx, gy;
    gx.reserve(m);
    gy.reserve(n);
    for (std::size_t i = 0; i < m + n; ++i)
      ((mask >> i) & 1u ? gx : gy).push_back(pooled[i]);
    double dev = std::fabs(detail::pairwise_u(gx, gy) - mean_u);
    if (dev >= observed_dev - 1e-9) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(splits);
}

}  // namespace testsupport
