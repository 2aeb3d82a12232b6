#include "parafuzz/dtw.h"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace parafuzz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t required_half_width(std::size_t n, std::size_t m) {
  const std::size_t diff = n > m ? n - m : m - n;
  return (diff + 1) / 2;
}

/// Cell (i, j) lies in the corridor |(i - j) - (n - m)/2| <= w. Doubled to stay
/// in integers.
bool in_band(std::size_t i, std::size_t j, std::size_t n, std::size_t m, std::size_t w) {
  const long long lhs = 2 * (static_cast<long long>(i) - static_cast<long long>(j)) -
                        (static_cast<long long>(n) - static_cast<long long>(m));
  return std::llabs(lhs) <= 2 * static_cast<long long>(w);
}

}  // namespace

double local_cost(const FeatureFrame& a, const FeatureFrame& b) {
  double sum = 0.0;
  const double de = (a.log_energy - b.log_energy) / 20.0;
  sum += de * de;
  const double dh = a.hf_ratio - b.hf_ratio;
  sum += dh * dh;
  for (std::size_t k = 0; k < kNumBands; ++k) {
    const double d = (a.band_energies[k] - b.band_energies[k]) / 20.0;
    sum += d * d;
  }
  return std::sqrt(sum);
}

BandConstraint BandConstraint::automatic(std::size_t n, std::size_t m) {
  const std::size_t longest = std::max(n, m);
  if (longest <= 200) return unbounded();
  return width((longest + 9) / 10);
}

CostMatrix CostMatrix::from_frames(std::span<const FeatureFrame> a,
                                   std::span<const FeatureFrame> b) {
  CostMatrix c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c(i, j) = local_cost(a[i], b[j]);
  return c;
}

CostMatrix CostMatrix::from_scalars(std::span<const double> a, std::span<const double> b) {
  CostMatrix c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c(i, j) = std::abs(a[i] - b[j]);
  return c;
}

void CostMatrix::dump(std::ostream& out) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out << (j ? " " : "") << (*this)(i, j);
    out << '\n';
  }
}

AlignmentResult dtw(const CostMatrix& cost, BandConstraint band) {
  const std::size_t n = cost.rows(), m = cost.cols();
  if (n == 0 || m == 0) throw DtwError("empty input");

  AlignmentResult result;
  std::size_t w = std::max(n, m);
  if (band.half_width) {
    w = *band.half_width;
    const std::size_t need = required_half_width(n, m);
    if (w < need) {
      w = need;
      result.band_widened = true;
    }
  }

  std::vector<double> acc(n * m, kInf);
  auto D = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_band(i, j, n, m, w)) continue;
      if (i == 0 && j == 0) {
        D(0, 0) = cost(0, 0);
        continue;
      }
      double best = kInf;
      if (i > 0 && j > 0) best = D(i - 1, j - 1);
      if (i > 0) best = std::min(best, D(i - 1, j));
      if (j > 0) best = std::min(best, D(i, j - 1));
      D(i, j) = cost(i, j) + best;
    }
  }

  result.total_cost = D(n - 1, m - 1);
  std::size_t i = n - 1, j = m - 1;
  result.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = D(i - 1, j - 1), up = D(i - 1, j), left = D(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  result.normalized_cost = result.total_cost / static_cast<double>(result.path.size());
  return result;
}

AlignmentResult dtw(std::span<const FeatureFrame> a, std::span<const FeatureFrame> b,
                    BandConstraint band) {
  if (a.empty() || b.empty()) throw DtwError("empty input");
  return dtw(CostMatrix::from_frames(a, b), band);
}

double dtw_distance(std::span<const FeatureFrame> a, std::span<const FeatureFrame> b,
                    BandConstraint band) {
  return dtw(a, b, band).normalized_cost;
}

AlignmentResult brute_force_dtw(const CostMatrix& cost) {
  const std::size_t n = cost.rows(), m = cost.cols();
  if (n == 0 || m == 0) throw DtwError("empty input");
  if (n * m > 64) throw DtwError("brute force limited to rows * cols <= 64");

  AlignmentResult best;
  best.total_cost = kInf;
  std::vector<PathStep> path{{0, 0}};

  // Depth-first enumeration; the running sum is accumulated in path order,
  // matching the association order of the dynamic program.
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, double sum) -> void {
    if (i == n - 1 && j == m - 1) {
      if (sum < best.total_cost) {
        best.total_cost = sum;
        best.path = path;
      }
      return;
    }
    const PathStep moves[3] = {{i + 1, j + 1}, {i + 1, j}, {i, j + 1}};
    for (const auto& [ni, nj] : moves) {
      if (ni >= n || nj >= m) continue;
      path.emplace_back(ni, nj);
      self(self, ni, nj, cost(ni, nj) + sum);
      path.pop_back();
    }
  };
  walk(walk, 0, 0, cost(0, 0));
  best.normalized_cost = best.total_cost / static_cast<double>(best.path.size());
  return best;
}

bool is_valid_path(const std::vector<PathStep>& path, std::size_t rows, std::size_t cols) {
  if (path.empty() || rows == 0 || cols == 0) return false;
  if (path.front() != PathStep{0, 0} || path.back() != PathStep{rows - 1, cols - 1}) return false;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto di = path[k].first - path[k - 1].first;
    const auto dj = path[k].second - path[k - 1].second;
    if (path[k].first < path[k - 1].first || path[k].second < path[k - 1].second) return false;
    if (di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
  }
  return true;
}

}  // namespace parafuzz
