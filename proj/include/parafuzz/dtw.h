#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parafuzz/features.h"

namespace parafuzz {

class DtwError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euclidean distance over (log_energy/20, hf_ratio, band_energies/20).
double local_cost(const FeatureFrame& a, const FeatureFrame& b);

/// Sakoe-Chiba corridor around the diagonal offset (n - m) / 2. An empty
/// half_width means unbounded.
struct BandConstraint {
  std::optional<std::size_t> half_width;

  static BandConstraint unbounded() { return {}; }
  static BandConstraint width(std::size_t w) { return {w}; }
  /// Unbounded up to 200 frames, otherwise 10% of the longer sequence.
  static BandConstraint automatic(std::size_t n, std::size_t m);
};

using PathStep = std::pair<std::size_t, std::size_t>;

struct AlignmentResult {
  double total_cost = 0.0;
  std::vector<PathStep> path;
  double normalized_cost = 0.0;
  /// Set when the requested band was too narrow to connect the corners.
  bool band_widened = false;
};

/// Local costs for an n x m alignment grid, row-major.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  static CostMatrix from_frames(std::span<const FeatureFrame> a, std::span<const FeatureFrame> b);
  /// |a_i - b_j| for scalar sequences.
  static CostMatrix from_scalars(std::span<const double> a, std::span<const double> b);

  /// Whitespace-separated text, one row per line.
  void dump(std::ostream& out) const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> v_;
};

/// Symmetric-step DTW: D(i,j) = c(i,j) + min(D(i-1,j-1), D(i-1,j), D(i,j-1)).
/// Backtrace prefers the diagonal, then (i-1,j), then (i,j-1).
AlignmentResult dtw(const CostMatrix& cost, BandConstraint band = {});
AlignmentResult dtw(std::span<const FeatureFrame> a, std::span<const FeatureFrame> b,
                    BandConstraint band = {});
double dtw_distance(std::span<const FeatureFrame> a, std::span<const FeatureFrame> b,
                    BandConstraint band = {});

/// Exhaustive minimum over every monotone path. Test oracle; rows*cols <= 64.
AlignmentResult brute_force_dtw(const CostMatrix& cost);

/// True if path is connected, monotone, uses only unit steps, and runs from
/// (0,0) to (rows-1, cols-1).
bool is_valid_path(const std::vector<PathStep>& path, std::size_t rows, std::size_t cols);

}  // namespace parafuzz
