#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nsmooth/smoothing.hpp"

namespace nsmooth {

/// Cell masses of a density on a regular grid over a box in one or two
/// dimensions. Row-major over axes; mass sums to 1.
struct GridDensity {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> cells;
  std::vector<double> mass;

  std::size_t dim() const { return cells.size(); }
  double width(std::size_t axis) const { return (upper[axis] - lower[axis]) / static_cast<double>(cells[axis]); }
  bool same_grid(const GridDensity& other) const;
};

/// Midpoint-rule discretization of exp(-V) on the box, normalized.
GridDensity discretize(const std::function<double(ConstVecRef)>& potential, std::vector<double> lower,
                       std::vector<double> upper, std::vector<std::size_t> cells);

/// Ground truth for pi and pi_beta of a smoothed potential with d <= 2.
struct GridOracle {
  GridDensity target;    // pi  ~ exp(-s)
  GridDensity smoothed;  // pi_beta ~ exp(-s_beta)
  /// Upper bound on the probability mass of pi outside the box.
  double truncated_mass = 0.0;
};

/// Box centred at the mode of s_beta with half-width max(6 / sqrt(alpha),
/// 1 / sqrt(alpha) + sqrt(2 log(2 d / 1e-6) / alpha)); needs strongly convex f.
GridOracle make_grid_oracle(const SmoothedPotential& potential, std::size_t cells_per_axis = 4096);

/// Half the 1-norm distance between cell masses.
double grid_tv(const GridDensity& p, const GridDensity& q);
/// Histogram of samples on p's grid (samples outside the box are counted
/// as mass outside), then TV against p.
double grid_tv(const GridDensity& p, std::span<const Vec> samples);
GridDensity histogram(const GridDensity& like, std::span<const Vec> samples);

/// 1-d W2 between two gridded densities via their inverse CDFs; mass is
/// uniform within each cell, so the quantile functions are piecewise linear
/// and the integral is evaluated exactly.
double grid_w2_1d(const GridDensity& p, const GridDensity& q);
/// 1-d W2 between empirical measures (sorted-sample coupling).
double empirical_w2_1d(std::span<const double> a, std::span<const double> b);

}  // namespace nsmooth
