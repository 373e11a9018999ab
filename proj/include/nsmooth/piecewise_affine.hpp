#pragma once

#include <cstdint>
#include <memory>

#include "nsmooth/potential.hpp"

namespace nsmooth {

/// s(x) = |x|^2 + max_j |<a_j, x> - b_j|, written in max-structure form with
/// the stacked rows [A; -A], offsets [b; -b] and the simplex over n = 2m
/// entries. L_f = 2, alpha = 2, L_h = 0, lambda_h = max_j |a_j|_2.
class PiecewiseAffinePotential final : public MaxStructurePotential {
 public:
  PiecewiseAffinePotential(Mat rows, Vec offsets);

  /// m rows with Gaussian directions rescaled to norm `row_norm`, offsets
  /// standard Gaussian.
  static std::shared_ptr<PiecewiseAffinePotential> random_normalized(std::size_t dim, std::size_t rows,
                                                                     double row_norm, std::uint64_t seed);

  double smooth_part(ConstVecRef x) const override { return x.squaredNorm(); }
  void smooth_part_gradient(ConstVecRef x, VecRef out) const override { out = 2.0 * x; }
  void coupling(ConstVecRef x, VecRef out) const override { out.noalias() = stacked_ * x; }
  void coupling_transpose_apply(ConstVecRef, ConstVecRef y, VecRef out) const override {
    out.noalias() = stacked_.transpose() * y;
  }
  Mat coupling_jacobian(ConstVecRef) const override { return stacked_; }

  /// |x|^2 + max_j |<a_j, x> - b_j| evaluated directly.
  double direct_value(ConstVecRef x) const;

  const Mat& rows() const { return rows_; }
  const Vec& offsets() const { return offsets_; }
  const Mat& stacked_rows() const { return stacked_; }
  const Vec& stacked_offsets() const { return stacked_offsets_; }

 private:
  Mat rows_;
  Vec offsets_;
  Mat stacked_;
  Vec stacked_offsets_;
};

}  // namespace nsmooth
