#include "nsmooth/piecewise_affine.hpp"

#include "nsmooth/errors.hpp"
#include "nsmooth/rng.hpp"

namespace nsmooth {

namespace {

Mat stack_rows(const Mat& a) {
  Mat out(2 * a.rows(), a.cols());
  out << a, -a;
  return out;
}

Vec stack_offsets(const Vec& b) {
  Vec out(2 * b.size());
  out << b, -b;
  return out;
}

PotentialConstants affine_constants(const Mat& a) {
  PotentialConstants c;
  c.smooth_lipschitz = 2.0;
  c.strong_convexity = 2.0;
  c.coupling_smoothness = 0.0;
  c.coupling_lipschitz = coupling_operator_norm(a);
  return c;
}

}  // namespace

PiecewiseAffinePotential::PiecewiseAffinePotential(Mat rows, Vec offsets)
    : MaxStructurePotential(static_cast<std::size_t>(rows.cols()),
                            std::make_shared<EntropicSimplexProx>(2 * rows.rows()),
                            std::make_shared<AffineDualCost>(stack_offsets(offsets)),
                            affine_constants(rows)),
      rows_(std::move(rows)),
      offsets_(std::move(offsets)) {
  if (rows_.rows() == 0) throw InvalidInput("piecewise-affine potential needs at least one row");
  if (offsets_.size() != rows_.rows()) throw InvalidInput("offset count must match row count");
  require_finite(offsets_, "b");
  if (!rows_.allFinite()) throw InvalidInput("A has non-finite entries");
  stacked_ = stack_rows(rows_);
  stacked_offsets_ = stack_offsets(offsets_);
}

std::shared_ptr<PiecewiseAffinePotential> PiecewiseAffinePotential::random_normalized(
    std::size_t dim, std::size_t rows, double row_norm, std::uint64_t seed) {
  if (dim == 0 || rows == 0) throw InvalidInput("dimension and row count must be positive");
  RandomStream rng(seed, 0x5a11);
  Mat a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  Vec b(static_cast<Eigen::Index>(rows));
  Vec row(static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    rng.seek(static_cast<std::uint64_t>(j));
    rng.fill_normal(row);
    a.row(j) = row_norm * row.normalized().transpose();
    b[j] = rng.normal();
  }
  return std::make_shared<PiecewiseAffinePotential>(std::move(a), std::move(b));
}

double PiecewiseAffinePotential::direct_value(ConstVecRef x) const {
  require_finite(x, "x");
  return x.squaredNorm() + (rows_ * x - offsets_).cwiseAbs().maxCoeff();
}

}  // namespace nsmooth
