#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <utility>

#include "nsmooth/types.hpp"

namespace nsmooth {

/// Affine feature transform applied at load: z = (raw - mean) / scale.
struct Standardization {
  Vec mean;
  Vec scale;
};

/// Binary classification data with labels in {-1, +1}; one row per datum.
struct Dataset {
  Mat features;
  Vec labels;
  Standardization transform;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index feature_dim() const { return features.cols(); }
};

/// CSV with the label in the first column ({-1, +1}, or {0, 1} remapped to
/// {-1, +1}) and numeric features after it. A non-numeric first row is
/// treated as a header. Features are standardized in place.
Dataset parse_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::filesystem::path& path);

/// Standardizes columns to zero mean / unit variance; constant columns keep
/// scale 1. Records the transform on the dataset.
void standardize(Dataset& data);

/// Linearly separable data: Gaussian features, labels sign(<w*, z>) for a
/// random unit w*. Standardized.
Dataset synthetic_separable_dataset(std::size_t points, std::size_t features, std::uint64_t seed);

/// Seeded permutation split; the first `train_fraction` of the shuffled rows
/// form the training set.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed);

}  // namespace nsmooth
