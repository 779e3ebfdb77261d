#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>

#include "gradreg/vector.hpp"

namespace gradreg {

/// Dense binary classification data: one sample per row, labels in {-1, +1}.
struct LabeledDataset {
  Matrix features;
  Vector labels;

  Index samples() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

/// Reads LIBSVM sparse text ("label idx:val idx:val ..." with 1-based indices).
/// Labels 0/1 are remapped to -1/+1. The dimension is the largest index seen,
/// or min_dim when that is larger.
LabeledDataset load_libsvm(const std::filesystem::path& path, Index min_dim = 0);
LabeledDataset parse_libsvm(std::istream& in, Index min_dim = 0);

/// Gaussian features scaled to unit expected row norm, labels from a random
/// linear separator with a fraction of them flipped so the data is not separable.
LabeledDataset synthetic_classification(Index samples, Index dim, std::uint64_t seed,
                                        double flip_probability = 0.1);

}  // namespace gradreg
