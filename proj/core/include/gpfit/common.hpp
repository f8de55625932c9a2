#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gpfit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// n x d matrix of input sites, one site per row.
using DesignMatrix = Eigen::MatrixXd;

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a master seed (splitmix64 finalizer
/// applied to master + stream * golden-ratio increment).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gpfit
