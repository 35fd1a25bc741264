#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace nsplab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-trial streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of stream `index` derived from a master seed. Streams for distinct
// indices are decorrelated, so trial results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(derive_seed(seed, index));
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                       double stddev = 1.0) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng) {
  return gaussian_matrix(n, 1, rng).col(0);
}

// Uniform point on the unit sphere S^{n-1}.
inline Eigen::VectorXd random_unit_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v;
  double norm = 0.0;
  do {
    v = gaussian_vector(n, rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

}  // namespace nsplab
