#pragma once

#include <Eigen/Dense>

#include "nsplab/random.hpp"

namespace nsplab {

// An l-dimensional subspace of R^n (a point of the Grassmannian G_l(R^n)),
// held as an n x l matrix with orthonormal columns, 1 <= l < n.
class Subspace {
 public:
  // Orthonormalizes the columns of `generator`. Throws std::invalid_argument
  // if the columns are linearly dependent or l is not in [1, n).
  static Subspace from_generator(const Eigen::MatrixXd& generator);
  // Accepts a basis that is already orthonormal (checked to kTol.basis).
  static Subspace from_orthonormal(Eigen::MatrixXd basis);

  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }
  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // ||x - P x||.
  double membership_residual(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Subspace orthogonal_complement() const;

 private:
  friend class MeasurementMatrix;
  explicit Subspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}
  Eigen::MatrixXd basis_;
};

// A full-row-rank m x n matrix (m < n) with its singular values and null space
// computed once at construction.
class MeasurementMatrix {
 public:
  explicit MeasurementMatrix(Eigen::MatrixXd entries);

  // i.i.d. N(0, variance) entries; variance defaults to 1/n.
  static MeasurementMatrix gaussian(Eigen::Index m, Eigen::Index n, Rng& rng, double variance = -1.0);
  // The matrix whose rows are an orthonormal basis of the complement of
  // `null_space`; its null space is `null_space` and all singular values are 1.
  static MeasurementMatrix with_null_space(const Subspace& null_space);

  const Eigen::MatrixXd& entries() const { return a_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }
  // Extreme singular values of A^T (equivalently of A).
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }
  const Subspace& null_space() const { return null_space_; }
  // Moore-Penrose pseudo-inverse A^T (A A^T)^{-1}, n x m.
  const Eigen::MatrixXd& pseudo_inverse() const { return pinv_; }

 private:
  struct Decomposition;
  explicit MeasurementMatrix(Decomposition&& d);
  static Decomposition decompose(Eigen::MatrixXd entries);

  Eigen::MatrixXd a_;
  Eigen::MatrixXd pinv_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
  Subspace null_space_;
};

// ||P_a - P_b|| in spectral norm, the sine of the largest principal angle.
double grassmann_distance(const Subspace& a, const Subspace& b);

// Haar-distributed subspace: QR of an n x l Gaussian matrix with the signs of
// R's diagonal folded into Q.
Subspace sample_haar(Eigen::Index n, Eigen::Index l, Rng& rng);

Subspace null_space(const MeasurementMatrix& A);

struct SingularExtremes {
  double min = 0.0;
  double max = 0.0;
};

SingularExtremes singular_extremes(const MeasurementMatrix& A);

// For z in nu (z != 0) and ||n_vec|| < ||z||: returns
//   nu' = span(z + n_vec) + (nu intersected with z^perp),
// which contains z + n_vec and satisfies dist(nu, nu') <= ||n_vec|| / ||z||.
Subspace perturb_subspace(const Subspace& nu, const Eigen::Ref<const Eigen::VectorXd>& z,
                          const Eigen::Ref<const Eigen::VectorXd>& n_vec);

}  // namespace nsplab
