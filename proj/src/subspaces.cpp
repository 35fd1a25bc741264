#include "nsplab/subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nsplab/tolerances.hpp"

namespace nsplab {

namespace {

// Thin Q of a QR factorization with R's diagonal made non-negative, plus the
// smallest |R_ii| relative to the largest column norm (a rank indicator).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& gen, double* rel_min_diag) {
  const Eigen::Index n = gen.rows(), l = gen.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gen);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, l);
  const Eigen::MatrixXd& r = qr.matrixQR();
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < l; ++j) max_norm = std::max(max_norm, gen.col(j).norm());
  double min_diag = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < l; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    min_diag = std::min(min_diag, std::abs(r(j, j)));
  }
  if (rel_min_diag) *rel_min_diag = max_norm > 0.0 ? min_diag / max_norm : 0.0;
  return q;
}

void check_dims(Eigen::Index n, Eigen::Index l) {
  if (l < 1 || l >= n)
    throw std::invalid_argument("subspace dimension must satisfy 1 <= l < n (got l=" + std::to_string(l) +
                                ", n=" + std::to_string(n) + ")");
}

}  // namespace

Subspace Subspace::from_generator(const Eigen::MatrixXd& generator) {
  check_dims(generator.rows(), generator.cols());
  if (!generator.allFinite()) throw std::invalid_argument("subspace generator has non-finite entries");
  double rel = 0.0;
  Eigen::MatrixXd q = orthonormalize(generator, &rel);
  if (!(rel > 1e-12)) throw std::invalid_argument("subspace generator is rank deficient");
  return Subspace(std::move(q));
}

Subspace Subspace::from_orthonormal(Eigen::MatrixXd basis) {
  check_dims(basis.rows(), basis.cols());
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  const double err = (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (!(err <= kTol.basis)) throw std::invalid_argument("basis columns are not orthonormal");
  return Subspace(std::move(basis));
}

Eigen::VectorXd Subspace::project(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != ambient_dim()) throw std::invalid_argument("dimension mismatch in projection");
  return basis_ * (basis_.transpose() * x);
}

double Subspace::membership_residual(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return (x - project(x)).norm();
}

Subspace Subspace::orthogonal_complement() const {
  const Eigen::Index n = ambient_dim(), l = dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_);
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Subspace(full.rightCols(n - l));
}

// ---------------------------------------------------------------------------

struct MeasurementMatrix::Decomposition {
  Eigen::MatrixXd a;
  Eigen::MatrixXd pinv;
  double sigma_min;
  double sigma_max;
  Eigen::MatrixXd null_basis;
};

MeasurementMatrix::Decomposition MeasurementMatrix::decompose(Eigen::MatrixXd a) {
  const Eigen::Index m = a.rows(), n = a.cols();
  if (m < 1 || m >= n)
    throw std::invalid_argument("measurement matrix must be m x n with 1 <= m < n (got " + std::to_string(m) + "x" +
                                std::to_string(n) + ")");
  if (!a.allFinite()) throw std::invalid_argument("measurement matrix has non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV | Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  Decomposition d;
  d.sigma_max = s.maxCoeff();
  d.sigma_min = s.minCoeff();
  if (!(d.sigma_min > 1e-12 * d.sigma_max)) throw std::invalid_argument("measurement matrix is not of full row rank");
  const Eigen::MatrixXd& v = svd.matrixV();
  d.null_basis = v.rightCols(n - m);
  d.pinv = v.leftCols(m) * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  d.a = std::move(a);
  return d;
}

MeasurementMatrix::MeasurementMatrix(Eigen::MatrixXd entries) : MeasurementMatrix(decompose(std::move(entries))) {}

MeasurementMatrix::MeasurementMatrix(Decomposition&& d)
    : a_(std::move(d.a)),
      pinv_(std::move(d.pinv)),
      sigma_min_(d.sigma_min),
      sigma_max_(d.sigma_max),
      null_space_(Subspace(std::move(d.null_basis))) {}

MeasurementMatrix MeasurementMatrix::gaussian(Eigen::Index m, Eigen::Index n, Rng& rng, double variance) {
  if (variance <= 0.0) variance = 1.0 / static_cast<double>(n);
  for (;;) {
    Eigen::MatrixXd a = gaussian_matrix(m, n, rng, std::sqrt(variance));
    try {
      return MeasurementMatrix(std::move(a));
    } catch (const std::invalid_argument&) {
      // rank-deficient draw: probability zero, resample
    }
  }
}

MeasurementMatrix MeasurementMatrix::with_null_space(const Subspace& null_space) {
  return MeasurementMatrix(null_space.orthogonal_complement().basis().transpose());
}

// ---------------------------------------------------------------------------

double grassmann_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim())
    throw std::invalid_argument("grassmann_distance: subspaces live in different Grassmannians");
  if (a.dim() == 1) {
    // sin of the angle between the lines, from the rejection of b off a; this
    // stays accurate for nearly equal lines where 1 - cos^2 would cancel.
    const Eigen::VectorXd u = a.basis().col(0), v = b.basis().col(0);
    const double s = (v - u * u.dot(v)).norm();
    return std::clamp(s, 0.0, 1.0);
  }
  const Eigen::MatrixXd diff = a.projector() - b.projector();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diff, Eigen::EigenvaluesOnly);
  const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  return std::clamp(norm, 0.0, 1.0);
}

Subspace sample_haar(Eigen::Index n, Eigen::Index l, Rng& rng) {
  check_dims(n, l);
  for (;;) {
    const Eigen::MatrixXd g = gaussian_matrix(n, l, rng);
    double rel = 0.0;
    Eigen::MatrixXd q = orthonormalize(g, &rel);
    if (rel > 1e-12) return Subspace::from_orthonormal(std::move(q));
  }
}

Subspace null_space(const MeasurementMatrix& A) { return A.null_space(); }

SingularExtremes singular_extremes(const MeasurementMatrix& A) { return {A.sigma_min(), A.sigma_max()}; }

Subspace perturb_subspace(const Subspace& nu, const Eigen::Ref<const Eigen::VectorXd>& z,
                          const Eigen::Ref<const Eigen::VectorXd>& n_vec) {
  const Eigen::Index n = nu.ambient_dim(), l = nu.dim();
  if (z.size() != n || n_vec.size() != n) throw std::invalid_argument("perturb_subspace: dimension mismatch");
  const double zn = z.norm();
  if (!(zn > 0.0)) throw std::invalid_argument("perturb_subspace: z must be nonzero");
  if (nu.membership_residual(z) >= kTol.basis * std::max(1.0, zn))
    throw std::invalid_argument("perturb_subspace: z is not in the subspace");
  if (!(n_vec.norm() < zn)) throw std::invalid_argument("perturb_subspace: need ||n_vec|| < ||z||");

  // Coordinates of z in the basis; the rest of a full orthonormal frame of
  // R^l starting at c spans the coordinates of nu intersected with z^perp.
  const Eigen::VectorXd c = nu.basis().transpose() * z;
  Eigen::MatrixXd gen(n, l);
  gen.col(0) = z + n_vec;
  if (l > 1) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::MatrixXd frame = qr.householderQ() * Eigen::MatrixXd::Identity(l, l);
    gen.rightCols(l - 1) = nu.basis() * frame.rightCols(l - 1);
  }
  return Subspace::from_generator(gen);
}

}  // namespace nsplab
