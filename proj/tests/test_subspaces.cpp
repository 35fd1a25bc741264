#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nsplab/matrix_io.hpp"
#include "nsplab/random.hpp"
#include "nsplab/subspaces.hpp"

using namespace nsplab;

namespace {

// Kolmogorov-Smirnov statistic of a sample against U(0, 1).
double ks_uniform(std::vector<double> s) {
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    d = std::max({d, (i + 1) / n - s[i], s[i] - i / n});
  return d;
}

}  // namespace

TEST_CASE("generators are orthonormalized and validated") {
  Eigen::MatrixXd g(4, 2);
  g << 1, 1, 2, 0, 0, 3, 1, 1;
  const Subspace s = Subspace::from_generator(g);
  CHECK((s.basis().transpose() * s.basis() - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  CHECK(s.membership_residual(g.col(0)) < 1e-14);
  CHECK(s.membership_residual(g.col(0) + g.col(1)) < 1e-14);
  Eigen::MatrixXd dep(3, 2);
  dep << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(Subspace::from_generator(dep), std::invalid_argument);
  CHECK_THROWS_AS(Subspace::from_generator(Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
  const Subspace c = s.orthogonal_complement();
  CHECK(c.dim() == 2);
  CHECK((s.basis().transpose() * c.basis()).norm() < 1e-14);
}

TEST_CASE("grassmann distance is the sine of the principal angle") {
  for (double th : {0.0, 0.1, 0.7, 1.3}) {
    const Subspace a = Subspace::from_generator(Eigen::Vector3d(1, 0, 0));
    const Subspace b = Subspace::from_generator(Eigen::Vector3d(std::cos(th), std::sin(th), 0));
    CHECK(grassmann_distance(a, b) == doctest::Approx(std::sin(th)).epsilon(1e-12));
  }
  // Orthogonal planes in R^4.
  Eigen::MatrixXd p(4, 2), q(4, 2);
  p << 1, 0, 0, 1, 0, 0, 0, 0;
  q << 0, 0, 0, 0, 1, 0, 0, 1;
  CHECK(grassmann_distance(Subspace::from_generator(p), Subspace::from_generator(q)) ==
        doctest::Approx(1.0));
}

TEST_CASE("measurement matrix decomposition agrees with a direct SVD") {
  Rng rng = make_rng(11, 0);
  const MeasurementMatrix A = MeasurementMatrix::gaussian(4, 7, rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.entries());
  CHECK(A.sigma_max() == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
  CHECK(A.sigma_min() == doctest::Approx(svd.singularValues()(3)).epsilon(1e-12));
  CHECK(A.null_space().dim() == 3);
  CHECK((A.entries() * A.null_space().basis()).norm() < 1e-12);
  CHECK((A.entries() * A.pseudo_inverse() - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
  const MeasurementMatrix B = MeasurementMatrix::with_null_space(A.null_space());
  CHECK(B.sigma_min() == doctest::Approx(1.0));
  CHECK(B.sigma_max() == doctest::Approx(1.0));
  CHECK(grassmann_distance(B.null_space(), A.null_space()) < 1e-12);
}

TEST_CASE("gaussian entries have variance 1/n") {
  Rng rng = make_rng(3, 0);
  const MeasurementMatrix A = MeasurementMatrix::gaussian(200, 400, rng);
  const double var = A.entries().squaredNorm() / A.entries().size();
  CHECK(var == doctest::Approx(1.0 / 400).epsilon(0.02));
}

TEST_CASE("Haar lines in R^3: |x_1| is uniform on [0, 1]") {
  std::vector<double> s;
  const int N = 4000;
  for (int i = 0; i < N; ++i) {
    Rng rng = make_rng(99, static_cast<std::uint64_t>(i));
    s.push_back(std::abs(sample_haar(3, 1, rng).basis()(0, 0)));
  }
  // 1% critical value of the KS statistic.
  CHECK(ks_uniform(s) < 1.63 / std::sqrt(N));
}

TEST_CASE("Haar planes in R^5: E ||P e_1||^2 = l / n") {
  double acc = 0.0;
  const int N = 4000;
  for (int i = 0; i < N; ++i) {
    Rng rng = make_rng(5, static_cast<std::uint64_t>(i));
    acc += sample_haar(5, 2, rng).basis().row(0).squaredNorm();
  }
  // Var of a Beta(1, 3/2) is 0.0514; 5 standard errors.
  CHECK(std::abs(acc / N - 0.4) < 5 * std::sqrt(0.0514 / N));
}

TEST_CASE("perturbation construction") {
  Rng rng = make_rng(8, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Subspace nu = sample_haar(6, 3, rng);
    const Eigen::VectorXd z = nu.basis() * random_unit_vector(3, rng);
    const Eigen::VectorXd n = random_unit_vector(6, rng) * 0.99 * u(rng);
    const Subspace nu2 = perturb_subspace(nu, z, n);
    CHECK(nu2.dim() == 3);
    CHECK(nu2.membership_residual(z + n) < 1e-10);
    CHECK(grassmann_distance(nu, nu2) <= n.norm() + 1e-10);
  }
}

TEST_CASE("matrix CSV round-trips bit for bit") {
  Rng rng = make_rng(1, 0);
  const Eigen::MatrixXd m = gaussian_matrix(3, 4, rng);
  std::stringstream ss;
  write_matrix_csv(ss, m);
  CHECK(read_matrix_csv(ss) == m);
  std::stringstream bad("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(bad), std::invalid_argument);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
}
