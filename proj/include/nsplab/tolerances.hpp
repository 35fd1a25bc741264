#pragma once

namespace nsplab {

// Numerical tolerances shared by every module. Kept in one record so that a
// sweep or a stricter build only has to touch this file.
struct Tolerances {
  // Orthonormality of bases and subspace membership residuals.
  double basis = 1e-10;
  // Relative slack for sampled property checks (subadditivity, monotonicity).
  double property = 1e-9;
  // Relative deficit band inside which the NSP verdict is `boundary`.
  double nsp_boundary = 1e-9;
  // Margin band used to count Monte Carlo trials as boundary cases.
  double mc_boundary = 1e-6;
  // Shrink factor for the noisy feasibility ball, ||Ax - y|| <= eps * (1 - shrink).
  double noisy_shrink = 1e-9;
  // Feasibility slack reported on solver outputs.
  double feasibility = 1e-9;
  // Relative band used by the closed-form n = 3 classifier.
  double ce1_band = 1e-12;
  // Entries below this magnitude are treated as exact zeros by the solvers.
  double zero_entry = 1e-12;
};

inline constexpr Tolerances kTol{};

}  // namespace nsplab
