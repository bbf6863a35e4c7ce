#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "hos/error.hpp"

// Brute-force stencil generator: solves the Taylor moment-matching system
// directly instead of using the closed forms. A stencil {c_j} at offsets
// {eps_j} (in units of h) reproduces the weighted derivative sum
//   sum_k  e~_k f^(k + shift),   k = 0..3,
// where e~_k are the integral-averaging moments with both limits equal to mh:
//   e~_0 = 1, e~_1 = 0, e~_2 = m^2 h^2 / 12, e~_3 = 0.
// Matching Taylor coefficients row by row gives a small linear system; extra
// rows pin coefficients when the stencil has free parameters (the symmetric
// five-point mass row leaves its outermost coefficient free).
//
// This path shares no code with the closed forms in coefficients.hpp and
// serves as their independent oracle.

namespace hos {

struct MomentSpec {
  std::vector<double> offsets;          // stencil offsets, units of h, distinct
  std::array<double, 4> moments;        // e~_k / h^k for k = 0..3
  int deriv_shift = 0;                  // 0: mass-type row, 1: first-derivative row
  std::vector<std::pair<int, double>> pins;  // (coefficient index, pinned value)
};

// Moments for the equal-limits integral averaging used by the whole family.
inline std::array<double, 4> imvl_moments(double m) {
  return {1.0, 0.0, m * m / 12.0, 0.0};
}

inline std::vector<double> moment_match(const MomentSpec& spec) {
  const int n = static_cast<int>(spec.offsets.size());
  if (n == 0) throw InvalidArgument("moment_match: empty stencil");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (spec.offsets[i] == spec.offsets[j])
        throw InvalidArgument("moment_match: degenerate stencil (duplicate offsets)");
  if (spec.deriv_shift != 0 && spec.deriv_shift != 1)
    throw InvalidArgument("moment_match: deriv_shift must be 0 or 1");

  const int n_moment_rows = 4 + spec.deriv_shift;
  const int rows = n_moment_rows + static_cast<int>(spec.pins.size());
  if (rows < n)
    throw InvalidArgument("moment_match: underdetermined system; pin free coefficients");

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  for (int k = 0; k < n_moment_rows; ++k) {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    for (int j = 0; j < n; ++j) M(k, j) = std::pow(spec.offsets[j], k) / fact;
    if (spec.deriv_shift == 0) {
      rhs(k) = spec.moments[static_cast<size_t>(k)];
    } else {
      rhs(k) = (k == 0) ? 0.0 : spec.moments[static_cast<size_t>(k - 1)];
    }
  }
  int r = n_moment_rows;
  for (const auto& [idx, value] : spec.pins) {
    if (idx < 0 || idx >= n) throw InvalidArgument("moment_match: pin index out of range");
    M(r, idx) = 1.0;
    rhs(r) = value;
    ++r;
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  if (cod.rank() < n)
    throw NumericalError("moment_match: singular moment matrix (degenerate stencil)");
  const Eigen::VectorXd c = cod.solve(rhs);

  const double residual = (M * c - rhs).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  if (residual > 1e-9 * scale)
    throw NumericalError("moment_match: moment system inconsistent (residual " +
                         std::to_string(residual) + ")");

  return {c.data(), c.data() + n};
}

}  // namespace hos
