#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hos/error.hpp"

namespace hos {

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0;
  std::vector<double> residual_history;
};

// Plain Newton iteration with a dense LU solve per step. Residuals are
// measured in the max norm; the count reports the number of updates taken.
//
// `refine_below`: once the tolerance is met, keep updating (at most twice)
// while the residual still exceeds this floor and each update gains at least
// a factor of ten. A quadratic sequence can land barely under `tol` with a
// systematically signed remainder; per-step remainders of that size
// accumulate visibly in long conservation ledgers, so the accepted iterate is
// pushed down to rounding level. Refinement updates are counted.
template <class ResidualFn, class JacobianFn>
NewtonResult newton_solve(ResidualFn&& residual, JacobianFn&& jacobian, Eigen::VectorXd guess,
                          double tol, int max_iters, double refine_below = 0.0) {
  if (!(tol > 0) || max_iters < 1) throw InvalidArgument("newton_solve: bad tolerance or budget");
  NewtonResult result;
  result.x = std::move(guess);

  auto update = [&](const Eigen::VectorXd& F) {
    const Eigen::MatrixXd Jm = jacobian(result.x);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jm);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-300 ||
        diag.minCoeff() <= 1e-16 * diag.maxCoeff() * Jm.rows())
      throw NumericalError("Newton Jacobian is singular to working precision");
    result.x -= lu.solve(F);
  };

  for (int it = 0; it <= max_iters; ++it) {
    Eigen::VectorXd F = residual(result.x);
    result.residual_norm = F.template lpNorm<Eigen::Infinity>();
    result.residual_history.push_back(result.residual_norm);
    if (!std::isfinite(result.residual_norm))
      throw NewtonFailure("Newton residual is not finite", result.residual_history);
    if (result.residual_norm <= tol) {
      result.iterations = it;
      for (int extra = 0; extra < 2 && result.residual_norm > refine_below; ++extra) {
        const Eigen::VectorXd x_kept = result.x;
        update(F);
        F = residual(result.x);
        const double r = F.template lpNorm<Eigen::Infinity>();
        if (!(r < result.residual_norm)) {
          result.x = x_kept;  // rounding floor reached; keep the better iterate
          break;
        }
        const bool strong = r < 0.1 * result.residual_norm;
        result.residual_norm = r;
        result.residual_history.push_back(r);
        ++result.iterations;
        if (!strong) break;
      }
      return result;
    }
    if (it == max_iters) break;
    update(F);
  }

  std::string msg = "Newton failed to reach tol " + std::to_string(tol) + " after " +
                    std::to_string(max_iters) + " iterations (last residual " +
                    std::to_string(result.residual_norm) + ")";
  throw NewtonFailure(msg, result.residual_history);
}

}  // namespace hos
