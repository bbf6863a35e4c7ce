#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "hos/grid.hpp"
#include "hos/isotherm.hpp"

// Problem description for the transport-adsorption equation
//   c_t + phi(c)_t + (u c - D c_x)_x = f(x, t)
// on a block-centered grid, with one of three boundary treatments.

namespace hos {

struct PeriodicBC {};

struct DirichletBC {
  std::function<double(double)> left;   // g_L(t)
  std::function<double(double)> right;  // g_R(t)
};

// Fixed inlet concentration on the left, zero-flux outlet approximated by
// copying the nearest interior value after each step.
struct InletOutletBC {
  double c_in = 0;
};

using BoundaryCondition = std::variant<PeriodicBC, DirichletBC, InletOutletBC>;

struct ExactSolution {
  std::function<double(double, double)> c;  // c(x, t)
  std::function<double(double, double)> z;  // z(x, t) = -D c_x
};

struct Problem {
  Grid grid;
  std::function<double(double)> velocity;          // u(x) at nodes
  std::function<double(double)> diffusion;         // D(x) at faces
  std::function<double(double, double)> source;    // f(x, t)
  Isotherm isotherm;
  BoundaryCondition boundary = PeriodicBC{};
  std::function<double(double)> initial;           // c_0(x)
  std::optional<ExactSolution> exact;

  bool is_periodic() const { return std::holds_alternative<PeriodicBC>(boundary); }

  // Diffusion bounds sampled where the scheme uses D (the faces); the lower
  // bound must stay positive.
  void validate() const {
    if (!velocity || !diffusion || !initial) throw InvalidArgument("problem is incomplete");
    double dmin = 1e300, dmax = -1e300;
    for (int i = 0; i < grid.J; ++i) {
      const double d = diffusion(grid.face(i));
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    if (!(dmin > 0)) throw InvalidArgument("diffusion coefficient must be positive on faces");
    if (!std::isfinite(dmax)) throw InvalidArgument("diffusion coefficient must be finite");
    for (int i = 0; i <= grid.J; ++i) {
      if (initial(grid.node(i)) < -1e-12)
        throw InvalidArgument("initial concentration must be nonnegative");
    }
  }
};

}  // namespace hos
