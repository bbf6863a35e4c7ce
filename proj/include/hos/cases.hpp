#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "hos/problem.hpp"

// Built-in benchmark problems. Each manufactured case carries a closed-form
// exact solution c(x,t), the flux z = -D c_x, and the source f obtained by
// substituting c into the governing equation
//   f = (1 + phi'(c)) c_t + u' c + u c_x - D' c_x - D c_xx.
// The sources are hand-derived; the test suite guards them with a
// finite-difference residual check before any solver test relies on them.
//
// ex6 is the application case: lead migration through a soil column with
// Langmuir adsorption, constant inlet concentration, zero-flux outlet.
// Concentrations are in g/L so the Langmuir constant applies as tabulated
// (2.6 L/g); the isotherm scale folds rho_b/n = 5000 g/L together with the
// mg-to-g bridge of S_m, giving 5.0.

namespace hos {

struct ManufacturedCase {
  std::string id;
  std::string description;
  double x_left = 0, x_right = 1;
  double T = 1;  // reporting horizon

  std::function<double(double)> velocity, diffusion, initial;
  std::function<double(double, double)> source;
  Isotherm isotherm;

  enum class Bc { Periodic, DirichletExact, InletOutlet } bc = Bc::Periodic;
  double inlet_value = 0;

  std::optional<ExactSolution> exact;
  std::map<std::string, double> params;  // named constants for reporting

  Problem problem(int J) const {
    Problem p;
    p.grid = Grid(x_left, x_right, J);
    p.velocity = velocity;
    p.diffusion = diffusion;
    p.source = source;
    p.isotherm = isotherm;
    p.initial = initial;
    p.exact = exact;
    switch (bc) {
      case Bc::Periodic:
        p.boundary = PeriodicBC{};
        break;
      case Bc::DirichletExact: {
        if (!exact) throw InvalidArgument("Dirichlet case needs an exact solution");
        const auto c = exact->c;
        const double xl = x_left, xr = x_right;
        p.boundary = DirichletBC{[c, xl](double t) { return c(xl, t); },
                                 [c, xr](double t) { return c(xr, t); }};
        break;
      }
      case Bc::InletOutlet:
        p.boundary = InletOutletBC{inlet_value};
        break;
    }
    return p;
  }
};

namespace cases_detail {

inline ManufacturedCase ex1() {
  ManufacturedCase m;
  m.id = "ex1";
  m.description = "periodic transport, Langmuir adsorption phi = 5c/(1+6c)";
  m.x_left = 0;
  m.x_right = 2 * std::numbers::pi;
  m.T = 1;
  m.velocity = [](double x) { return std::sin(2 * x); };
  m.diffusion = [](double x) { return 0.1 * (std::cos(2 * x) + 2.0); };
  m.isotherm = Isotherm::langmuir(6.0, 5.0 / 6.0);  // KL*Sm = 5
  auto c = [](double x, double t) { return std::exp(-t) * (std::sin(2 * x) + 1.0) / 2.0; };
  m.initial = [c](double x) { return c(x, 0.0); };
  m.exact = ExactSolution{
      c,
      [](double x, double t) {
        return -0.1 * (std::cos(2 * x) + 2.0) * std::exp(-t) * std::cos(2 * x);
      }};
  m.source = [c](double x, double t) {
    const double cv = c(x, t);
    const double cx = std::exp(-t) * std::cos(2 * x);
    const double cxx = -2.0 * std::exp(-t) * std::sin(2 * x);
    const double q = 1.0 + 6.0 * cv;
    const double dphi = 5.0 / (q * q);
    const double u = std::sin(2 * x), du = 2.0 * std::cos(2 * x);
    const double D = 0.1 * (std::cos(2 * x) + 2.0), dD = -0.2 * std::sin(2 * x);
    return (1.0 + dphi) * (-cv) + du * cv + u * cx - dD * cx - D * cxx;
  };
  return m;
}

inline ManufacturedCase ex2() {
  ManufacturedCase m;
  m.id = "ex2";
  m.description = "periodic transport, Freundlich adsorption phi = c^(1/3)";
  m.x_left = 0;
  m.x_right = std::numbers::pi;
  m.T = 1;
  m.velocity = [](double x) { return std::cos(2 * x); };
  m.diffusion = [](double x) { return 0.5 * std::sin(2 * x) + 1.0; };
  m.isotherm = Isotherm::freundlich(1.0, 1.0 / 3.0);  // exact solution stays positive
  const double L = std::log(3.0);
  auto c = [L](double x, double t) { return std::exp(L * (std::cos(2 * x + t) - 1.0)); };
  m.initial = [c](double x) { return c(x, 0.0); };
  m.exact = ExactSolution{c, [c, L](double x, double t) {
                            const double cx = -2.0 * L * std::sin(2 * x + t) * c(x, t);
                            return -(0.5 * std::sin(2 * x) + 1.0) * cx;
                          }};
  m.source = [c, L](double x, double t) {
    const double cv = c(x, t);
    const double s = std::sin(2 * x + t), co = std::cos(2 * x + t);
    const double ct = -L * s * cv;
    const double cx = -2.0 * L * s * cv;
    const double cxx = (-4.0 * L * co + 4.0 * L * L * s * s) * cv;
    const double dphi = std::pow(cv, -2.0 / 3.0) / 3.0;
    const double u = std::cos(2 * x), du = -2.0 * std::sin(2 * x);
    const double D = 0.5 * std::sin(2 * x) + 1.0, dD = std::cos(2 * x);
    return (1.0 + dphi) * ct + du * cv + u * cx - dD * cx - D * cxx;
  };
  return m;
}

inline ManufacturedCase ex3() {
  ManufacturedCase m;
  m.id = "ex3";
  m.description = "Dirichlet transport, linear adsorption phi = 0.7 c";
  m.x_left = 0;
  m.x_right = 4;
  m.T = 1;
  m.bc = ManufacturedCase::Bc::DirichletExact;
  m.velocity = [](double) { return 0.15; };
  m.diffusion = [](double) { return 0.135; };
  m.isotherm = Isotherm::linear(0.7);
  auto c = [](double x, double t) {
    const double cs = std::cos(x);
    return std::exp(t) * cs * cs;
  };
  m.initial = [c](double x) { return c(x, 0.0); };
  m.exact = ExactSolution{c, [](double x, double t) {
                            return 0.135 * std::exp(t) * std::sin(2 * x);
                          }};
  m.source = [c](double x, double t) {
    const double cv = c(x, t);
    const double cx = -std::exp(t) * std::sin(2 * x);
    const double cxx = -2.0 * std::exp(t) * std::cos(2 * x);
    return 1.7 * cv + 0.15 * cx - 0.135 * cxx;
  };
  return m;
}

inline ManufacturedCase ex4() {
  ManufacturedCase m;
  m.id = "ex4";
  m.description = "Dirichlet transport, degenerate Freundlich adsorption, regularized";
  m.x_left = -3;
  m.x_right = 3;
  m.T = 1;
  m.bc = ManufacturedCase::Bc::DirichletExact;
  const double eps = 1e-10, p = 1.0 / 3.0;
  m.velocity = [](double x) { return x; };
  m.diffusion = [](double x) { return x * x + 1.0; };
  m.isotherm = Isotherm::freundlich_regularized(1.0, p, eps);
  auto c = [](double x, double t) {
    const double th = std::tanh(2 * x);
    return std::exp(-t) * th * th;
  };
  m.initial = [c](double x) { return c(x, 0.0); };
  m.exact = ExactSolution{c, [](double x, double t) {
                            const double th = std::tanh(2 * x);
                            return -(x * x + 1.0) * 4.0 * std::exp(-t) * th * (1.0 - th * th);
                          }};
  // the source uses the regularized slope so (c, f) solves the equation the
  // scheme actually discretizes
  m.source = [c, eps, p](double x, double t) {
    const double cv = c(x, t);
    const double th = std::tanh(2 * x);
    const double sech2 = 1.0 - th * th;
    const double cx = 4.0 * std::exp(-t) * th * sech2;
    const double cxx = 8.0 * std::exp(-t) * sech2 * (1.0 - 3.0 * th * th);
    const double dphi = dphi_regularized(1.0, p, eps, cv);
    return (1.0 + dphi) * (-cv) + cv + x * cx - 2.0 * x * cx - (x * x + 1.0) * cxx;
  };
  return m;
}

inline ManufacturedCase ex5() {
  ManufacturedCase m;
  m.id = "ex5";
  m.description = "Dirichlet transport, Langmuir adsorption phi = c/(1+c)";
  m.x_left = 0;
  m.x_right = 6;
  m.T = 1;
  m.bc = ManufacturedCase::Bc::DirichletExact;
  m.velocity = [](double x) { return x; };
  m.diffusion = [](double x) { return x / 10.0; };
  m.isotherm = Isotherm::langmuir(1.0, 1.0);
  auto c = [](double x, double t) {
    const double s = std::sin(x);
    return std::exp(-t) * s * s;
  };
  m.initial = [c](double x) { return c(x, 0.0); };
  m.exact = ExactSolution{c, [](double x, double t) {
                            return -(x / 10.0) * std::exp(-t) * std::sin(2 * x);
                          }};
  m.source = [c](double x, double t) {
    const double cv = c(x, t);
    const double cx = std::exp(-t) * std::sin(2 * x);
    const double cxx = 2.0 * std::exp(-t) * std::cos(2 * x);
    const double q = 1.0 + cv;
    return (1.0 + 1.0 / (q * q)) * (-cv) + cv + x * cx - 0.1 * cx - (x / 10.0) * cxx;
  };
  return m;
}

inline ManufacturedCase ex6(double column_length = 5.0) {
  ManufacturedCase m;
  m.id = "ex6";
  m.description = "lead migration in a soil column, Langmuir adsorption, inlet/outlet";
  m.x_left = 0;
  m.x_right = column_length;  // metres
  m.T = 1800;                 // days
  m.bc = ManufacturedCase::Bc::InletOutlet;
  m.inlet_value = 0.1;  // 100 mg/L in g/L
  m.velocity = [](double) { return 0.012; };
  m.diffusion = [](double) { return 0.17477; };
  m.isotherm = Isotherm::langmuir(2.6, 3e-4, 5.0);  // scale = (rho_b/n)/1000
  m.initial = [](double) { return 0.0; };
  m.source = [](double, double) { return 0.0; };
  m.params = {{"rho", 1500.0}, {"u", 0.012},  {"D", 0.17477},
              {"n", 0.3},      {"K_L", 2.6},  {"S_m", 3e-4},
              {"c_in", 0.1},   {"scale", 5.0}};
  return m;
}

}  // namespace cases_detail

inline ManufacturedCase builtin_case(const std::string& id) {
  if (id == "ex1") return cases_detail::ex1();
  if (id == "ex2") return cases_detail::ex2();
  if (id == "ex3") return cases_detail::ex3();
  if (id == "ex4") return cases_detail::ex4();
  if (id == "ex5") return cases_detail::ex5();
  if (id == "ex6") return cases_detail::ex6();
  throw InvalidArgument("unknown case id: " + id + " (expected ex1..ex6)");
}

}  // namespace hos
