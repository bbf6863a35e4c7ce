#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "hos/error.hpp"

// Equilibrium adsorption models phi(c) and the combined storage term
// psi(c) = c + phi(c). The scale factor carries the bulk-density-over-porosity
// multiplier when phi is given through a raw isotherm; it defaults to 1 when
// phi is prescribed directly.
//
// The Freundlich model with exponent below one has unbounded slope at c = 0;
// the regularized variant replaces the power law on [0, eps] by its tangent
// continuation, which keeps the slope finite and extends smoothly to negative
// arguments (transient Newton iterates may dip below zero).

namespace hos {

struct PsiEval {
  double value;
  double derivative;
};

struct LinearIso {
  double Kd;
};
struct LangmuirIso {
  double KL, Sm;
};
struct FreundlichIso {
  double KF, alpha;
};
struct RegularizedFreundlichIso {
  double KF, alpha, eps;
};

// Regularized Freundlich evaluation: power branch above the knot, linear
// branch with the matching slope below (continuous at c = eps).
inline double phi_regularized(double KF, double alpha, double eps, double c) {
  if (c > eps) return KF * std::pow(c, alpha);
  return KF * (alpha * std::pow(eps, alpha - 1.0) * c + (1.0 - alpha) * std::pow(eps, alpha));
}

inline double dphi_regularized(double KF, double alpha, double eps, double c) {
  if (c > eps) return KF * alpha * std::pow(c, alpha - 1.0);
  return KF * alpha * std::pow(eps, alpha - 1.0);
}

class Isotherm {
 public:
  Isotherm() : v_(LinearIso{0.0}) {}

  static Isotherm linear(double Kd, double scale = 1.0) {
    if (!(Kd > 0)) throw InvalidArgument("linear isotherm needs Kd > 0");
    return Isotherm(LinearIso{Kd}, scale);
  }
  static Isotherm langmuir(double KL, double Sm, double scale = 1.0) {
    if (!(KL > 0) || !(Sm > 0)) throw InvalidArgument("Langmuir isotherm needs KL, Sm > 0");
    return Isotherm(LangmuirIso{KL, Sm}, scale);
  }
  static Isotherm freundlich(double KF, double alpha, double scale = 1.0) {
    if (!(KF > 0) || !(alpha > 0)) throw InvalidArgument("Freundlich isotherm needs KF, alpha > 0");
    return Isotherm(FreundlichIso{KF, alpha}, scale);
  }
  static Isotherm freundlich_regularized(double KF, double alpha, double eps, double scale = 1.0) {
    if (!(KF > 0) || !(alpha > 0)) throw InvalidArgument("Freundlich isotherm needs KF, alpha > 0");
    if (!(eps > 0)) throw InvalidArgument("regularized Freundlich needs eps > 0");
    return Isotherm(RegularizedFreundlichIso{KF, alpha, eps}, scale);
  }

  double phi(double c) const {
    return scale_ * std::visit(
                        [c](const auto& iso) -> double {
                          using T = std::decay_t<decltype(iso)>;
                          if constexpr (std::is_same_v<T, LinearIso>) {
                            return iso.Kd * c;
                          } else if constexpr (std::is_same_v<T, LangmuirIso>) {
                            return iso.KL * iso.Sm * c / (1.0 + iso.KL * c);
                          } else if constexpr (std::is_same_v<T, FreundlichIso>) {
                            if (c < 0)
                              throw InvalidArgument(
                                  "Freundlich isotherm undefined for negative concentration; "
                                  "use the regularized variant");
                            return iso.KF * std::pow(c, iso.alpha);
                          } else {
                            return phi_regularized(iso.KF, iso.alpha, iso.eps, c);
                          }
                        },
                        v_);
  }

  double dphi(double c) const {
    return scale_ * std::visit(
                        [c](const auto& iso) -> double {
                          using T = std::decay_t<decltype(iso)>;
                          if constexpr (std::is_same_v<T, LinearIso>) {
                            return iso.Kd;
                          } else if constexpr (std::is_same_v<T, LangmuirIso>) {
                            const double q = 1.0 + iso.KL * c;
                            return iso.KL * iso.Sm / (q * q);
                          } else if constexpr (std::is_same_v<T, FreundlichIso>) {
                            if (c <= 0 && iso.alpha < 1)
                              throw NumericalError(
                                  "Freundlich slope unbounded as c -> 0; regularize");
                            if (c < 0)
                              throw InvalidArgument(
                                  "Freundlich isotherm undefined for negative concentration");
                            return iso.KF * iso.alpha * std::pow(c, iso.alpha - 1.0);
                          } else {
                            return dphi_regularized(iso.KF, iso.alpha, iso.eps, c);
                          }
                        },
                        v_);
  }

  PsiEval psi(double c) const { return {c + phi(c), 1.0 + dphi(c)}; }

  double scale() const { return scale_; }
  bool degenerate() const {
    const auto* f = std::get_if<FreundlichIso>(&v_);
    return f != nullptr && f->alpha < 1.0;
  }
  std::string name() const {
    return std::visit(
        [](const auto& iso) -> std::string {
          using T = std::decay_t<decltype(iso)>;
          if constexpr (std::is_same_v<T, LinearIso>) return "linear";
          else if constexpr (std::is_same_v<T, LangmuirIso>) return "langmuir";
          else if constexpr (std::is_same_v<T, FreundlichIso>) return "freundlich";
          else return "freundlich_regularized";
        },
        v_);
  }

 private:
  template <class V>
  Isotherm(V iso, double scale) : v_(iso), scale_(scale) {
    if (!(scale > 0)) throw InvalidArgument("isotherm scale must be positive");
  }

  std::variant<LinearIso, LangmuirIso, FreundlichIso, RegularizedFreundlichIso> v_;
  double scale_ = 1.0;
};

struct AssumptionReport {
  bool monotone = true;          // phi nondecreasing on the sampled range
  bool psi_zero_ok = true;       // psi(0) vanishes up to regularization offset
  bool quotient_ok = true;       // psi difference quotients >= 1
  bool degenerate_warning = false;
  double psi_at_zero = 0;
  double min_quotient = 0;
  std::string failed;            // name of the first violated assumption

  bool pass() const { return failed.empty(); }
};

// Samples phi and psi on [0, c_max] and checks the standing assumptions:
// monotone isotherm, psi(0) = 0, uniform monotonicity of psi. The regularized
// Freundlich variant carries a positive offset psi(0) = (1-alpha) eps^alpha by
// construction; anything up to that offset counts as passing. A degenerate
// (unregularized, alpha < 1) Freundlich model is flagged, not failed.
inline AssumptionReport validate_assumptions(const Isotherm& iso, double c_max = 1.0,
                                             int samples = 200) {
  if (!(c_max > 0) || samples < 2) throw InvalidArgument("bad assumption-check range");
  AssumptionReport rep;
  rep.degenerate_warning = iso.degenerate();
  rep.psi_at_zero = iso.phi(0.0);  // psi(0) = 0 + phi(0); avoids the degenerate slope
  rep.min_quotient = 1e300;

  double psi_tol = 1e-12;
  if (iso.name() == "freundlich_regularized") {
    // continuity offset of the linear branch at zero
    psi_tol = std::max(psi_tol, std::abs(iso.phi(0.0)) * (1.0 + 1e-12));
  }
  if (std::abs(rep.psi_at_zero) > psi_tol) {
    rep.psi_zero_ok = false;
    rep.failed = "psi(0) = 0";
  }

  double prev_c = 0.0, prev_phi = iso.phi(0.0), prev_psi = rep.psi_at_zero;
  for (int s = 1; s < samples; ++s) {
    const double c = c_max * s / (samples - 1);
    const double ph = iso.phi(c);
    const double ps = c + ph;
    if (ph < prev_phi - 1e-12 * std::max(1.0, std::abs(ph))) {
      rep.monotone = false;
      if (rep.failed.empty()) rep.failed = "phi monotone increasing";
    }
    const double quot = (ps - prev_psi) / (c - prev_c);
    rep.min_quotient = std::min(rep.min_quotient, quot);
    prev_c = c;
    prev_phi = ph;
    prev_psi = ps;
  }
  if (rep.min_quotient < 1.0 - 1e-12) {
    rep.quotient_ok = false;
    if (rep.failed.empty()) rep.failed = "psi difference quotient >= 1";
  }
  return rep;
}

}  // namespace hos
