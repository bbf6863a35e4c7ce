#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "hos/error.hpp"
#include "hos/rational.hpp"

// Stencil coefficient families of the parameterized compact block-centered
// scheme framework. Two operator pairs exist:
//
//   staggered pair (mass A, difference delta): the compact relation between a
//     quantity at one set of points and its derivative at the half-shifted set,
//   node pair (mass A*, difference H): both quantity and derivative collocated.
//
// Each pair is controlled by (m, a2). Every closed form below is a polynomial
// in m^2, so the functions are generic over the scalar type: double for
// runtime use, Rational for exact preset goldens.

namespace hos {

// ---------------------------------------------------------------------------
// closed forms, generic in the scalar type (argument is m^2, not m)

template <class T>
struct MassCoeffsT {
  T a0, a1, a2;  // symmetric five-point row [a2, a1, a0, a1, a2]
};

template <class T>
struct NodeDerivCoeffsT {
  T d1, d2;  // antisymmetric row [-d2, -d1, 0, d1, d2] / h
};

template <class T>
struct StaggeredDerivCoeffsT {
  T b1, b2;  // antisymmetric face row [-b2, -b1, b1, b2] / h
};

template <class T>
struct TruncationCoeffsT {
  T e4, e6, e8;  // leading factors of h^4 w^(5), h^6 w^(7), h^8 w^(9)
};

template <class T>
MassCoeffsT<T> mass_coeffs_m2(const T& m2, const T& a2) {
  MassCoeffsT<T> c;
  c.a2 = a2;
  c.a1 = (m2 - T(48) * a2) / T(12);
  c.a0 = (T(6) + T(36) * a2 - m2) / T(6);
  return c;
}

template <class T>
NodeDerivCoeffsT<T> node_deriv_coeffs_m2(const T& m2) {
  return {(T(8) - m2) / T(12), (m2 - T(2)) / T(24)};
}

template <class T>
StaggeredDerivCoeffsT<T> staggered_deriv_coeffs_m2(const T& m2) {
  return {(T(9) - T(2) * m2) / T(8), (T(2) * m2 - T(1)) / T(24)};
}

// One-sided boundary rows for the Dirichlet closures. `l` replaces the face
// mass row nearest the wall, `k` the node-derivative row, `g` the staggered
// derivative row; all keep fourth-order accuracy on the one-sided stencil.
template <class T>
std::array<T, 4> boundary_l_m2(const T& m2) {
  return {(T(6) + m2) / T(6), -T(5) * m2 / T(12), m2 / T(3), -m2 / T(12)};
}

template <class T>
std::array<T, 5> boundary_k_m2(const T& m2) {
  return {-(T(2) + m2) / T(8), T(5) * (m2 - T(2)) / T(12), (T(3) - m2) / T(2),
          (m2 - T(2)) / T(4), (T(2) - m2) / T(24)};
}

template <class T>
std::array<T, 5> boundary_g_m2(const T& m2) {
  return {-(T(11) + T(2) * m2) / T(12), (T(17) + T(14) * m2) / T(24),
          T(3) * (T(1) - T(2) * m2) / T(8), T(5) * (T(2) * m2 - T(1)) / T(24),
          (T(1) - T(2) * m2) / T(24)};
}

template <class T>
TruncationCoeffsT<T> truncation_node_m2(const T& m2, const T& a2) {
  TruncationCoeffsT<T> t;
  t.e4 = T(1) / T(30) + a2 - m2 / T(72);
  t.e6 = (T(15) + T(630) * a2 - T(7) * m2) / T(3780);
  t.e8 = (T(3024) * a2 + m2) / T(241920);
  return t;
}

template <class T>
TruncationCoeffsT<T> truncation_staggered_m2(const T& m2, const T& a2) {
  TruncationCoeffsT<T> t;
  t.e4 = T(3) / T(640) - m2 / T(288) + a2;
  t.e6 = (T(135) + T(80640) * a2 - T(161) * m2) / T(483840);
  t.e8 = (T(3024) * a2 + m2) / T(241920);
  return t;
}

// a2 choices that cancel e4, giving the one-parameter sixth-order families.
template <class T>
T sixth_order_a2_node(const T& m2) {
  return m2 / T(72) - T(1) / T(30);
}
template <class T>
T sixth_order_a2_staggered(const T& m2) {
  return m2 / T(288) - T(3) / T(640);
}

// ---------------------------------------------------------------------------
// double-precision surface

using MassStencil = MassCoeffsT<double>;
using NodeDerivStencil = NodeDerivCoeffsT<double>;
using StaggeredDerivStencil = StaggeredDerivCoeffsT<double>;
using TruncationCoeffs = TruncationCoeffsT<double>;

inline std::array<double, 5> mass_taps(const MassStencil& a) {
  return {a.a2, a.a1, a.a0, a.a1, a.a2};
}
inline double mass_sum(const MassStencil& a) { return a.a0 + 2 * a.a1 + 2 * a.a2; }

struct BoundaryStencils {
  std::array<double, 4> l;  // face mass row
  std::array<double, 5> k;  // node-derivative row
  std::array<double, 5> g;  // staggered-derivative row
};

inline MassStencil interior_mass_coeffs(double m, double a2) {
  return mass_coeffs_m2(m * m, a2);
}
inline NodeDerivStencil node_derivative_coeffs(double m) {
  return node_deriv_coeffs_m2(m * m);
}
inline StaggeredDerivStencil staggered_derivative_coeffs(double m) {
  return staggered_deriv_coeffs_m2(m * m);
}
inline std::pair<std::array<double, 4>, std::array<double, 5>> boundary_coeffs_hos1d(double m) {
  return {boundary_l_m2(m * m), boundary_k_m2(m * m)};
}
inline std::array<double, 5> boundary_coeffs_hos2d(double m) {
  return boundary_g_m2(m * m);
}
inline TruncationCoeffs truncation_coeffs_node(double m, double a2) {
  return truncation_node_m2(m * m, a2);
}
inline TruncationCoeffs truncation_coeffs_staggered(double m, double a2) {
  return truncation_staggered_m2(m * m, a2);
}

enum class StencilKind { Node, Staggered };

// The unique positive-m parameter pair zeroing both e4 and e6.
inline std::pair<double, double> eighth_order_params(StencilKind kind) {
  if (kind == StencilKind::Node) {
    // e4 = 0 gives a2 = m^2/72 - 1/30; substituting into e6 leaves
    // 7m^2/4 - 6 = 0, so m^2 = 24/7.
    return {2.0 * std::sqrt(6.0 / 7.0), 1.0 / 70.0};
  }
  // staggered: a2 = m^2/288 - 3/640 and 119 m^2 - 243 = 0, so m^2 = 243/119.
  return {9.0 * std::sqrt(3.0 / 119.0), 183.0 / 76160.0};
}

// Order classification of one operator pair from its truncation constants.
// The closed forms are exact, so the threshold only absorbs rounding.
inline int order_of(const TruncationCoeffs& t) {
  constexpr double zero_tol = 1e-13;
  if (std::abs(t.e4) >= zero_tol) return 4;
  return std::abs(t.e6) < zero_tol ? 8 : 6;
}

struct StabilityDiagnostics {
  double R_a;  // a0 - 2|a1| - 2|a2|; the scheme family's stability criterion wants > 0
  double R_b;  // |a0| + 2|a1| + 2|a2|
  double R_d;  // 4 d1^2 + 4 d2^2 + 8 |d1 d2|
};

inline StabilityDiagnostics stability_diagnostics(const MassStencil& a,
                                                  const NodeDerivStencil& d) {
  StabilityDiagnostics s;
  s.R_a = a.a0 - 2 * std::abs(a.a1) - 2 * std::abs(a.a2);
  s.R_b = std::abs(a.a0) + 2 * std::abs(a.a1) + 2 * std::abs(a.a2);
  s.R_d = 4 * d.d1 * d.d1 + 4 * d.d2 * d.d2 + 8 * std::abs(d.d1 * d.d2);
  return s;
}

// ---------------------------------------------------------------------------
// scheme parameters and presets

// The four tunable parameters selecting one member of the scheme family.
struct SchemeParams {
  double m_stag = 0;   // m of the staggered pair (A, delta)
  double a2_stag = 0;  // outer mass coefficient of the staggered pair
  double m_node = 0;   // m of the node pair (A*, H)
  double a2_node = 0;  // outer mass coefficient of the node pair

  MassStencil mass_stag() const { return interior_mass_coeffs(m_stag, a2_stag); }
  MassStencil mass_node() const { return interior_mass_coeffs(m_node, a2_node); }
  StaggeredDerivStencil delta() const { return staggered_derivative_coeffs(m_stag); }
  NodeDerivStencil node_deriv() const { return node_derivative_coeffs(m_node); }

  bool finite() const {
    return std::isfinite(m_stag) && std::isfinite(a2_stag) && std::isfinite(m_node) &&
           std::isfinite(a2_node);
  }
  // Smaller of the two R_a margins; the stability criterion asks for > 0.
  double stability_margin() const {
    const auto d = node_deriv();
    return std::min(stability_diagnostics(mass_stag(), d).R_a,
                    stability_diagnostics(mass_node(), d).R_a);
  }
  bool satisfies_stability() const { return stability_margin() > 0; }
};

enum class Preset { Hos1, Hos2, Hos3, Hos4, Hos1D, Hos2D };

struct PresetRationals {
  Rational m2_stag, a2_stag, m2_node, a2_node;
};

inline PresetRationals preset_rationals(Preset p) {
  switch (p) {
    case Preset::Hos1:
    case Preset::Hos1D:
      return {{1, 2}, {0}, {1, 2}, {0}};
    case Preset::Hos2:
    case Preset::Hos2D:
      return {{2}, {0}, {2}, {0}};
    case Preset::Hos3:
      return {{11, 4}, {7, 1440}, {11, 4}, {7, 1440}};
    case Preset::Hos4:
      return {{243, 119}, {183, 76160}, {24, 7}, {1, 70}};
  }
  throw InvalidArgument("unknown preset");
}

inline SchemeParams preset_params(Preset p) {
  const PresetRationals r = preset_rationals(p);
  return {std::sqrt(r.m2_stag.to_double()), r.a2_stag.to_double(),
          std::sqrt(r.m2_node.to_double()), r.a2_node.to_double()};
}

inline const char* preset_name(Preset p) {
  switch (p) {
    case Preset::Hos1: return "HOS1";
    case Preset::Hos2: return "HOS2";
    case Preset::Hos3: return "HOS3";
    case Preset::Hos4: return "HOS4";
    case Preset::Hos1D: return "HOS1-D";
    case Preset::Hos2D: return "HOS2-D";
  }
  return "?";
}

inline bool preset_is_dirichlet(Preset p) {
  return p == Preset::Hos1D || p == Preset::Hos2D;
}

inline std::optional<Preset> preset_from_name(std::string_view name) {
  std::string s(name);
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "HOS1") return Preset::Hos1;
  if (s == "HOS2") return Preset::Hos2;
  if (s == "HOS3") return Preset::Hos3;
  if (s == "HOS4") return Preset::Hos4;
  if (s == "HOS1-D" || s == "HOS1D") return Preset::Hos1D;
  if (s == "HOS2-D" || s == "HOS2D") return Preset::Hos2D;
  return std::nullopt;
}

// Concrete stencils of one scheme: interior rows, boundary rows, order tags.
struct StencilSet {
  SchemeParams params;
  MassStencil mass_stag, mass_node;
  StaggeredDerivStencil delta;
  NodeDerivStencil node_deriv;
  BoundaryStencils boundary;  // l from m_stag, k from m_node, g from m_stag
  int order_stag = 0, order_node = 0;
};

inline StencilSet make_stencil_set(const SchemeParams& p) {
  if (!p.finite()) throw InvalidArgument("scheme parameters must be finite");
  StencilSet s;
  s.params = p;
  s.mass_stag = p.mass_stag();
  s.mass_node = p.mass_node();
  s.delta = p.delta();
  s.node_deriv = p.node_deriv();
  s.boundary.l = boundary_l_m2(p.m_stag * p.m_stag);
  s.boundary.k = boundary_k_m2(p.m_node * p.m_node);
  s.boundary.g = boundary_g_m2(p.m_stag * p.m_stag);
  s.order_stag = order_of(truncation_coeffs_staggered(p.m_stag, p.a2_stag));
  s.order_node = order_of(truncation_coeffs_node(p.m_node, p.a2_node));
  return s;
}

}  // namespace hos
