#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hos/error.hpp"

// Block-centered grid: scalar unknowns live at nodes x_i, fluxes at faces
// x_{i+1/2}. Periodic cell fields store C_1..C_J (node 0 is identified with
// node J); Dirichlet cell fields store C_0..C_J including both boundary
// values. Face fields always store Z_{1/2}..Z_{J-1/2}.

namespace hos {

struct Grid {
  double x_left = 0, x_right = 1;
  int J = 1;
  double h = 1;

  Grid() = default;
  Grid(double xl, double xr, int cells) : x_left(xl), x_right(xr), J(cells) {
    if (!(xr > xl)) throw InvalidArgument("Grid: x_right must exceed x_left");
    if (cells < 5) throw InvalidArgument("Grid: need at least 5 cells for 5-point stencils");
    h = (xr - xl) / cells;
  }

  double length() const { return x_right - x_left; }
  double node(int i) const { return x_left + i * h; }            // i = 0..J
  double face(int i) const { return x_left + (i + 0.5) * h; }    // i = 0..J-1
};

enum class BoundaryMode { Periodic, Dirichlet };

class CellField {
 public:
  CellField() = default;
  CellField(int J, BoundaryMode mode, double fill = 0.0)
      : J_(J), mode_(mode),
        v_(static_cast<size_t>(mode == BoundaryMode::Periodic ? J : J + 1), fill) {}

  static CellField periodic(int J, double fill = 0.0) {
    return CellField(J, BoundaryMode::Periodic, fill);
  }
  static CellField dirichlet(int J, double fill = 0.0) {
    return CellField(J, BoundaryMode::Dirichlet, fill);
  }

  int J() const { return J_; }
  BoundaryMode mode() const { return mode_; }
  int size() const { return static_cast<int>(v_.size()); }
  double& operator[](int k) { return v_[static_cast<size_t>(k)]; }
  double operator[](int k) const { return v_[static_cast<size_t>(k)]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  // storage slot of node index i (periodic: i = 1..J, dirichlet: i = 0..J)
  int slot(int node) const { return mode_ == BoundaryMode::Periodic ? node - 1 : node; }
  double at_node(int i) const { return v_[static_cast<size_t>(slot(i))]; }
  double& at_node(int i) { return v_[static_cast<size_t>(slot(i))]; }

 private:
  int J_ = 0;
  BoundaryMode mode_ = BoundaryMode::Periodic;
  std::vector<double> v_;
};

class FaceField {
 public:
  FaceField() = default;
  explicit FaceField(int J, double fill = 0.0) : J_(J), v_(static_cast<size_t>(J), fill) {}

  int J() const { return J_; }
  int size() const { return J_; }
  double& operator[](int k) { return v_[static_cast<size_t>(k)]; }  // k <-> face k+1/2
  double operator[](int k) const { return v_[static_cast<size_t>(k)]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

 private:
  int J_ = 0;
  std::vector<double> v_;
};

inline CellField sample_cells(const Grid& g, BoundaryMode mode,
                              const std::function<double(double)>& f) {
  CellField c(g.J, mode);
  if (mode == BoundaryMode::Periodic) {
    for (int i = 1; i <= g.J; ++i) c.at_node(i) = f(g.node(i));
  } else {
    for (int i = 0; i <= g.J; ++i) c.at_node(i) = f(g.node(i));
  }
  return c;
}

inline FaceField sample_faces(const Grid& g, const std::function<double(double)>& f) {
  FaceField z(g.J);
  for (int i = 0; i < g.J; ++i) z[i] = f(g.face(i));
  return z;
}

namespace detail {
inline void require_same_cells(const CellField& a, const CellField& b) {
  if (a.size() != b.size() || a.mode() != b.mode())
    throw InvalidArgument("cell fields have mismatched length or boundary mode");
}
}  // namespace detail

// Discrete inner products and norms. Periodic sums run over all J nodes;
// Dirichlet sums run over interior nodes 1..J-1. Face sums always cover all
// J faces.
inline double cell_inner(const Grid& g, const CellField& p, const CellField& q) {
  detail::require_same_cells(p, q);
  double s = 0;
  if (p.mode() == BoundaryMode::Periodic) {
    for (int k = 0; k < p.size(); ++k) s += p[k] * q[k];
  } else {
    for (int i = 1; i < g.J; ++i) s += p.at_node(i) * q.at_node(i);
  }
  return g.h * s;
}

inline double face_inner(const Grid& g, const FaceField& u, const FaceField& v) {
  if (u.size() != v.size()) throw InvalidArgument("face fields have mismatched length");
  double s = 0;
  for (int k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return g.h * s;
}

inline double cell_l2_norm(const Grid& g, const CellField& p) {
  return std::sqrt(cell_inner(g, p, p));
}
inline double face_l2_norm(const Grid& g, const FaceField& u) {
  return std::sqrt(face_inner(g, u, u));
}

inline double cell_max_norm(const CellField& p) {
  double m = 0;
  if (p.mode() == BoundaryMode::Periodic) {
    for (int k = 0; k < p.size(); ++k) m = std::max(m, std::abs(p[k]));
  } else {
    for (int i = 1; i < p.J(); ++i) m = std::max(m, std::abs(p.at_node(i)));
  }
  return m;
}
inline double face_max_norm(const FaceField& u) {
  double m = 0;
  for (int k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k]));
  return m;
}

}  // namespace hos
