#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hos/coefficients.hpp"
#include "hos/grid.hpp"

// Assembly and application of the four discrete operators on block-centered
// grids: symmetric mass rows (A), staggered differences (delta), collocated
// differences (H), plus their Dirichlet closures built from the one-sided
// boundary rows l / k / g.
//
// Index conventions (storage slot -> grid object):
//   periodic cells:  slot r <-> node r+1,  r = 0..J-1, wraparound indices
//   dirichlet cells: slot r <-> node r,    r = 0..J
//   faces:           slot r <-> face r+1/2, r = 0..J-1

namespace hos {

enum class Closure { Periodic, Hos1D, Hos2D };

namespace detail {
inline int wrap(int k, int J) { return ((k % J) + J) % J; }

inline void require_three_point(const MassStencil& a) {
  if (a.a2 != 0.0)
    throw InvalidArgument("Dirichlet closures support three-point mass rows only (a2 = 0)");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// dense matrix realizations

// Dense realization of a stencil together with its boundary closure tag.
// Periodic realizations are circulant; every row sums to the stencil sum.
struct OperatorMatrix {
  Eigen::MatrixXd M;
  Closure closure = Closure::Periodic;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return M * v; }
};

inline Eigen::MatrixXd mass_matrix_periodic(const MassStencil& a, int J) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
  for (int r = 0; r < J; ++r) {
    M(r, r) += a.a0;
    M(r, detail::wrap(r + 1, J)) += a.a1;
    M(r, detail::wrap(r - 1, J)) += a.a1;
    M(r, detail::wrap(r + 2, J)) += a.a2;
    M(r, detail::wrap(r - 2, J)) += a.a2;
  }
  return M;
}

// delta applied to a face field, evaluated at nodes 1..J (periodic).
inline Eigen::MatrixXd delta_face_to_node_periodic(const StaggeredDerivStencil& b, int J,
                                                   double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
  for (int r = 0; r < J; ++r) {
    M(r, detail::wrap(r + 2, J)) += b.b2 / h;
    M(r, detail::wrap(r + 1, J)) += b.b1 / h;
    M(r, r) -= b.b1 / h;
    M(r, detail::wrap(r - 1, J)) -= b.b2 / h;
  }
  return M;
}

// delta applied to a cell field, evaluated at faces 1/2..J-1/2 (periodic).
inline Eigen::MatrixXd delta_node_to_face_periodic(const StaggeredDerivStencil& b, int J,
                                                   double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
  for (int r = 0; r < J; ++r) {
    M(r, detail::wrap(r + 1, J)) += b.b2 / h;
    M(r, r) += b.b1 / h;
    M(r, detail::wrap(r - 1, J)) -= b.b1 / h;
    M(r, detail::wrap(r - 2, J)) -= b.b2 / h;
  }
  return M;
}

inline Eigen::MatrixXd node_deriv_matrix_periodic(const NodeDerivStencil& d, int J, double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
  for (int r = 0; r < J; ++r) {
    M(r, detail::wrap(r + 2, J)) += d.d2 / h;
    M(r, detail::wrap(r + 1, J)) += d.d1 / h;
    M(r, detail::wrap(r - 1, J)) -= d.d1 / h;
    M(r, detail::wrap(r - 2, J)) -= d.d2 / h;
  }
  return M;
}

// Mass rows at interior nodes 1..J-1 acting on a full Dirichlet cell vector
// C_0..C_J; boundary values enter through their columns.
inline Eigen::MatrixXd mass_matrix_interior_nodes(const MassStencil& a, int J) {
  detail::require_three_point(a);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J - 1, J + 1);
  for (int i = 1; i < J; ++i) {
    M(i - 1, i) = a.a0;
    M(i - 1, i - 1) = a.a1;
    M(i - 1, i + 1) = a.a1;
  }
  return M;
}

// Face mass operator with the one-sided l rows replacing the first and last row.
inline Eigen::MatrixXd mass_matrix_faces_dirichlet(const MassStencil& a,
                                                   const std::array<double, 4>& l, int J) {
  detail::require_three_point(a);
  if (J < 4) throw InvalidArgument("Dirichlet face mass operator needs J >= 4");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
  for (int r = 1; r < J - 1; ++r) {
    M(r, r) = a.a0;
    M(r, r - 1) = a.a1;
    M(r, r + 1) = a.a1;
  }
  for (int c = 0; c < 4; ++c) {
    M(0, c) = l[static_cast<size_t>(c)];
    M(J - 1, J - 1 - c) = l[static_cast<size_t>(c)];
  }
  return M;
}

// delta from a full Dirichlet cell vector to faces. A four-point stencil uses
// the one-sided g rows at both ends; a two-point stencil needs no closure.
inline Eigen::MatrixXd delta_node_to_face_dirichlet(const StaggeredDerivStencil& b,
                                                    const std::optional<std::array<double, 5>>& g,
                                                    int J, double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J + 1);
  const bool wide = b.b2 != 0.0;
  if (wide && !g)
    throw InvalidArgument("four-point staggered stencil needs boundary g rows under Dirichlet");
  if (wide && J < 5) throw InvalidArgument("Dirichlet delta needs J >= 5");
  const int lo = wide ? 1 : 0;
  const int hi = wide ? J - 2 : J - 1;
  for (int k = lo; k <= hi; ++k) {
    M(k, k + 1) += b.b1 / h;
    M(k, k) -= b.b1 / h;
    if (wide) {
      M(k, k + 2) += b.b2 / h;
      M(k, k - 1) -= b.b2 / h;
    }
  }
  if (wide) {
    for (int c = 0; c < 5; ++c) {
      M(0, c) = (*g)[static_cast<size_t>(c)] / h;
      M(J - 1, J - c) = -(*g)[static_cast<size_t>(c)] / h;
    }
  }
  return M;
}

// delta from faces to interior nodes 1..J-1 under Dirichlet closure.
inline Eigen::MatrixXd delta_face_to_node_dirichlet(const StaggeredDerivStencil& b,
                                                    const std::optional<std::array<double, 5>>& g,
                                                    int J, double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J - 1, J);
  const bool wide = b.b2 != 0.0;
  if (wide && !g)
    throw InvalidArgument("four-point staggered stencil needs boundary g rows under Dirichlet");
  if (wide && J < 6) throw InvalidArgument("Dirichlet delta needs J >= 6");
  const int lo = wide ? 2 : 1;
  const int hi = wide ? J - 2 : J - 1;
  for (int i = lo; i <= hi; ++i) {
    M(i - 1, i) += b.b1 / h;
    M(i - 1, i - 1) -= b.b1 / h;
    if (wide) {
      M(i - 1, i + 1) += b.b2 / h;
      M(i - 1, i - 2) -= b.b2 / h;
    }
  }
  if (wide) {
    for (int c = 0; c < 5; ++c) {
      M(0, c) = (*g)[static_cast<size_t>(c)] / h;          // node 1 from faces 1/2..9/2
      M(J - 2, J - 1 - c) = -(*g)[static_cast<size_t>(c)] / h;
    }
  }
  return M;
}

// Collocated derivative at interior nodes from a full Dirichlet cell vector.
// A five-point stencil takes the one-sided k rows at both ends (the HOS1-D
// closure); a three-point stencil reaches only the known boundary values.
inline Eigen::MatrixXd node_deriv_matrix_dirichlet(const NodeDerivStencil& d,
                                                   const std::optional<std::array<double, 5>>& k,
                                                   int J, double h) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J - 1, J + 1);
  const bool wide = d.d2 != 0.0;
  if (wide && !k)
    throw InvalidArgument("five-point node stencil needs boundary k rows under Dirichlet");
  if (wide && J < 6) throw InvalidArgument("Dirichlet node derivative needs J >= 6");
  const int lo = wide ? 2 : 1;
  const int hi = wide ? J - 2 : J - 1;
  for (int i = lo; i <= hi; ++i) {
    M(i - 1, i + 1) += d.d1 / h;
    M(i - 1, i - 1) -= d.d1 / h;
    if (wide) {
      M(i - 1, i + 2) += d.d2 / h;
      M(i - 1, i - 2) -= d.d2 / h;
    }
  }
  if (wide) {
    for (int c = 0; c < 5; ++c) {
      M(0, c) = (*k)[static_cast<size_t>(c)] / h;
      M(J - 2, J - c) = -(*k)[static_cast<size_t>(c)] / h;
    }
  }
  return M;
}

// ---------------------------------------------------------------------------
// field-level application

inline Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline CellField apply_mass(const MassStencil& a, const CellField& f, Closure closure) {
  const int J = f.J();
  CellField out(J, f.mode());
  if (closure == Closure::Periodic) {
    if (f.mode() != BoundaryMode::Periodic)
      throw InvalidArgument("periodic mass application needs a periodic field");
    for (int r = 0; r < J; ++r)
      out[r] = a.a0 * f[r] + a.a1 * (f[detail::wrap(r + 1, J)] + f[detail::wrap(r - 1, J)]) +
               a.a2 * (f[detail::wrap(r + 2, J)] + f[detail::wrap(r - 2, J)]);
    return out;
  }
  if (f.mode() != BoundaryMode::Dirichlet)
    throw InvalidArgument("Dirichlet mass application needs a Dirichlet field");
  detail::require_three_point(a);
  out.at_node(0) = f.at_node(0);  // boundary slots pass through
  out.at_node(J) = f.at_node(J);
  for (int i = 1; i < J; ++i)
    out.at_node(i) = a.a0 * f.at_node(i) + a.a1 * (f.at_node(i - 1) + f.at_node(i + 1));
  return out;
}

inline FaceField apply_mass(const MassStencil& a, const FaceField& f, Closure closure,
                            const std::optional<std::array<double, 4>>& l = std::nullopt) {
  const int J = f.J();
  FaceField out(J);
  if (closure == Closure::Periodic) {
    for (int r = 0; r < J; ++r)
      out[r] = a.a0 * f[r] + a.a1 * (f[detail::wrap(r + 1, J)] + f[detail::wrap(r - 1, J)]) +
               a.a2 * (f[detail::wrap(r + 2, J)] + f[detail::wrap(r - 2, J)]);
    return out;
  }
  if (!l) throw InvalidArgument("Dirichlet face mass application needs boundary l row");
  const Eigen::MatrixXd M = mass_matrix_faces_dirichlet(a, *l, J);
  Eigen::Map<Eigen::VectorXd>(out.values().data(), J) = M * as_vector(f.values());
  return out;
}

inline CellField apply_delta_face_to_node(const StaggeredDerivStencil& b, const FaceField& z,
                                          double h, Closure closure = Closure::Periodic,
                                          const std::optional<std::array<double, 5>>& g =
                                              std::nullopt) {
  const int J = z.J();
  if (closure == Closure::Periodic) {
    CellField out(J, BoundaryMode::Periodic);
    for (int r = 0; r < J; ++r)
      out[r] = (b.b2 * z[detail::wrap(r + 2, J)] + b.b1 * z[detail::wrap(r + 1, J)] -
                b.b1 * z[r] - b.b2 * z[detail::wrap(r - 1, J)]) /
               h;
    return out;
  }
  // interior values only; boundary slots of the result stay zero
  CellField out(J, BoundaryMode::Dirichlet);
  const Eigen::MatrixXd M = delta_face_to_node_dirichlet(b, g, J, h);
  const Eigen::VectorXd y = M * as_vector(z.values());
  for (int i = 1; i < J; ++i) out.at_node(i) = y(i - 1);
  return out;
}

inline FaceField apply_delta_node_to_face(const StaggeredDerivStencil& b, const CellField& c,
                                          double h, Closure closure = Closure::Periodic,
                                          const std::optional<std::array<double, 5>>& g =
                                              std::nullopt) {
  const int J = c.J();
  FaceField out(J);
  if (closure == Closure::Periodic) {
    if (c.mode() != BoundaryMode::Periodic)
      throw InvalidArgument("periodic delta application needs a periodic field");
    for (int r = 0; r < J; ++r)
      out[r] = (b.b2 * c[detail::wrap(r + 1, J)] + b.b1 * c[r] -
                b.b1 * c[detail::wrap(r - 1, J)] - b.b2 * c[detail::wrap(r - 2, J)]) /
               h;
    return out;
  }
  if (c.mode() != BoundaryMode::Dirichlet)
    throw InvalidArgument("Dirichlet delta application needs a Dirichlet field");
  const Eigen::MatrixXd M = delta_node_to_face_dirichlet(b, g, J, h);
  Eigen::Map<Eigen::VectorXd>(out.values().data(), J) = M * as_vector(c.values());
  return out;
}

inline CellField apply_node_deriv(const NodeDerivStencil& d, const CellField& w, double h,
                                  Closure closure = Closure::Periodic,
                                  const std::optional<std::array<double, 5>>& k = std::nullopt) {
  const int J = w.J();
  if (closure == Closure::Periodic) {
    if (w.mode() != BoundaryMode::Periodic)
      throw InvalidArgument("periodic node derivative needs a periodic field");
    CellField out(J, BoundaryMode::Periodic);
    for (int r = 0; r < J; ++r)
      out[r] = (d.d2 * w[detail::wrap(r + 2, J)] + d.d1 * w[detail::wrap(r + 1, J)] -
                d.d1 * w[detail::wrap(r - 1, J)] - d.d2 * w[detail::wrap(r - 2, J)]) /
               h;
    return out;
  }
  if (w.mode() != BoundaryMode::Dirichlet)
    throw InvalidArgument("Dirichlet node derivative needs a Dirichlet field");
  CellField out(J, BoundaryMode::Dirichlet);
  const Eigen::MatrixXd M = node_deriv_matrix_dirichlet(d, k, J, h);
  const Eigen::VectorXd y = M * as_vector(w.values());
  for (int i = 1; i < J; ++i) out.at_node(i) = y(i - 1);
  return out;
}

// ---------------------------------------------------------------------------
// mass solves

namespace detail {
inline Eigen::VectorXd lu_solve_checked(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs,
                                        const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() <= 1e-14 * std::max(1.0, diag.maxCoeff()))
    throw NumericalError(std::string("singular mass operator in solve (") + what + ")");
  return lu.solve(rhs);
}
}  // namespace detail

inline CellField solve_mass(const MassStencil& a, const CellField& rhs, Closure closure) {
  if (closure != Closure::Periodic || rhs.mode() != BoundaryMode::Periodic)
    throw InvalidArgument("cell mass solve is defined for the periodic closure only");
  const int J = rhs.J();
  const Eigen::VectorXd y = detail::lu_solve_checked(mass_matrix_periodic(a, J),
                                                     as_vector(rhs.values()), "periodic cells");
  CellField out(J, BoundaryMode::Periodic);
  Eigen::Map<Eigen::VectorXd>(out.values().data(), J) = y;
  return out;
}

// Face mass operator as an OperatorMatrix for the requested closure.
inline OperatorMatrix assemble_face_mass(const MassStencil& a, int J, Closure closure,
                                         const std::optional<std::array<double, 4>>& l =
                                             std::nullopt) {
  if (closure == Closure::Periodic) return {mass_matrix_periodic(a, J), closure};
  if (!l) throw InvalidArgument("Dirichlet face mass operator needs boundary l row");
  return {mass_matrix_faces_dirichlet(a, *l, J), closure};
}

inline FaceField solve_mass(const MassStencil& a, const FaceField& rhs, Closure closure,
                            const std::optional<std::array<double, 4>>& l = std::nullopt) {
  const int J = rhs.J();
  const OperatorMatrix op = assemble_face_mass(a, J, closure, l);
  const Eigen::VectorXd y = detail::lu_solve_checked(
      op.M, as_vector(rhs.values()),
      closure == Closure::Periodic ? "periodic faces" : "Dirichlet faces");
  FaceField out(J);
  Eigen::Map<Eigen::VectorXd>(out.values().data(), J) = y;
  return out;
}

}  // namespace hos
