#pragma once

// Test-side oracles. They re-derive the discrete systems through a different
// route than the library: ghost-cell extension instead of modular index
// arithmetic, literal boundary-row numbers instead of the closed forms, and
// finite-difference Jacobians instead of the analytic blocks. Agreement with
// the solver is therefore a two-route check.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "hos/cases.hpp"
#include "hos/coefficients.hpp"
#include "hos/problem.hpp"

namespace testsupport {

struct BruteState {
  std::vector<double> C, Z;
};

// ---------------------------------------------------------------------------
// periodic one-step oracle (implicit Euler in time, convection at the old level)

class BrutePeriodic {
 public:
  BrutePeriodic(const hos::Problem& prob, const hos::SchemeParams& sp)
      : prob_(prob), sp_(sp), J_(prob.grid.J), h_(prob.grid.h) {}

  BruteState step(const std::vector<double>& Cn, const std::vector<double>& Zn, double t_old,
                  double dt) const {
    const int J = J_;
    const hos::MassStencil a = sp_.mass_stag();
    const hos::StaggeredDerivStencil b = sp_.delta();

    // convection at the old level: A A*^{-1} H (u C^n)
    std::vector<double> uc(static_cast<size_t>(J));
    for (int i = 1; i <= J; ++i)
      uc[static_cast<size_t>(i - 1)] = prob_.velocity(x(i)) * Cn[static_cast<size_t>(i - 1)];
    const std::vector<double> w = apply_H(uc);
    const std::vector<double> y = solve_node_mass(sp_.mass_node(), w);
    const std::vector<double> conv = apply_A(sp_.mass_stag(), y);

    std::vector<double> fn1(static_cast<size_t>(J));
    for (int i = 1; i <= J; ++i) fn1[static_cast<size_t>(i - 1)] = prob_.source(x(i), t_old + dt);
    const std::vector<double> af = apply_A(a, fn1);
    const std::vector<double> psi_n = psi(Cn);
    const std::vector<double> apsi_n = apply_A(a, psi_n);

    auto residual = [&](const Eigen::VectorXd& v) {
      std::vector<double> C(v.data(), v.data() + J);
      std::vector<double> Z(v.data() + J, v.data() + 2 * J);
      const std::vector<double> apsi = apply_A(a, psi(C));
      const std::vector<double> dz = apply_delta_fn(b, Z);
      std::vector<double> zd(static_cast<size_t>(J));
      for (int k = 0; k < J; ++k)
        zd[static_cast<size_t>(k)] = Z[static_cast<size_t>(k)] / prob_.diffusion(xf(k));
      const std::vector<double> azd = apply_A_faces(a, zd);
      const std::vector<double> dc = apply_delta_nf(b, C);
      Eigen::VectorXd F(2 * J);
      for (int r = 0; r < J; ++r) {
        F(r) = (apsi[static_cast<size_t>(r)] - apsi_n[static_cast<size_t>(r)]) / dt +
               dz[static_cast<size_t>(r)] + conv[static_cast<size_t>(r)] -
               af[static_cast<size_t>(r)];
        F(J + r) = dc[static_cast<size_t>(r)] + azd[static_cast<size_t>(r)];
      }
      return F;
    };

    Eigen::VectorXd v(2 * J);
    for (int r = 0; r < J; ++r) {
      v(r) = Cn[static_cast<size_t>(r)];
      v(J + r) = Zn[static_cast<size_t>(r)];
    }
    v = newton_fd(residual, v);
    BruteState out;
    out.C.assign(v.data(), v.data() + J);
    out.Z.assign(v.data() + J, v.data() + 2 * J);
    return out;
  }

 private:
  double x(int i) const { return prob_.grid.node(i); }
  double xf(int k) const { return prob_.grid.face(k); }

  std::vector<double> psi(const std::vector<double>& c) const {
    std::vector<double> out(c.size());
    for (size_t i = 0; i < c.size(); ++i) out[i] = c[i] + prob_.isotherm.phi(c[i]);
    return out;
  }

  // ghost extension of node values C_1..C_J to indices -2..J+2
  std::vector<double> extend_nodes(const std::vector<double>& c) const {
    const int J = J_;
    std::vector<double> e(static_cast<size_t>(J + 5));
    auto set = [&](int i, double val) { e[static_cast<size_t>(i + 2)] = val; };
    for (int i = 1; i <= J; ++i) set(i, c[static_cast<size_t>(i - 1)]);
    set(0, c[static_cast<size_t>(J - 1)]);      // C_0 = C_J
    set(-1, c[static_cast<size_t>(J - 2)]);     // C_-1 = C_{J-1}
    set(-2, c[static_cast<size_t>(J - 3)]);
    set(J + 1, c[0]);                           // C_{J+1} = C_1
    set(J + 2, c[1]);
    return e;
  }
  // ghost extension of face values Z_{1/2}..Z_{J-1/2} (slot k ~ face k+1/2)
  // to slots -2..J+1
  std::vector<double> extend_faces(const std::vector<double>& z) const {
    const int J = J_;
    std::vector<double> e(static_cast<size_t>(J + 4));
    auto set = [&](int k, double val) { e[static_cast<size_t>(k + 2)] = val; };
    for (int k = 0; k < J; ++k) set(k, z[static_cast<size_t>(k)]);
    set(-1, z[static_cast<size_t>(J - 1)]);     // Z_{-1/2} = Z_{J-1/2}
    set(-2, z[static_cast<size_t>(J - 2)]);
    set(J, z[0]);                               // Z_{J+1/2} = Z_{1/2}
    set(J + 1, z[1]);
    return e;
  }

  std::vector<double> apply_A(const hos::MassStencil& a, const std::vector<double>& c) const {
    const auto e = extend_nodes(c);
    std::vector<double> out(static_cast<size_t>(J_));
    for (int i = 1; i <= J_; ++i) {
      const int s = i + 2;
      out[static_cast<size_t>(i - 1)] =
          a.a2 * e[static_cast<size_t>(s - 2)] + a.a1 * e[static_cast<size_t>(s - 1)] +
          a.a0 * e[static_cast<size_t>(s)] + a.a1 * e[static_cast<size_t>(s + 1)] +
          a.a2 * e[static_cast<size_t>(s + 2)];
    }
    return out;
  }
  std::vector<double> apply_A_faces(const hos::MassStencil& a, const std::vector<double>& z) const {
    const auto e = extend_faces(z);
    std::vector<double> out(static_cast<size_t>(J_));
    for (int k = 0; k < J_; ++k) {
      const int s = k + 2;
      out[static_cast<size_t>(k)] =
          a.a2 * e[static_cast<size_t>(s - 2)] + a.a1 * e[static_cast<size_t>(s - 1)] +
          a.a0 * e[static_cast<size_t>(s)] + a.a1 * e[static_cast<size_t>(s + 1)] +
          a.a2 * e[static_cast<size_t>(s + 2)];
    }
    return out;
  }
  // delta of a face field at nodes: uses faces i+-1/2, i+-3/2 around node i
  std::vector<double> apply_delta_fn(const hos::StaggeredDerivStencil& b,
                                     const std::vector<double>& z) const {
    const auto e = extend_faces(z);
    std::vector<double> out(static_cast<size_t>(J_));
    for (int i = 1; i <= J_; ++i) {
      // face j+1/2 sits in slot j; faces around node i: i-2, i-1, i, i+1
      const int s = i + 2;
      out[static_cast<size_t>(i - 1)] =
          (b.b2 * e[static_cast<size_t>(s + 1)] + b.b1 * e[static_cast<size_t>(s)] -
           b.b1 * e[static_cast<size_t>(s - 1)] - b.b2 * e[static_cast<size_t>(s - 2)]) /
          h_;
    }
    return out;
  }
  // delta of a cell field at faces: nodes i-1..i+2 around face i+1/2
  std::vector<double> apply_delta_nf(const hos::StaggeredDerivStencil& b,
                                     const std::vector<double>& c) const {
    const auto e = extend_nodes(c);
    std::vector<double> out(static_cast<size_t>(J_));
    for (int k = 0; k < J_; ++k) {
      const int s = k + 2;  // node k sits in slot k+2
      out[static_cast<size_t>(k)] =
          (b.b2 * e[static_cast<size_t>(s + 2)] + b.b1 * e[static_cast<size_t>(s + 1)] -
           b.b1 * e[static_cast<size_t>(s)] - b.b2 * e[static_cast<size_t>(s - 1)]) /
          h_;
    }
    return out;
  }
  std::vector<double> apply_H(const std::vector<double>& c) const {
    const hos::NodeDerivStencil d = sp_.node_deriv();
    const auto e = extend_nodes(c);
    std::vector<double> out(static_cast<size_t>(J_));
    for (int i = 1; i <= J_; ++i) {
      const int s = i + 2;
      out[static_cast<size_t>(i - 1)] =
          (d.d2 * e[static_cast<size_t>(s + 2)] + d.d1 * e[static_cast<size_t>(s + 1)] -
           d.d1 * e[static_cast<size_t>(s - 1)] - d.d2 * e[static_cast<size_t>(s - 2)]) /
          h_;
    }
    return out;
  }

  std::vector<double> solve_node_mass(const hos::MassStencil& a,
                                      const std::vector<double>& rhs) const {
    const int J = J_;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
    for (int i = 1; i <= J; ++i) {
      std::vector<double> unit(static_cast<size_t>(J), 0.0);
      unit[static_cast<size_t>(i - 1)] = 1.0;
      const auto col = apply_A(a, unit);
      for (int r = 0; r < J; ++r) M(r, i - 1) = col[static_cast<size_t>(r)];
    }
    Eigen::VectorXd rv(J);
    for (int r = 0; r < J; ++r) rv(r) = rhs[static_cast<size_t>(r)];
    const Eigen::VectorXd sol = M.fullPivLu().solve(rv);
    return {sol.data(), sol.data() + J};
  }

  template <class Fn>
  static Eigen::VectorXd newton_fd(Fn&& residual, Eigen::VectorXd v) {
    for (int it = 0; it < 50; ++it) {
      const Eigen::VectorXd F = residual(v);
      if (F.lpNorm<Eigen::Infinity>() < 1e-11) return v;
      const Eigen::Index n = v.size();
      Eigen::MatrixXd Jm(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double step = 1e-7 * (1.0 + std::abs(v(j)));
        Eigen::VectorXd vp = v, vm = v;
        vp(j) += step;
        vm(j) -= step;
        Jm.col(j) = (residual(vp) - residual(vm)) / (2 * step);
      }
      v -= Jm.fullPivLu().solve(F);
    }
    throw std::runtime_error("brute-force Newton did not converge");
  }

  const hos::Problem& prob_;
  hos::SchemeParams sp_;
  int J_;
  double h_;

  friend class BruteDirichlet;
  friend struct TrapezoidalOracle;
};

// ---------------------------------------------------------------------------
// trapezoidal oracle for the linear-isotherm periodic problem: one step of the
// trapezoidal rule applied to the reduced semi-discrete system
//   (1+Kd) A dC/dt = Dfn diag(D) A^{-1} Dnf C - A An^{-1} H diag(u) C + A f(t)
// with the source quadrature at the half-time point, matching the scheme

struct TrapezoidalOracle {
  static BruteState step(const hos::Problem& prob, const hos::SchemeParams& sp, double Kd,
                         const std::vector<double>& Cn, double t_old, double dt) {
    const int J = prob.grid.J;
    BrutePeriodic helper(prob, sp);
    auto matrix_of = [&](const std::function<std::vector<double>(const std::vector<double>&)>& op) {
      Eigen::MatrixXd M(J, J);
      for (int j = 0; j < J; ++j) {
        std::vector<double> unit(static_cast<size_t>(J), 0.0);
        unit[static_cast<size_t>(j)] = 1.0;
        const auto col = op(unit);
        for (int r = 0; r < J; ++r) M(r, j) = col[static_cast<size_t>(r)];
      }
      return M;
    };

    const hos::MassStencil a = sp.mass_stag();
    const hos::StaggeredDerivStencil b = sp.delta();
    const Eigen::MatrixXd A = matrix_of([&](const auto& v) { return helper.apply_A(a, v); });
    const Eigen::MatrixXd Af = matrix_of([&](const auto& v) { return helper.apply_A_faces(a, v); });
    const Eigen::MatrixXd An =
        matrix_of([&](const auto& v) { return helper.apply_A(sp.mass_node(), v); });
    const Eigen::MatrixXd Dfn = matrix_of([&](const auto& v) { return helper.apply_delta_fn(b, v); });
    const Eigen::MatrixXd Dnf = matrix_of([&](const auto& v) { return helper.apply_delta_nf(b, v); });
    const Eigen::MatrixXd H = matrix_of([&](const auto& v) { return helper.apply_H(v); });

    Eigen::VectorXd Dfaces(J), u(J);
    for (int k = 0; k < J; ++k) Dfaces(k) = prob.diffusion(prob.grid.face(k));
    for (int i = 1; i <= J; ++i) u(i - 1) = prob.velocity(prob.grid.node(i));

    // Z = flux * C through the discrete flux relation
    const Eigen::MatrixXd flux =
        (-Dfaces).asDiagonal() * Af.fullPivLu().solve(Dnf).eval();

    const Eigen::MatrixXd M = (1.0 + Kd) * A;
    Eigen::VectorXd fmid(J);
    for (int i = 1; i <= J; ++i) fmid(i - 1) = prob.source(prob.grid.node(i), t_old + 0.5 * dt);
    Eigen::VectorXd c0(J);
    for (int r = 0; r < J; ++r) c0(r) = Cn[static_cast<size_t>(r)];

    // M dC/dt = -Lsys C + A f, with Lsys C = delta Z + convection
    const Eigen::MatrixXd Lsys =
        Dfn * flux + A * An.fullPivLu().solve(H * u.asDiagonal());
    const Eigen::MatrixXd lhs = M / dt + 0.5 * Lsys;
    const Eigen::VectorXd rhs = (M / dt - 0.5 * Lsys) * c0 + A * fmid;
    const Eigen::VectorXd c1 = lhs.fullPivLu().solve(rhs);
    const Eigen::VectorXd z1 = flux * c1;

    BruteState out;
    out.C.assign(c1.data(), c1.data() + J);
    out.Z.assign(z1.data(), z1.data() + J);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Dirichlet one-step oracle with the boundary rows written as literal numbers

class BruteDirichlet {
 public:
  // variant: 1 -> first Dirichlet closure, 2 -> second
  BruteDirichlet(const hos::Problem& prob, int variant)
      : prob_(prob), variant_(variant), J_(prob.grid.J), h_(prob.grid.h) {}

  // Cn has J+1 entries (nodes 0..J); Zn has J entries
  BruteState step(const std::vector<double>& Cn, const std::vector<double>& Zn, double t_old,
                  double dt) const {
    const int J = J_;
    const auto* bc = std::get_if<hos::DirichletBC>(&prob_.boundary);
    if (!bc) throw std::runtime_error("oracle needs Dirichlet data");
    const double bl = bc->left(t_old + dt), br = bc->right(t_old + dt);

    // convection from the old level
    std::vector<double> uc(static_cast<size_t>(J + 1));
    for (int i = 0; i <= J; ++i)
      uc[static_cast<size_t>(i)] = prob_.velocity(prob_.grid.node(i)) * Cn[static_cast<size_t>(i)];
    const std::vector<double> conv = conv_deriv(uc);

    std::vector<double> f1(static_cast<size_t>(J + 1));
    for (int i = 0; i <= J; ++i) f1[static_cast<size_t>(i)] = prob_.source(prob_.grid.node(i), t_old + dt);
    const std::vector<double> af = interior_mass(f1);
    const std::vector<double> apsi_n = interior_mass(psi(Cn));

    auto residual = [&](const Eigen::VectorXd& v) {
      std::vector<double> C(static_cast<size_t>(J + 1));
      C[0] = bl;
      C[static_cast<size_t>(J)] = br;
      for (int i = 1; i < J; ++i) C[static_cast<size_t>(i)] = v(i - 1);
      std::vector<double> Z(v.data() + (J - 1), v.data() + (J - 1) + J);

      const std::vector<double> apsi = interior_mass(psi(C));
      const std::vector<double> dz = delta_at_nodes(Z);
      std::vector<double> zd(static_cast<size_t>(J));
      for (int k = 0; k < J; ++k)
        zd[static_cast<size_t>(k)] = Z[static_cast<size_t>(k)] / prob_.diffusion(prob_.grid.face(k));
      const std::vector<double> azd = face_mass(zd);
      const std::vector<double> dc = delta_at_faces(C);

      Eigen::VectorXd F(2 * J - 1);
      for (int i = 1; i < J; ++i)
        F(i - 1) = (apsi[static_cast<size_t>(i - 1)] - apsi_n[static_cast<size_t>(i - 1)]) / dt +
                   dz[static_cast<size_t>(i - 1)] + conv[static_cast<size_t>(i - 1)] -
                   af[static_cast<size_t>(i - 1)];
      for (int k = 0; k < J; ++k)
        F(J - 1 + k) = dc[static_cast<size_t>(k)] + azd[static_cast<size_t>(k)];
      return F;
    };

    Eigen::VectorXd v(2 * J - 1);
    for (int i = 1; i < J; ++i) v(i - 1) = Cn[static_cast<size_t>(i)];
    for (int k = 0; k < J; ++k) v(J - 1 + k) = Zn[static_cast<size_t>(k)];
    v = BrutePeriodic::newton_fd(residual, v);

    BruteState out;
    out.C.resize(static_cast<size_t>(J + 1));
    out.C[0] = bl;
    out.C[static_cast<size_t>(J)] = br;
    for (int i = 1; i < J; ++i) out.C[static_cast<size_t>(i)] = v(i - 1);
    out.Z.assign(v.data() + (J - 1), v.data() + (J - 1) + J);
    return out;
  }

 private:
  std::vector<double> psi(const std::vector<double>& c) const {
    std::vector<double> out(c.size());
    for (size_t i = 0; i < c.size(); ++i) out[i] = c[i] + prob_.isotherm.phi(c[i]);
    return out;
  }

  // interior node mass rows, literal numbers per variant
  std::vector<double> interior_mass(const std::vector<double>& c) const {
    const int J = J_;
    std::vector<double> out(static_cast<size_t>(J - 1));
    for (int i = 1; i < J; ++i) {
      const double vm = c[static_cast<size_t>(i - 1)], v0 = c[static_cast<size_t>(i)],
                   vp = c[static_cast<size_t>(i + 1)];
      out[static_cast<size_t>(i - 1)] =
          variant_ == 1 ? (vm + 22 * v0 + vp) / 24.0 : (vm + 4 * v0 + vp) / 6.0;
    }
    return out;
  }

  std::vector<double> face_mass(const std::vector<double>& z) const {
    const int J = J_;
    std::vector<double> out(static_cast<size_t>(J));
    if (variant_ == 1) {
      out[0] = (26 * z[0] - 5 * z[1] + 4 * z[2] - z[3]) / 24.0;
      out[static_cast<size_t>(J - 1)] =
          (26 * z[static_cast<size_t>(J - 1)] - 5 * z[static_cast<size_t>(J - 2)] +
           4 * z[static_cast<size_t>(J - 3)] - z[static_cast<size_t>(J - 4)]) /
          24.0;
      for (int k = 1; k < J - 1; ++k)
        out[static_cast<size_t>(k)] = (z[static_cast<size_t>(k - 1)] +
                                       22 * z[static_cast<size_t>(k)] +
                                       z[static_cast<size_t>(k + 1)]) /
                                      24.0;
    } else {
      out[0] = (8 * z[0] - 5 * z[1] + 4 * z[2] - z[3]) / 6.0;
      out[static_cast<size_t>(J - 1)] =
          (8 * z[static_cast<size_t>(J - 1)] - 5 * z[static_cast<size_t>(J - 2)] +
           4 * z[static_cast<size_t>(J - 3)] - z[static_cast<size_t>(J - 4)]) /
          6.0;
      for (int k = 1; k < J - 1; ++k)
        out[static_cast<size_t>(k)] = (z[static_cast<size_t>(k - 1)] +
                                       4 * z[static_cast<size_t>(k)] +
                                       z[static_cast<size_t>(k + 1)]) /
                                      6.0;
    }
    return out;
  }

  // staggered difference of Z at interior nodes 1..J-1
  std::vector<double> delta_at_nodes(const std::vector<double>& z) const {
    const int J = J_;
    std::vector<double> out(static_cast<size_t>(J - 1));
    if (variant_ == 1) {
      for (int i = 1; i < J; ++i)
        out[static_cast<size_t>(i - 1)] =
            (z[static_cast<size_t>(i)] - z[static_cast<size_t>(i - 1)]) / h_;
    } else {
      out[0] = (-10 * z[0] + 15 * z[1] - 9 * z[2] + 5 * z[3] - z[4]) / (8 * h_);
      out[static_cast<size_t>(J - 2)] =
          (10 * z[static_cast<size_t>(J - 1)] - 15 * z[static_cast<size_t>(J - 2)] +
           9 * z[static_cast<size_t>(J - 3)] - 5 * z[static_cast<size_t>(J - 4)] +
           z[static_cast<size_t>(J - 5)]) /
          (8 * h_);
      for (int i = 2; i < J - 1; ++i)
        out[static_cast<size_t>(i - 1)] =
            (-5 * z[static_cast<size_t>(i - 1)] + 5 * z[static_cast<size_t>(i)] +
             z[static_cast<size_t>(i + 1)] - z[static_cast<size_t>(i - 2)]) /
            (8 * h_);
    }
    return out;
  }

  // staggered difference of C at all faces
  std::vector<double> delta_at_faces(const std::vector<double>& c) const {
    const int J = J_;
    std::vector<double> out(static_cast<size_t>(J));
    if (variant_ == 1) {
      for (int k = 0; k < J; ++k)
        out[static_cast<size_t>(k)] =
            (c[static_cast<size_t>(k + 1)] - c[static_cast<size_t>(k)]) / h_;
    } else {
      out[0] = (-10 * c[0] + 15 * c[1] - 9 * c[2] + 5 * c[3] - c[4]) / (8 * h_);
      out[static_cast<size_t>(J - 1)] =
          (10 * c[static_cast<size_t>(J)] - 15 * c[static_cast<size_t>(J - 1)] +
           9 * c[static_cast<size_t>(J - 2)] - 5 * c[static_cast<size_t>(J - 3)] +
           c[static_cast<size_t>(J - 4)]) /
          (8 * h_);
      for (int k = 1; k < J - 1; ++k)
        out[static_cast<size_t>(k)] =
            (-5 * c[static_cast<size_t>(k)] + 5 * c[static_cast<size_t>(k + 1)] +
             c[static_cast<size_t>(k + 2)] - c[static_cast<size_t>(k - 1)]) /
            (8 * h_);
    }
    return out;
  }

  // collocated derivative of (uC) at interior nodes
  std::vector<double> conv_deriv(const std::vector<double>& w) const {
    const int J = J_;
    std::vector<double> out(static_cast<size_t>(J - 1));
    if (variant_ == 1) {
      out[0] = (-5 * w[0] - 10 * w[1] + 20 * w[2] - 6 * w[3] + w[4]) / (16 * h_);
      out[static_cast<size_t>(J - 2)] =
          (5 * w[static_cast<size_t>(J)] + 10 * w[static_cast<size_t>(J - 1)] -
           20 * w[static_cast<size_t>(J - 2)] + 6 * w[static_cast<size_t>(J - 3)] -
           w[static_cast<size_t>(J - 4)]) /
          (16 * h_);
      for (int i = 2; i < J - 1; ++i)
        out[static_cast<size_t>(i - 1)] =
            (w[static_cast<size_t>(i - 2)] - 10 * w[static_cast<size_t>(i - 1)] +
             10 * w[static_cast<size_t>(i + 1)] - w[static_cast<size_t>(i + 2)]) /
            (16 * h_);
    } else {
      for (int i = 1; i < J; ++i)
        out[static_cast<size_t>(i - 1)] =
            (w[static_cast<size_t>(i + 1)] - w[static_cast<size_t>(i - 1)]) / (2 * h_);
    }
    return out;
  }

  const hos::Problem& prob_;
  int variant_;
  int J_;
  double h_;
};

// ---------------------------------------------------------------------------
// finite-difference residual of a manufactured case: substitutes the exact
// solution into the governing equation using nested fourth-order differences

inline double fd_pde_residual(const hos::ManufacturedCase& mc, double x, double t) {
  const auto c = mc.exact->c;
  const double span = mc.x_right - mc.x_left;
  const double dx = 5e-4 * span;
  const double dt = 5e-4;

  auto d4 = [](const std::function<double(double)>& g, double s, double d) {
    return (-g(s + 2 * d) + 8 * g(s + d) - 8 * g(s - d) + g(s - 2 * d)) / (12 * d);
  };

  // storage term: d/dt [c + phi(c)]
  const double storage = d4(
      [&](double tau) {
        const double cv = c(x, tau);
        return cv + mc.isotherm.phi(cv);
      },
      t, dt);

  // convection: d/dx [u c]
  const double convection = d4([&](double s) { return mc.velocity(s) * c(s, t); }, x, dx);

  // diffusion: d/dx [D c_x]
  auto cx = [&](double s) { return d4([&](double y) { return c(y, t); }, s, dx); };
  const double diffusion = d4([&](double s) { return mc.diffusion(s) * cx(s); }, x, dx);

  return storage + convection - diffusion - mc.source(x, t);
}

}  // namespace testsupport
