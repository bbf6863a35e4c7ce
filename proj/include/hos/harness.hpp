#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "hos/cases.hpp"
#include "hos/solver.hpp"

// Experiment harness: error norms against exact solutions, grid-refinement
// studies with observed rates, mass-balance reports, two-parameter error
// sweeps with the sixth-order tying of a2 to m, and the breakthrough-curve
// application. Studies fan out independent runs across threads; aggregation
// is by index, so results are deterministic.

namespace hos {

struct ErrorReport {
  double c2 = 0, cinf = 0, z2 = 0, zinf = 0;
};

inline ErrorReport error_norms(const RunResult& result, const Problem& prob) {
  if (!prob.exact) throw InvalidArgument("error norms need a case with an exact solution");
  const Grid& g = result.grid;
  const double t = result.state.t;
  CellField ec = result.state.C;
  for (int i = (result.mode == BoundaryMode::Periodic ? 1 : 0); i <= g.J; ++i)
    ec.at_node(i) -= prob.exact->c(g.node(i), t);
  FaceField ez = result.state.Z;
  for (int k = 0; k < g.J; ++k) ez[k] -= prob.exact->z(g.face(k), t);

  ErrorReport e;
  e.c2 = cell_l2_norm(g, ec);
  e.cinf = cell_max_norm(ec);
  e.z2 = face_l2_norm(g, ez);
  e.zinf = face_max_norm(ez);
  return e;
}

// dt rules used by the refinement studies: a fixed value, h^3, or h^4.
struct DtRule {
  enum class Kind { Fixed, H3, H4 } kind = Kind::Fixed;
  double value = 0;

  static DtRule fixed(double dt) { return {Kind::Fixed, dt}; }
  static DtRule h3() { return {Kind::H3, 0}; }
  static DtRule h4() { return {Kind::H4, 0}; }

  static DtRule parse(const std::string& s) {
    if (s == "h3" || s == "h^3") return h3();
    if (s == "h4" || s == "h^4") return h4();
    try {
      size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size() && v > 0) return fixed(v);
    } catch (...) {
    }
    throw InvalidArgument("dt rule must be 'h3', 'h4', or a positive number, got '" + s + "'");
  }

  double resolve(double h) const {
    switch (kind) {
      case Kind::Fixed: return value;
      case Kind::H3: return h * h * h;
      case Kind::H4: return h * h * h * h;
    }
    return value;
  }

  std::string str() const {
    if (kind == Kind::H3) return "h3";
    if (kind == Kind::H4) return "h4";
    std::ostringstream os;
    os << value;
    return os.str();
  }
};

// Fan n independent tasks out over the hardware threads.
inline void parallel_for(int n, const std::function<void(int)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// convergence studies

struct ConvergenceRow {
  int J = 0;
  double h = 0, dt = 0;
  ErrorReport err;
  // observed rates vs the previous row: c_inf, c_2, z_inf, z_2 (NaN on row 0)
  std::array<double, 4> rate{};
  int newton_total = 0;
};

struct ConvergenceTable {
  std::string case_id;
  std::string scheme;
  std::string stepper;
  std::string dt_rule;
  std::vector<ConvergenceRow> rows;
};

inline double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

inline ConvergenceTable convergence_study(const ManufacturedCase& mc, const SolverConfig& base,
                                          const std::vector<int>& J_list, const DtRule& rule) {
  if (J_list.empty()) throw InvalidArgument("convergence study needs at least one grid");
  for (size_t i = 1; i < J_list.size(); ++i)
    if (J_list[i] <= J_list[i - 1]) throw InvalidArgument("grid list must be increasing");

  ConvergenceTable table;
  table.case_id = mc.id;
  table.scheme = base.preset ? preset_name(*base.preset) : "custom";
  table.stepper = stepper_name(base.stepper);
  table.dt_rule = rule.str();
  table.rows.resize(J_list.size());

  std::vector<std::string> failures(J_list.size());
  parallel_for(static_cast<int>(J_list.size()), [&](int idx) {
    const int J = J_list[static_cast<size_t>(idx)];
    try {
      const Problem prob = mc.problem(J);
      SolverConfig cfg = base;
      cfg.dt = rule.resolve(prob.grid.h);
      const RunResult result = run(prob, cfg, mc.T);
      ConvergenceRow row;
      row.J = J;
      row.h = prob.grid.h;
      row.dt = cfg.dt;
      row.err = error_norms(result, prob);
      row.newton_total = result.total_newton_iters;
      table.rows[static_cast<size_t>(idx)] = row;
    } catch (const std::exception& e) {
      failures[static_cast<size_t>(idx)] = e.what();
    }
  });
  for (size_t i = 0; i < failures.size(); ++i)
    if (!failures[i].empty())
      throw NumericalError("convergence run at J = " + std::to_string(J_list[i]) +
                           " failed: " + failures[i]);

  for (size_t i = 0; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    if (i == 0) {
      row.rate.fill(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const auto& prev = table.rows[i - 1];
    row.rate[0] = observed_rate(prev.err.cinf, row.err.cinf, prev.h, row.h);
    row.rate[1] = observed_rate(prev.err.c2, row.err.c2, prev.h, row.h);
    row.rate[2] = observed_rate(prev.err.zinf, row.err.zinf, prev.h, row.h);
    row.rate[3] = observed_rate(prev.err.z2, row.err.z2, prev.h, row.h);
  }
  return table;
}

// ---------------------------------------------------------------------------
// mass reports

struct MassRow {
  double t = 0;
  double eps_mass = 0;
};

inline std::vector<MassRow> mass_report(const RunResult& result, const std::vector<double>& times) {
  if (result.mode != BoundaryMode::Periodic)
    throw InvalidArgument("mass report is defined for periodic runs only");
  std::vector<MassRow> rows;
  for (double t : times) {
    const StepRecord* hit = nullptr;
    for (const auto& rec : result.steps) {
      if (std::abs(rec.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
        hit = &rec;
        break;
      }
    }
    if (!hit)
      throw InvalidArgument("requested report time " + std::to_string(t) +
                            " is not on the step grid");
    rows.push_back({hit->t, hit->eps_mass});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// parameter sweep

// Sweeps (m_node, m_stag) with a2 tied by the sixth-order conditions, so each
// swept scheme has e4 = 0 for both pairs and the error is governed by e6.
struct SweepSurface {
  std::vector<double> m_node, m_stag;            // axes
  std::vector<std::vector<double>> eps_c2, eps_z2;  // [node idx][stag idx], NaN = failed cell
  int argmin_c2_node = -1, argmin_c2_stag = -1;
  int argmin_z2_node = -1, argmin_z2_stag = -1;
  int failed_cells = 0;
};

inline std::vector<double> sweep_axis(double center, double halfwidth, double spacing) {
  std::vector<double> v;
  const int n = static_cast<int>(std::round(halfwidth / spacing));
  for (int k = -n; k <= n; ++k) v.push_back(center + k * spacing);
  return v;
}

inline SweepSurface parameter_sweep(const ManufacturedCase& mc, std::vector<double> m_node_values,
                                    std::vector<double> m_stag_values, int J, const DtRule& rule,
                                    Stepper stepper = Stepper::CrankNicolson,
                                    double T_override = -1) {
  if (m_node_values.empty() || m_stag_values.empty())
    throw InvalidArgument("sweep needs nonempty parameter ranges");
  SweepSurface surf;
  surf.m_node = std::move(m_node_values);
  surf.m_stag = std::move(m_stag_values);
  const int nn = static_cast<int>(surf.m_node.size());
  const int ns = static_cast<int>(surf.m_stag.size());
  surf.eps_c2.assign(static_cast<size_t>(nn), std::vector<double>(static_cast<size_t>(ns), 0));
  surf.eps_z2 = surf.eps_c2;

  const double T = T_override > 0 ? T_override : mc.T;
  std::atomic<int> failed{0};
  parallel_for(nn * ns, [&](int cell) {
    const int i = cell / ns, j = cell % ns;
    const double mn = surf.m_node[static_cast<size_t>(i)];
    const double ms = surf.m_stag[static_cast<size_t>(j)];
    SolverConfig cfg;
    cfg.params.m_node = mn;
    cfg.params.a2_node = sixth_order_a2_node(mn * mn);
    cfg.params.m_stag = ms;
    cfg.params.a2_stag = sixth_order_a2_staggered(ms * ms);
    cfg.stepper = stepper;
    try {
      const Problem prob = mc.problem(J);
      cfg.dt = rule.resolve(prob.grid.h);
      const RunResult result = run(prob, cfg, T);
      const ErrorReport err = error_norms(result, prob);
      surf.eps_c2[static_cast<size_t>(i)][static_cast<size_t>(j)] = err.c2;
      surf.eps_z2[static_cast<size_t>(i)][static_cast<size_t>(j)] = err.z2;
    } catch (const std::exception&) {
      surf.eps_c2[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          std::numeric_limits<double>::quiet_NaN();
      surf.eps_z2[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          std::numeric_limits<double>::quiet_NaN();
      failed.fetch_add(1);
    }
  });
  surf.failed_cells = failed.load();

  auto locate_min = [&](const std::vector<std::vector<double>>& grid, int& bi, int& bj) {
    double best = std::numeric_limits<double>::infinity();
    bi = bj = -1;
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < ns; ++j) {
        const double v = grid[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (std::isfinite(v) && v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
  };
  locate_min(surf.eps_c2, surf.argmin_c2_node, surf.argmin_c2_stag);
  locate_min(surf.eps_z2, surf.argmin_z2_node, surf.argmin_z2_stag);
  return surf;
}

// ---------------------------------------------------------------------------
// breakthrough curves

struct BreakthroughSeries {
  double length_m = 0;
  Preset variant = Preset::Hos1D;
  std::vector<double> t_days;
  std::vector<double> c_rel;  // outlet concentration / inlet concentration
};

inline std::vector<BreakthroughSeries> breakthrough(const std::vector<double>& column_lengths_m,
                                                    double resolution_m, double dt_days,
                                                    double horizon_days, Preset variant) {
  if (!preset_is_dirichlet(variant))
    throw InvalidArgument("breakthrough runs use the HOS1-D or HOS2-D variant");
  std::vector<BreakthroughSeries> all(column_lengths_m.size());
  parallel_for(static_cast<int>(column_lengths_m.size()), [&](int idx) {
    const double L = column_lengths_m[static_cast<size_t>(idx)];
    const int J = static_cast<int>(std::round(L / resolution_m));
    const ManufacturedCase mc = cases_detail::ex6(L);
    const Problem prob = mc.problem(J);
    const SolverConfig cfg = SolverConfig::from_preset(variant, Stepper::Euler, dt_days);
    const RunResult result = run(prob, cfg, horizon_days);
    BreakthroughSeries series;
    series.length_m = L;
    series.variant = variant;
    const double c0 = mc.inlet_value;
    for (const auto& rec : result.steps) {
      series.t_days.push_back(rec.t);
      series.c_rel.push_back(rec.c_right / c0);
    }
    all[static_cast<size_t>(idx)] = std::move(series);
  });
  return all;
}

}  // namespace hos
