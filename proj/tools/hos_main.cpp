// Command-line front end: coefficient inspection, single runs, convergence
// studies, mass reports, parameter sweeps, breakthrough simulation, and
// static SVG plots. Every data command accepts a JSON config document
// (--config); explicit flags override config fields. Outputs land under
// --out, or $HOS_OUT_ROOT/<command>, and each command writes a manifest.json
// recording the resolved config, its hash, wall time, and Newton statistics.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hos/harness.hpp"
#include "hos/rational.hpp"
#include "hos/report.hpp"
#include "hos/svg.hpp"
#include "hos/version.hpp"

namespace fs = std::filesystem;
using hos::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// config handling

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
  return cfg;
}

void reject_unknown_keys(const json& cfg, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, _] : cfg.items())
    if (!allowed.count(key))
      throw ConfigError("unknown config field '" + key + "' in " + where);
}

template <class T>
T config_or(const json& cfg, const std::string& key, const T& fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      throw ConfigError("bad integer list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError("bad number list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

fs::path resolve_outdir(const std::string& flag_value, const json& cfg, const char* command) {
  if (!flag_value.empty()) return flag_value;
  if (cfg.contains("out")) return cfg.at("out").get<std::string>();
  const char* root = std::getenv("HOS_OUT_ROOT");
  return fs::path(root ? root : "out") / command;
}

hos::Stepper parse_stepper(const std::string& s) {
  if (s == "euler") return hos::Stepper::Euler;
  if (s == "cn" || s == "crank-nicolson") return hos::Stepper::CrankNicolson;
  throw ConfigError("stepper must be 'euler' or 'cn', got '" + s + "'");
}

hos::Isotherm isotherm_from_json(const json& iso) {
  const std::string type = config_or<std::string>(iso, "type", "");
  const double scale = config_or<double>(iso, "scale", 1.0);
  if (!iso.contains("params") || !iso.at("params").is_object())
    throw ConfigError("isotherm needs a 'params' object");
  const json& p = iso.at("params");
  try {
    if (type == "linear") return hos::Isotherm::linear(p.at("Kd").get<double>(), scale);
    if (type == "langmuir")
      return hos::Isotherm::langmuir(p.at("KL").get<double>(), p.at("Sm").get<double>(), scale);
    if (type == "freundlich")
      return hos::Isotherm::freundlich(p.at("KF").get<double>(), p.at("alpha").get<double>(),
                                       scale);
    if (type == "freundlich_regularized")
      return hos::Isotherm::freundlich_regularized(p.at("KF").get<double>(),
                                                   p.at("alpha").get<double>(),
                                                   p.at("eps").get<double>(), scale);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("isotherm params incomplete: ") + e.what());
  }
  throw ConfigError("isotherm type must be linear|langmuir|freundlich|freundlich_regularized");
}

// constant-coefficient custom problem (column-experiment style)
hos::ManufacturedCase custom_case(const json& c) {
  reject_unknown_keys(c, {"domain", "velocity", "diffusion", "initial", "isotherm", "bc"},
                      "custom");
  hos::ManufacturedCase mc;
  mc.id = "custom";
  mc.description = "constant-coefficient problem from config";
  const auto domain = config_or<std::vector<double>>(c, "domain", {});
  if (domain.size() != 2 || !(domain[1] > domain[0]))
    throw ConfigError("custom.domain must be [x_left, x_right] with x_left < x_right");
  mc.x_left = domain[0];
  mc.x_right = domain[1];
  const double u = config_or<double>(c, "velocity", 0.0);
  const double D = config_or<double>(c, "diffusion", 0.0);
  const double c0 = config_or<double>(c, "initial", 0.0);
  if (!(D > 0)) throw ConfigError("custom.diffusion must be positive");
  mc.velocity = [u](double) { return u; };
  mc.diffusion = [D](double) { return D; };
  mc.initial = [c0](double) { return c0; };
  mc.source = [](double, double) { return 0.0; };
  if (!c.contains("isotherm")) throw ConfigError("custom problem needs an isotherm");
  mc.isotherm = isotherm_from_json(c.at("isotherm"));

  const json bc = c.value("bc", json::object());
  const std::string bctype = config_or<std::string>(bc, "type", "periodic");
  if (bctype == "periodic") {
    mc.bc = hos::ManufacturedCase::Bc::Periodic;
  } else if (bctype == "inlet_outlet") {
    mc.bc = hos::ManufacturedCase::Bc::InletOutlet;
    mc.inlet_value = config_or<double>(bc, "c_in", 0.0);
  } else if (bctype == "dirichlet") {
    // constant boundary data enters through a fixed-value exact stub
    const double gl = config_or<double>(bc, "left", c0);
    const double gr = config_or<double>(bc, "right", c0);
    mc.bc = hos::ManufacturedCase::Bc::DirichletExact;
    const double xl = domain[0], xr = domain[1];
    mc.exact = hos::ExactSolution{[gl, gr, xl, xr](double x, double) {
                                    if (x <= xl) return gl;
                                    if (x >= xr) return gr;
                                    return 0.0;
                                  },
                                  [](double, double) { return 0.0; }};
  } else {
    throw ConfigError("custom.bc.type must be periodic|inlet_outlet|dirichlet");
  }
  mc.T = 1.0;
  return mc;
}

struct SchemeSelection {
  hos::SolverConfig solver;
  std::string name;
  bool from_preset = false;
};

// scheme from --preset or the four explicit parameters
SchemeSelection resolve_scheme(const std::string& preset_name_arg, const json& scheme_cfg,
                               std::optional<double> m_stag, std::optional<double> a2_stag,
                               std::optional<double> m_node, std::optional<double> a2_node) {
  SchemeSelection sel;
  std::string pname = preset_name_arg;
  if (pname.empty()) pname = config_or<std::string>(scheme_cfg, "preset", "");
  if (!pname.empty()) {
    const auto p = hos::preset_from_name(pname);
    if (!p) throw ConfigError("unknown scheme preset '" + pname + "'");
    sel.solver.params = hos::preset_params(*p);
    sel.solver.preset = *p;
    sel.name = hos::preset_name(*p);
    sel.from_preset = true;
    return sel;
  }
  auto pick = [&](std::optional<double> flag, const char* key) -> std::optional<double> {
    if (flag) return flag;
    if (scheme_cfg.contains(key)) return scheme_cfg.at(key).get<double>();
    return std::nullopt;
  };
  const auto ms = pick(m_stag, "m_stag"), as = pick(a2_stag, "a2_stag");
  const auto mn = pick(m_node, "m_node"), an = pick(a2_node, "a2_node");
  if (!ms || !as || !mn || !an)
    throw ConfigError(
        "scheme needs either a preset name or all four parameters "
        "(m_stag, a2_stag, m_node, a2_node)");
  sel.solver.params = {*ms, *as, *mn, *an};
  sel.name = "custom";
  return sel;
}

// ---------------------------------------------------------------------------
// manifest

class Manifest {
 public:
  Manifest(const char* command, json resolved_config)
      : start_(std::chrono::steady_clock::now()) {
    doc_["tool"] = hos::kToolName;
    doc_["version"] = hos::kToolVersion;
    doc_["command"] = command;
    doc_["config"] = std::move(resolved_config);
    doc_["config_hash"] = hos::config_hash(doc_["config"]);
    doc_["status"] = "ok";
  }
  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }
  void set(const std::string& key, json v) { doc_[key] = std::move(v); }
  void set_status(const std::string& s) { doc_["status"] = s; }
  void write(const fs::path& dir) {
    const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    doc_["wall_time_s"] = wall.count();
    doc_["outputs"] = outputs_;
    hos::write_text_atomic(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

json newton_stats(const hos::RunResult& r) {
  return {{"total_iterations", r.total_newton_iters},
          {"max_iterations_per_step", r.max_newton_iters},
          {"steps", r.steps.empty() ? 0 : r.steps.size() - 1}};
}

// ---------------------------------------------------------------------------
// coeffs

void emit_coeff_rows(hos::CsvWriter& csv, const std::string& scheme, const std::string& role,
                     const std::vector<std::pair<std::string, double>>& entries,
                     const std::vector<std::string>& exact) {
  for (size_t i = 0; i < entries.size(); ++i) {
    csv.append_row({scheme, role, entries[i].first, i < exact.size() ? exact[i] : "",
                    hos::num17(entries[i].second)});
  }
}

int cmd_coeffs(const SchemeSelection& sel, const fs::path& outdir) {
  const hos::SchemeParams& sp = sel.solver.params;
  if (!sp.finite()) throw ConfigError("scheme parameters must be finite");
  if (!sp.satisfies_stability())
    throw ConfigError("scheme violates the stability criterion a0 - 2|a1| - 2|a2| > 0 (margin " +
                      hos::num17(sp.stability_margin()) + ")");

  json resolved = {{"scheme", sel.name},
                   {"m_stag", sp.m_stag},
                   {"a2_stag", sp.a2_stag},
                   {"m_node", sp.m_node},
                   {"a2_node", sp.a2_node}};
  Manifest manifest("coeffs", resolved);

  const hos::StencilSet set = hos::make_stencil_set(sp);
  hos::CsvWriter csv({"scheme", "role", "offset", "value_exact", "value_float"});

  // exact columns only when the scheme is a preset (rational m^2)
  std::vector<std::string> ex_mass_stag, ex_mass_node, ex_delta, ex_nderiv, ex_l, ex_k, ex_g;
  if (sel.from_preset) {
    const auto r = hos::preset_rationals(*sel.solver.preset);
    const auto am = hos::mass_coeffs_m2(r.m2_stag, r.a2_stag);
    const auto an = hos::mass_coeffs_m2(r.m2_node, r.a2_node);
    const auto b = hos::staggered_deriv_coeffs_m2(r.m2_stag);
    const auto d = hos::node_deriv_coeffs_m2(r.m2_node);
    ex_mass_stag = {am.a2.str(), am.a1.str(), am.a0.str(), am.a1.str(), am.a2.str()};
    ex_mass_node = {an.a2.str(), an.a1.str(), an.a0.str(), an.a1.str(), an.a2.str()};
    ex_delta = {(-b.b2).str(), (-b.b1).str(), b.b1.str(), b.b2.str()};
    ex_nderiv = {(-d.d2).str(), (-d.d1).str(), "0", d.d1.str(), d.d2.str()};
    for (const auto& v : hos::boundary_l_m2(r.m2_stag)) ex_l.push_back(v.str());
    for (const auto& v : hos::boundary_k_m2(r.m2_node)) ex_k.push_back(v.str());
    for (const auto& v : hos::boundary_g_m2(r.m2_stag)) ex_g.push_back(v.str());
  }

  emit_coeff_rows(csv, sel.name, "mass_staggered",
                  {{"-2", set.mass_stag.a2},
                   {"-1", set.mass_stag.a1},
                   {"0", set.mass_stag.a0},
                   {"1", set.mass_stag.a1},
                   {"2", set.mass_stag.a2}},
                  ex_mass_stag);
  emit_coeff_rows(csv, sel.name, "mass_node",
                  {{"-2", set.mass_node.a2},
                   {"-1", set.mass_node.a1},
                   {"0", set.mass_node.a0},
                   {"1", set.mass_node.a1},
                   {"2", set.mass_node.a2}},
                  ex_mass_node);
  emit_coeff_rows(csv, sel.name, "staggered_derivative",
                  {{"-3/2", -set.delta.b2},
                   {"-1/2", -set.delta.b1},
                   {"1/2", set.delta.b1},
                   {"3/2", set.delta.b2}},
                  ex_delta);
  emit_coeff_rows(csv, sel.name, "node_derivative",
                  {{"-2", -set.node_deriv.d2},
                   {"-1", -set.node_deriv.d1},
                   {"0", 0.0},
                   {"1", set.node_deriv.d1},
                   {"2", set.node_deriv.d2}},
                  ex_nderiv);
  emit_coeff_rows(csv, sel.name, "boundary_mass_l",
                  {{"0", set.boundary.l[0]},
                   {"1", set.boundary.l[1]},
                   {"2", set.boundary.l[2]},
                   {"3", set.boundary.l[3]}},
                  ex_l);
  emit_coeff_rows(csv, sel.name, "boundary_deriv_k",
                  {{"-1", set.boundary.k[0]},
                   {"0", set.boundary.k[1]},
                   {"1", set.boundary.k[2]},
                   {"2", set.boundary.k[3]},
                   {"3", set.boundary.k[4]}},
                  ex_k);
  emit_coeff_rows(csv, sel.name, "boundary_deriv_g",
                  {{"-1/2", set.boundary.g[0]},
                   {"1/2", set.boundary.g[1]},
                   {"3/2", set.boundary.g[2]},
                   {"5/2", set.boundary.g[3]},
                   {"7/2", set.boundary.g[4]}},
                  ex_g);

  const auto ts = hos::truncation_coeffs_staggered(sp.m_stag, sp.a2_stag);
  const auto tn = hos::truncation_coeffs_node(sp.m_node, sp.a2_node);
  const auto diag_s = hos::stability_diagnostics(set.mass_stag, set.node_deriv);
  const auto diag_n = hos::stability_diagnostics(set.mass_node, set.node_deriv);
  const json trunc = {
      {"scheme", sel.name},
      {"staggered",
       {{"e4", ts.e4}, {"e6", ts.e6}, {"e8", ts.e8}, {"order", hos::order_of(ts)}}},
      {"node", {{"e4", tn.e4}, {"e6", tn.e6}, {"e8", tn.e8}, {"order", hos::order_of(tn)}}},
      {"stability",
       {{"R_a_staggered", diag_s.R_a},
        {"R_b_staggered", diag_s.R_b},
        {"R_a_node", diag_n.R_a},
        {"R_b_node", diag_n.R_b},
        {"R_d", diag_s.R_d},
        {"margin", sp.stability_margin()}}}};

  hos::write_text_atomic(outdir / "coeffs.csv", csv.str());
  hos::write_text_atomic(outdir / "truncation.json", trunc.dump(2) + "\n");
  manifest.add_output(outdir / "coeffs.csv");
  manifest.add_output(outdir / "truncation.json");
  manifest.write(outdir);
  std::cout << "wrote " << (outdir / "coeffs.csv").string() << " and truncation report (orders "
            << hos::order_of(ts) << "/" << hos::order_of(tn) << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// shared run plumbing

hos::ManufacturedCase case_from_config(const std::string& example, const json& cfg) {
  if (!example.empty()) return hos::builtin_case(example);
  if (cfg.contains("example")) return hos::builtin_case(cfg.at("example").get<std::string>());
  if (cfg.contains("custom")) return custom_case(cfg.at("custom"));
  throw ConfigError("need --example exN or a 'custom' problem in the config");
}

std::string run_steps_csv(const hos::RunResult& r) {
  hos::CsvWriter csv({"t", "dt", "newton_iters", "newton_residual", "mass_c", "mass_phi",
                      "source_accum", "eps_mass", "c_left", "c_right"});
  for (const auto& s : r.steps)
    csv.append_row({hos::num17(s.t), hos::num17(s.dt), std::to_string(s.newton_iters),
                    hos::num17(s.newton_residual), hos::num17(s.mass_c), hos::num17(s.mass_phi),
                    hos::num17(s.source_accum), hos::num17(s.eps_mass), hos::num17(s.c_left),
                    hos::num17(s.c_right)});
  return csv.str();
}

std::string run_final_csv(const hos::RunResult& r, const hos::Problem& prob) {
  hos::CsvWriter csv({"kind", "x", "value", "exact", "error"});
  const hos::Grid& g = r.grid;
  const double t = r.state.t;
  const bool periodic = r.mode == hos::BoundaryMode::Periodic;
  for (int i = periodic ? 1 : 0; i <= g.J; ++i) {
    const double x = g.node(i);
    const double v = r.state.C.at_node(i);
    if (prob.exact) {
      const double e = prob.exact->c(x, t);
      csv.append_row({"node", hos::num17(x), hos::num17(v), hos::num17(e), hos::num17(v - e)});
    } else {
      csv.append_row({"node", hos::num17(x), hos::num17(v), "", ""});
    }
  }
  for (int k = 0; k < g.J; ++k) {
    const double x = g.face(k);
    const double v = r.state.Z[k];
    if (prob.exact) {
      const double e = prob.exact->z(x, t);
      csv.append_row({"face", hos::num17(x), hos::num17(v), hos::num17(e), hos::num17(v - e)});
    } else {
      csv.append_row({"face", hos::num17(x), hos::num17(v), "", ""});
    }
  }
  return csv.str();
}

// ---------------------------------------------------------------------------
// plot

int cmd_plot(const std::vector<std::string>& inputs, const fs::path& outdir) {
  if (inputs.empty()) throw ConfigError("plot needs at least one --input CSV");
  Manifest manifest("plot", {{"inputs", inputs}});
  for (const auto& input : inputs) {
    const hos::CsvTable table = hos::read_csv(input);
    if (table.rows.empty()) throw ConfigError(input + ": CSV has no data rows");
    const auto& h = table.header;
    const fs::path stem = fs::path(input).stem();

    if (h == std::vector<std::string>{"t_days", "length_m", "variant", "c_rel"}) {
      // one chart per variant, one curve per column length
      std::set<std::string> variants;
      for (const auto& row : table.rows) variants.insert(row[2]);
      for (const auto& variant : variants) {
        std::map<std::string, hos::SvgSeries> by_length;
        for (size_t r = 0; r < table.rows.size(); ++r) {
          const auto& row = table.rows[r];
          if (row[2] != variant) continue;
          auto& s = by_length[row[1]];
          s.label = row[1] + " m";
          s.x.push_back(hos::csv_number(row[0], input, r));
          s.y.push_back(hos::csv_number(row[3], input, r));
        }
        std::vector<hos::SvgSeries> series;
        for (auto& [_, s] : by_length) series.push_back(std::move(s));
        std::string vname = variant;
        for (char& ch : vname)
          ch = (ch == '-') ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        const fs::path out = outdir / (stem.string() + "_" + vname + ".svg");
        hos::write_text_atomic(
            out, hos::svg_line_chart(series, "outlet relative concentration (" + variant + ")",
                                     "t (days)", "C/C0"));
        manifest.add_output(out);
        std::cout << "wrote " << out.string() << "\n";
      }
    } else if (h == std::vector<std::string>{"m_node", "m_stag", "eps_c2", "eps_z2"}) {
      std::vector<double> xs, ys;
      std::map<std::pair<double, double>, std::pair<double, double>> cells;
      for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const double mn = hos::csv_number(row[0], input, r);
        const double ms = hos::csv_number(row[1], input, r);
        auto cell_value = [&](const std::string& cell) {
          return (cell == "nan" || cell == "-nan")
                     ? std::numeric_limits<double>::quiet_NaN()
                     : hos::csv_number(cell, input, r);
        };
        if (std::find(xs.begin(), xs.end(), mn) == xs.end()) xs.push_back(mn);
        if (std::find(ys.begin(), ys.end(), ms) == ys.end()) ys.push_back(ms);
        cells[{mn, ms}] = {cell_value(row[2]), cell_value(row[3])};
      }
      std::sort(xs.begin(), xs.end());
      std::sort(ys.begin(), ys.end());
      std::vector<std::vector<double>> c2grid(xs.size(), std::vector<double>(ys.size())),
          z2grid(xs.size(), std::vector<double>(ys.size()));
      for (size_t i = 0; i < xs.size(); ++i)
        for (size_t j = 0; j < ys.size(); ++j) {
          const auto it = cells.find({xs[i], ys[j]});
          const double nan = std::numeric_limits<double>::quiet_NaN();
          c2grid[i][j] = it == cells.end() ? nan : it->second.first;
          z2grid[i][j] = it == cells.end() ? nan : it->second.second;
        }
      const fs::path out_c = outdir / (stem.string() + "_eps_c2.svg");
      const fs::path out_z = outdir / (stem.string() + "_eps_z2.svg");
      hos::write_text_atomic(
          out_c, hos::svg_heatmap(xs, ys, c2grid, "solution L2 error", "m_node", "m_stag"));
      hos::write_text_atomic(
          out_z, hos::svg_heatmap(xs, ys, z2grid, "flux L2 error", "m_node", "m_stag"));
      manifest.add_output(out_c);
      manifest.add_output(out_z);
      std::cout << "wrote " << out_c.string() << " and " << out_z.string() << "\n";
    } else {
      throw ConfigError(input + ": unrecognized CSV schema");
    }
  }
  manifest.write(outdir);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"compact block-centered transport-adsorption solver laboratory"};
  app.set_version_flag("--version", hos::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, outdir_flag, preset_flag, example_flag, stepper_flag, dt_flag;
  std::optional<double> m_stag, a2_stag, m_node, a2_node;
  std::string j_list_flag, times_flag, lengths_flag, variant_flag;
  std::optional<int> J_flag;
  std::optional<double> T_flag, spacing_flag, halfwidth_flag, resolution_flag, horizon_flag;
  std::vector<std::string> plot_inputs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config document; flags override its fields");
    cmd->add_option("--out", outdir_flag, "output directory");
  };
  auto add_scheme = [&](CLI::App* cmd) {
    cmd->add_option("--preset", preset_flag, "scheme preset (HOS1..HOS4, HOS1-D, HOS2-D)");
    cmd->add_option("--m-stag", m_stag, "staggered-pair parameter m");
    cmd->add_option("--a2-stag", a2_stag, "staggered-pair outer mass coefficient");
    cmd->add_option("--m-node", m_node, "node-pair parameter m");
    cmd->add_option("--a2-node", a2_node, "node-pair outer mass coefficient");
  };

  CLI::App* coeffs =
      app.add_subcommand("coeffs", "emit stencil coefficients and truncation report");
  add_common(coeffs);
  add_scheme(coeffs);

  CLI::App* runc = app.add_subcommand("run", "single solver run");
  add_common(runc);
  add_scheme(runc);
  runc->add_option("--example", example_flag, "built-in case id (ex1..ex6)");
  runc->add_option("--stepper", stepper_flag, "euler | cn");
  runc->add_option("--J", J_flag, "number of cells");
  runc->add_option("--dt", dt_flag, "time step: number, h3, or h4");
  runc->add_option("--T", T_flag, "final time");

  CLI::App* conv = app.add_subcommand("convergence", "grid refinement study");
  add_common(conv);
  add_scheme(conv);
  conv->add_option("--example", example_flag, "built-in case id");
  conv->add_option("--stepper", stepper_flag, "euler | cn");
  conv->add_option("--J", j_list_flag, "comma-separated increasing grid list");
  conv->add_option("--dt", dt_flag, "dt rule: number, h3, or h4");

  CLI::App* mass = app.add_subcommand("mass", "mass-balance report at requested times");
  add_common(mass);
  add_scheme(mass);
  mass->add_option("--example", example_flag, "built-in case id");
  mass->add_option("--J", J_flag, "number of cells");
  mass->add_option("--dt", dt_flag, "time step");
  mass->add_option("--T", T_flag, "final time (default: last requested time)");
  mass->add_option("--times", times_flag, "comma-separated report times");

  CLI::App* sweep = app.add_subcommand("sweep", "two-parameter error sweep (a2 tied to m)");
  add_common(sweep);
  sweep->add_option("--example", example_flag, "built-in case id");
  sweep->add_option("--J", J_flag, "number of cells");
  sweep->add_option("--dt", dt_flag, "dt rule: number, h3, or h4");
  sweep->add_option("--stepper", stepper_flag, "euler | cn (default cn)");
  sweep->add_option("--spacing", spacing_flag, "grid spacing in m (default 0.05)");
  sweep->add_option("--halfwidth", halfwidth_flag, "half-width around the eighth-order point");

  CLI::App* brk = app.add_subcommand("breakthrough", "column breakthrough curves");
  add_common(brk);
  brk->add_option("--variant", variant_flag, "hos1-d | hos2-d | both (default both)");
  brk->add_option("--lengths", lengths_flag, "column lengths in m (default 5,10,15)");
  brk->add_option("--resolution", resolution_flag, "cell size in m (default 0.5)");
  brk->add_option("--dt", dt_flag, "time step in days (default 1)");
  brk->add_option("--horizon", horizon_flag, "simulated days (default 1800)");

  CLI::App* plot = app.add_subcommand("plot", "render CSV outputs as static SVG");
  add_common(plot);
  plot->add_option("--input", plot_inputs, "input CSV file(s)")->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path);

    if (coeffs->parsed()) {
      reject_unknown_keys(cfg, {"scheme", "out"}, "coeffs config");
      const auto sel = resolve_scheme(preset_flag, cfg.value("scheme", json::object()), m_stag,
                                      a2_stag, m_node, a2_node);
      return cmd_coeffs(sel, resolve_outdir(outdir_flag, cfg, "coeffs"));
    }

    if (runc->parsed()) {
      reject_unknown_keys(cfg, {"example", "custom", "scheme", "stepper", "J", "dt", "T", "out"},
                          "run config");
      const hos::ManufacturedCase mc = case_from_config(example_flag, cfg);
      auto sel = resolve_scheme(preset_flag, cfg.value("scheme", json::object()), m_stag, a2_stag,
                                m_node, a2_node);
      const std::string stepper =
          !stepper_flag.empty() ? stepper_flag : config_or<std::string>(cfg, "stepper", "euler");
      sel.solver.stepper = parse_stepper(stepper);
      const int J = J_flag ? *J_flag : config_or<int>(cfg, "J", 0);
      if (J <= 0) throw ConfigError("run needs --J");
      const std::string dt_rule_s =
          !dt_flag.empty() ? dt_flag : config_or<std::string>(cfg, "dt", "");
      if (dt_rule_s.empty()) throw ConfigError("run needs --dt (number, h3, or h4)");
      const double T = T_flag ? *T_flag : config_or<double>(cfg, "T", mc.T);

      const hos::Problem prob = mc.problem(J);
      sel.solver.dt = hos::DtRule::parse(dt_rule_s).resolve(prob.grid.h);
      const fs::path outdir = resolve_outdir(outdir_flag, cfg, "run");

      json resolved = {{"example", mc.id}, {"scheme", sel.name}, {"stepper", stepper},
                       {"J", J},           {"dt", sel.solver.dt}, {"T", T}};
      Manifest manifest("run", resolved);
      const hos::RunResult result = hos::run(prob, sel.solver, T);
      hos::write_text_atomic(outdir / "steps.csv", run_steps_csv(result));
      hos::write_text_atomic(outdir / "final.csv", run_final_csv(result, prob));
      manifest.add_output(outdir / "steps.csv");
      manifest.add_output(outdir / "final.csv");
      manifest.set("newton", newton_stats(result));
      if (prob.exact) {
        const hos::ErrorReport e = hos::error_norms(result, prob);
        manifest.set("errors", {{"eps_c_2", e.c2},
                                {"eps_c_inf", e.cinf},
                                {"eps_z_2", e.z2},
                                {"eps_z_inf", e.zinf}});
      }
      manifest.write(outdir);
      std::cout << "wrote " << (outdir / "steps.csv").string() << " and final state\n";
      return 0;
    }

    if (conv->parsed()) {
      reject_unknown_keys(cfg, {"example", "custom", "scheme", "stepper", "J", "dt", "out"},
                          "convergence config");
      const hos::ManufacturedCase mc = case_from_config(example_flag, cfg);
      auto sel = resolve_scheme(preset_flag, cfg.value("scheme", json::object()), m_stag, a2_stag,
                                m_node, a2_node);
      const std::string stepper =
          !stepper_flag.empty() ? stepper_flag : config_or<std::string>(cfg, "stepper", "euler");
      sel.solver.stepper = parse_stepper(stepper);
      std::vector<int> J_list;
      if (!j_list_flag.empty())
        J_list = parse_int_list(j_list_flag);
      else
        J_list = config_or<std::vector<int>>(cfg, "J", {});
      if (J_list.empty()) throw ConfigError("convergence needs --J as an increasing list");
      const std::string dt_rule_s =
          !dt_flag.empty() ? dt_flag : config_or<std::string>(cfg, "dt", "");
      if (dt_rule_s.empty()) throw ConfigError("convergence needs --dt (number, h3, or h4)");

      const fs::path outdir = resolve_outdir(outdir_flag, cfg, "convergence");
      json resolved = {{"example", mc.id},
                       {"scheme", sel.name},
                       {"stepper", stepper},
                       {"J", J_list},
                       {"dt_rule", dt_rule_s}};
      Manifest manifest("convergence", resolved);

      sel.solver.dt = 1.0;  // per-row value resolved by the study
      const hos::ConvergenceTable table =
          hos::convergence_study(mc, sel.solver, J_list, hos::DtRule::parse(dt_rule_s));
      hos::CsvWriter csv({"scheme", "J", "h", "dt", "eps_c_inf", "rate_c_inf", "eps_c_2",
                          "rate_c_2", "eps_z_inf", "rate_z_inf", "eps_z_2", "rate_z_2"});
      for (const auto& row : table.rows)
        csv.append_row({table.scheme, std::to_string(row.J), hos::num17(row.h),
                        hos::num17(row.dt), hos::num17(row.err.cinf), hos::num17(row.rate[0]),
                        hos::num17(row.err.c2), hos::num17(row.rate[1]),
                        hos::num17(row.err.zinf), hos::num17(row.rate[2]),
                        hos::num17(row.err.z2), hos::num17(row.rate[3])});
      hos::write_text_atomic(outdir / "convergence.csv", csv.str());
      manifest.add_output(outdir / "convergence.csv");
      manifest.write(outdir);
      std::cout << "wrote " << (outdir / "convergence.csv").string() << "\n";
      return 0;
    }

    if (mass->parsed()) {
      reject_unknown_keys(cfg, {"example", "custom", "scheme", "J", "dt", "T", "times", "out"},
                          "mass config");
      const hos::ManufacturedCase mc = case_from_config(example_flag, cfg);
      auto sel = resolve_scheme(preset_flag, cfg.value("scheme", json::object()), m_stag, a2_stag,
                                m_node, a2_node);
      sel.solver.stepper = hos::Stepper::Euler;
      const int J = J_flag ? *J_flag : config_or<int>(cfg, "J", 0);
      if (J <= 0) throw ConfigError("mass needs --J");
      std::vector<double> times;
      if (!times_flag.empty())
        times = parse_double_list(times_flag);
      else
        times = config_or<std::vector<double>>(cfg, "times", {0.2, 0.4, 0.6, 0.8});
      const std::string dt_rule_s =
          !dt_flag.empty() ? dt_flag : config_or<std::string>(cfg, "dt", "");
      if (dt_rule_s.empty()) throw ConfigError("mass needs --dt");
      const hos::Problem prob = mc.problem(J);
      sel.solver.dt = hos::DtRule::parse(dt_rule_s).resolve(prob.grid.h);
      const double T =
          T_flag ? *T_flag
                 : config_or<double>(cfg, "T", *std::max_element(times.begin(), times.end()));

      const fs::path outdir = resolve_outdir(outdir_flag, cfg, "mass");
      json resolved = {{"example", mc.id}, {"scheme", sel.name},  {"J", J},
                       {"dt", sel.solver.dt}, {"T", T}, {"times", times}};
      Manifest manifest("mass", resolved);
      const hos::RunResult result = hos::run(prob, sel.solver, T);
      const auto rows = hos::mass_report(result, times);
      hos::CsvWriter csv({"scheme", "dt", "t", "eps_mass"});
      for (const auto& row : rows)
        csv.append_row(
            {sel.name, hos::num17(sel.solver.dt), hos::num17(row.t), hos::num17(row.eps_mass)});
      hos::write_text_atomic(outdir / "mass.csv", csv.str());
      manifest.add_output(outdir / "mass.csv");
      manifest.set("newton", newton_stats(result));
      manifest.write(outdir);
      std::cout << "wrote " << (outdir / "mass.csv").string() << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      reject_unknown_keys(
          cfg, {"example", "custom", "J", "dt", "stepper", "spacing", "halfwidth", "out"},
          "sweep config");
      const hos::ManufacturedCase mc = case_from_config(example_flag, cfg);
      const int J = J_flag ? *J_flag : config_or<int>(cfg, "J", 0);
      if (J <= 0) throw ConfigError("sweep needs --J");
      const std::string dt_rule_s =
          !dt_flag.empty() ? dt_flag : config_or<std::string>(cfg, "dt", "h3");
      const std::string stepper =
          !stepper_flag.empty() ? stepper_flag : config_or<std::string>(cfg, "stepper", "cn");
      const double spacing = spacing_flag ? *spacing_flag : config_or<double>(cfg, "spacing", 0.05);
      const double halfwidth =
          halfwidth_flag ? *halfwidth_flag : config_or<double>(cfg, "halfwidth", 0.2);
      if (!(spacing > 0) || !(halfwidth >= spacing))
        throw ConfigError("sweep needs spacing > 0 and halfwidth >= spacing");

      const auto [mn8, an8] = hos::eighth_order_params(hos::StencilKind::Node);
      const auto [ms8, as8] = hos::eighth_order_params(hos::StencilKind::Staggered);
      const fs::path outdir = resolve_outdir(outdir_flag, cfg, "sweep");
      json resolved = {{"example", mc.id},     {"J", J},
                       {"dt_rule", dt_rule_s}, {"stepper", stepper},
                       {"spacing", spacing},   {"halfwidth", halfwidth}};
      Manifest manifest("sweep", resolved);

      const hos::SweepSurface surf = hos::parameter_sweep(
          mc, hos::sweep_axis(mn8, halfwidth, spacing), hos::sweep_axis(ms8, halfwidth, spacing),
          J, hos::DtRule::parse(dt_rule_s), parse_stepper(stepper));

      hos::CsvWriter csv({"m_node", "m_stag", "eps_c2", "eps_z2"});
      for (size_t i = 0; i < surf.m_node.size(); ++i)
        for (size_t j = 0; j < surf.m_stag.size(); ++j)
          csv.append_row({hos::num17(surf.m_node[i]), hos::num17(surf.m_stag[j]),
                          hos::num17(surf.eps_c2[i][j]), hos::num17(surf.eps_z2[i][j])});
      hos::write_text_atomic(outdir / "sweep.csv", csv.str());
      manifest.add_output(outdir / "sweep.csv");
      manifest.set("argmin",
                   {{"eps_c2",
                     {{"m_node", surf.m_node[surf.argmin_c2_node]},
                      {"m_stag", surf.m_stag[surf.argmin_c2_stag]}}},
                    {"eps_z2",
                     {{"m_node", surf.m_node[surf.argmin_z2_node]},
                      {"m_stag", surf.m_stag[surf.argmin_z2_stag]}}},
                    {"eighth_order", {{"m_node", mn8}, {"m_stag", ms8}}}});
      manifest.set("failed_cells", surf.failed_cells);
      if (surf.failed_cells > 0) manifest.set_status("partial");
      manifest.write(outdir);
      std::cout << "wrote " << (outdir / "sweep.csv").string() << " (" << surf.failed_cells
                << " failed cells)\n";
      return 0;
    }

    if (brk->parsed()) {
      reject_unknown_keys(cfg, {"variant", "lengths", "resolution", "dt", "horizon", "out"},
                          "breakthrough config");
      const std::string variant =
          !variant_flag.empty() ? variant_flag : config_or<std::string>(cfg, "variant", "both");
      std::vector<double> lengths;
      if (!lengths_flag.empty())
        lengths = parse_double_list(lengths_flag);
      else
        lengths = config_or<std::vector<double>>(cfg, "lengths", {5.0, 10.0, 15.0});
      const double resolution =
          resolution_flag ? *resolution_flag : config_or<double>(cfg, "resolution", 0.5);
      const double dt = !dt_flag.empty() ? std::stod(dt_flag) : config_or<double>(cfg, "dt", 1.0);
      const double horizon =
          horizon_flag ? *horizon_flag : config_or<double>(cfg, "horizon", 1800.0);

      std::vector<hos::Preset> variants;
      if (variant == "both") {
        variants = {hos::Preset::Hos1D, hos::Preset::Hos2D};
      } else {
        const auto p = hos::preset_from_name(variant);
        if (!p || !hos::preset_is_dirichlet(*p))
          throw ConfigError("breakthrough variant must be hos1-d, hos2-d, or both");
        variants = {*p};
      }

      const fs::path outdir = resolve_outdir(outdir_flag, cfg, "breakthrough");
      json resolved = {{"variant", variant},
                       {"lengths", lengths},
                       {"resolution", resolution},
                       {"dt", dt},
                       {"horizon", horizon}};
      Manifest manifest("breakthrough", resolved);
      hos::CsvWriter csv({"t_days", "length_m", "variant", "c_rel"});
      for (const hos::Preset v : variants) {
        const auto all = hos::breakthrough(lengths, resolution, dt, horizon, v);
        for (const auto& s : all)
          for (size_t k = 0; k < s.t_days.size(); ++k)
            csv.append_row({hos::num17(s.t_days[k]), hos::num17(s.length_m), hos::preset_name(v),
                            hos::num17(s.c_rel[k])});
      }
      hos::write_text_atomic(outdir / "breakthrough.csv", csv.str());
      manifest.add_output(outdir / "breakthrough.csv");
      manifest.write(outdir);
      std::cout << "wrote " << (outdir / "breakthrough.csv").string() << "\n";
      return 0;
    }

    if (plot->parsed()) {
      reject_unknown_keys(cfg, {"inputs", "out"}, "plot config");
      std::vector<std::string> inputs = plot_inputs;
      if (inputs.empty()) inputs = config_or<std::vector<std::string>>(cfg, "inputs", {});
      return cmd_plot(inputs, resolve_outdir(outdir_flag, cfg, "plot"));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hos::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hos::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
