#include "gridfisher/cli.hpp"

#include "gridfisher/errors.hpp"
#include "gridfisher/landscape.hpp"
#include "gridfisher/spike_sim.hpp"

#include <map>
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>

namespace gridfisher::cli {

namespace {

ThetaParams theta_params(const RunConfig& cfg) {
  ThetaParams p;
  if (cfg.values().count("alpha")) p.alpha = cfg.alpha();
  p.tail_epsilon = cfg.real("tail_epsilon");
  p.max_shell_radius = cfg.real("max_shell_radius");
  p.validate();
  return p;
}

QuadratureRule quadrature_rule(const RunConfig& cfg) {
  QuadratureRule r;
  r.radial_nodes = static_cast<int>(cfg.integer("radial_nodes"));
  r.angular_nodes = static_cast<int>(cfg.integer("angular_nodes"));
  r.polar_nodes = static_cast<int>(cfg.integer("polar_nodes"));
  r.azimuth_nodes = static_cast<int>(cfg.integer("azimuth_nodes"));
  return r;
}

std::vector<double> chart_coords(const RunConfig& cfg) {
  if (cfg.is_set("point")) {
    auto p = cfg.reals("point");
    if (p.size() != 2 && p.size() != 5) throw ConfigError("point must have 2 or 5 coordinates");
    return p;
  }
  return chart_point(parse_named_lattice(cfg.text("lattice")));
}

Lattice selected_lattice(const RunConfig& cfg) {
  if (cfg.is_set("point")) return lattice_from_chart(chart_coords(cfg));
  return named_lattice(parse_named_lattice(cfg.text("lattice")));
}

std::string lattice_label(const RunConfig& cfg) {
  return cfg.is_set("point") ? "(" + cfg.text("point") + ")" : cfg.text("lattice");
}

FiringField make_field(const RunConfig& cfg, int dim) {
  const double r = cfg.real("radius");
  const bool normalize = cfg.boolean("normalize");
  const std::string density = cfg.values().count("density") ? cfg.text("density") : "uniform";
  if (density == "uniform") return FiringField::uniform(dim, r, normalize);
  if (density == "exponential") return FiringField::exponential_kernel(dim, r, normalize);
  throw ConfigError("density must be uniform or exponential");
}

Vector point_or_origin(const RunConfig& cfg, const std::string& key, int dim) {
  if (!cfg.is_set(key)) return Vector::Zero(dim);
  const auto v = cfg.reals(key);
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(key + " must have " + std::to_string(dim) + " coordinates");
  }
  return Eigen::Map<const Vector>(v.data(), dim);
}

std::vector<NamedLattice> lattice_list(const RunConfig& cfg) {
  std::vector<NamedLattice> out;
  std::string s = cfg.text("lattices");
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    std::string name = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
    out.push_back(parse_named_lattice(name));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<Cell> sweep_cells(double value, const std::vector<double>& row) {
  std::vector<Cell> cells{value};
  for (double v : row) cells.emplace_back(v);
  return cells;
}

// First sign change of column `diff` between consecutive rows, refined by bisection.
void add_sign_change(Table& t, const SweepRecord& rec, const std::string& key,
                     const std::function<double(double)>& diff, double tol) {
  std::size_t col = 0;
  try {
    col = rec.column("A2-Z2");
  } catch (const DomainError&) {
    return;
  }
  for (std::size_t i = 1; i < rec.rows.size(); ++i) {
    const double a = rec.rows[i - 1][col], b = rec.rows[i][col];
    if ((a > 0.0) != (b > 0.0)) {
      t.summary.emplace_back("sign_change_" + key,
                             bisect_sign_change(diff, rec.values[i - 1], rec.values[i], tol));
      t.summary.emplace_back("sign_change_from", std::string(a > 0.0 ? "A2>Z2" : "Z2>A2"));
      return;
    }
  }
  t.summary.emplace_back("sign_change_" + key, std::string("none"));
}

Table cmd_theta(const RunConfig& cfg) {
  const Lattice L = selected_lattice(cfg);
  const ThetaParams p = theta_params(cfg);
  const Vector y = point_or_origin(cfg, "y", L.dim());
  const ThetaValue tv = theta_translated(L, y, p);
  Table t;
  t.columns = {"lattice", "value"};
  std::vector<Cell> row{lattice_label(cfg), tv.value};
  for (int k = 0; k < L.dim(); ++k) {
    t.columns.push_back("grad_" + std::to_string(k + 1));
    row.emplace_back(tv.gradient[k]);
  }
  t.columns.insert(t.columns.end(), {"Q", "truncation_radius"});
  row.emplace_back(q_value(L, y, p));
  row.emplace_back(tv.truncation_radius);
  t.rows.push_back(std::move(row));
  t.summary.emplace_back("poisson_dual_discrepancy", theta_dual_check(L, p));
  return t;
}

Table cmd_qfield(const RunConfig& cfg) {
  const Lattice L = selected_lattice(cfg);
  const auto pts = q_field(L, theta_params(cfg), cfg.real("extent"), static_cast<int>(cfg.integer("n")));
  Table t;
  t.columns = {"y1", "y2", "Q"};
  for (const auto& q : pts) t.rows.push_back({q.y1, q.y2, q.q});
  return t;
}

Table cmd_gr_profile(const RunConfig& cfg) {
  const auto n = cfg.integer("ntheta");
  std::vector<double> angles(n);
  for (long k = 0; k < n; ++k) angles[k] = 2.0 * std::numbers::pi * k / n;
  const auto g = gr_profile(cfg.real("radius"), angles, theta_params(cfg));
  Table t;
  t.columns = {"theta", "g_r"};
  double gmax = -INFINITY;
  for (long k = 0; k < n; ++k) {
    t.rows.push_back({angles[k], g[k]});
    gmax = std::max(gmax, g[k]);
  }
  t.summary.emplace_back("max_g_r", gmax);
  t.summary.emplace_back("all_negative", gmax < 0.0);
  return t;
}

Table cmd_fisher(const RunConfig& cfg) {
  const Lattice L = selected_lattice(cfg);
  const ThetaParams p = theta_params(cfg);
  const FisherIntegrator integ(make_field(cfg, L.dim()), quadrature_rule(cfg));
  Table t;
  t.columns = {"lattice", "R", "F", "avg_theta"};
  t.rows.push_back({lattice_label(cfg), cfg.real("radius"), integ.fisher(L, p), integ.avg_theta(L, p)});
  return t;
}

Table cmd_scan2d(const RunConfig& cfg) {
  const ThetaParams p = theta_params(cfg);
  const FisherIntegrator integ(make_field(cfg, 2), quadrature_rule(cfg));
  ScanGrid2D grid;
  grid.nx = static_cast<int>(cfg.integer("nx"));
  grid.ny = static_cast<int>(cfg.integer("ny"));
  grid.x_min = cfg.real("x_min");
  grid.x_max = cfg.real("x_max");
  grid.y_min = cfg.real("y_min");
  grid.y_max = cfg.real("y_max");
  const ScanResult res = scan_2d(integ, p, grid);
  Table t;
  t.columns = {"x", "y", "in_domain", "F"};
  for (const auto& pt : res.points) t.rows.push_back({pt.x, pt.y, pt.in_domain, pt.F});
  const auto& mx = res.max();
  const auto& mn = res.min();
  t.summary.emplace_back("argmax_x", mx.x);
  t.summary.emplace_back("argmax_y", mx.y);
  t.summary.emplace_back("argmax_F", mx.F);
  t.summary.emplace_back("argmin_x", mn.x);
  t.summary.emplace_back("argmin_y", mn.y);
  t.summary.emplace_back("argmin_F", mn.F);
  // The top edge of the window is an artificial boundary of the domain.
  t.summary.emplace_back("boundary_growth_detected", mx.y >= grid.y_max - 1e-12);
  if (cfg.boolean("refine")) {
    const RefineResult r = refine_local({mx.x, mx.y}, integ, p);
    t.summary.emplace_back("refined_x", r.point.x);
    t.summary.emplace_back("refined_y", r.point.y);
    t.summary.emplace_back("refined_F", r.F);
    t.summary.emplace_back("refined_converged", r.converged);
  }
  return t;
}

Table cmd_sweep_r(const RunConfig& cfg) {
  const ThetaParams p = theta_params(cfg);
  const QuadratureRule rule = quadrature_rule(cfg);
  const bool normalize = cfg.boolean("normalize");
  const auto lattices = lattice_list(cfg);
  const SweepRecord rec = sweep_radius(lattices, cfg.reals("radii"), p, rule, normalize);
  Table t;
  t.columns = {"R"};
  t.columns.insert(t.columns.end(), rec.columns.begin(), rec.columns.end());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) t.rows.push_back(sweep_cells(rec.values[i], rec.rows[i]));
  const Lattice a2 = named_lattice(NamedLattice::A2), z2 = named_lattice(NamedLattice::Z2);
  add_sign_change(t, rec, "R", [&](double r) {
    const FisherIntegrator integ(FiringField::uniform(2, r, normalize), rule);
    return integ.fisher(a2, p) - integ.fisher(z2, p);
  }, cfg.real("bisect_tol"));
  return t;
}

Table cmd_sweep_alpha(const RunConfig& cfg) {
  const ThetaParams p = theta_params(cfg);
  const QuadratureRule rule = quadrature_rule(cfg);
  const bool normalize = cfg.boolean("normalize");
  const double radius = cfg.real("radius");
  const auto lattices = lattice_list(cfg);
  const SweepRecord rec = sweep_alpha(lattices, cfg.reals("alphas"), radius, p, rule, normalize);
  Table t;
  t.columns = {"alpha"};
  t.columns.insert(t.columns.end(), rec.columns.begin(), rec.columns.end());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) t.rows.push_back(sweep_cells(rec.values[i], rec.rows[i]));
  const Lattice a2 = named_lattice(NamedLattice::A2), z2 = named_lattice(NamedLattice::Z2);
  const FisherIntegrator integ(FiringField::uniform(2, radius, normalize), rule);
  add_sign_change(t, rec, "alpha", [&](double a) {
    ThetaParams q = p;
    q.alpha = a;
    return integ.fisher(a2, q) - integ.fisher(z2, q);
  }, cfg.real("bisect_tol"));
  return t;
}

Table cmd_compare3d(const RunConfig& cfg) {
  const ThetaParams p = theta_params(cfg);
  const QuadratureRule rule = quadrature_rule(cfg);
  Table t;
  t.columns = {"R", "D3", "D3star", "Z3", "ordering"};
  for (double r : cfg.reals("radii")) {
    const FiringField field = FiringField::uniform(3, r, cfg.boolean("normalize"));
    const SweepRecord rec = compare_3d(field, p, rule);
    const auto& row = rec.rows.front();
    std::vector<std::size_t> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return row[a] > row[b]; });
    std::string ordering;
    for (auto k : order) ordering += (ordering.empty() ? "" : ">") + rec.columns[k];
    t.rows.push_back({r, row[0], row[1], row[2], ordering});
  }
  return t;
}

Table cmd_hessian(const RunConfig& cfg) {
  const auto point = chart_coords(cfg);
  const int dim = point.size() == 2 ? 2 : 3;
  const FisherIntegrator integ(make_field(cfg, dim), quadrature_rule(cfg));
  const HessianReport rep = hessian_at(point, integ, theta_params(cfg), cfg.real("step"));
  Table t;
  t.columns = {"row", "col", "H"};
  for (Eigen::Index i = 0; i < rep.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.matrix.cols(); ++j) {
      t.rows.push_back({static_cast<long>(i), static_cast<long>(j), rep.matrix(i, j)});
    }
  }
  t.summary.emplace_back("F", rep.value);
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
    t.summary.emplace_back("eigenvalue_" + std::to_string(k), rep.eigenvalues[k]);
  }
  t.summary.emplace_back("classification", std::string(to_string(rep.classification)));
  t.summary.emplace_back("asymmetry", rep.asymmetry);
  t.summary.emplace_back("sign_convention",
                         std::string("Hessian of F itself; a local maximum has all eigenvalues negative"));
  return t;
}

Table cmd_eutaxy(const RunConfig& cfg) {
  const Lattice L = selected_lattice(cfg);
  const double max_r = cfg.real("max_radius");
  const auto shells = max_r > 0.0 ? shells_within(L, max_r)
                                  : enumerate_shells(L, static_cast<int>(cfg.integer("shells")));
  const double tol = cfg.real("tol");
  Table t;
  t.columns = {"shell", "radius", "count", "defect", "strongly_eutactic"};
  bool all = true;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    const bool ok = is_strongly_eutactic(shells[i], tol);
    all = all && ok;
    t.rows.push_back({static_cast<long>(i + 1), shells[i].radius,
                      static_cast<long>(shells[i].vectors.size()), eutaxy_defect(shells[i]), ok});
  }
  t.summary.emplace_back("lattice", lattice_label(cfg));
  t.summary.emplace_back("all_strongly_eutactic", all);
  return t;
}

Table cmd_stationarity(const RunConfig& cfg) {
  const auto point = chart_coords(cfg);
  const int dim = point.size() == 2 ? 2 : 3;
  const FisherIntegrator integ(make_field(cfg, dim), quadrature_rule(cfg));
  const auto rep = volume_stationarity_check(point, integ, theta_params(cfg), cfg.reals("lambdas"),
                                             cfg.real("step"));
  Table t;
  t.columns = {"lambda"};
  for (std::size_t k = 0; k < point.size(); ++k) t.columns.push_back("grad_" + std::to_string(k + 1));
  t.columns.push_back("max_abs");
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    std::vector<Cell> row{rep.lambdas[i]};
    double m = 0.0;
    for (double g : rep.gradients[i]) {
      row.emplace_back(g);
      m = std::max(m, std::abs(g));
    }
    row.emplace_back(m);
    t.rows.push_back(std::move(row));
  }
  t.summary.emplace_back("max_gradient", rep.max_gradient);
  return t;
}

Table cmd_degenerate(const RunConfig& cfg) {
  const FisherIntegrator integ(make_field(cfg, 2), quadrature_rule(cfg));
  const SweepRecord rec = degenerate_family_probe(integ, theta_params(cfg), cfg.reals("ts"));
  Table t;
  t.columns = {"t", "F_t", "F_A2", "F_t-F_A2"};
  bool grew = false;
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    t.rows.push_back(sweep_cells(rec.values[i], rec.rows[i]));
    if (!grew && rec.rows[i][2] > 0.0) {
      grew = true;
      t.summary.emplace_back("first_t_above_A2", rec.values[i]);
    }
  }
  t.summary.emplace_back("boundary_growth_detected", grew);
  return t;
}

ModuleConfig module_config(const RunConfig& cfg) {
  const Lattice L = named_lattice(parse_named_lattice(cfg.text("lattice")));
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  ModuleConfig m{L, {}, static_cast<int>(cfg.integer("neurons")), theta_params(cfg), seed};
  m.phases = sample_uniform_ball_phases(L.dim(), cfg.real("phase_radius"),
                                        static_cast<std::size_t>(cfg.integer("phases")), seed);
  return m;
}

Table cmd_simulate(const RunConfig& cfg) {
  const ModuleConfig m = module_config(cfg);
  const Vector x = point_or_origin(cfg, "x", m.lattice.dim());
  const auto est = empirical_fisher_trace(m, x, static_cast<int>(cfg.integer("trials")));
  Table t;
  t.columns = {"analytic_trace", "empirical_trace", "standard_error", "z"};
  const double z = est.standard_error > 0.0 ? (est.mean - est.analytic) / est.standard_error : 0.0;
  std::vector<Cell> row{est.analytic, est.mean, est.standard_error, z};
  for (int k = 0; k < m.lattice.dim(); ++k) {
    t.columns.push_back("score_mean_" + std::to_string(k + 1));
    row.emplace_back(est.score_mean[k]);
  }
  t.rows.push_back(std::move(row));
  t.summary.emplace_back("phase_average_Q", aggregate_phases(m));
  return t;
}

Table cmd_decode(const RunConfig& cfg) {
  const ModuleConfig m = module_config(cfg);
  const Vector x = point_or_origin(cfg, "x", m.lattice.dim());
  DecodeOptions opt;
  opt.half_width = cfg.real("half_width");
  opt.nodes_per_axis = static_cast<int>(cfg.integer("nodes"));
  const auto r = ml_decode(m, x, static_cast<int>(cfg.integer("trials")), opt);
  Table t;
  t.columns = {"mse", "crlb", "mse_over_crlb"};
  t.rows.push_back({r.mse, r.crlb, r.mse / r.crlb});
  return t;
}

}  // namespace

Table execute(const RunConfig& cfg) {
  const std::string& c = cfg.command();
  if (c == "theta") return cmd_theta(cfg);
  if (c == "qfield") return cmd_qfield(cfg);
  if (c == "gr-profile") return cmd_gr_profile(cfg);
  if (c == "fisher") return cmd_fisher(cfg);
  if (c == "scan2d") return cmd_scan2d(cfg);
  if (c == "sweep-r") return cmd_sweep_r(cfg);
  if (c == "sweep-alpha") return cmd_sweep_alpha(cfg);
  if (c == "compare3d") return cmd_compare3d(cfg);
  if (c == "hessian") return cmd_hessian(cfg);
  if (c == "eutaxy") return cmd_eutaxy(cfg);
  if (c == "stationarity") return cmd_stationarity(cfg);
  if (c == "degenerate") return cmd_degenerate(cfg);
  if (c == "simulate") return cmd_simulate(cfg);
  if (c == "decode") return cmd_decode(cfg);
  throw ConfigError("unknown command: " + c);
}

namespace {

std::string describe(const std::string& name) {
  static const std::map<std::string, std::string> text = {
      {"theta", "translated theta value, gradient and Q at one point"},
      {"qfield", "Q tabulated on a square grid of phases"},
      {"gr-profile", "g_r(theta) = Q_Z2 - Q_A2 on a circle of radius r"},
      {"fisher", "Fisher functional F for one lattice and field"},
      {"scan2d", "F over the 2D fundamental domain, with local refinement"},
      {"sweep-r", "F per lattice over field radii"},
      {"sweep-alpha", "F per lattice over alpha values"},
      {"compare3d", "F for D3, D3star and Z3 over field radii"},
      {"hessian", "finite-difference Hessian of F over the chart"},
      {"eutaxy", "strong eutaxy of lattice shells"},
      {"stationarity", "chart gradient of the scaled functional across lambda"},
      {"degenerate", "F along the rectangular family (0, t) against A2"},
      {"simulate", "Monte-Carlo Fisher trace of a Poisson grid module"},
      {"decode", "maximum-likelihood decoding error and Cramer-Rao bound"}};
  const auto it = text.find(name);
  return it == text.end() ? std::string() : it->second;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher information of grid-cell lattice codes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(GRIDFISHER_VERSION));

  struct Sub {
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    std::string replay_path;
  };
  std::map<std::string, std::unique_ptr<Sub>> subs;
  for (const auto& name : command_names()) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, describe(name));
    for (const auto& key : command_keys(name)) {
      std::string flags = "--" + key.name;
      std::string dashed = key.name;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != key.name) flags += ",--" + dashed;
      sub->options[key.name] =
          sub->app->add_option(flags, sub->values[key.name], key.help + " [" + key.default_value + "]");
    }
    sub->app->add_option("--config", sub->config_path, "flat key = value configuration file");
    sub->app->add_option("--replay", sub->replay_path, "JSON result file whose config is rerun");
    subs[name] = std::move(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    for (auto& [name, sub] : subs) {
      if (!sub->app->parsed()) continue;
      std::vector<std::map<std::string, std::string>> layers;
      if (!sub->config_path.empty()) layers.push_back(read_config_file(sub->config_path));
      if (!sub->replay_path.empty()) layers.push_back(read_replay_file(sub->replay_path));
      std::map<std::string, std::string> flags;
      for (const auto& [key, opt] : sub->options) {
        if (opt->count() > 0) flags[key] = sub->values[key];
      }
      layers.push_back(std::move(flags));
      const RunConfig cfg = RunConfig::resolve(name, layers);
      const Table table = execute(cfg);

      const std::string& path = cfg.text("output");
      std::ofstream file;
      if (path != "-") {
        file.open(path);
        if (!file) throw ConfigError("cannot open output file " + path);
      }
      std::ostream& os = path == "-" ? out : file;
      if (cfg.text("format") == "json") {
        write_json(os, cfg, table);
      } else {
        write_csv(os, cfg, table);
      }
      os.flush();
      if (!os) throw ConfigError("failed writing output");
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const TruncationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const UnidentifiableError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const EvaluationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace gridfisher::cli
