#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "hlaser/bounds.hpp"
#include "hlaser/coherence.hpp"
#include "hlaser/control.hpp"
#include "hlaser/discrete.hpp"
#include "hlaser/errors.hpp"
#include "hlaser/glauber.hpp"
#include "hlaser/parallel.hpp"
#include "hlaser/report.hpp"
#include "hlaser/sector.hpp"
#include "hlaser/version.hpp"

namespace hlaser::cli {
namespace {

constexpr const char* kTimeUnits =
    "Times and rates are in units where the beam flux N = 1 unless --flux overrides it; "
    "--flux F rescales every rate by F / N (linewidths scale up, time axes scale down). "
    "The coherence itself is dimensionless.";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// A CSV-shaped result; cells are numbers or strings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::variant<double, long, std::string>>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "");
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) os << fmt(v);
              else os << v;
            },
            row[i]);
      }
      os << '\n';
    }
    return os.str();
  }

  Json json() const {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json obj;
      for (std::size_t i = 0; i < row.size(); ++i) std::visit([&](const auto& v) { obj[columns[i]] = v; }, row[i]);
      arr.push_back(obj);
    }
    return arr;
  }
};

struct Output {
  std::variant<Table, Json> data;
  std::string default_format;  // "csv" or "json"
  std::string summary;
};

struct Options {
  // Global
  int threads = 0;
  std::string out;
  std::string format;
  double flux = 0.0;
  // Shared
  int dim = 0;
  std::vector<int> dims;
  double tol = 1e-12;
  // coherence
  std::string route = "projected";
  std::string export_mm;
  // sweep
  bool fit = false;
  double mu_min = FitWindow{}.mu_min;
  double mu_max = FitWindow{}.mu_max;
  bool no_timing = false;
  // g1
  int points = 201;
  double s_max = 10.0;
  std::string propagator = "sector";
  // g2max
  int grid = 9;
  bool no_refine = false;
  // discrete
  double gamma = 1e-3;
  // bounds
  double mu = 0.0;
  double coherence = 0.0;
  // msse
  double linewidth = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  bool quadrature = false;
  int order = 24;
  // asymmetry
  std::vector<double> nbar;
  double cutoff_factor = 50.0;
  // control
  std::string precision = "automatic";
  std::string which = "both";
  // optimize
  long budget = 20000;
  std::uint64_t seed = 1;
};

// Rate scale implied by --flux for a model with natural flux `natural`.
double rate_scale(const Options& o, double natural) { return o.flux > 0.0 ? o.flux / natural : 1.0; }

void require_dim(const Options& o) {
  if (o.dim < 2) throw ValidationError("--dim must be at least 2, got " + std::to_string(o.dim));
}

std::string progress_prefix() { return "[hlaser] "; }

Output cmd_model(const Options& o) {
  require_dim(o);
  const LaserModel m = build_model(o.dim);
  Output out{to_json(m), "json", "dim=" + std::to_string(m.dim) + " flux=" + fmt(m.flux) + " mu=" + fmt(m.mu)};
  return out;
}

Output cmd_coherence(const Options& o) {
  require_dim(o);
  LaserModel m = build_model(o.dim);
  if (!o.export_mm.empty()) write_matrix_market(build_liouvillian(m), o.export_mm);
  double c = 0.0;
  Table t{{"dim", "mu", "coherence", "flux", "linewidth", "route"}, {}};
  if (o.route == "quadrature") {
    c = coherence_quadrature(m).value;
    m.linewidth = 4.0 * m.flux / c;
  } else {
    CoherenceOptions opts;
    opts.solve.tol = o.tol;
    if (o.route == "tridiagonal") opts.route = CoherenceRoute::tridiagonal;
    else if (o.route != "projected") throw ValidationError("unknown --route '" + o.route + "'");
    c = coherence(m, opts);
  }
  const double scale = rate_scale(o, m.flux);
  t.rows.push_back({static_cast<long>(m.dim), m.mu, c, m.flux * scale, *m.linewidth * scale, o.route});
  return {t, "csv", "dim=" + std::to_string(m.dim) + " coherence=" + fmt(c) + " linewidth=" + fmt(*m.linewidth * scale)};
}

Output cmd_sweep(const Options& o) {
  if (o.dims.empty()) throw ValidationError("--dims is required");
  CoherenceOptions opts;
  opts.solve.tol = o.tol;
  std::mutex mu;
  const ScalingFit fit = sweep_and_fit(o.dims, FitWindow{o.mu_min, o.mu_max}, opts, [&](const ScalingPoint& p) {
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << progress_prefix() << "dim " << p.dim << " coherence " << short_fmt(p.coherence) << " ("
              << short_fmt(p.seconds) << " s)\n";
  });
  std::string summary = "points=" + std::to_string(fit.points.size());
  if (fit.used >= 2) {
    summary += " exponent=" + fmt(fit.exponent) + " coefficient=" + fmt(fit.coefficient) +
               " rms_log_residual=" + short_fmt(fit.rms_log_residual);
  }
  if (o.fit) return {to_json(fit), "json", summary};
  Table t{{"dim", "mu", "coherence", "flux", "linewidth", "seconds"}, {}};
  for (const ScalingPoint& p : fit.points) {
    const double scale = rate_scale(o, p.flux);
    t.rows.push_back({static_cast<long>(p.dim), p.mu, p.coherence, p.flux * scale, p.linewidth * scale,
                      o.no_timing ? 0.0 : p.seconds});
  }
  return {t, "csv", summary};
}

PropagatorKind parse_propagator(const std::string& name) {
  if (name == "sector") return PropagatorKind::sector;
  if (name == "krylov") return PropagatorKind::krylov;
  if (name == "dense") return PropagatorKind::dense;
  throw ValidationError("unknown --propagator '" + name + "'");
}

Output cmd_g1(const Options& o) {
  require_dim(o);
  if (o.points < 2) throw ValidationError("--points must be at least 2");
  if (!(o.s_max > 0.0)) throw ValidationError("--smax must be positive");
  LaserModel m = build_model(o.dim);
  coherence(m);
  const auto prop = make_propagator(m, parse_propagator(o.propagator));
  const G1Profile prof = delta_g1_profile(m, o.s_max, o.points, prop.get());
  const double scale = rate_scale(o, m.flux);
  Table t{{"s", "g1_model", "g1_ideal", "delta"}, {}};
  for (std::size_t i = 0; i < prof.s.size(); ++i) {
    t.rows.push_back({prof.s[i] / scale, prof.model[i], prof.ideal[i], prof.delta[i]});
  }
  return {t, "csv", "dim=" + std::to_string(m.dim) + " max_delta=" + fmt(prof.max_delta)};
}

Output cmd_g2max(const Options& o) {
  require_dim(o);
  if (o.grid < 2) throw ValidationError("--grid must be at least 2");
  LaserModel m = build_model(o.dim);
  const double c = coherence(m);
  std::cerr << progress_prefix() << "dim " << m.dim << " coherence " << short_fmt(c) << ", scanning " << o.grid
            << "^3 grid" << (o.no_refine ? "" : " with refinement") << "\n";
  DeltaG2Result r = max_delta_g2(m, o.grid, !o.no_refine);
  const double scale = rate_scale(o, m.flux);
  r.tau /= scale;
  r.argmax.s /= scale;
  r.argmax.s_prime /= scale;
  r.argmax.t_prime /= scale;
  r.argmax.t /= scale;
  Json j = to_json(r);
  j["coherence"] = c;
  j["inverse_sqrt_coherence"] = 1.0 / std::sqrt(c);
  return {j, "json",
          "dim=" + std::to_string(m.dim) + " delta=" + fmt(r.delta) + " corner_delta=" + fmt(r.corner_delta) +
              " c^-1/2=" + fmt(1.0 / std::sqrt(c))};
}

Output cmd_discrete(const Options& o) {
  require_dim(o);
  const LaserModel m = build_model(o.dim);
  const DiscreteModel dm = build_discrete(m, o.gamma);
  SolveOptions so;
  so.tol = o.tol;
  const DiscreteReport r = discrete_report(dm, so);
  return {to_json(r), "json",
          "dim=" + std::to_string(r.dim) + " gamma=" + fmt(r.gamma) + " discrete_coherence=" + fmt(r.discrete_coherence)};
}

Output cmd_bounds(const Options& o) {
  if (!(o.mu > 0.0)) throw ValidationError("--mu must be positive");
  const double h = heisenberg_bound(o.mu), s = sql_bound(o.mu);
  std::string summary = "heisenberg=" + short_fmt(h) + " sql=" + short_fmt(s);
  if (o.coherence > 0.0) {
    const BoundChain chain = bound_chain(o.mu, o.coherence);
    summary += std::string(" chain=") + (chain.satisfied ? "satisfied" : "violated") + " slack=" + short_fmt(chain.slack);
    return {to_json(chain), "json", summary};
  }
  Table t{{"mu", "heisenberg", "sql", "airy_zero", "mse_constant", "heisenberg_coefficient"}, {}};
  t.rows.push_back({o.mu, h, s, airy_zero(), mse_constant(), heisenberg_coefficient()});
  return {t, "csv", summary};
}

Output cmd_msse(const Options& o) {
  const double flux = o.flux > 0.0 ? o.flux : 1.0;
  if (!(o.linewidth > 0.0)) throw ValidationError("--linewidth must be positive");
  if ((o.tau > 0.0) == (o.sigma > 0.0)) throw ValidationError("give exactly one of --tau and --sigma");
  const HeterodyneSetup st = o.tau > 0.0 ? HeterodyneSetup{flux, o.linewidth, o.tau}
                                         : HeterodyneSetup::from_sigma(flux, o.linewidth, o.sigma);
  st.validate();
  const MsseTerms e = msse_terms(st);
  Table t{{"flux", "linewidth", "tau", "sigma", "sds", "ss", "mse"}, {}};
  std::vector<std::variant<double, long, std::string>> row{st.flux, st.linewidth, st.window, st.sigma(), e.sds, e.ss, e.mse};
  std::string summary = "mse=" + fmt(e.mse) + " sigma=" + fmt(st.sigma());
  if (o.quadrature) {
    const MsseTerms q = msse_quadrature(st, o.order);
    t.columns.push_back("mse_quadrature");
    row.push_back(q.mse);
    summary += " mse_quadrature=" + fmt(q.mse);
  }
  t.rows.push_back(row);
  return {t, "csv", summary};
}

Output cmd_asymmetry(const Options& o) {
  if (o.nbar.empty()) throw ValidationError("--nbar is required");
  const std::vector<GAsymmetry> values = parallel_map(o.nbar.size(), [&](std::size_t i) {
    const long cutoff = static_cast<long>(std::ceil(o.cutoff_factor * o.nbar[i]));
    return g_asymmetry(o.nbar[i], std::max(cutoff, 1L));
  });
  Table t{{"nbar", "asymmetry", "tail_bound", "cutoff"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.rows.push_back({o.nbar[i], values[i].value, values[i].tail_bound, values[i].cutoff});
  }
  std::string summary = "points=" + std::to_string(values.size());
  if (values.size() >= 2) {
    // Least-squares slope of A against ln(nbar).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x = std::log(o.nbar[i]), y = values[i].value;
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    summary += " slope=" + fmt((n * sxy - sx * sy) / (n * sxx - sx * sx));
  }
  return {t, "csv", summary};
}

Output cmd_control(const Options& o) {
  std::vector<int> dims = o.dims;
  if (dims.empty()) dims = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Precision p = parse_precision(o.precision);
  std::vector<GeneratorKind> kinds;
  if (o.which == "gain" || o.which == "both") kinds.push_back(GeneratorKind::gain);
  if (o.which == "loss" || o.which == "both") kinds.push_back(GeneratorKind::loss);
  if (kinds.empty()) throw ValidationError("--which must be gain, loss or both");
  for (int d : dims) {
    if (d < 2) throw ValidationError("control dimensions must be at least 2");
  }
  Table t{{"dim", "which", "residual", "precision"}, {}};
  double worst = 0.0;
  for (int d : dims) {
    const LaserModel m = build_model(d);
    for (GeneratorKind k : kinds) {
      const GeneratorReconstruction r = reconstruct_generator(m, k, p);
      worst = std::max(worst, r.residual);
      t.rows.push_back({static_cast<long>(d), to_string(k), r.residual, to_string(r.precision)});
    }
  }
  return {t, "csv", "rows=" + std::to_string(t.rows.size()) + " max_residual=" + fmt(worst)};
}

Output cmd_optimize(const Options& o) {
  require_dim(o);
  LaserModel ansatz = build_model(o.dim);
  const double ansatz_c = coherence(ansatz);
  const OptimizationResult r = optimize_loss_profile(o.dim, o.budget, o.seed);
  Json j;
  j["dim"] = o.dim;
  j["seed"] = o.seed;
  j["coherence"] = r.coherence;
  j["ansatz_coherence"] = ansatz_c;
  j["fidelity"] = r.fidelity;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["model"] = to_json(r.model);
  return {j, "json",
          "dim=" + std::to_string(o.dim) + " coherence=" + fmt(r.coherence) + " fidelity=" + fmt(r.fidelity)};
}

Json option_values(const CLI::App* app) {
  Json out;
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h") continue;
    const std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_type_size() == 0) out[key] = true;
      else if (res.size() == 1) out[key] = res.front();
      else out[key] = res;
    } else if (opt->get_type_size() == 0) {
      out[key] = false;
    } else {
      out[key] = opt->get_default_str();
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heisenberg-limited laser toolkit " + std::string(kVersion) + ". " + kTimeUnits, "hlaser"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "Cap on worker threads (default: hardware parallelism)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", o.out, "Write data here instead of standard output");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--flux", o.flux, "Beam flux defining the time unit (default: the model's own, about 1)")
      ->check(CLI::PositiveNumber);

  auto dim_opt = [&](CLI::App* sub) { return sub->add_option("--dim", o.dim, "Cavity dimension D")->required(); };
  auto tol_opt = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "Relative tolerance of the projected solve")->capture_default_str()->check(CLI::PositiveNumber);
  };

  CLI::App* model = app.add_subcommand("model", "Print the sin^4 model (JSON)");
  dim_opt(model);

  CLI::App* coh = app.add_subcommand("coherence", "Beam coherence of one model");
  dim_opt(coh);
  tol_opt(coh);
  coh->add_option("--route", o.route, "projected, tridiagonal or quadrature")->capture_default_str()
      ->check(CLI::IsMember({"projected", "tridiagonal", "quadrature"}));
  coh->add_option("--export-mm", o.export_mm, "Also write the Liouvillian in Matrix Market format");

  CLI::App* sweep = app.add_subcommand("sweep", "Coherence over several dimensions and a power-law fit");
  sweep->add_option("--dims", o.dims, "Comma-separated dimensions")->required()->delimiter(',');
  sweep->add_flag("--fit", o.fit, "Write the fit (JSON) instead of the points");
  sweep->add_option("--mu-min", o.mu_min, "Fit window lower edge in mu")->capture_default_str();
  sweep->add_option("--mu-max", o.mu_max, "Fit window upper edge in mu")->capture_default_str();
  sweep->add_flag("--no-timing", o.no_timing, "Write 0 in the seconds column (byte-stable output)");
  tol_opt(sweep);

  CLI::App* g1 = app.add_subcommand("g1", "First-order coherence curve against the ideal beam");
  dim_opt(g1);
  g1->add_option("--points", o.points, "Number of sample times")->capture_default_str();
  g1->add_option("--smax", o.s_max, "Largest time in units of 1 / linewidth")->capture_default_str();
  g1->add_option("--propagator", o.propagator, "sector, krylov or dense")->capture_default_str()
      ->check(CLI::IsMember({"sector", "krylov", "dense"}));

  CLI::App* g2 = app.add_subcommand("g2max", "Largest second-order deviation from the ideal beam");
  dim_opt(g2);
  g2->add_option("--grid", o.grid, "Lattice points per axis")->capture_default_str();
  g2->add_flag("--no-refine", o.no_refine, "Skip the simplex polish");

  CLI::App* disc = app.add_subcommand("discrete", "Discrete-time beam model report");
  dim_opt(disc);
  disc->add_option("--gamma", o.gamma, "Step amplitude gamma")->capture_default_str()->check(CLI::PositiveNumber);
  tol_opt(disc);

  CLI::App* bounds = app.add_subcommand("bounds", "Heisenberg and standard-quantum-limit bounds");
  bounds->add_option("--mu", o.mu, "Mean photon number in the cavity")->required();
  bounds->add_option("--coherence", o.coherence, "Also evaluate the bound chain for this coherence");

  CLI::App* msse = app.add_subcommand("msse", "Heterodyne filtering/retrofiltering mean-square error");
  msse->add_option("--linewidth", o.linewidth, "Linewidth l")->required();
  msse->add_option("--tau", o.tau, "Window length tau");
  msse->add_option("--sigma", o.sigma, "Dimensionless window tau sqrt(N l)");
  msse->add_flag("--quadrature", o.quadrature, "Also run the quadrature cross-check");
  msse->add_option("--order", o.order, "Gauss-Legendre order for --quadrature")->capture_default_str();

  CLI::App* asym = app.add_subcommand("asymmetry", "G-asymmetry of a phase-randomized thermal-like state");
  asym->add_option("--nbar", o.nbar, "Comma-separated mean photon numbers")->required()->delimiter(',');
  asym->add_option("--cutoff-factor", o.cutoff_factor, "Truncate the sum at this multiple of nbar")->capture_default_str();

  CLI::App* ctl = app.add_subcommand("control", "Generator reconstruction from the Vandermonde solve");
  ctl->add_option("--dims", o.dims, "Comma-separated dimensions (default 2..10)")->delimiter(',');
  ctl->add_option("--precision", o.precision, "double, extended or automatic")->capture_default_str()
      ->check(CLI::IsMember({"double", "extended", "automatic"}));
  ctl->add_option("--which", o.which, "gain, loss or both")->capture_default_str()->check(CLI::IsMember({"gain", "loss", "both"}));

  CLI::App* opt = app.add_subcommand("optimize", "Maximize coherence over loss profiles");
  dim_opt(opt);
  opt->add_option("--budget", o.budget, "Simplex iteration budget")->capture_default_str();
  opt->add_option("--seed", o.seed, "Seed for restart perturbations")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  Json config;
  config["subcommand"] = sub->get_name();
  config["global"] = option_values(&app);
  config["options"] = option_values(sub);

  try {
    if (o.threads > 0) set_max_threads(o.threads);
    const std::string name = sub->get_name();
    Output result;
    if (name == "model") result = cmd_model(o);
    else if (name == "coherence") result = cmd_coherence(o);
    else if (name == "sweep") result = cmd_sweep(o);
    else if (name == "g1") result = cmd_g1(o);
    else if (name == "g2max") result = cmd_g2max(o);
    else if (name == "discrete") result = cmd_discrete(o);
    else if (name == "bounds") result = cmd_bounds(o);
    else if (name == "msse") result = cmd_msse(o);
    else if (name == "asymmetry") result = cmd_asymmetry(o);
    else if (name == "control") result = cmd_control(o);
    else result = cmd_optimize(o);

    const std::string format = o.format.empty() ? result.default_format : o.format;
    std::string body;
    if (const Table* t = std::get_if<Table>(&result.data)) {
      body = format == "json" ? t->json().dump(2) + "\n" : t->csv();
    } else {
      if (format == "csv") throw ValidationError(name + " only writes JSON");
      body = std::get<Json>(result.data).dump(2) + "\n";
    }
    const std::string header = "# hlaser " + std::string(kVersion) + " " + config.dump() + "\n";
    if (o.out.empty()) {
      out << header << body;
    } else {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw ValidationError("cannot open --out file '" + o.out + "'");
      file << header << body;
      if (!file) throw ValidationError("failed writing '" + o.out + "'");
    }
    out << result.summary << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace hlaser::cli
