#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "geodyn/cli.hpp"
#include "geodyn/error.hpp"
#include "geodyn/expr.hpp"
#include "geodyn/modified.hpp"
#include "geodyn/parallel.hpp"
#include "geodyn/variational_check.hpp"

namespace geodyn {

namespace {

struct SeedOptions {
  std::optional<double> ecc;
  std::vector<double> x0;
  std::vector<double> v0;
};

void add_seed_options(CLI::App* app, SeedOptions& seed) {
  app->add_option("--ecc", seed.ecc, "Seed (1-e, 0, 0, sqrt((1+e)/(1-e)))")
      ->check(CLI::Range(0.0, 0.99));
  app->add_option("--x0", seed.x0, "Initial position x1 x2")->expected(2);
  app->add_option("--v0", seed.v0, "Initial velocity (momentum u for relativistic runs)")->expected(2);
}

PhaseState kepler_seed(const SeedOptions& seed, PhaseState fallback) {
  if (seed.ecc) {
    const double e = *seed.ecc;
    return {vec2(1.0 - e, 0.0), vec2(0.0, std::sqrt((1.0 + e) / (1.0 - e)))};
  }
  if (!seed.x0.empty() || !seed.v0.empty()) {
    if (seed.x0.size() != 2 || seed.v0.size() != 2)
      throw InvalidArgumentError("--x0 and --v0 must be given together");
    return {vec2(seed.x0[0], seed.x0[1]), vec2(seed.v0[0], seed.v0[1])};
  }
  return fallback;
}

SplitPotential parse_split(const std::string& text) {
  if (text == "single") return SplitPotential::kepler_single();
  double w = 0.0;
  try {
    std::size_t used = 0;
    w = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw InvalidArgumentError("--split takes a weight in [0, 1] or 'single'");
  }
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgumentError("--split weight must lie in [0, 1]");
  return SplitPotential::kepler(w);
}

// Writes to the named file, or to `out` when the path is empty or "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidArgumentError("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

struct RunArgs {
  std::string model = "kepler";
  std::string method;
  SeedOptions seed;
  std::optional<double> gamma;
  double c = 1.0;
  double h = 0.05;
  long steps = 4000;
  std::string split = "0.5";
  std::string form = "one-step";
  std::string format = "csv";
  std::string plot = "energy";
  bool log_y = false;
  std::string out;
};

void output_svg(const std::vector<Series>& series, const SvgOptions& opt, const std::string& path,
                std::ostream& out) {
  Sink sink(path, out);
  sink.stream() << render_svg(series, opt);
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  if (a.steps < 1) throw InvalidArgumentError("--steps must be at least 1");
  if (!(a.h > 0.0)) throw InvalidArgumentError("--h must be positive");
  if (a.model == "kepler") {
    const Method method = parse_method(a.method.empty() ? "vi2" : a.method);
    const PhaseState s0 = kepler_seed(a.seed, {vec2(0.4, 0.0), vec2(0.0, 2.0)});
    const TrajectoryRecord rec =
        run(method, s0, a.h, a.steps, parse_split(a.split), parse_form(a.form), true);
    if (a.format == "csv") {
      Sink sink(a.out, out);
      write_kepler_csv(rec, sink.stream());
      return exit_code::kOk;
    }
    Series s{rec.method, {}};
    SvgOptions opt;
    opt.log_y = a.log_y;
    opt.x_label = "t";
    const ConservedSet& c0 = rec.samples.front().c;
    for (const Sample& smp : rec.samples) {
      const ConservedSet& c = smp.c;
      if (a.plot == "orbit") s.points.emplace_back(smp.s.x(0), smp.s.x(1));
      else if (a.plot == "energy") s.points.emplace_back(smp.t, std::abs(c.H - c0.H));
      else if (a.plot == "m") s.points.emplace_back(smp.t, std::abs(c.m - c0.m));
      else if (a.plot == "ecc") s.points.emplace_back(smp.t, std::abs(c.ecc - c0.ecc));
      else if (a.plot == "angle")
        s.points.emplace_back(smp.t, std::remainder(c.omega - c0.omega, 2.0 * std::numbers::pi));
      else throw InvalidArgumentError("unknown plot '" + a.plot + "'");
    }
    opt.title = rec.method + ": " + a.plot;
    if (a.plot == "orbit") {
      opt.x_label = "x1";
      opt.y_label = "x2";
    } else {
      opt.y_label = a.plot == "angle" ? "angle - angle0" : "|" + a.plot + " - " + a.plot + "0|";
    }
    output_svg({s}, opt, a.out, out);
    return exit_code::kOk;
  }
  if (a.model != "relativistic") throw InvalidArgumentError("unknown model '" + a.model + "'");
  if (!(a.c > 0.0)) throw InvalidArgumentError("--c must be positive");
  const RelMethod method = parse_rel_method(a.method.empty() ? "k2" : a.method);
  if (a.seed.ecc) throw InvalidArgumentError("--ecc applies to the kepler model only");
  Vec x = vec2(1.0, 0.0);
  Vec u = vec2(0.0, 1.2);
  if (!a.seed.x0.empty() || !a.seed.v0.empty()) {
    if (a.seed.x0.size() != 2 || a.seed.v0.size() != 2)
      throw InvalidArgumentError("--x0 and --v0 must be given together");
    x = vec2(a.seed.x0[0], a.seed.x0[1]);
    u = vec2(a.seed.v0[0], a.seed.v0[1]);
  }
  // Map the c-unit problem onto c = 1: x c², t c³, u / c; γ is dimensionless.
  const double c = a.c;
  ExtPhaseState s0 = on_shell(x * c * c, u / c);
  if (a.gamma) s0.gamma = *a.gamma;
  std::vector<ExtSample> samples = run_relativistic(method, s0, a.h * c * c * c, a.steps);
  for (ExtSample& smp : samples) {
    smp.tau /= c * c * c;
    smp.s.t /= c * c * c;
    smp.s.x /= c * c;
    smp.s.u *= c;
    smp.H *= c * c;
  }
  if (a.format == "csv") {
    Sink sink(a.out, out);
    write_relativistic_csv(samples, sink.stream());
    return exit_code::kOk;
  }
  Series s{to_string(method), {}};
  SvgOptions opt;
  opt.log_y = a.log_y;
  opt.title = std::string(to_string(method)) + ": " + a.plot;
  if (a.plot == "orbit") {
    for (const auto& smp : samples) s.points.emplace_back(smp.s.x(0), smp.s.x(1));
    opt.x_label = "x1";
    opt.y_label = "x2";
  } else if (a.plot == "energy") {
    for (const auto& smp : samples) s.points.emplace_back(smp.tau, std::abs(smp.H - samples.front().H));
    opt.x_label = "tau";
    opt.y_label = "|H - H0|";
  } else {
    throw InvalidArgumentError("relativistic plots are 'orbit' or 'energy'");
  }
  output_svg({s}, opt, a.out, out);
  return exit_code::kOk;
}

struct ConvergenceArgs {
  std::vector<std::string> methods{"sym-euler", "sv", "vi1", "vi2"};
  SeedOptions seed;
  double h0 = 0.5;
  int levels = 6;
  std::string metric = "all";
  std::string split = "0.5";
  std::string format = "csv";
  std::string out;
};

int cmd_convergence(const ConvergenceArgs& a, std::ostream& out, std::ostream& err) {
  if (a.metric != "all" && a.metric != "ecc" && a.metric != "angle" && a.metric != "position")
    throw InvalidArgumentError("--metric must be all, ecc, angle or position");
  const PhaseState seed = kepler_seed(a.seed, {vec2(-3.0, 0.0), vec2(0.0, 0.45)});
  const SplitPotential split = parse_split(a.split);
  const std::vector<double> hs = halving_sequence(a.h0, a.levels);
  std::vector<Method> methods;
  for (const auto& m : a.methods) methods.push_back(parse_method(m));
  orbit_elements(seed);

  const std::size_t nh = hs.size();
  std::vector<PeriodDrift> cells(methods.size() * nh);
  parallel_for(cells.size(), default_workers(), [&](std::size_t k) {
    cells[k] = one_period_drift(methods[k / nh], seed, hs[k % nh], split);
  });
  if (nh < 2) err << "warning: a single step size cannot be fitted; slope columns left empty\n";

  const bool all = a.metric == "all";
  const bool want_ecc = all || a.metric == "ecc";
  const bool want_angle = all || a.metric == "angle";
  const bool want_pos = all || a.metric == "position";
  const auto column = [&](std::size_t mi, int which) {
    std::vector<double> v;
    for (std::size_t i = 0; i < nh; ++i) {
      const PeriodDrift& d = cells[mi * nh + i];
      v.push_back(std::abs(which == 0 ? d.d_ecc : which == 1 ? d.d_angle : d.position_error));
    }
    return v;
  };
  const auto slope = [&](std::size_t mi, int which) -> std::string {
    if (nh < 2) return "";
    try {
      return format_double(fit_log_slope(hs, column(mi, which)));
    } catch (const InvalidArgumentError&) {
      return "";
    }
  };

  if (a.format == "svg") {
    const int which = a.metric == "angle" ? 1 : a.metric == "position" ? 2 : 0;
    std::vector<Series> series;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      Series s{to_string(methods[mi]), {}};
      const auto col = column(mi, which);
      for (std::size_t i = 0; i < nh; ++i) s.points.emplace_back(hs[i], col[i]);
      series.push_back(std::move(s));
    }
    SvgOptions opt;
    opt.log_x = opt.log_y = true;
    opt.title = "per-period drift";
    opt.x_label = "h";
    opt.y_label = which == 0 ? "|d ecc|" : which == 1 ? "|d angle|" : "position error";
    output_svg(series, opt, a.out, out);
    return exit_code::kOk;
  }

  Sink sink(a.out, out);
  std::ostream& o = sink.stream();
  o << "method,h,steps";
  if (want_ecc) o << ",d_ecc";
  if (want_angle) o << ",d_angle";
  if (want_pos) o << ",pos_error";
  o << '\n';
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t i = 0; i < nh; ++i) {
      const PeriodDrift& d = cells[mi * nh + i];
      o << to_string(methods[mi]) << ',' << format_double(hs[i]) << ',' << d.steps;
      if (want_ecc) o << ',' << format_double(d.d_ecc);
      if (want_angle) o << ',' << format_double(d.d_angle);
      if (want_pos) o << ',' << format_double(d.position_error);
      o << '\n';
    }
  }
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    o << to_string(methods[mi]) << ",slope,";
    if (want_ecc) o << ',' << slope(mi, 0);
    if (want_angle) o << ',' << slope(mi, 1);
    if (want_pos) o << ',' << slope(mi, 2);
    o << '\n';
  }
  return exit_code::kOk;
}

struct CheckArgs {
  std::string system;
  std::string file;
  std::string checker = "auto";
  int samples = 64;
  double delta = 1e-5;
  double tolerance = 1e-4;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  if (a.system.empty() == a.file.empty())
    throw InvalidArgumentError("give exactly one of a built-in system id or --file");
  SecondOrderSystem sys;
  if (!a.file.empty()) {
    try {
      sys = load_system_file(a.file);
    } catch (const ParseError& e) {
      err << a.file << ':' << e.what() << '\n';
      return exit_code::kUsage;
    }
  } else {
    sys = builtin_system(a.system);
  }
  const auto cloud = sample_cloud(sys, a.samples);
  CheckOptions opt;
  opt.delta = a.delta;
  opt.tolerance = a.tolerance;
  CheckReport rep;
  if (a.checker == "auto") rep = check_system(sys, cloud, opt);
  else if (a.checker == "general") rep = check_general(sys, cloud, opt);
  else if (a.checker == "constant-mass") rep = check_constant_mass(sys, cloud, opt);
  else if (a.checker == "velocity-mass") rep = check_velocity_mass(sys, cloud, opt);
  else throw InvalidArgumentError("unknown checker '" + a.checker + "'");
  out << "system: " << rep.system << '\n';
  out << "checker: " << rep.checker << '\n';
  out << "samples: " << cloud.size() << '\n';
  out << "tolerance: " << format_double(rep.tolerance) << '\n';
  for (const auto& c : rep.conditions) {
    out << "condition (" << c.name << ") " << (c.pass ? "PASS" : "FAIL")
        << " residual=" << format_double(c.residual) << "  " << c.description << '\n';
  }
  out << (rep.pass ? "PASS" : "FAIL") << '\n';
  return rep.pass ? exit_code::kOk : exit_code::kCheckFailed;
}

struct ModifiedArgs {
  bool linear = false;
  double lambda = 1.0;
  double h = 0.1;
  int k_max = 20;
  std::string drift;
  std::string metric = "all";
  SeedOptions seed;
  double h0 = 0.5;
  int levels = 6;
  std::string split = "0.5";
};

int cmd_modified(const ModifiedArgs& a, std::ostream& out, std::ostream& err) {
  if (a.linear == !a.drift.empty()) throw InvalidArgumentError("give exactly one of --linear or --drift");
  if (a.linear) {
    const double omega = linear_dispersion(a.lambda, a.h);
    const SeriesResult series = linear_modified_series(a.lambda, a.h, a.k_max);
    const double measured = measured_linear_frequency(a.lambda, a.h);
    out << "quantity,value\n";
    out << "series_omega2," << format_double(series.value) << '\n';
    out << "dispersion_omega2," << format_double(omega * omega) << '\n';
    out << "series_omega," << format_double(std::sqrt(series.value)) << '\n';
    out << "dispersion_omega," << format_double(omega) << '\n';
    out << "measured_omega," << format_double(measured) << '\n';
    out << "series_vs_dispersion," << format_double(std::abs(series.value - omega * omega)) << '\n';
    return exit_code::kOk;
  }
  const Method m = parse_method(a.drift);
  const PhaseState seed = kepler_seed(a.seed, {vec2(-3.0, 0.0), vec2(0.0, 0.45)});
  const SplitPotential split = parse_split(a.split);
  const std::vector<double> hs = halving_sequence(a.h0, a.levels);
  if (hs.size() < 2) err << "warning: a single step size cannot be fitted\n";
  std::vector<DriftMetric> metrics;
  if (a.metric == "all" || a.metric == "ecc") metrics.push_back(DriftMetric::Ecc);
  if (a.metric == "all" || a.metric == "angle") metrics.push_back(DriftMetric::Angle);
  if (metrics.empty()) throw InvalidArgumentError("--metric must be all, ecc or angle");
  const DriftPrediction pred = predicted_drift(m, seed, hs.front(), split);
  out << "method,metric,predicted_leading_term_zero,predicted_per_period_h0,predicted_order,measured_order\n";
  std::vector<DriftEstimate> ests;
  for (DriftMetric metric : metrics) {
    const DriftEstimate est = measured_drift_order(m, metric, seed, hs, split, default_workers());
    const bool ecc = metric == DriftMetric::Ecc;
    out << to_string(m) << ',' << to_string(metric) << ','
        << ((ecc ? pred.ecc_leading_zero : pred.angle_leading_zero) ? "yes" : "no") << ','
        << format_double(ecc ? pred.d_ecc : pred.d_angle) << ',' << est.predicted_order << ','
        << (hs.size() >= 2 ? format_double(est.fitted_order) : "") << '\n';
    ests.push_back(est);
  }
  out << "\nmetric,h,measured_drift\n";
  for (const auto& est : ests)
    for (std::size_t i = 0; i < est.h.size(); ++i)
      out << to_string(est.metric) << ',' << format_double(est.h[i]) << ','
          << format_double(est.drift[i]) << '\n';
  return exit_code::kOk;
}


// Expands `--config path` after the subcommand into `--key value...` tokens
// read from a key=value file. Keys also given on the command line are skipped,
// so the command line wins. '#' starts a comment.
std::vector<std::string> expand_config(std::vector<std::string> args, const std::vector<std::string>& subcommands) {
  std::size_t sub = 1;
  while (sub < args.size() &&
         std::find(subcommands.begin(), subcommands.end(), args[sub]) == subcommands.end())
    ++sub;
  if (sub >= args.size()) return args;
  std::string path;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InvalidArgumentError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open config file '" + path + "'");
  const auto given = [&](const std::string& key) {
    for (std::size_t i = sub + 1; i < args.size(); ++i)
      if (args[i] == "--" + key || args[i].rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> injected;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string first;
    if (!(words >> first)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, static_cast<int>(line.find(first)) + 1, "expected key = value");
    std::string key;
    std::istringstream(line.substr(0, eq)) >> key;
    if (key.empty()) throw ParseError(lineno, static_cast<int>(eq) + 1, "missing key before '='");
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key == "config") throw ParseError(lineno, static_cast<int>(line.find(key)) + 1, "config files do not nest");
    if (given(key)) continue;
    std::vector<std::string> values;
    std::istringstream rest(line.substr(eq + 1));
    for (std::string v; rest >> v;) values.push_back(v);
    if (values.size() == 1 && values[0] == "false") continue;
    injected.push_back("--" + key);
    if (values.size() == 1 && values[0] == "true") continue;
    injected.insert(injected.end(), values.begin(), values.end());
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-preserving Kepler integrators and variational checks", "geodyn"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  RunArgs ra;
  CLI::App* run_cmd = app.add_subcommand("run", "Integrate one trajectory and write CSV or SVG");
  run_cmd->add_option("--model", ra.model, "kepler | relativistic")->capture_default_str();
  run_cmd->add_option("--method", ra.method,
                      "kepler: sym-euler | sv | vi1 | vi1-adjoint | vi2 | vi2-flipped (default vi2); "
                      "relativistic: k1 | k1-adjoint | k2 | k2-flipped | del (default k2)");
  add_seed_options(run_cmd, ra.seed);
  run_cmd->add_option("--gamma", ra.gamma, "Initial gamma (default: mass shell)");
  run_cmd->add_option("--c", ra.c, "Speed of light for relativistic runs")->capture_default_str();
  run_cmd->add_option("--h", ra.h, "Step size")->capture_default_str();
  run_cmd->add_option("--steps", ra.steps, "Number of steps")->capture_default_str();
  run_cmd->add_option("--split", ra.split, "Split weight w of (w, 1-w), or 'single'")->capture_default_str();
  run_cmd->add_option("--form", ra.form, "one-step | del")->capture_default_str();
  run_cmd->add_option("--format", ra.format, "csv | svg")
      ->check(CLI::IsMember({"csv", "svg"}))
      ->capture_default_str();
  run_cmd->add_option("--plot", ra.plot, "SVG series: energy | m | ecc | angle | orbit")->capture_default_str();
  run_cmd->add_flag("--logy", ra.log_y, "Logarithmic y axis in SVG output");
  run_cmd->add_option("--out", ra.out, "Output path (default stdout)");

  ConvergenceArgs ca;
  CLI::App* conv_cmd = app.add_subcommand("convergence", "Per-period drift over a halving sweep of h");
  conv_cmd->add_option("--methods", ca.methods, "Methods to sweep")->capture_default_str();
  add_seed_options(conv_cmd, ca.seed);
  conv_cmd->add_option("--h0", ca.h0, "Largest step size")->capture_default_str();
  conv_cmd->add_option("--levels", ca.levels, "Number of step sizes h0, h0/2, ...")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  conv_cmd->add_option("--metric", ca.metric, "all | ecc | angle | position")->capture_default_str();
  conv_cmd->add_option("--split", ca.split, "Split weight w of (w, 1-w), or 'single'")->capture_default_str();
  conv_cmd->add_option("--format", ca.format, "csv | svg")
      ->check(CLI::IsMember({"csv", "svg"}))
      ->capture_default_str();
  conv_cmd->add_option("--out", ca.out, "Output path (default stdout)");

  CheckArgs ka;
  CLI::App* check_cmd = app.add_subcommand("check", "Helmholtz conditions of a second-order system");
  check_cmd->add_option("system", ka.system, "Built-in system id");
  check_cmd->add_option("--file", ka.file, "System definition file");
  check_cmd->add_option("--checker", ka.checker, "auto | general | constant-mass | velocity-mass")
      ->capture_default_str();
  check_cmd->add_option("--samples", ka.samples, "Sample points")->check(CLI::PositiveNumber)->capture_default_str();
  check_cmd->add_option("--delta", ka.delta, "Finite-difference step")->capture_default_str();
  check_cmd->add_option("--tol", ka.tolerance, "Pass tolerance")->capture_default_str();

  ModifiedArgs ma;
  CLI::App* mod_cmd = app.add_subcommand("modified", "Modified-equation demos and drift orders");
  mod_cmd->add_flag("--linear", ma.linear, "Linear central-difference scheme frequencies");
  mod_cmd->add_option("--lambda", ma.lambda, "Stiffness of x'' = -lambda x")->capture_default_str();
  mod_cmd->add_option("--h", ma.h, "Step size of the linear demo")->capture_default_str();
  mod_cmd->add_option("--kmax", ma.k_max, "Series terms")->check(CLI::PositiveNumber)->capture_default_str();
  mod_cmd->add_option("--drift", ma.drift, "Method whose LRL drift to predict and measure");
  mod_cmd->add_option("--metric", ma.metric, "all | ecc | angle")->capture_default_str();
  add_seed_options(mod_cmd, ma.seed);
  mod_cmd->add_option("--h0", ma.h0, "Largest step size of the sweep")->capture_default_str();
  mod_cmd->add_option("--levels", ma.levels, "Number of step sizes")->check(CLI::PositiveNumber)->capture_default_str();
  mod_cmd->add_option("--split", ma.split, "Split weight w of (w, 1-w), or 'single'")->capture_default_str();

  std::vector<std::string> args(argv, argv + argc);
  // Listed for --help only; expand_config consumes the option before parsing.
  std::string config_path;
  for (CLI::App* sub : {run_cmd, conv_cmd, check_cmd, mod_cmd})
    sub->add_option("--config", config_path, "Read options from a key=value file");

  try {
    args = expand_config(std::move(args), {"run", "convergence", "check", "modified"});
  } catch (const ParseError& e) {
    err << "config: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(ra, out);
    if (*conv_cmd) return cmd_convergence(ca, out, err);
    if (*check_cmd) return cmd_check(ka, out, err);
    if (*mod_cmd) return cmd_modified(ma, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const StabilityError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  return exit_code::kUsage;
}

}  // namespace geodyn
