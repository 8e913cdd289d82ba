#include "spider/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "spider/cli_support.hpp"
#include "spider/osp.hpp"
#include "spider/simulator.hpp"

namespace spider::cli {

namespace {

struct RunConfig {
  // model block
  int n = 3;
  std::string p;  // empty = uniform
  double r = 0.5;
  std::string characteristics = "brownian";
  // output block
  std::string format = "table";
  std::string path;  // empty = stdout
  int precision = 6;
};

SpiderModel build_model(const RunConfig& cfg) {
  std::vector<double> p;
  if (cfg.p.empty()) {
    std::string frac = "1/" + std::to_string(cfg.n);
    for (int i = 0; i < cfg.n; ++i) p.push_back(parse_fraction(frac));
  } else {
    p = parse_probabilities(cfg.p);
  }
  if (static_cast<int>(p.size()) != cfg.n)
    throw CLI::ValidationError("--p", "expected " + std::to_string(cfg.n) +
                                          " probabilities");
  return make_spider_model(cfg.n, std::move(p), cfg.r,
                           characteristics_by_name(cfg.characteristics));
}

struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* out = &std::cout;

  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw std::runtime_error("cannot write to " + path);
    out = file.get();
  }
};

void emit(const RunConfig& cfg, const Table& t, std::ostream& out) {
  emit_table(t, parse_format(cfg.format), out, cfg.precision);
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> g;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) g.push_back(parse_fraction(item));
  return g;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(0.25 * i);
  return g;
}

// ---- subcommand bodies ------------------------------------------------

int cmd_green(const RunConfig& cfg, const std::string& from,
              const std::string& to, const std::string& grid_spec,
              int to_leg) {
  SpiderModel model = build_model(cfg);
  SpiderPoint x = parse_point(from);
  Sink sink(cfg.path);
  Table t;
  t.header = {"from", "to", "value"};
  if (!grid_spec.empty()) {
    for (double y : parse_grid(grid_spec)) {
      SpiderPoint p{y, to_leg};
      t.rows.push_back({format_point(x), format_point(p),
                        green_kernel(model, x, p).value});
    }
  } else {
    SpiderPoint p = parse_point(to);
    t.rows.push_back(
        {format_point(x), format_point(p), green_kernel(model, x, p).value});
  }
  emit(cfg, t, *sink.out);
  return 0;
}

int cmd_hit(const RunConfig& cfg, const std::string& from,
            const std::string& target, const std::string& grid_spec,
            int from_leg) {
  SpiderModel model = build_model(cfg);
  SpiderPoint tgt = parse_point(target);
  Sink sink(cfg.path);
  Table t;
  t.header = {"from", "target", "laplace"};
  if (!grid_spec.empty()) {
    for (double x : parse_grid(grid_spec)) {
      SpiderPoint p{x, from_leg};
      t.rows.push_back({format_point(p), format_point(tgt),
                        hitting_laplace(model, p, tgt)});
    }
  } else {
    SpiderPoint p = parse_point(from);
    t.rows.push_back(
        {format_point(p), format_point(tgt), hitting_laplace(model, p, tgt)});
  }
  emit(cfg, t, *sink.out);
  return 0;
}

int cmd_excessive_check(const RunConfig& cfg, const std::string& harmonic,
                        const std::string& minimal,
                        const std::string& grid_spec) {
  SpiderModel model = build_model(cfg);
  LegFunction f;
  if (!harmonic.empty()) {
    std::vector<double> a = parse_grid(harmonic);
    f.eval = [model, a](double x, int leg) {
      return harmonic_function(model, a, {x, leg});
    };
  } else if (!minimal.empty()) {
    Pole pole;
    if (minimal.rfind("inf@", 0) == 0) {
      pole = Pole::infinity_on_leg(std::stoi(minimal.substr(4)));
    } else {
      pole = Pole::at(parse_point(minimal));
    }
    f.eval = [model, pole](double x, int leg) {
      return minimal_excessive(model, {x, leg}, pole);
    };
  } else {
    throw CLI::ValidationError("excessive check",
                               "need --harmonic or --minimal");
  }
  std::vector<double> grid =
      grid_spec.empty() ? default_grid() : parse_grid(grid_spec);
  ExcessivityReport rep = is_excessive(model, f, grid);

  Sink sink(cfg.path);
  std::cout << "gluing value: " << format_sig(rep.gluing, cfg.precision)
            << "\nexcessive: " << (rep.excessive ? "yes" : "no") << '\n';
  for (const auto& note : rep.notes) std::cout << "note: " << note << '\n';

  Table t;
  t.header = {"leg", "x", "tail", "monotonicity_residual"};
  for (int leg = 1; leg <= model.n; ++leg) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double x : grid) {
      double tail = leg_dplus(model, f, x, leg) * model.phi(x) -
                    model.phi_dS(x) * f.eval(x, leg);
      double mono = std::isnan(prev) ? 0.0 : std::max(0.0, tail - prev);
      t.rows.push_back({static_cast<long long>(leg), x, tail, mono});
      prev = tail;
    }
  }
  emit(cfg, t, *sink.out);
  return rep.excessive ? 0 : 2;
}

void emit_solution(const RunConfig& cfg, const SpiderModel& model,
                   const StoppingSolution& sol, std::ostream& out) {
  std::cout << "case: " << (sol.dispatch_case ? std::string(1, sol.dispatch_case)
                                              : std::string("-"))
            << "\nthresholds:";
  for (double z : sol.thresholds)
    std::cout << ' ' << format_sig(z, cfg.precision);
  std::cout << "\ngluing value of V: "
            << format_sig(sol.diagnostics.gluing_value, cfg.precision) << '\n';
  if (!sol.diagnostics.paper_validated)
    std::cout << "note: parameter range has no published reference values\n";

  Table th;
  th.header = {"leg", "threshold"};
  for (size_t i = 0; i < sol.thresholds.size(); ++i)
    th.rows.push_back({static_cast<long long>(i + 1), sol.thresholds[i]});
  emit(cfg, th, out);

  Table diag;
  diag.header = {"diagnostic", "value"};
  diag.rows.push_back({std::string("gluing"), sol.diagnostics.gluing_value});
  for (size_t i = 0; i < sol.diagnostics.smooth_fit_residuals.size(); ++i)
    diag.rows.push_back({"smooth_fit_" + std::to_string(i + 1),
                         sol.diagnostics.smooth_fit_residuals[i]});
  for (size_t i = 0; i < sol.diagnostics.boundary_residuals.size(); ++i)
    diag.rows.push_back({"boundary_residual_" + std::to_string(i + 1),
                         sol.diagnostics.boundary_residuals[i]});
  emit(cfg, diag, out);

  Table vg;
  vg.header = {"leg", "x", "value"};
  vg.rows.push_back({static_cast<long long>(1), 0.0, sol.value.eval(0.0, 1)});
  for (int leg = 1; leg <= model.n; ++leg)
    for (double x : default_grid())
      vg.rows.push_back({static_cast<long long>(leg), x, sol.value.eval(x, leg)});
  emit(cfg, vg, out);
}

int cmd_solve(const RunConfig& cfg, const std::string& family,
              const std::string& a_spec) {
  SpiderModel model = build_model(cfg);
  StoppingSolution sol;
  if (family == "example71") {
    sol = solve_spider_example71(model);
  } else {
    std::vector<double> A = parse_grid(a_spec);
    sol = solve_threshold_system(model,
                                 family == "linear" ? PayoffFamily::linear
                                                    : PayoffFamily::quadratic,
                                 A);
  }
  Sink sink(cfg.path);
  emit_solution(cfg, model, sol, *sink.out);
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& mode,
                 const SimConfig& sim, const std::string& from,
                 const std::string& target, const std::string& family,
                 const std::string& a_spec) {
  SpiderModel model = build_model(cfg);
  SpiderPoint start = parse_point(from);
  EstimateWithError est;
  if (mode == "hit") {
    est = simulate_hitting_laplace(model, start, parse_point(target), sim);
  } else if (mode == "value") {
    StoppingSolution sol;
    if (family == "example71") {
      sol = solve_spider_example71(model);
    } else {
      sol = solve_threshold_system(model,
                                   family == "linear" ? PayoffFamily::linear
                                                      : PayoffFamily::quadratic,
                                   parse_grid(a_spec));
    }
    LegFunction payoff =
        family == "example71"
            ? connected_example_payoff()
            : threshold_family_payoff(family == "linear"
                                          ? PayoffFamily::linear
                                          : PayoffFamily::quadratic,
                                      parse_grid(a_spec));
    est = simulate_discounted_stop(model, start, sol.region, payoff, sim);
  } else {
    throw CLI::ValidationError("--mode", "expected 'hit' or 'value'");
  }
  Sink sink(cfg.path);
  Table t;
  t.header = {"estimate", "std_error", "censor_rate"};
  t.rows.push_back({est.mean, est.std_error, est.censor_rate});
  emit(cfg, t, *sink.out);
  if (est.censor_warning)
    std::cerr << "warning: " << est.censor_rate * 100.0
              << "% of paths hit the horizon\n";
  if (est.target_snapped)
    std::cerr << "warning: target snapped onto the step lattice\n";
  return 0;
}

struct ReproCheck {
  std::string name;
  double computed, reference, tol;
};

int cmd_reproduce(const RunConfig& cfg) {
  std::vector<ReproCheck> checks;

  {  // linear thresholds, n=3, r=1/2, A=(1,2,3)
    SpiderModel m = brownian_spider(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.5);
    StoppingSolution sol =
        solve_threshold_system(m, PayoffFamily::linear, {1.0, 2.0, 3.0});
    const double ref[] = {1.4816, 1.2041, 1.0628};
    for (int i = 0; i < 3; ++i)
      checks.push_back({"linear threshold z" + std::to_string(i + 1),
                        sol.thresholds[static_cast<size_t>(i)], ref[i], 5e-4});

    StoppingSolution qol =
        solve_threshold_system(m, PayoffFamily::quadratic, {1.0, 2.0, 3.0});
    const double qref[] = {2.16987, 2.06543, 2.02250};
    for (int i = 0; i < 3; ++i)
      checks.push_back({"quadratic threshold z" + std::to_string(i + 1),
                        qol.thresholds[static_cast<size_t>(i)], qref[i], 5e-5});
  }
  {  // Green kernel at the vertex: 1/theta
    for (double r : {0.5, 2.0, 8.0}) {
      SpiderModel m = brownian_spider(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, r);
      checks.push_back({"g_r(0,0), r=" + format_sig(r, 3),
                        green_kernel(m, vertex(), vertex()).value,
                        1.0 / std::sqrt(2.0 * r), 1e-10});
    }
  }
  {  // connected-region closed-form thresholds at r=8 and the case-c origin
    SpiderModel m = brownian_spider(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 8.0);
    StoppingSolution sol = solve_spider_example71(m);
    checks.push_back({"example71 x2*, r=8", sol.thresholds[0], 1.75, 1e-8});
    checks.push_back({"example71 x3*, r=8", sol.thresholds[1], 0.25, 1e-8});
    SpiderModel mc = brownian_spider(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.125);
    StoppingSolution solc = solve_spider_example71(mc);
    checks.push_back({"example71 z1*, r=1/8", solc.thresholds[0], 0.0, 1e-8});
  }
  {  // two-leg reduction: kernel and hitting Laplace of standard BM
    SpiderModel m = brownian_spider(2, {0.5, 0.5}, 0.5);
    double x = 0.7, y = 0.3;
    checks.push_back({"2-leg kernel e^{-|x+y|}",
                      green_kernel(m, {x, 1}, {y, 2}).value,
                      std::exp(-(x + y)), 1e-10});
    checks.push_back({"hit Laplace 0 -> (1,1), r=1/2",
                      hitting_laplace(m, vertex(), {1.0, 1}), std::exp(-1.0),
                      1e-10});
    SimConfig sim;
    sim.step = 0.02;
    sim.paths = 40000;
    sim.seed = 20240817;
    EstimateWithError est = simulate_hitting_laplace(m, vertex(), {1.0, 1}, sim);
    checks.push_back({"MC hit Laplace (3 SE)", est.mean, std::exp(-1.0),
                      3.0 * est.std_error});
  }

  Sink sink(cfg.path);
  Table t;
  t.header = {"check", "computed", "reference", "tolerance", "status"};
  bool all = true;
  for (const auto& c : checks) {
    bool ok = std::abs(c.computed - c.reference) <= c.tol;
    all = all && ok;
    t.rows.push_back({c.name, c.computed, c.reference, c.tol,
                      std::string(ok ? "pass" : "FAIL")});
  }
  emit(cfg, t, *sink.out);
  return all ? 0 : 2;
}

}  // namespace

int run(int argc, const char* const* argv) {
  RunConfig cfg;

  // a config file provides defaults; explicit flags override them
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        auto kv = load_config(argv[i + 1]);
        auto get = [&](const char* key, auto& var) {
          auto it = kv.find(key);
          if (it == kv.end()) return;
          std::istringstream is(it->second);
          is >> var;
        };
        get("model.n", cfg.n);
        get("model.p", cfg.p);
        get("model.r", cfg.r);
        get("model.characteristics", cfg.characteristics);
        get("output.format", cfg.format);
        get("output.path", cfg.path);
        get("output.precision", cfg.precision);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      }
    }
  }

  CLI::App app{"diffusion-spider stopping toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--n", cfg.n, "number of legs");
  app.add_option("--p", cfg.p, "leg probabilities, e.g. 1/3,1/3,1/3");
  app.add_option("--r", cfg.r, "discount rate (> 0)");
  app.add_option("--characteristics", cfg.characteristics,
                 "diffusion characteristics name");
  app.add_option("--format", cfg.format, "table | csv");
  app.add_option("--output", cfg.path, "output path (default stdout)");
  app.add_option("--precision", cfg.precision, "significant digits");

  std::string from = "0", to = "0", target = "0", grid_spec;
  int other_leg = 1;
  auto* green = app.add_subcommand("green", "resolvent kernel values");
  green->add_option("--from", from, "point x@leg, 0 for the vertex");
  green->add_option("--to", to, "point x@leg");
  green->add_option("--grid", grid_spec, "x values for a CSV grid");
  green->add_option("--to-leg", other_leg, "target leg for --grid");

  auto* hit = app.add_subcommand("hit", "hitting-time Laplace transforms");
  hit->add_option("--from", from, "start point");
  hit->add_option("--target", target, "target point");
  hit->add_option("--grid", grid_spec, "start x values for a CSV grid");
  hit->add_option("--from-leg", other_leg, "start leg for --grid");

  std::string harmonic, minimal;
  auto* exc = app.add_subcommand("excessive", "excessivity diagnostics");
  auto* exc_check = exc->add_subcommand("check", "run the excessivity test");
  exc_check->add_option("--harmonic", harmonic, "harmonic coefficients a1,a2,...");
  exc_check->add_option("--minimal", minimal,
                        "pole of a minimal excessive function (x@leg, 0, inf@leg)");
  exc_check->add_option("--grid", grid_spec, "test grid");
  exc->require_subcommand(1);

  std::string a_spec = "1,2,3";
  auto* solve = app.add_subcommand("solve", "optimal stopping solvers");
  solve->require_subcommand(1);
  auto* s71 = solve->add_subcommand("example71", "connected-region payoff");
  auto* slin = solve->add_subcommand("linear", "payoff g = A_i x");
  slin->add_option("--A", a_spec, "payoff slopes a1,a2,...");
  auto* squad = solve->add_subcommand("quadratic", "payoff g = A_i x^2");
  squad->add_option("--A", a_spec, "payoff coefficients a1,a2,...");

  SimConfig sim;
  std::string sim_mode = "hit", sim_family = "linear";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
  simulate->add_option("--mode", sim_mode, "hit | value");
  simulate->add_option("--step", sim.step, "lattice step h");
  simulate->add_option("--paths", sim.paths, "number of paths");
  simulate->add_option("--horizon", sim.horizon, "time cap");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_flag("--antithetic", sim.antithetic, "antithetic pairing");
  simulate->add_flag("!--no-parallel", sim.parallel, "disable threading");
  simulate->add_option("--from", from, "start point");
  simulate->add_option("--target", target, "target point (mode hit)");
  simulate->add_option("--family", sim_family,
                       "linear | quadratic | example71 (mode value)");
  simulate->add_option("--A", a_spec, "payoff coefficients (mode value)");

  auto* repro =
      app.add_subcommand("reproduce", "recompute every published number");

  // let model/output flags appear after the subcommand as well
  for (auto* sub : {green, hit, exc, exc_check, solve, s71, slin, squad,
                    simulate, repro})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (green->parsed()) return cmd_green(cfg, from, to, grid_spec, other_leg);
    if (hit->parsed()) return cmd_hit(cfg, from, target, grid_spec, other_leg);
    if (exc->parsed())
      return cmd_excessive_check(cfg, harmonic, minimal, grid_spec);
    if (solve->parsed()) {
      std::string family = s71->parsed()      ? "example71"
                           : slin->parsed()   ? "linear"
                                              : "quadratic";
      (void)squad;
      return cmd_solve(cfg, family, a_spec);
    }
    if (simulate->parsed())
      return cmd_simulate(cfg, sim_mode, sim, from, target, sim_family, a_spec);
    if (repro->parsed()) return cmd_reproduce(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace spider::cli
