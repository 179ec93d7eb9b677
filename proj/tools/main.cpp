#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "pucci/classify.hpp"
#include "pucci/field.hpp"
#include "pucci/flow.hpp"
#include "pucci/io.hpp"
#include "pucci/params.hpp"
#include "pucci/portrait.hpp"
#include "pucci/radial.hpp"
#include "pucci/stationary.hpp"

namespace {

using namespace pucci;

struct ParamFlags {
  double lambda = 1.0;
  double Lambda = 1.0;
  std::string op = "plus";
  int N = 3;
  double a = 0.0;
};

void add_param_flags(CLI::App* sub, ParamFlags& pf) {
  sub->add_option("--lambda", pf.lambda, "lower ellipticity constant")->capture_default_str();
  sub->add_option("--Lambda", pf.Lambda, "upper ellipticity constant")->capture_default_str();
  sub->add_option("--op", pf.op, "extremal operator")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
  sub->add_option("--N", pf.N, "space dimension")->capture_default_str();
  sub->add_option("--a", pf.a, "radial weight exponent")->capture_default_str();
  // lets --config and --dump-config be given after the subcommand name
  sub->fallthrough();
}

ProblemParams params_of(const ParamFlags& pf) {
  Operator op = pf.op == "minus" ? Operator::MMinus : Operator::MPlus;
  return make_params(pf.lambda, pf.Lambda, op, pf.N, pf.a);
}

// writes to the named file, or to stdout for "-"
void emit(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) raise(errc::invalid_argument, "cannot open output file " + path);
  os << content;
  log(LogLevel::Info, "wrote " + path);
}

PhasePoint parse_seed(const std::vector<std::string>& seed, double p,
                      const ProblemParams& params) {
  if (seed.size() == 1 && seed[0] == "gamma") return gamma_seed(p, params);
  if (seed.size() == 1 && seed[0] == "upsilon") return upsilon_seed(p, params);
  if (seed.size() == 2 && seed[0] == "point") {
    std::istringstream is(seed[1]);
    double x = 0.0, z = 0.0;
    char comma = 0;
    if (is >> x >> comma >> z && comma == ',' && is.eof()) return {x, z};
    raise(errc::invalid_argument, "malformed seed point, expected X,Z");
  }
  raise(errc::invalid_argument, "seed must be gamma, upsilon, or point X,Z");
}

int run_orbit(const ParamFlags& pf, double p, const std::vector<std::string>& seed,
              const std::string& dir_name, std::optional<double> horizon,
              const std::string& out) {
  ProblemParams params = params_of(pf);
  PhasePoint start = parse_seed(seed, p, params);
  Direction dir = dir_name == "backward" ? Direction::Backward : Direction::Forward;
  FlowOptions opts;
  if (horizon) opts.horizon = *horizon;

  auto [traj, fate] = integrate_with_fate(start, p, params, dir, opts);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  std::string csv_path = out == "-" ? "-" : out + ".csv";
  emit(csv_path, csv.str());
  if (out != "-") emit(out + ".events.json", events_json(traj.events).dump(2) + "\n");

  ojson report;
  report["seed"] = ojson{{"X", start.X}, {"Z", start.Z}};
  report["direction"] = dir_name;
  report["samples"] = traj.samples.size();
  report["events"] = out == "-" ? events_json(traj.events) : ojson(out + ".events.json");
  report["fate"] = fate_json(fate);
  std::ostream& rs = out == "-" ? std::cerr : std::cout;
  rs << report.dump(2) << "\n";
  // outputs are still written, but an unresolved fate is a failed run
  return fate.kind == FateKind::Undetermined ? 3 : 0;
}

int run_sweep(const ParamFlags& pf, double p_from, double p_to, int steps, int jobs,
              std::optional<double> horizon, const std::string& out) {
  ProblemParams params = params_of(pf);
  if (steps < 1) raise(errc::invalid_argument, "need at least one sweep step");
  if (jobs < 1) raise(errc::invalid_argument, "need a positive job count");
  FlowOptions opts;
  if (horizon) opts.horizon = *horizon;

  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i)
    grid[i] = steps == 1 ? p_from : p_from + (p_to - p_from) * i / (steps - 1);

  std::vector<std::string> rows(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      try {
        rows[i] = sweep_row(grid[i], classify_p(grid[i], params, opts));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  int nthreads = std::min<int>(jobs, static_cast<int>(grid.size()));
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!errors[i].empty()) {
      std::cerr << "sweep failed at p = " << fmt17(grid[i]) << ": " << errors[i] << "\n";
      return 3;
    }

  std::string body = "p,class,detail\n";
  for (const auto& r : rows) body += r + "\n";
  emit(out, body);
  return 0;
}

int run_shoot(const ParamFlags& pf, double gamma, double p, double r_max,
              const std::string& out) {
  ProblemParams params = params_of(pf);
  RadialSolution sol = shoot_regular(gamma, p, params, r_max);
  if (sol.classification != RadialClass::Undetermined)
    sol.constants = decay_constants(sol, params);

  std::ostringstream csv;
  write_radial_csv(csv, sol);
  emit(out, csv.str());

  ojson report;
  report["gamma"] = gamma;
  report["p"] = p;
  report["classification"] = radial_class_name(sol.classification);
  if (sol.wall_radius) report["wall_radius"] = *sol.wall_radius;
  if (sol.constants.c_fast) report["c_fast"] = *sol.constants.c_fast;
  if (sol.constants.c_slow) report["c_slow"] = *sol.constants.c_slow;
  if (sol.constants.c1) report["c1"] = *sol.constants.c1;
  if (sol.constants.c2) report["c2"] = *sol.constants.c2;
  report["concavity_radii"] = sol.concavity_radii;
  report["samples"] = sol.samples.size();
  std::ostream& rs = out == "-" ? std::cerr : std::cout;
  rs << report.dump(2) << "\n";
  // an unresolved tail (raise --rmax) is a failed run even though the
  // profile itself was written
  return sol.classification == RadialClass::Undetermined ? 3 : 0;
}

int run_dulac(const ParamFlags& pf, double p, int samples, bool with_integral,
              std::vector<double> rect) {
  ProblemParams params = params_of(pf);
  exponents(params, p);  // validates p
  double wall = params.wall_x();
  double top = params.kappa_upper() * (params.N + params.a);
  double level = params.concavity_level();

  struct Stats {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int n = 0;
    void add(double v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++n;
    }
    std::string verdict() const {
      if (n == 0) return "no samples";
      double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
      if (std::max(std::fabs(lo), std::fabs(hi)) <= 1e-10 * scale) return "zero";
      if (lo > 0.0) return "positive";
      if (hi < 0.0) return "negative";
      return "mixed";
    }
  } plus, minus;

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ux(0.0, wall), uz(0.0, top);
  int done = 0;
  while (done < samples) {
    PhasePoint pt{ux(rng), uz(rng)};
    if (pt.X <= 0.0 || pt.Z <= 0.0) continue;
    if (std::fabs(pt.Z - level) <= 1e-7 * std::max(1.0, level)) continue;
    double phi = dulac_phi(pt, p, params);
    (pt.Z > level ? plus : minus).add(phi);
    ++done;
  }

  auto line = [](const char* name, const Stats& s) {
    std::ostringstream os;
    os << name << ": " << s.verdict() << " (n=" << s.n;
    if (s.n > 0) os << ", min=" << fmt17(s.lo) << ", max=" << fmt17(s.hi);
    os << ")";
    return os.str();
  };
  std::cout << line("R+", plus) << "\n" << line("R-", minus) << "\n";

  if (with_integral) {
    if (rect.empty()) rect = {0.25 * wall, 0.1 * level, 0.5 * wall, 0.5 * level};
    if (rect.size() != 4) raise(errc::invalid_argument, "--rect needs x0 z0 x1 z1");
    std::vector<PhasePoint> loop;
    int side = 64;  // fine polyline keeps the discretized integral honest
    auto push_edge = [&](PhasePoint a, PhasePoint b) {
      for (int i = 0; i < side; ++i)
        loop.push_back({a.X + (b.X - a.X) * i / side, a.Z + (b.Z - a.Z) * i / side});
    };
    PhasePoint c0{rect[0], rect[1]}, c1{rect[2], rect[1]}, c2{rect[2], rect[3]},
        c3{rect[0], rect[3]};
    push_edge(c0, c1);
    push_edge(c1, c2);
    push_edge(c2, c3);
    push_edge(c3, c0);
    loop.push_back(c0);
    double val = dulac_line_integral(loop, p, params);
    std::cout << "line integral over [" << fmt17(rect[0]) << "," << fmt17(rect[2]) << "]x["
              << fmt17(rect[1]) << "," << fmt17(rect[3]) << "]: " << fmt17(val) << "\n";
  }
  return 0;
}

int run_exterior(const ParamFlags& pf, double p) {
  ProblemParams params = params_of(pf);
  ExteriorCheck chk = exterior_nonexistence_check(p, params);
  std::cout << "verdict: " << exterior_verdict_name(chk.verdict) << "\n";
  std::cout << "orbit class: " << p_label_name(chk.orbit_class) << "\n";
  if (!chk.barrier.empty()) {
    std::cout << "barrier: " << chk.barrier.size() << " vertices; encloses A0="
              << (chk.a0_enclosed ? "yes" : "no") << " M0=" << (chk.m0_enclosed ? "yes" : "no")
              << " cycle=" << (chk.cycle_enclosed ? "yes" : "no") << "\n";
  }
  if (!chk.note.empty()) std::cout << "note: " << chk.note << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-plane toolkit for radial solutions of Pucci extremal equations"};
  app.require_subcommand(1);
  // config keys are INI style, either sectioned ([classify] p=9) or dotted
  // (classify.p=9); command-line flags win over file values
  app.set_config("--config", "", "read option defaults from an INI file")->configurable(false);
  app.allow_config_extras(CLI::config_extras_mode::error);
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "print the effective configuration and exit")
      ->configurable(false);

  struct {
    ParamFlags pf;
    double p = 0.0;
    bool has_p = false;
  } xp;
  CLI::App* sub_exp = app.add_subcommand("exponents", "report the derived critical exponents");
  add_param_flags(sub_exp, xp.pf);
  sub_exp->add_option("--p", xp.p, "nonlinearity exponent")->each([&](const std::string&) {
    xp.has_p = true;
  });

  struct {
    ParamFlags pf;
    double p = 0.0;
    std::vector<std::string> seed{"gamma"};
    std::string direction = "forward";
    std::optional<double> horizon;
    std::string out = "orbit";
  } ob;
  CLI::App* sub_orbit = app.add_subcommand("orbit", "trace one orbit and its events");
  add_param_flags(sub_orbit, ob.pf);
  sub_orbit->add_option("--p", ob.p, "nonlinearity exponent")->required();
  sub_orbit->add_option("--seed", ob.seed, "gamma | upsilon | point X,Z")
      ->expected(1, 2)
      ->capture_default_str();
  sub_orbit->add_option("--direction", ob.direction, "forward | backward")
      ->check(CLI::IsMember({"forward", "backward"}))
      ->capture_default_str();
  sub_orbit->add_option("--horizon", ob.horizon, "integration-time budget");
  sub_orbit->add_option("--out", ob.out, "output basename, or - for stdout CSV")
      ->capture_default_str();

  struct {
    ParamFlags pf;
    double p = 0.0;
  } cl;
  CLI::App* sub_classify = app.add_subcommand("classify", "class of the regular orbit at p");
  add_param_flags(sub_classify, cl.pf);
  sub_classify->add_option("--p", cl.p, "nonlinearity exponent")->required();

  struct {
    ParamFlags pf;
    double tol = 1e-6;
  } cr;
  CLI::App* sub_critical = app.add_subcommand("critical", "bisect for the critical exponent");
  add_param_flags(sub_critical, cr.pf);
  sub_critical->add_option("--tol", cr.tol, "bisection tolerance")->capture_default_str();

  struct {
    ParamFlags pf;
    double p_from = 0.0, p_to = 0.0;
    int steps = 0, jobs = 1;
    std::optional<double> horizon;
    std::string out = "-";
  } sw;
  CLI::App* sub_sweep = app.add_subcommand("sweep", "classify a grid of exponents");
  add_param_flags(sub_sweep, sw.pf);
  sub_sweep->add_option("--p-from", sw.p_from, "first exponent")->required();
  sub_sweep->add_option("--p-to", sw.p_to, "last exponent")->required();
  sub_sweep->add_option("--steps", sw.steps, "number of grid points")->required();
  sub_sweep->add_option("--jobs", sw.jobs, "worker threads")->capture_default_str();
  sub_sweep->add_option("--horizon", sw.horizon, "integration-time budget per point");
  sub_sweep->add_option("--out", sw.out, "CSV path, - for stdout")->capture_default_str();

  struct {
    ParamFlags pf;
    double p = 0.0;
    std::string grid = "24x18";
    std::string out = "portrait.svg";
  } po;
  CLI::App* sub_portrait = app.add_subcommand("portrait", "render the phase plane as SVG");
  add_param_flags(sub_portrait, po.pf);
  sub_portrait->add_option("--p", po.p, "nonlinearity exponent")->required();
  sub_portrait->add_option("--grid", po.grid, "arrow grid, WxH")->capture_default_str();
  sub_portrait->add_option("--out", po.out, "SVG path, - for stdout")->capture_default_str();

  struct {
    ParamFlags pf;
    double p = 0.0;
    std::string out = "-";
  } sg;
  CLI::App* sub_singular = app.add_subcommand("singular", "catalog of singular radial solutions");
  add_param_flags(sub_singular, sg.pf);
  sub_singular->add_option("--p", sg.p, "nonlinearity exponent")->required();
  sub_singular->add_option("--out", sg.out, "JSON path, - for stdout")->capture_default_str();

  struct {
    ParamFlags pf;
    double gamma = 1.0;
    double p = 0.0;
    double r_max = 1e8;
    std::string out = "-";
  } sh;
  CLI::App* sub_shoot = app.add_subcommand("shoot", "integrate the radial profile from u(0)=gamma");
  add_param_flags(sub_shoot, sh.pf);
  sub_shoot->add_option("--gamma", sh.gamma, "initial height u(0)")->required();
  sub_shoot->add_option("--p", sh.p, "nonlinearity exponent")->required();
  sub_shoot->add_option("--rmax", sh.r_max, "outer radius budget")->capture_default_str();
  sub_shoot->add_option("--out", sh.out, "CSV path, - for stdout")->capture_default_str();

  struct {
    ParamFlags pf;
    double p = 0.0;
    int samples = 1000;
    bool integral = false;
    std::vector<double> rect;
  } du;
  CLI::App* sub_dulac = app.add_subcommand("dulac", "sign summary of the weighted divergence");
  add_param_flags(sub_dulac, du.pf);
  sub_dulac->add_option("--p", du.p, "nonlinearity exponent")->required();
  sub_dulac->add_option("--samples", du.samples, "number of sample points")->capture_default_str();
  sub_dulac->add_flag("--integral", du.integral, "also compute a closed line integral");
  sub_dulac->add_option("--rect", du.rect, "integration rectangle x0 z0 x1 z1")->expected(4);

  struct {
    ParamFlags pf;
    double p = 0.0;
  } ex;
  CLI::App* sub_exterior = app.add_subcommand("exterior", "exterior-domain nonexistence check");
  add_param_flags(sub_exterior, ex.pf);
  sub_exterior->add_option("--p", ex.p, "nonlinearity exponent")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (dump_config) {
    // only keys that differ from built-in defaults are listed; reading the
    // dump back reproduces the run exactly
    std::cout << app.config_to_str(false, true);
    return 0;
  }

  // flag-level validation failures exit 2, numerical failures exit 3
  try {
    try {
      if (app.got_subcommand(sub_exp)) {
        ProblemParams params = params_of(xp.pf);
        std::optional<double> pv;
        if (xp.has_p) {
          exponents(params, xp.p);
          pv = xp.p;
        }
        std::cout << exponents_json(params, pv).dump(2) << "\n";
        return 0;
      }
      if (app.got_subcommand(sub_classify)) {
        ProblemParams params = params_of(cl.pf);
        std::cout << classification_json(cl.p, classify_p(cl.p, params)).dump(2) << "\n";
        return 0;
      }
      if (app.got_subcommand(sub_critical)) {
        ProblemParams params = params_of(cr.pf);
        std::cout << critical_json(critical_exponent(params, cr.tol)).dump(2) << "\n";
        return 0;
      }
      if (app.got_subcommand(sub_orbit))
        return run_orbit(ob.pf, ob.p, ob.seed, ob.direction, ob.horizon, ob.out);
      if (app.got_subcommand(sub_sweep))
        return run_sweep(sw.pf, sw.p_from, sw.p_to, sw.steps, sw.jobs, sw.horizon, sw.out);
      if (app.got_subcommand(sub_portrait)) {
        ProblemParams params = params_of(po.pf);
        PortraitOptions popts;
        if (std::sscanf(po.grid.c_str(), "%dx%d", &popts.grid_w, &popts.grid_h) != 2 ||
            popts.grid_w < 1 || popts.grid_h < 1)
          raise(errc::invalid_argument, "malformed --grid, expected WxH");
        emit(po.out, render_portrait(po.p, params, popts));
        return 0;
      }
      if (app.got_subcommand(sub_singular)) {
        ProblemParams params = params_of(sg.pf);
        emit(sg.out, catalog_json(singular_catalog(sg.p, params)).dump(2) + "\n");
        return 0;
      }
      if (app.got_subcommand(sub_shoot)) return run_shoot(sh.pf, sh.gamma, sh.p, sh.r_max, sh.out);
      if (app.got_subcommand(sub_dulac))
        return run_dulac(du.pf, du.p, du.samples, du.integral, du.rect);
      if (app.got_subcommand(sub_exterior)) return run_exterior(ex.pf, ex.p);
    } catch (const pucci::error& e) {
      // invalid problem data or seeds are usage errors, everything else is
      // a numerical failure
      switch (e.code()) {
        case errc::non_positive_ellipticity:
        case errc::lambda_order:
        case errc::dimension_too_small:
        case errc::weight_too_negative:
        case errc::degenerate_dimension_like:
        case errc::p_below_one:
        case errc::invalid_argument:
        case errc::saddle_unavailable:
        case errc::m_not_in_quadrant:
          std::cerr << "error: " << e.what() << "\n";
          return 2;
        default: throw;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
