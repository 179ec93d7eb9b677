#include "pucci/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>
#include <ostream>

#include "pucci/stationary.hpp"

namespace pucci {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,X,Z,region\n";
  for (const auto& s : traj.samples)
    os << fmt17(s.t) << ',' << fmt17(s.point.X) << ',' << fmt17(s.point.Z) << ','
       << region_name(s.region) << '\n';
}

void write_radial_csv(std::ostream& os, const RadialSolution& sol) {
  os << "r,u,du,ddu\n";
  for (const auto& s : sol.samples)
    os << fmt17(s.r) << ',' << fmt17(s.u) << ',' << fmt17(s.du) << ',' << fmt17(s.ddu) << '\n';
}

ojson events_json(const std::vector<Event>& events) {
  ojson arr = ojson::array();
  for (const auto& e : events) {
    std::string detail = e.detail;
    if (e.captured) {
      if (!detail.empty()) detail += ' ';
      detail += sp_label_name(*e.captured);
    }
    arr.push_back(ojson{{"kind", event_kind_name(e.kind)},
                        {"t", e.t},
                        {"X", e.point.X},
                        {"Z", e.point.Z},
                        {"detail", detail}});
  }
  return arr;
}

ojson fate_json(const OrbitFate& fate) {
  ojson j;
  j["kind"] = fate_kind_name(fate.kind);
  if (fate.stationary) j["stationary"] = sp_label_name(*fate.stationary);
  if (fate.blowup_time) j["blowup_time"] = *fate.blowup_time;
  if (fate.kind == FateKind::ToPeriodicOrbit) j["section_coordinate"] = fate.section_coordinate;
  if (fate.kind == FateKind::ToStationary) j["final_distance"] = fate.final_distance;
  j["horizon_used"] = fate.horizon_used;
  j["steps_used"] = fate.steps_used;
  if (!fate.note.empty()) j["note"] = fate.note;
  return j;
}

ojson exponents_json(const ProblemParams& params, std::optional<double> p) {
  ojson j;
  j["lambda"] = params.lambda;
  j["Lambda"] = params.Lambda;
  j["operator"] = operator_name(params.op);
  j["N"] = params.N;
  j["a"] = params.a;
  j["ntilde_plus"] = params.ntilde_plus;
  j["ntilde_minus"] = params.ntilde_minus;
  j["ntilde"] = params.ntilde();
  j["concavity_level"] = params.concavity_level();
  j["wall_x"] = params.wall_x();
  double ps = p_serrin(params), pp = p_pseudo(params), pd = p_sobolev(params);
  j["p_serrin"] = ps;
  j["p_pseudo"] = pp;
  j["p_sobolev"] = pd;
  // ordering facts: sort the three exponents by value, ties kept stable
  struct Named {
    const char* name;
    double v;
  };
  Named ex[3] = {{"p_serrin", ps}, {"p_pseudo", pp}, {"p_sobolev", pd}};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2 - i; ++k)
      if (ex[k + 1].v < ex[k].v) std::swap(ex[k], ex[k + 1]);
  std::string order = ex[0].name;
  for (int i = 1; i < 3; ++i) {
    order += ex[i].v == ex[i - 1].v ? " = " : " < ";
    order += ex[i].name;
  }
  j["ordering"] = order;
  if (p) {
    j["p"] = *p;
    j["alpha"] = alpha_of(params, *p);
  }
  return j;
}

ojson critical_json(const CriticalResult& res) {
  ojson j;
  j["p_star"] = res.p_star;
  j["bracket_lo"] = res.bracket_lo;
  j["bracket_hi"] = res.bracket_hi;
  j["tol"] = res.tol;
  j["iterations"] = res.iterations;
  j["lower_reference"] = res.lower_reference;
  j["upper_reference"] = res.upper_reference;
  j["lower_bound_strict"] = res.lower_bound_strict;
  j["upper_bound_strict"] = res.upper_bound_strict;
  j["margin_lo"] = res.p_star - res.lower_reference;
  j["margin_hi"] = res.upper_reference - res.p_star;
  return j;
}

ojson catalog_json(const SingularCatalog& cat) {
  ojson j;
  j["p"] = cat.p;
  j["regime_note"] = cat.regime_note;
  ojson entries = ojson::array();
  for (const auto& e : cat.entries) {
    ojson seeds = ojson::array();
    for (const auto& s : e.seeds) seeds.push_back(ojson{{"X", s.X}, {"Z", s.Z}});
    entries.push_back(ojson{{"origin", origin_class_name(e.origin)},
                            {"decay", radial_class_name(e.decay)},
                            {"whole_space", e.whole_space},
                            {"cardinality", e.cardinality},
                            {"note", e.note},
                            {"seeds", seeds}});
  }
  j["entries"] = entries;
  return j;
}

ojson exterior_json(const ExteriorCheck& chk) {
  ojson j;
  j["verdict"] = exterior_verdict_name(chk.verdict);
  j["orbit_class"] = p_label_name(chk.orbit_class);
  j["a0_enclosed"] = chk.a0_enclosed;
  j["m0_enclosed"] = chk.m0_enclosed;
  j["cycle_enclosed"] = chk.cycle_enclosed;
  j["barrier_vertices"] = chk.barrier.size();
  j["note"] = chk.note;
  return j;
}

ojson classification_json(double p, const PClass& cls) {
  ojson j;
  j["p"] = p;
  j["class"] = p_label_name(cls.label);
  j["evidence"] = fate_json(cls.evidence);
  if (cls.wall_radius) j["wall_radius"] = *cls.wall_radius;
  return j;
}

std::string sweep_row(double p, const PClass& cls) {
  std::string detail = fate_kind_name(cls.evidence.kind);
  if (cls.evidence.stationary) {
    detail += ' ';
    detail += sp_label_name(*cls.evidence.stationary);
  }
  if (cls.wall_radius) detail += " R=" + fmt17(*cls.wall_radius);
  return fmt17(p) + "," + p_label_name(cls.label) + "," + detail;
}

LogLevel log_threshold() {
  static LogLevel lvl = [] {
    const char* env = std::getenv("LOGLEVEL");
    if (!env) return LogLevel::Warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return lvl;
}

void log(LogLevel lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(log_threshold())) return;
  static std::mutex mu;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << '[' << names[static_cast<int>(lvl)] << "] " << msg << '\n';
}

}  // namespace pucci
