#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pucci/classify.hpp"
#include "pucci/flow.hpp"
#include "pucci/io.hpp"
#include "pucci/params.hpp"
#include "pucci/radial.hpp"

using namespace pucci;

namespace {

ProblemParams unit_params() { return make_params(1.0, 1.0, Operator::MPlus, 3, 0.0); }
ProblemParams skew_plus() { return make_params(1.0, 2.0, Operator::MPlus, 4, 0.0); }
ProblemParams skew_minus() { return make_params(1.0, 2.0, Operator::MMinus, 3, 0.0); }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int commas(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == ',';
  return n;
}

std::vector<std::string> keys_of(const ojson& j) {
  std::vector<std::string> ks;
  for (auto it = j.begin(); it != j.end(); ++it) ks.push_back(it.key());
  return ks;
}

}  // namespace

TEST_CASE("the shared float format round-trips doubles exactly") {
  std::vector<double> vals = {0.0,   1.0,    -1.0,           1.0 / 3.0,       0.1,
                              1e300, 1e-300, 4.9e-324,       14.971546347553785,
                              -2.5e17, 8.75906229019165, 2.2250738585072014e-308};
  std::mt19937 rng(77001u);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-280, 280);
  for (int i = 0; i < 200; ++i) vals.push_back(std::ldexp(mant(rng), expo(rng)));
  for (double v : vals) {
    CHECK(std::stod(fmt17(v)) == v);
  }
}

TEST_CASE("trajectory CSV has the documented shape") {
  ProblemParams prm = unit_params();
  FlowOptions opts;
  opts.horizon = 3.0;
  Trajectory tr = integrate({0.4, 2.5}, 5.0, prm, Direction::Forward, opts);
  REQUIRE(tr.samples.size() >= 5);

  std::ostringstream os;
  write_trajectory_csv(os, tr);
  std::string text = os.str();
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');

  std::vector<std::string> rows = lines_of(text);
  REQUIRE(rows.size() == tr.samples.size() + 1);
  CHECK(rows[0] == "t,X,Z,region");
  for (const std::string& row : rows) CHECK(commas(row) == 3);

  // first data row reproduces the first sample to the last bit
  std::istringstream first(rows[1]);
  std::string cell;
  std::getline(first, cell, ',');
  CHECK(std::stod(cell) == tr.samples[0].t);
  std::getline(first, cell, ',');
  CHECK(std::stod(cell) == tr.samples[0].point.X);
  std::getline(first, cell, ',');
  CHECK(std::stod(cell) == tr.samples[0].point.Z);
  std::getline(first, cell, ',');
  CHECK(cell == "RPlus");
}

TEST_CASE("radial CSV has the documented shape") {
  ProblemParams prm = unit_params();
  RadialSolution sol = shoot_regular(1.0, 4.0, prm, 1e4);
  std::ostringstream os;
  write_radial_csv(os, sol);
  std::vector<std::string> rows = lines_of(os.str());
  REQUIRE(rows.size() == sol.samples.size() + 1);
  CHECK(rows[0] == "r,u,du,ddu");
  for (const std::string& row : rows) CHECK(commas(row) == 3);
  std::istringstream first(rows[1]);
  std::string cell;
  std::getline(first, cell, ',');
  CHECK(std::stod(cell) == sol.samples[0].r);
}

TEST_CASE("event serialization keeps a fixed key order") {
  ProblemParams prm = unit_params();
  Trajectory tr = integrate({0.4, 2.5}, 5.0, prm, Direction::Forward);
  REQUIRE(!tr.events.empty());
  ojson arr = events_json(tr.events);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == tr.events.size());
  const std::vector<std::string> want = {"kind", "t", "X", "Z", "detail"};
  for (const auto& entry : arr) CHECK(keys_of(entry) == want);
  CHECK(arr[0]["kind"].get<std::string>() == "ConcavityCross");
}

TEST_CASE("fate serialization carries verdict-specific fields") {
  ProblemParams prm = unit_params();

  OrbitFate slow = detect_fate({0.4, 2.5}, 7.0, prm, Direction::Forward);
  ojson js = fate_json(slow);
  CHECK(js["kind"] == "ToStationary");
  CHECK(js["stationary"] == "M0");
  CHECK(js.contains("final_distance"));
  CHECK_FALSE(js.contains("blowup_time"));

  OrbitFate blow = detect_fate({-0.5, -1.0}, 5.0, prm, Direction::Forward);
  ojson jb = fate_json(blow);
  CHECK(jb["kind"] == "BlowUpZ");
  CHECK(jb.contains("blowup_time"));
  CHECK_FALSE(jb.contains("stationary"));
}

TEST_CASE("exponent summaries list the parameters and the ordering sentence") {
  const std::vector<std::string> want = {
      "lambda",       "Lambda",    "operator", "N",        "a",
      "ntilde_plus",  "ntilde_minus", "ntilde", "concavity_level", "wall_x",
      "p_serrin",     "p_pseudo",  "p_sobolev", "ordering", "p",
      "alpha"};
  ojson j = exponents_json(skew_plus(), 6.0);
  CHECK(keys_of(j) == want);
  CHECK(j["operator"] == "MPlus");
  // the maximal operator pushes the Sobolev exponent below the Serrin one
  CHECK(j["ordering"] == "p_sobolev < p_serrin < p_pseudo");
  CHECK(j["alpha"].get<double>() == doctest::Approx(0.4).epsilon(1e-12));

  ojson ju = exponents_json(unit_params(), std::nullopt);
  CHECK(ju["ordering"] == "p_serrin < p_pseudo = p_sobolev");
  CHECK_FALSE(ju.contains("p"));
  CHECK_FALSE(ju.contains("alpha"));

  ojson jm = exponents_json(skew_minus(), std::nullopt);
  CHECK(jm["ordering"] == "p_serrin < p_pseudo < p_sobolev");
}

TEST_CASE("critical serialization reports margins against the references") {
  CriticalResult cr = critical_exponent(skew_plus(), 1e-4);
  ojson j = critical_json(cr);
  CHECK(j["p_star"].get<double>() == cr.p_star);
  CHECK(j["margin_lo"].get<double>() == doctest::Approx(cr.p_star - 5.0).epsilon(1e-12));
  CHECK(j["margin_hi"].get<double>() == doctest::Approx(9.0 - cr.p_star).epsilon(1e-12));
  CHECK(j["lower_bound_strict"].get<bool>());
  CHECK(j["upper_bound_strict"].get<bool>());
}

TEST_CASE("classification and sweep rows print the same verdict") {
  ProblemParams prm = unit_params();

  PClass c4 = classify_p(4.0, prm);
  ojson j4 = classification_json(4.0, c4);
  CHECK(j4["class"] == "C");
  CHECK(j4.contains("wall_radius"));
  CHECK(j4["evidence"]["kind"] == "BlowUpX");
  std::string row4 = sweep_row(4.0, c4);
  CHECK(commas(row4) == 2);
  CHECK(row4.substr(0, 4) == "4,C,");
  CHECK(row4.find("BlowUpX") != std::string::npos);
  CHECK(row4.find(" R=") != std::string::npos);

  PClass c7 = classify_p(7.0, prm);
  std::string row7 = sweep_row(7.0, c7);
  CHECK(row7 == "7,S,ToStationary M0");
  CHECK_FALSE(classification_json(7.0, c7).contains("wall_radius"));
}

TEST_CASE("catalog and exterior serializations are self-describing") {
  ojson jc = catalog_json(singular_catalog(4.0, unit_params()));
  CHECK(keys_of(jc) == std::vector<std::string>{"p", "regime_note", "entries"});
  REQUIRE(jc["entries"].size() == 3);
  const std::vector<std::string> ekeys = {"origin", "decay", "whole_space",
                                          "cardinality", "note", "seeds"};
  for (const auto& e : jc["entries"]) CHECK(keys_of(e) == ekeys);

  ojson jx = exterior_json(exterior_nonexistence_check(4.0, unit_params()));
  CHECK(jx["verdict"] == "Nonexistence");
  CHECK(jx["orbit_class"] == "C");
  CHECK(jx["barrier_vertices"].get<std::size_t>() > 100);
}

TEST_CASE("repeated serialization of the same computation is byte-identical") {
  ProblemParams prm = skew_plus();
  std::string a = classification_json(8.9, classify_p(8.9, prm)).dump(2);
  std::string b = classification_json(8.9, classify_p(8.9, prm)).dump(2);
  CHECK(a == b);
  CHECK(exponents_json(prm, 8.9).dump() == exponents_json(prm, 8.9).dump());
}

TEST_CASE("the log threshold is a valid level") {
  LogLevel lvl = log_threshold();
  bool known = lvl == LogLevel::Error || lvl == LogLevel::Warn || lvl == LogLevel::Info ||
               lvl == LogLevel::Debug;
  CHECK(known);
  log(LogLevel::Debug, "suppressed unless LOGLEVEL=debug");
}
