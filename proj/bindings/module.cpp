#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pucci/classify.hpp"
#include "pucci/field.hpp"
#include "pucci/flow.hpp"
#include "pucci/params.hpp"
#include "pucci/portrait.hpp"
#include "pucci/radial.hpp"
#include "pucci/stationary.hpp"

namespace py = pybind11;
using namespace pucci;

namespace {

Operator op_from_name(const std::string& name) {
  if (name == "plus") return Operator::MPlus;
  if (name == "minus") return Operator::MMinus;
  raise(errc::invalid_argument, "operator must be plus or minus, got " + name);
}

// column extractor for plotting helpers
template <typename Seq, typename Get>
py::array_t<double> column(const Seq& seq, Get get) {
  py::array_t<double> out(static_cast<py::ssize_t>(seq.size()));
  auto* ptr = out.mutable_data();
  for (std::size_t i = 0; i < seq.size(); ++i) ptr[i] = get(seq[i]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "phase-plane analysis of radial solutions of Pucci extremal equations";

  py::register_exception<pucci::error>(m, "Error");

  py::enum_<Operator>(m, "Operator")
      .value("MPlus", Operator::MPlus)
      .value("MMinus", Operator::MMinus);
  py::enum_<Region>(m, "Region")
      .value("RPlus", Region::RPlus)
      .value("RMinus", Region::RMinus)
      .value("OnConcavityLine", Region::OnConcavityLine)
      .value("ThirdQuadrant", Region::ThirdQuadrant)
      .value("OnAxis", Region::OnAxis)
      .value("Outside", Region::Outside);
  py::enum_<SPLabel>(m, "SPLabel")
      .value("O", SPLabel::O)
      .value("N0", SPLabel::N0)
      .value("A0", SPLabel::A0)
      .value("M0", SPLabel::M0);
  py::enum_<SPClass>(m, "SPClass")
      .value("Source", SPClass::Source)
      .value("Sink", SPClass::Sink)
      .value("Saddle", SPClass::Saddle)
      .value("Center", SPClass::Center)
      .value("NonHyperbolic", SPClass::NonHyperbolic);
  py::enum_<Direction>(m, "Direction")
      .value("Forward", Direction::Forward)
      .value("Backward", Direction::Backward);
  py::enum_<EventKind>(m, "EventKind")
      .value("ConcavityCross", EventKind::ConcavityCross)
      .value("XNullclineCross", EventKind::XNullclineCross)
      .value("ZNullclineCross", EventKind::ZNullclineCross)
      .value("WallCross", EventKind::WallCross)
      .value("StationaryCapture", EventKind::StationaryCapture)
      .value("SectionCross", EventKind::SectionCross)
      .value("BlowUpX", EventKind::BlowUpX)
      .value("BlowUpZ", EventKind::BlowUpZ);
  py::enum_<FateKind>(m, "FateKind")
      .value("ToStationary", FateKind::ToStationary)
      .value("ToPeriodicOrbit", FateKind::ToPeriodicOrbit)
      .value("BlowUpX", FateKind::BlowUpX)
      .value("BlowUpZ", FateKind::BlowUpZ)
      .value("Undetermined", FateKind::Undetermined);
  py::enum_<RadialClass>(m, "RadialClass")
      .value("Undetermined", RadialClass::Undetermined)
      .value("VanishesAtFiniteRadius", RadialClass::VanishesAtFiniteRadius)
      .value("FastDecay", RadialClass::FastDecay)
      .value("SlowDecay", RadialClass::SlowDecay)
      .value("PseudoSlowDecay", RadialClass::PseudoSlowDecay);
  py::enum_<OriginClass>(m, "OriginClass")
      .value("Unspecified", OriginClass::Unspecified)
      .value("RegularAtOrigin", OriginClass::RegularAtOrigin)
      .value("DimensionLikeBlowUp", OriginClass::DimensionLikeBlowUp)
      .value("AlphaBlowUp", OriginClass::AlphaBlowUp)
      .value("PseudoBlowUp", OriginClass::PseudoBlowUp);
  py::enum_<PLabel>(m, "PLabel")
      .value("C", PLabel::C)
      .value("F", PLabel::F)
      .value("P", PLabel::P)
      .value("S", PLabel::S);
  py::enum_<ExteriorVerdict>(m, "ExteriorVerdict")
      .value("Nonexistence", ExteriorVerdict::Nonexistence)
      .value("OutOfScope", ExteriorVerdict::OutOfScope);

  py::class_<PhasePoint>(m, "PhasePoint")
      .def(py::init<>())
      .def(py::init([](double x, double z) { return PhasePoint{x, z}; }), py::arg("X"),
           py::arg("Z"))
      .def_readwrite("X", &PhasePoint::X)
      .def_readwrite("Z", &PhasePoint::Z)
      .def("__repr__", [](const PhasePoint& pt) {
        std::ostringstream os;
        os << "PhasePoint(X=" << pt.X << ", Z=" << pt.Z << ")";
        return os.str();
      });

  py::class_<ProblemParams>(m, "ProblemParams")
      .def_readonly("lam", &ProblemParams::lambda)
      .def_readonly("Lam", &ProblemParams::Lambda)
      .def_readonly("op", &ProblemParams::op)
      .def_readonly("N", &ProblemParams::N)
      .def_readonly("a", &ProblemParams::a)
      .def_readonly("ntilde_plus", &ProblemParams::ntilde_plus)
      .def_readonly("ntilde_minus", &ProblemParams::ntilde_minus)
      .def_property_readonly("ntilde", &ProblemParams::ntilde)
      .def_property_readonly("concavity_level", &ProblemParams::concavity_level)
      .def_property_readonly("wall_x", &ProblemParams::wall_x)
      .def("__repr__", [](const ProblemParams& pr) {
        std::ostringstream os;
        os << "ProblemParams(lam=" << pr.lambda << ", Lam=" << pr.Lambda << ", op=\""
           << operator_name(pr.op) << "\", N=" << pr.N << ", a=" << pr.a << ")";
        return os.str();
      });

  m.def(
      "make_params",
      [](double lam, double Lam, Operator op, int N, double a) {
        return make_params(lam, Lam, op, N, a);
      },
      py::arg("lam"), py::arg("Lam"), py::arg("op"), py::arg("N"), py::arg("a") = 0.0);
  m.def(
      "make_params",
      [](double lam, double Lam, const std::string& op, int N, double a) {
        return make_params(lam, Lam, op_from_name(op), N, a);
      },
      py::arg("lam"), py::arg("Lam"), py::arg("op") = "plus", py::arg("N") = 3,
      py::arg("a") = 0.0);

  py::class_<ExponentSet>(m, "ExponentSet")
      .def_readonly("n_tilde_plus", &ExponentSet::n_tilde_plus)
      .def_readonly("n_tilde_minus", &ExponentSet::n_tilde_minus)
      .def_readonly("n_tilde", &ExponentSet::n_tilde)
      .def_readonly("alpha", &ExponentSet::alpha)
      .def_readonly("p_serrin", &ExponentSet::p_serrin)
      .def_readonly("p_pseudo", &ExponentSet::p_pseudo)
      .def_readonly("p_sobolev", &ExponentSet::p_sobolev);
  m.def("exponents", &exponents, py::arg("params"), py::arg("p"));
  m.def("alpha_of", &alpha_of, py::arg("params"), py::arg("p"));
  m.def("p_serrin", &p_serrin, py::arg("params"));
  m.def("p_pseudo", &p_pseudo, py::arg("params"));
  m.def("p_sobolev", &p_sobolev, py::arg("params"));

  py::class_<Velocity>(m, "Velocity")
      .def_readonly("xdot", &Velocity::xdot)
      .def_readonly("zdot", &Velocity::zdot);
  m.def("region_of", &region_of, py::arg("pt"), py::arg("params"));
  m.def("region_name", [](Region r) { return std::string(region_name(r)); });
  m.def("vector_field", &vector_field, py::arg("pt"), py::arg("p"), py::arg("params"));
  m.def("dulac_phi", &dulac_phi, py::arg("pt"), py::arg("p"), py::arg("params"));
  m.def(
      "dulac_line_integral",
      [](const std::vector<PhasePoint>& polyline, double p, const ProblemParams& params) {
        return dulac_line_integral(polyline, p, params);
      },
      py::arg("polyline"), py::arg("p"), py::arg("params"));

  py::class_<TangentDirection>(m, "TangentDirection")
      .def_readonly("x", &TangentDirection::x)
      .def_readonly("z", &TangentDirection::z)
      .def_readonly("stable", &TangentDirection::stable);
  py::class_<StationaryPoint>(m, "StationaryPoint")
      .def_readonly("label", &StationaryPoint::label)
      .def_readonly("location", &StationaryPoint::location)
      .def_readonly("jacobian", &StationaryPoint::jacobian)
      .def_readonly("sigma1", &StationaryPoint::sigma1)
      .def_readonly("sigma2", &StationaryPoint::sigma2)
      .def_readonly("cls", &StationaryPoint::cls)
      .def_readonly("tangents", &StationaryPoint::tangents)
      .def_readonly("in_first_quadrant", &StationaryPoint::in_first_quadrant);
  m.def("stationary_location", &stationary_location, py::arg("label"), py::arg("p"),
        py::arg("params"));
  m.def("jacobian_at", &jacobian_at, py::arg("pt"), py::arg("p"), py::arg("params"));
  m.def("eigenvalues_of", &eigenvalues_of, py::arg("J"));
  m.def("classify_stationary", &classify_stationary, py::arg("label"), py::arg("p"),
        py::arg("params"));
  m.def("stationary_points", &stationary_points, py::arg("p"), py::arg("params"));

  py::class_<PoincareSection>(m, "PoincareSection")
      .def(py::init<>())
      .def(py::init([](double x0, double zmin) { return PoincareSection{x0, zmin}; }),
           py::arg("x0"), py::arg("zmin") = 0.0)
      .def_readwrite("x0", &PoincareSection::x0)
      .def_readwrite("zmin", &PoincareSection::zmin);
  py::class_<FlowOptions>(m, "FlowOptions")
      .def(py::init<>())
      .def_readwrite("horizon", &FlowOptions::horizon)
      .def_readwrite("max_steps", &FlowOptions::max_steps)
      .def_readwrite("rtol", &FlowOptions::rtol)
      .def_readwrite("atol", &FlowOptions::atol)
      .def_readwrite("record_samples", &FlowOptions::record_samples)
      .def_readwrite("detect_blowup", &FlowOptions::detect_blowup)
      .def_readwrite("detect_capture", &FlowOptions::detect_capture)
      .def_readwrite("section", &FlowOptions::section);

  py::class_<Event>(m, "Event")
      .def_readonly("kind", &Event::kind)
      .def_readonly("t", &Event::t)
      .def_readonly("point", &Event::point)
      .def_readonly("orientation", &Event::orientation)
      .def_readonly("captured", &Event::captured)
      .def_readonly("detail", &Event::detail);
  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("t", &TrajectorySample::t)
      .def_readonly("point", &TrajectorySample::point)
      .def_readonly("region", &TrajectorySample::region);
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("samples", &Trajectory::samples)
      .def_readonly("events", &Trajectory::events)
      .def_readonly("direction", &Trajectory::direction)
      .def("arrays", [](const Trajectory& tr) {
        auto t = column(tr.samples, [](const TrajectorySample& s) { return s.t; });
        auto x = column(tr.samples, [](const TrajectorySample& s) { return s.point.X; });
        auto z = column(tr.samples, [](const TrajectorySample& s) { return s.point.Z; });
        return py::make_tuple(t, x, z);
      });
  py::class_<OrbitFate>(m, "OrbitFate")
      .def_readonly("kind", &OrbitFate::kind)
      .def_readonly("stationary", &OrbitFate::stationary)
      .def_readonly("blowup_time", &OrbitFate::blowup_time)
      .def_readonly("section_coordinate", &OrbitFate::section_coordinate)
      .def_readonly("final_distance", &OrbitFate::final_distance)
      .def_readonly("horizon_used", &OrbitFate::horizon_used)
      .def_readonly("steps_used", &OrbitFate::steps_used)
      .def_readonly("note", &OrbitFate::note)
      .def("__repr__", [](const OrbitFate& f) {
        std::ostringstream os;
        os << "OrbitFate(kind=" << fate_kind_name(f.kind);
        if (f.stationary) os << ", stationary=" << sp_label_name(*f.stationary);
        os << ")";
        return os.str();
      });

  m.def("integrate", &integrate, py::arg("start"), py::arg("p"), py::arg("params"),
        py::arg("direction") = Direction::Forward, py::arg("opts") = FlowOptions{});
  m.def("detect_fate", &detect_fate, py::arg("start"), py::arg("p"), py::arg("params"),
        py::arg("direction") = Direction::Forward, py::arg("opts") = FlowOptions{});
  m.def("integrate_with_fate", &integrate_with_fate, py::arg("start"), py::arg("p"),
        py::arg("params"), py::arg("direction") = Direction::Forward,
        py::arg("opts") = FlowOptions{});

  py::class_<PoincareReturn>(m, "PoincareReturn")
      .def_readonly("point", &PoincareReturn::point)
      .def_readonly("return_time", &PoincareReturn::return_time);
  m.def("poincare_map", &poincare_map, py::arg("section"), py::arg("start"), py::arg("p"),
        py::arg("params"), py::arg("opts") = FlowOptions{});

  py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
      .def_readonly("points", &PeriodicOrbit::points)
      .def_readonly("period", &PeriodicOrbit::period)
      .def_readonly("section_anchor", &PeriodicOrbit::section_anchor)
      .def_readonly("xz_min", &PeriodicOrbit::xz_min)
      .def_readonly("xz_max", &PeriodicOrbit::xz_max)
      .def_readonly("crosses_concavity", &PeriodicOrbit::crosses_concavity);
  py::class_<CycleSearchResult>(m, "CycleSearchResult")
      .def_readonly("orbit", &CycleSearchResult::orbit)
      .def_readonly("bracket_lo", &CycleSearchResult::bracket_lo)
      .def_readonly("bracket_hi", &CycleSearchResult::bracket_hi)
      .def_readonly("note", &CycleSearchResult::note);
  m.def("find_periodic_orbit", &find_periodic_orbit, py::arg("p"), py::arg("params"),
        py::arg("seed_hint") = std::optional<double>{}, py::arg("opts") = FlowOptions{});

  py::class_<RadialSample>(m, "RadialSample")
      .def_readonly("r", &RadialSample::r)
      .def_readonly("u", &RadialSample::u)
      .def_readonly("du", &RadialSample::du)
      .def_readonly("ddu", &RadialSample::ddu);
  py::class_<DecayConstants>(m, "DecayConstants")
      .def_readonly("c_fast", &DecayConstants::c_fast)
      .def_readonly("c_slow", &DecayConstants::c_slow)
      .def_readonly("c1", &DecayConstants::c1)
      .def_readonly("c2", &DecayConstants::c2);
  py::class_<RadialSolution>(m, "RadialSolution")
      .def_readonly("samples", &RadialSolution::samples)
      .def_readonly("p", &RadialSolution::p)
      .def_readonly("gamma", &RadialSolution::gamma)
      .def_readonly("wall_radius", &RadialSolution::wall_radius)
      .def_readonly("classification", &RadialSolution::classification)
      .def_readonly("origin", &RadialSolution::origin)
      .def_readonly("concavity_radii", &RadialSolution::concavity_radii)
      .def_readonly("constants", &RadialSolution::constants)
      .def("arrays", [](const RadialSolution& sol) {
        auto r = column(sol.samples, [](const RadialSample& s) { return s.r; });
        auto u = column(sol.samples, [](const RadialSample& s) { return s.u; });
        auto du = column(sol.samples, [](const RadialSample& s) { return s.du; });
        auto ddu = column(sol.samples, [](const RadialSample& s) { return s.ddu; });
        return py::make_tuple(r, u, du, ddu);
      });

  py::class_<ShootOptions>(m, "ShootOptions")
      .def(py::init<>())
      .def_readwrite("rtol", &ShootOptions::rtol)
      .def_readwrite("atol_scale", &ShootOptions::atol_scale)
      .def_readwrite("early_halt", &ShootOptions::early_halt)
      .def_readwrite("max_steps", &ShootOptions::max_steps);
  m.def("shoot_regular", &shoot_regular, py::arg("gamma"), py::arg("p"), py::arg("params"),
        py::arg("r_max") = 1e8, py::arg("opts") = ShootOptions{});
  m.def(
      "reconstruct_u",
      [](const Trajectory& traj, double p, const ProblemParams& params) {
        return reconstruct_u(traj, p, params);
      },
      py::arg("traj"), py::arg("p"), py::arg("params"));
  m.def("to_phase", &to_phase, py::arg("sol"), py::arg("params"));
  m.def(
      "decay_constants",
      [](const RadialSolution& sol, const ProblemParams& params) {
        return decay_constants(sol, params);
      },
      py::arg("sol"), py::arg("params"));
  py::class_<EnergyValue>(m, "EnergyValue")
      .def_readonly("value", &EnergyValue::value)
      .def_readonly("region_valid", &EnergyValue::region_valid);
  m.def(
      "energy",
      [](double t, const PhasePoint& pt, double p, const ProblemParams& params) {
        return energy(t, pt, p, params);
      },
      py::arg("t"), py::arg("pt"), py::arg("p"), py::arg("params"));
  m.def("level_h", &level_h, py::arg("X"), py::arg("p"), py::arg("params"));
  m.def("max_relative_residual", &max_relative_residual, py::arg("sol"), py::arg("params"));

  py::class_<PClass>(m, "PClass")
      .def_readonly("label", &PClass::label)
      .def_readonly("evidence", &PClass::evidence)
      .def_readonly("wall_radius", &PClass::wall_radius)
      .def("__repr__", [](const PClass& c) {
        return std::string("PClass(label=") + p_label_name(c.label) + ")";
      });
  py::class_<CriticalResult>(m, "CriticalResult")
      .def_readonly("p_star", &CriticalResult::p_star)
      .def_readonly("bracket_lo", &CriticalResult::bracket_lo)
      .def_readonly("bracket_hi", &CriticalResult::bracket_hi)
      .def_readonly("tol", &CriticalResult::tol)
      .def_readonly("iterations", &CriticalResult::iterations)
      .def_readonly("lower_reference", &CriticalResult::lower_reference)
      .def_readonly("upper_reference", &CriticalResult::upper_reference)
      .def_readonly("lower_bound_strict", &CriticalResult::lower_bound_strict)
      .def_readonly("upper_bound_strict", &CriticalResult::upper_bound_strict);
  py::class_<CatalogEntry>(m, "CatalogEntry")
      .def_readonly("origin", &CatalogEntry::origin)
      .def_readonly("decay", &CatalogEntry::decay)
      .def_readonly("whole_space", &CatalogEntry::whole_space)
      .def_readonly("cardinality", &CatalogEntry::cardinality)
      .def_readonly("note", &CatalogEntry::note)
      .def_readonly("seeds", &CatalogEntry::seeds);
  py::class_<SingularCatalog>(m, "SingularCatalog")
      .def_readonly("p", &SingularCatalog::p)
      .def_readonly("entries", &SingularCatalog::entries)
      .def_readonly("regime_note", &SingularCatalog::regime_note);
  py::class_<ExteriorCheck>(m, "ExteriorCheck")
      .def_readonly("verdict", &ExteriorCheck::verdict)
      .def_readonly("orbit_class", &ExteriorCheck::orbit_class)
      .def_readonly("barrier", &ExteriorCheck::barrier)
      .def_readonly("a0_enclosed", &ExteriorCheck::a0_enclosed)
      .def_readonly("m0_enclosed", &ExteriorCheck::m0_enclosed)
      .def_readonly("cycle_enclosed", &ExteriorCheck::cycle_enclosed)
      .def_readonly("note", &ExteriorCheck::note);

  m.def("gamma_seed", &gamma_seed, py::arg("p"), py::arg("params"),
        py::arg("delta_scale") = 1e-6);
  m.def("upsilon_seed", &upsilon_seed, py::arg("p"), py::arg("params"),
        py::arg("delta_scale") = 1e-6);
  m.def("gamma_orbit", &gamma_orbit, py::arg("p"), py::arg("params"),
        py::arg("opts") = FlowOptions{});
  m.def("upsilon_orbit", &upsilon_orbit, py::arg("p"), py::arg("params"),
        py::arg("opts") = FlowOptions{});
  m.def("classify_p", &classify_p, py::arg("p"), py::arg("params"),
        py::arg("opts") = FlowOptions{});
  m.def("critical_exponent", &critical_exponent, py::arg("params"), py::arg("tol") = 1e-6,
        py::arg("opts") = FlowOptions{});
  m.def("singular_catalog", &singular_catalog, py::arg("p"), py::arg("params"),
        py::arg("opts") = FlowOptions{});
  m.def("exterior_nonexistence_check", &exterior_nonexistence_check, py::arg("p"),
        py::arg("params"), py::arg("opts") = FlowOptions{});

  py::class_<PortraitOptions>(m, "PortraitOptions")
      .def(py::init<>())
      .def_readwrite("grid_w", &PortraitOptions::grid_w)
      .def_readwrite("grid_h", &PortraitOptions::grid_h)
      .def_readwrite("width", &PortraitOptions::width)
      .def_readwrite("height", &PortraitOptions::height)
      .def_readwrite("margin_frac", &PortraitOptions::margin_frac)
      .def_readwrite("draw_gamma", &PortraitOptions::draw_gamma)
      .def_readwrite("draw_upsilon", &PortraitOptions::draw_upsilon)
      .def_readwrite("draw_cycles", &PortraitOptions::draw_cycles);
  m.def("render_portrait", &render_portrait, py::arg("p"), py::arg("params"),
        py::arg("opts") = PortraitOptions{});
}
