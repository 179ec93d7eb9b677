#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pucci/stationary.hpp"

namespace pucci {

enum class Direction { Forward, Backward };

enum class EventKind {
  ConcavityCross,
  XNullclineCross,
  ZNullclineCross,
  WallCross,
  StationaryCapture,
  SectionCross,
  BlowUpX,
  BlowUpZ,
};

const char* event_kind_name(EventKind k);

struct Event {
  EventKind kind = EventKind::ConcavityCross;
  double t = 0.0;  // in problem time (t = log r), regardless of direction
  PhasePoint point;
  int orientation = 0;  // sign of d(indicator)/dtau in integration time; 0 if tangent
  std::optional<SPLabel> captured;
  std::string detail;
};

struct TrajectorySample {
  double t = 0.0;
  PhasePoint point;
  Region region = Region::RMinus;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Event> events;
  Direction direction = Direction::Forward;
};

enum class FateKind { ToStationary, ToPeriodicOrbit, BlowUpX, BlowUpZ, Undetermined };

const char* fate_kind_name(FateKind k);

struct OrbitFate {
  FateKind kind = FateKind::Undetermined;
  std::optional<SPLabel> stationary;
  std::optional<double> blowup_time;       // extrapolated asymptote, problem time
  double section_coordinate = 0.0;         // limit Z on the section (periodic verdict)
  double final_distance = 0.0;             // to the captured point (stationary verdict)
  double horizon_used = 0.0;
  std::size_t steps_used = 0;
  std::string note;
};

// Vertical-ray section X = x0, Z > zmin, counted when X increases through x0
// in integration time.
struct PoincareSection {
  double x0 = 0.0;
  double zmin = 0.0;
};

struct FlowOptions {
  double horizon = 500.0;
  std::size_t max_steps = 10'000'000;
  double rtol = 1e-10;
  double atol = 1e-12;
  bool record_samples = true;
  bool detect_blowup = true;
  bool detect_capture = true;
  std::optional<PoincareSection> section;
};

inline constexpr double kEventTol = 1e-12;   // event time localization
inline constexpr double kOrbitTol = 1e-9;    // periodic-orbit closure
inline constexpr double kCaptureDt = 5.0;    // sustained-approach window
inline constexpr double kCaptureFrac = 0.25; // halt radius as a fraction of the capture radius

// capture radius around a stationary point
double capture_radius(const PhasePoint& location);

// One integration with event localization; the trajectory stops at capture,
// blow-up threshold, the horizon or the step budget.
Trajectory integrate(const PhasePoint& start, double p, const ProblemParams& params,
                     Direction dir, const FlowOptions& opts = {});

// Same run, but reduced to a verdict about the limit behavior.
OrbitFate detect_fate(const PhasePoint& start, double p, const ProblemParams& params,
                      Direction dir, const FlowOptions& opts = {});

// Both at once (the classifier wants the trajectory and the verdict).
std::pair<Trajectory, OrbitFate> integrate_with_fate(const PhasePoint& start, double p,
                                                     const ProblemParams& params, Direction dir,
                                                     const FlowOptions& opts = {});

struct PoincareReturn {
  PhasePoint point;
  double return_time = 0.0;  // integration time elapsed until the return
};

// First return to the section from a point on it; throws NoReturn if the orbit
// is captured, blows up or exhausts the budget first.
PoincareReturn poincare_map(const PoincareSection& section, const PhasePoint& start, double p,
                            const ProblemParams& params, const FlowOptions& opts = {});

struct PeriodicOrbit {
  std::vector<PhasePoint> points;  // one loop, closed within kOrbitTol
  double period = 0.0;
  PhasePoint section_anchor;
  double xz_min = 0.0, xz_max = 0.0;
  bool crosses_concavity = false;
};

struct CycleSearchResult {
  std::optional<PeriodicOrbit> orbit;
  double bracket_lo = 0.0, bracket_hi = 0.0;  // last bracket tried (diagnostics)
  std::string note;                           // set when no cycle was found
};

// Fixed point of the section return map around M0; requires p > p_serrin.
CycleSearchResult find_periodic_orbit(double p, const ProblemParams& params,
                                      std::optional<double> seed_hint = {},
                                      const FlowOptions& opts = {});

// True iff every sample lies strictly inside the a priori box
// (0, ntilde-2) x (0, kappa_upper (N+a)).
bool box_certificate(const Trajectory& traj, const ProblemParams& params);

// Closed-form tail estimate of the finite time at which the escaping
// coordinate diverges, continuing from a point past the blow-up threshold.
// `t_tail` is problem time, `kind` is BlowUpX or BlowUpZ. Empty when the
// point does not support the estimate.
std::optional<double> blowup_time_estimate(const PhasePoint& tail, double t_tail, Direction dir,
                                           EventKind kind, const ProblemParams& params);

}  // namespace pucci
