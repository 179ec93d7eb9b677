#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "pucci/classify.hpp"
#include "pucci/flow.hpp"
#include "pucci/radial.hpp"

namespace pucci {

using ojson = nlohmann::ordered_json;

// Fixed float formatting shared by every CSV writer: 17 significant
// digits, enough to round-trip a double exactly.
std::string fmt17(double v);

// --- CSV writers (header row, comma separated, LF endings) ---

// columns: t,X,Z,region
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
// columns: r,u,du,ddu
void write_radial_csv(std::ostream& os, const RadialSolution& sol);

// --- JSON builders (insertion-ordered keys, stable across runs) ---

ojson events_json(const std::vector<Event>& events);
ojson fate_json(const OrbitFate& fate);
ojson exponents_json(const ProblemParams& params, std::optional<double> p);
ojson critical_json(const CriticalResult& res);
ojson catalog_json(const SingularCatalog& cat);
ojson exterior_json(const ExteriorCheck& chk);
ojson classification_json(double p, const PClass& cls);

// one sweep row, without trailing newline: p,class,detail
std::string sweep_row(double p, const PClass& cls);

// --- logging, gated by the LOGLEVEL environment variable ---

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// parsed once per process; unknown or unset values mean Warn
LogLevel log_threshold();
void log(LogLevel lvl, const std::string& msg);

}  // namespace pucci
