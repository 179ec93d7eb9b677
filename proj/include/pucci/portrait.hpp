#pragma once

#include <string>

#include "pucci/params.hpp"

namespace pucci {

struct PortraitOptions {
  int grid_w = 24;       // arrow grid resolution across the box
  int grid_h = 18;
  double width = 760.0;  // pixel size of the drawing
  double height = 560.0;
  double margin_frac = 0.12;  // view margin around the invariant box
  bool draw_gamma = true;
  bool draw_upsilon = true;
  bool draw_cycles = true;
};

// Self-contained SVG of the first-quadrant flow at exponent p: vector-field
// arrows, the structural lines, stationary points with class glyphs, the
// regular and fast-decay orbits, and any detected closed orbits.
std::string render_portrait(double p, const ProblemParams& params,
                            const PortraitOptions& opts = {});

}  // namespace pucci
