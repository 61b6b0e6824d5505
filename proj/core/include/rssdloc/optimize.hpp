#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "rssdloc/geometry.hpp"

namespace rssdloc {

struct ScalarMinimum {
  double argmin;
  double value;
};

// Golden-section search on [lo, hi]; assumes f is unimodal there. Stops once
// the bracket is narrower than tol.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol);

// Evaluates f at lo, lo + step, ... (hi included when it lies on the lattice,
// and always as the last sample) and returns the smallest value. Ties keep
// the earliest sample.
ScalarMinimum scan_minimize(const std::function<double(double)>& f, double lo, double hi,
                            double step);

// Coarse scan followed by golden-section refinement inside the cells of the
// `candidates` lowest local minima of the scan.
ScalarMinimum scan_then_golden(const std::function<double(double)>& f, double lo, double hi,
                               double step, double tol, int candidates = 1);

struct Box {
  double x_min;
  double x_max;
  double y_min;
  double y_max;
  friend bool operator==(const Box&, const Box&) = default;
};

struct PlanarMinimum {
  Point2D argmin;
  double value;
};

// Exhaustive lattice scan over the box, rows by increasing y. Ties go to the
// smallest (y, x).
PlanarMinimum grid_minimize(const std::function<double(Point2D)>& f, const Box& box, double step);

// Lattice scan at `step`, then `refine_iterations` rounds each halving the
// step and scanning a 5 x 5 patch around the incumbent (clamped to the box).
// The `candidates` lowest lattice local minima are refined independently and
// the best result wins, so a narrow basin missed by the coarse lattice still
// gets a chance.
PlanarMinimum grid_refine_minimize(const std::function<double(Point2D)>& f, const Box& box,
                                   double step, int refine_iterations, int candidates = 1);

// Lattice sample count for [lo, hi] at step, including both ends.
std::size_t lattice_count(double lo, double hi, double step);

}  // namespace rssdloc
