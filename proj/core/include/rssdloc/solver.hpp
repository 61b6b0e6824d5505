#pragma once

#include <vector>

#include "rssdloc/channel.hpp"
#include "rssdloc/geometry.hpp"
#include "rssdloc/optimize.hpp"

namespace rssdloc {

struct SearchRegion {
  double x_min = -3.5;
  double x_max = 3.5;
  double y_min = -3.5;
  double y_max = 3.5;
  double coarse_step = 0.05;
  int refine_iterations = 6;

  Box box() const { return {x_min, x_max, y_min, y_max}; }
  bool contains(Point2D p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  // Spacing after all refinement rounds.
  double resolution() const;
  friend bool operator==(const SearchRegion&, const SearchRegion&) = default;
};

void validate(const SearchRegion& r);

enum class AntennaModel { Omni, Directional };

struct SolverConfig {
  ChannelParams params;
  std::vector<BaseStation> bs;
  SearchRegion region;
  AntennaModel antenna_model = AntennaModel::Omni;
};

// Throws InvalidArgument when the region is malformed or the directional
// model is requested for a configuration with an omni RSS station.
void validate(const SolverConfig& cfg);

inline constexpr double kSingularRadius = 1e-6;

// Sum of squared RSSD residuals at p. In the directional model each residual
// also removes g_i(p) - g_j(p) computed from the stations' current
// boresights. Throws SingularCandidate when p sits on an RSS station.
double rssd_objective(const SolverConfig& cfg, const MeasurementSet& m, Point2D p);

// Minimizes the objective over the search region with a coarse lattice and
// successive halving refinement.
Point2D solve_rssd(const SolverConfig& cfg, const MeasurementSet& m);

// Restricts the search to the measured TDOA hyperbola and minimizes over the
// ordinate only. The result lies on the hyperbola.
Point2D solve_rssd_tdoa(const SolverConfig& cfg, const MeasurementSet& m);

// Same objective as rssd_objective but returns +inf at singular candidates.
// Evaluations share precomputed per-pair data and are safe to call from
// several threads.
class RssdObjective {
 public:
  RssdObjective(const SolverConfig& cfg, const MeasurementSet& m);
  double operator()(Point2D p) const;

 private:
  struct Station {
    Point2D position;
    bool directional;
    double gain_db;
    double orientation;
  };
  std::vector<Station> stations_;
  std::vector<std::size_t> pair_i_;
  std::vector<std::size_t> pair_j_;
  std::vector<double> pair_value_;
  double five_alpha_;
  bool directional_;
};

// Hyperbola and frame implied by a measurement's TDOA.
struct TdoaConstraint {
  CanonicalFrame frame;
  Hyperbola hyperbola;
};

TdoaConstraint make_tdoa_constraint(std::span<const BaseStation> bs, const TdoaMeasurement& t);

}  // namespace rssdloc
