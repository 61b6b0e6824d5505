#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rssdloc/channel.hpp"
#include "rssdloc/geometry.hpp"
#include "rssdloc/solver.hpp"

namespace fixtures {

using rssdloc::BaseStation;
using rssdloc::Point2D;

// Eight RSS stations on the perimeter of an 8 m square plus a TDOA pair on the x axis.
inline std::vector<BaseStation> sim_stations(bool directional, double gain_db = 6.5) {
  const Point2D rss[] = {{-2, -4}, {2, -4}, {4, -2}, {4, 2}, {2, 4}, {-2, 4}, {-4, 2}, {-4, -2}};
  std::vector<BaseStation> bs;
  int id = 1;
  for (const Point2D p : rss) {
    BaseStation s{id++, p, rssdloc::StationRole::RssOnly, rssdloc::OmniAntenna{}};
    if (directional) s.antenna = rssdloc::DirectionalAntenna{gain_db, rssdloc::azimuth(p, {0, 0})};
    bs.push_back(s);
  }
  bs.push_back({id++, {-4, 0}, rssdloc::StationRole::TdoaOnly, rssdloc::OmniAntenna{}});
  bs.push_back({id++, {4, 0}, rssdloc::StationRole::TdoaOnly, rssdloc::OmniAntenna{}});
  return bs;
}

inline void point_all_at(std::vector<BaseStation>& bs, Point2D target) {
  for (auto& s : bs) {
    if (auto* d = s.directional()) d->orientation = rssdloc::azimuth(s.position, target);
  }
}

// Straightforward transcription of the least-squares cost, kept separate from
// the library's optimized evaluator.
inline double reference_objective(const rssdloc::SolverConfig& cfg, const rssdloc::MeasurementSet& m,
                                  Point2D p) {
  double q = 0.0;
  for (const auto& pr : m.rssd_pairs) {
    const auto& a = cfg.bs[pr.i];
    const auto& b = cfg.bs[pr.j];
    const double di = std::hypot(p.x - a.position.x, p.y - a.position.y);
    const double dj = std::hypot(p.x - b.position.x, p.y - b.position.y);
    if (di < 1e-6 || dj < 1e-6) return std::numeric_limits<double>::infinity();
    double model = 10.0 * cfg.params.alpha * std::log10(dj / di);
    if (cfg.antenna_model == rssdloc::AntennaModel::Directional) {
      const auto gain = [&](const BaseStation& s) {
        const auto* d = s.directional();
        if (!d) return 0.0;
        double phi = std::atan2(p.y - s.position.y, p.x - s.position.x) - d->orientation;
        phi = std::remainder(phi, 2.0 * std::numbers::pi);
        return std::abs(phi) > std::numbers::pi / 2 ? 0.0 : d->gain_db * std::cos(phi);
      };
      model += gain(a) - gain(b);
    }
    const double e = pr.value - model;
    q += e * e;
  }
  return q;
}

// Hyperbola branch point written as (r cosh u, b sinh u) and solved for the
// requested ordinate, independent of the library's closed form.
inline Point2D branch_point(double s, double r, double y) {
  const double b = std::sqrt(s * s - r * r);
  const double u = std::asinh(y / b);
  return {r * std::cosh(u), y};
}

}  // namespace fixtures
