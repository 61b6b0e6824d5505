#include "rssdloc/geometry.hpp"

#include <algorithm>
#include <string>

#include "rssdloc/error.hpp"
#include "rssdloc/optimize.hpp"

namespace rssdloc {

double normalize_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(radians, two_pi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

void validate(const BaseStation& bs) {
  if (!std::isfinite(bs.position.x) || !std::isfinite(bs.position.y)) {
    throw Error(Errc::InvalidArgument, "station " + std::to_string(bs.id) + " has a non-finite position");
  }
  if (const auto* dir = bs.directional()) {
    if (!(dir->gain_db >= 0.0)) {
      throw Error(Errc::InvalidArgument, "station " + std::to_string(bs.id) + " has negative antenna gain");
    }
  }
}

bool is_degenerate(const Hyperbola& h) {
  return !(h.half_separation > 0.0) ||
         !(std::abs(h.range_difference) < h.half_separation - kDegeneracyTolerance);
}

Hyperbola Hyperbola::from_range_difference(double half_separation, double range_difference) {
  Hyperbola h{half_separation, range_difference};
  if (is_degenerate(h)) {
    throw Error(Errc::DegenerateHyperbola,
                "range difference " + std::to_string(range_difference) +
                    " m not below half separation " + std::to_string(half_separation) + " m");
  }
  return h;
}

Hyperbola Hyperbola::from_tdoa(double half_separation, double tdoa_seconds) {
  return from_range_difference(half_separation, 0.5 * kSpeedOfLight * tdoa_seconds);
}

double hyperbola_x_of_y(const Hyperbola& h, double y) {
  if (is_degenerate(h)) {
    throw Error(Errc::DegenerateHyperbola, "hyperbola has |r| >= s");
  }
  const double r = h.range_difference;
  const double b2 = h.half_separation * h.half_separation - r * r;
  return r * std::sqrt(1.0 + y * y / b2);
}

double range_difference_residual(const Hyperbola& h, Point2D p) {
  const double dk = distance(p, {-h.half_separation, 0.0});
  const double dl = distance(p, {h.half_separation, 0.0});
  return (dk - dl) - 2.0 * h.range_difference;
}

Point2D project_onto_hyperbola(Point2D p, const Hyperbola& h, std::optional<YBracket> bracket) {
  if (is_degenerate(h)) {
    throw Error(Errc::DegenerateHyperbola, "cannot project onto a degenerate hyperbola");
  }
  YBracket b;
  if (bracket) {
    b = *bracket;
  } else {
    // The foot point is no farther from p than the vertex is.
    const double reach = distance(p, {h.range_difference, 0.0});
    b = {p.y - reach, p.y + reach};
  }
  if (!(b.hi > b.lo)) return hyperbola_point(h, b.lo);

  const auto sq = [&](double y) { return squared_distance(hyperbola_point(h, y), p); };
  constexpr int kCoarseSamples = 2000;
  const auto best = scan_then_golden(sq, b.lo, b.hi, (b.hi - b.lo) / kCoarseSamples, 1e-11);
  return hyperbola_point(h, best.argmin);
}

CanonicalFrame::CanonicalFrame(Point2D station_k, Point2D station_l)
    : origin_(0.5 * (station_k + station_l)) {
  const double sep = distance(station_k, station_l);
  if (!(sep > 0.0)) {
    throw Error(Errc::CoincidentPosition, "TDOA stations share a position");
  }
  cos_ = (station_l.x - station_k.x) / sep;
  sin_ = (station_l.y - station_k.y) / sep;
  half_separation_ = 0.5 * sep;
}

Point2D CanonicalFrame::to_canonical(Point2D p) const {
  const Point2D d = p - origin_;
  return {cos_ * d.x + sin_ * d.y, -sin_ * d.x + cos_ * d.y};
}

Point2D CanonicalFrame::from_canonical(Point2D q) const {
  return {origin_.x + cos_ * q.x - sin_ * q.y, origin_.y + sin_ * q.x + cos_ * q.y};
}

}  // namespace rssdloc
