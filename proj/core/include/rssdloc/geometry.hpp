#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

namespace rssdloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2D a, Point2D b) = default;
};

inline double distance(Point2D a, Point2D b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double squared_distance(Point2D a, Point2D b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

inline double azimuth(Point2D from, Point2D to) { return std::atan2(to.y - from.y, to.x - from.x); }

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

enum class StationRole { RssOnly, TdoaOnly, RssAndTdoa };

inline bool measures_rss(StationRole r) { return r != StationRole::TdoaOnly; }
inline bool measures_tdoa(StationRole r) { return r != StationRole::RssOnly; }

struct OmniAntenna {
  friend bool operator==(const OmniAntenna&, const OmniAntenna&) = default;
};

struct DirectionalAntenna {
  double gain_db = 6.5;
  double orientation = 0.0;  // boresight azimuth, radians in (-pi, pi]
  friend bool operator==(const DirectionalAntenna&, const DirectionalAntenna&) = default;
};

using Antenna = std::variant<OmniAntenna, DirectionalAntenna>;

struct BaseStation {
  int id = 0;
  Point2D position;
  StationRole role = StationRole::RssOnly;
  Antenna antenna = OmniAntenna{};
  // Constant extra attenuation applied to this station's RSS; emulates an
  // obstructed line of sight.
  double obstruction_db = 0.0;

  bool is_directional() const { return std::holds_alternative<DirectionalAntenna>(antenna); }
  const DirectionalAntenna* directional() const { return std::get_if<DirectionalAntenna>(&antenna); }
  DirectionalAntenna* directional() { return std::get_if<DirectionalAntenna>(&antenna); }

  friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

// Throws InvalidArgument if the station violates its invariants.
void validate(const BaseStation& bs);

// Locus of points whose distances to (-s, 0) and (+s, 0) differ by 2r:
//   d(p, (-s,0)) - d(p, (+s,0)) = 2r.
// The sign of r picks the branch.
struct Hyperbola {
  double half_separation = 1.0;   // s, meters
  double range_difference = 0.0;  // r = 0.5 * c * dt, meters (signed)

  // Throws DegenerateHyperbola when |r| >= s - 1e-9 or s <= 0.
  static Hyperbola from_tdoa(double half_separation, double tdoa_seconds);
  static Hyperbola from_range_difference(double half_separation, double range_difference);
};

inline constexpr double kDegeneracyTolerance = 1e-9;

bool is_degenerate(const Hyperbola& h);

// Branch abscissa for a given ordinate, canonical frame.
double hyperbola_x_of_y(const Hyperbola& h, double y);

inline Point2D hyperbola_point(const Hyperbola& h, double y) { return {hyperbola_x_of_y(h, y), y}; }

// (d_k - d_l) - 2r for the canonical foci, i.e. how far p is from the curve in
// range-difference terms.
double range_difference_residual(const Hyperbola& h, Point2D p);

struct YBracket {
  double lo;
  double hi;
};

// Closest point on the hyperbola branch to p. Without a bracket the search
// covers every ordinate the foot point can have.
Point2D project_onto_hyperbola(Point2D p, const Hyperbola& h,
                               std::optional<YBracket> bracket = std::nullopt);

// Rigid frame with the TDOA pair at (-s, 0) (station k) and (+s, 0) (station l).
class CanonicalFrame {
 public:
  CanonicalFrame(Point2D station_k, Point2D station_l);

  double half_separation() const { return half_separation_; }
  Point2D to_canonical(Point2D p) const;
  Point2D from_canonical(Point2D q) const;

 private:
  Point2D origin_;
  double cos_;
  double sin_;
  double half_separation_;
};

}  // namespace rssdloc
