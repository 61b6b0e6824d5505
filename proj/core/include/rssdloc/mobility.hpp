#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rssdloc/channel.hpp"
#include "rssdloc/geometry.hpp"
#include "rssdloc/optimize.hpp"

namespace rssdloc {

// Random-waypoint movement: pick a uniform waypoint in the area, walk to it
// at constant speed, pause, repeat.
struct WaypointModelParams {
  Box area{-3.5, 3.5, -3.5, 3.5};
  double speed = 1.0;          // m/s
  double pause_time = 0.0;     // s
  double total_length = 18.0;  // m, summed distance between samples
  double update_rate = 2.0;    // Hz
  std::optional<Point2D> start;  // uniform draw in the area when absent

  friend bool operator==(const WaypointModelParams&, const WaypointModelParams&) = default;
};

void validate(const WaypointModelParams& p);

struct TrackEpoch {
  double t;  // s
  Point2D position;
  friend bool operator==(const TrackEpoch&, const TrackEpoch&) = default;
};

struct Track {
  std::vector<TrackEpoch> epochs;

  double path_length() const;
  friend bool operator==(const Track&, const Track&) = default;
};

// Samples the walk every 1/update_rate seconds until the summed distance
// between consecutive samples reaches total_length.
Track generate_track(const WaypointModelParams& params, Rng& rng);

// Positions sampled at a fixed interval, e.g. a predefined test route.
Track track_from_points(std::span<const Point2D> points, double update_rate);

// CSV with header `t,x,y`, six decimals.
void write_track_csv(std::ostream& out, const Track& track);
Track read_track_csv(std::istream& in);

// Boresight of every station (radians, only meaningful for directional
// antennas) and the estimate the boresights were last pointed at.
struct OrientationState {
  std::vector<double> boresight;
  Point2D last_estimate;
  friend bool operator==(const OrientationState&, const OrientationState&) = default;
};

// State taken from the stations' configured boresights.
OrientationState current_orientation(std::span<const BaseStation> bs, Point2D last_estimate);

// Points every directional RSS station at the estimate. A station that sits
// exactly on the estimate keeps its previous boresight.
OrientationState update_orientation(const OrientationState& state,
                                    std::span<const BaseStation> bs, Point2D new_estimate);

// Writes the state's boresights into the stations' antenna descriptors.
void apply_orientation(const OrientationState& state, std::span<BaseStation> bs);

// |angle| between station `index`'s boresight and the direction to the true
// position, in [0, pi]. Throws CoincidentWithStation.
double misorientation(const OrientationState& state, std::span<const BaseStation> bs,
                      std::size_t index, Point2D true_position);

}  // namespace rssdloc
