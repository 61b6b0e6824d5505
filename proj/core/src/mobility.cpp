#include "rssdloc/mobility.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "rssdloc/csv.hpp"
#include "rssdloc/error.hpp"

namespace rssdloc {

void validate(const WaypointModelParams& p) {
  if (!(p.area.x_min < p.area.x_max) || !(p.area.y_min < p.area.y_max)) {
    throw Error(Errc::EmptyRegion, "movement area has no interior");
  }
  if (!(p.speed > 0.0)) throw Error(Errc::InvalidArgument, "speed must be positive");
  if (!(p.pause_time >= 0.0)) throw Error(Errc::InvalidArgument, "pause time must be >= 0");
  if (!(p.update_rate > 0.0)) throw Error(Errc::InvalidArgument, "update rate must be positive");
  if (!(p.total_length >= 0.0)) throw Error(Errc::InvalidArgument, "total length must be >= 0");
  if (p.start) {
    const Point2D s = *p.start;
    if (s.x < p.area.x_min || s.x > p.area.x_max || s.y < p.area.y_min || s.y > p.area.y_max) {
      throw Error(Errc::InvalidArgument, "start position outside the movement area");
    }
  }
}

double Track::path_length() const {
  double sum = 0.0;
  for (std::size_t n = 1; n < epochs.size(); ++n) {
    sum += distance(epochs[n - 1].position, epochs[n].position);
  }
  return sum;
}

namespace {

Point2D uniform_point(const Box& area, Rng& rng) {
  std::uniform_real_distribution<double> ux(area.x_min, area.x_max);
  std::uniform_real_distribution<double> uy(area.y_min, area.y_max);
  const double x = ux(rng);
  return {x, uy(rng)};
}

}  // namespace

Track generate_track(const WaypointModelParams& params, Rng& rng) {
  validate(params);
  Point2D pos = params.start ? *params.start : uniform_point(params.area, rng);
  Track track;
  track.epochs.push_back({0.0, pos});
  if (params.total_length <= 0.0) return track;

  const double dt = 1.0 / params.update_rate;
  Point2D waypoint = uniform_point(params.area, rng);
  double pause_left = 0.0;
  double walked = 0.0;
  for (std::size_t n = 1; walked < params.total_length; ++n) {
    const Point2D previous = pos;
    double remaining = dt;
    while (remaining > 0.0) {
      if (pause_left > 0.0) {
        const double wait = std::min(pause_left, remaining);
        pause_left -= wait;
        remaining -= wait;
        continue;
      }
      const double gap = distance(pos, waypoint);
      const double reach = params.speed * remaining;
      if (reach >= gap) {
        pos = waypoint;
        remaining -= gap / params.speed;
        waypoint = uniform_point(params.area, rng);
        pause_left = params.pause_time;
      } else {
        pos = pos + (reach / gap) * (waypoint - pos);
        remaining = 0.0;
      }
    }
    walked += distance(previous, pos);
    track.epochs.push_back({static_cast<double>(n) * dt, pos});
  }
  return track;
}

Track track_from_points(std::span<const Point2D> points, double update_rate) {
  if (!(update_rate > 0.0)) throw Error(Errc::InvalidArgument, "update rate must be positive");
  Track track;
  for (std::size_t n = 0; n < points.size(); ++n) {
    track.epochs.push_back({static_cast<double>(n) / update_rate, points[n]});
  }
  return track;
}

void write_track_csv(std::ostream& out, const Track& track) {
  out << "t,x,y\n";
  for (const auto& e : track.epochs) {
    out << format_fixed(e.t, 6) << ',' << format_fixed(e.position.x, 6) << ','
        << format_fixed(e.position.y, 6) << '\n';
  }
}

Track read_track_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t ct = table.column("t");
  const std::size_t cx = table.column("x");
  const std::size_t cy = table.column("y");
  Track track;
  for (const auto& row : table.rows) {
    const TrackEpoch e{row[ct], {row[cx], row[cy]}};
    if (!track.epochs.empty() && !(e.t > track.epochs.back().t)) {
      throw Error(Errc::ParseError, "track times must increase strictly");
    }
    track.epochs.push_back(e);
  }
  return track;
}

OrientationState current_orientation(std::span<const BaseStation> bs, Point2D last_estimate) {
  OrientationState state;
  state.last_estimate = last_estimate;
  for (const auto& s : bs) {
    const auto* dir = s.directional();
    state.boresight.push_back(dir ? normalize_angle(dir->orientation) : 0.0);
  }
  return state;
}

OrientationState update_orientation(const OrientationState& state,
                                    std::span<const BaseStation> bs, Point2D new_estimate) {
  if (!std::isfinite(new_estimate.x) || !std::isfinite(new_estimate.y)) {
    throw Error(Errc::InvalidArgument, "estimate is not finite");
  }
  if (state.boresight.size() != bs.size()) {
    throw Error(Errc::LengthMismatch, "orientation state does not match the station list");
  }
  OrientationState next = state;
  next.last_estimate = new_estimate;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!bs[i].is_directional() || !measures_rss(bs[i].role)) continue;
    if (bs[i].position == new_estimate) continue;
    next.boresight[i] = azimuth(bs[i].position, new_estimate);
  }
  return next;
}

void apply_orientation(const OrientationState& state, std::span<BaseStation> bs) {
  if (state.boresight.size() != bs.size()) {
    throw Error(Errc::LengthMismatch, "orientation state does not match the station list");
  }
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (auto* dir = bs[i].directional()) dir->orientation = state.boresight[i];
  }
}

double misorientation(const OrientationState& state, std::span<const BaseStation> bs,
                      std::size_t index, Point2D true_position) {
  if (index >= bs.size() || index >= state.boresight.size()) {
    throw Error(Errc::InvalidArgument, "station index out of range");
  }
  if (bs[index].position == true_position) {
    throw Error(Errc::CoincidentWithStation,
                "true position on station " + std::to_string(bs[index].id));
  }
  return std::abs(
      normalize_angle(azimuth(bs[index].position, true_position) - state.boresight[index]));
}

}  // namespace rssdloc
