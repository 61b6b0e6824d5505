#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rssdloc/channel.hpp"
#include "rssdloc/geometry.hpp"
#include "rssdloc/optimize.hpp"

namespace rssdloc {

struct FingerprintEntry {
  Point2D position;
  std::vector<double> rss_ref;  // dBm, one per RSS station
  friend bool operator==(const FingerprintEntry&, const FingerprintEntry&) = default;
};

struct FingerprintDB {
  std::vector<FingerprintEntry> entries;
  double grid_step = 0.25;
  std::vector<Point2D> excluded;

  std::size_t station_count() const { return entries.empty() ? 0 : entries.front().rss_ref.size(); }
  friend bool operator==(const FingerprintDB&, const FingerprintDB&) = default;
};

struct DbBuildOptions {
  bool noiseless = false;
  // Offline RSS per grid point is the mean of this many independent draws.
  int averages = 1;
};

// Grid points lo, lo + step, ... over the area; points matching an excluded
// position (within 1e-9 m) are skipped. Throws EmptyGrid.
FingerprintDB build_db(std::span<const BaseStation> bs, const Box& area, double grid_step,
                       std::span<const Point2D> excluded, const ChannelParams& channel, Rng& rng,
                       DbBuildOptions options = {});

// Euclidean distance between the all-pairs RSSD expansions of two RSS
// vectors. A common offset on every component cancels.
double rssd_euclidean(std::span<const double> meas, std::span<const double> ref);

// Grid position whose reference vector is nearest in RSSD space; ties go to
// the smallest (y, x).
Point2D coarse_estimate(const FingerprintDB& db, std::span<const double> meas);

// Projects the coarse fix onto the hyperbola of the measured TDOA and maps it
// back to scenario coordinates.
Point2D refine_with_tdoa(Point2D coarse, const TdoaMeasurement& tdoa,
                         std::span<const BaseStation> bs);

struct CircularTrackParams {
  Point2D center{1.5, 1.5};
  double radius = 1.0;
  int count = 48;
  double start_angle_deg = -90.0;
  double step_angle_deg = 7.5;
  friend bool operator==(const CircularTrackParams&, const CircularTrackParams&) = default;
};

std::vector<Point2D> circular_track(const CircularTrackParams& params);

// CSV with header `x,y,P_1,...,P_N`, four decimals. Excluded points are
// simply absent.
void write_db_csv(std::ostream& out, const FingerprintDB& db);
FingerprintDB read_db_csv(std::istream& in);

}  // namespace rssdloc
