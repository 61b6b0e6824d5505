#include "rssdloc/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rssdloc/csv.hpp"
#include "rssdloc/error.hpp"

namespace rssdloc {

FingerprintDB build_db(std::span<const BaseStation> bs, const Box& area, double grid_step,
                       std::span<const Point2D> excluded, const ChannelParams& channel, Rng& rng,
                       DbBuildOptions options) {
  if (!(grid_step > 0.0)) throw Error(Errc::EmptyGrid, "grid step must be positive");
  if (!(area.x_max >= area.x_min) || !(area.y_max >= area.y_min)) {
    throw Error(Errc::EmptyGrid, "grid area is inverted");
  }
  if (options.averages < 1) throw Error(Errc::InvalidArgument, "averages must be >= 1");
  validate(channel);

  ChannelParams params = channel;
  if (options.noiseless) params.sigma_beta = 0.0;

  FingerprintDB db;
  db.grid_step = grid_step;
  db.excluded.assign(excluded.begin(), excluded.end());

  const std::size_t nx = lattice_count(area.x_min, area.x_max, grid_step);
  const std::size_t ny = lattice_count(area.y_min, area.y_max, grid_step);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const Point2D p{area.x_min + static_cast<double>(ix) * grid_step,
                      area.y_min + static_cast<double>(iy) * grid_step};
      const bool skip = std::any_of(excluded.begin(), excluded.end(),
                                    [&](Point2D e) { return distance(e, p) <= 1e-9; });
      if (skip) continue;
      std::vector<double> rss = simulate_rss(bs, p, params, rng);
      for (int a = 1; a < options.averages; ++a) {
        const auto more = simulate_rss(bs, p, params, rng);
        for (std::size_t k = 0; k < rss.size(); ++k) rss[k] += more[k];
      }
      for (double& v : rss) v /= options.averages;
      db.entries.push_back({p, std::move(rss)});
    }
  }
  if (db.entries.empty()) throw Error(Errc::EmptyGrid, "every grid point is excluded");
  return db;
}

double rssd_euclidean(std::span<const double> meas, std::span<const double> ref) {
  if (meas.size() != ref.size()) {
    throw Error(Errc::LengthMismatch, "measurement has " + std::to_string(meas.size()) +
                                          " values, reference has " + std::to_string(ref.size()));
  }
  if (meas.size() < 2) throw Error(Errc::LengthMismatch, "RSSD needs at least two stations");
  double sum = 0.0;
  for (std::size_t i = 0; i < meas.size(); ++i) {
    for (std::size_t j = i + 1; j < meas.size(); ++j) {
      const double d = (meas[i] - meas[j]) - (ref[i] - ref[j]);
      sum += d * d;
    }
  }
  return std::sqrt(sum);
}

Point2D coarse_estimate(const FingerprintDB& db, std::span<const double> meas) {
  if (db.entries.empty()) throw Error(Errc::EmptyGrid, "fingerprint database is empty");
  const FingerprintEntry* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& e : db.entries) {
    const double d = rssd_euclidean(meas, e.rss_ref);
    const bool better =
        best == nullptr || d < best_dist ||
        (d == best_dist && (e.position.y < best->position.y ||
                            (e.position.y == best->position.y && e.position.x < best->position.x)));
    if (better) {
      best = &e;
      best_dist = d;
    }
  }
  return best->position;
}

Point2D refine_with_tdoa(Point2D coarse, const TdoaMeasurement& tdoa,
                         std::span<const BaseStation> bs) {
  if (tdoa.k >= bs.size() || tdoa.l >= bs.size()) {
    throw Error(Errc::InvalidArgument, "TDOA references unknown station");
  }
  const CanonicalFrame frame(bs[tdoa.k].position, bs[tdoa.l].position);
  const Hyperbola h = Hyperbola::from_tdoa(frame.half_separation(), tdoa.delta_t);
  return frame.from_canonical(project_onto_hyperbola(frame.to_canonical(coarse), h));
}

std::vector<Point2D> circular_track(const CircularTrackParams& params) {
  if (!(params.radius > 0.0)) throw Error(Errc::InvalidArgument, "radius must be positive");
  if (params.count < 1) throw Error(Errc::InvalidArgument, "track needs at least one point");
  std::vector<Point2D> pts;
  pts.reserve(static_cast<std::size_t>(params.count));
  for (int m = 1; m <= params.count; ++m) {
    const double a = deg_to_rad(params.start_angle_deg + params.step_angle_deg * (m - 1));
    pts.push_back({params.center.x + params.radius * std::cos(a),
                   params.center.y + params.radius * std::sin(a)});
  }
  return pts;
}

void write_db_csv(std::ostream& out, const FingerprintDB& db) {
  out << "x,y";
  for (std::size_t n = 1; n <= db.station_count(); ++n) out << ",P_" << n;
  out << '\n';
  for (const auto& e : db.entries) {
    out << format_fixed(e.position.x, 4) << ',' << format_fixed(e.position.y, 4);
    for (double v : e.rss_ref) out << ',' << format_fixed(v, 4);
    out << '\n';
  }
}

FingerprintDB read_db_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t cx = table.column("x");
  const std::size_t cy = table.column("y");
  if (table.header.size() < 4) {
    throw Error(Errc::ParseError, "fingerprint CSV needs at least two RSS columns");
  }
  FingerprintDB db;
  for (const auto& row : table.rows) {
    FingerprintEntry e{{row[cx], row[cy]}, {}};
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != cx && c != cy) e.rss_ref.push_back(row[c]);
    }
    db.entries.push_back(std::move(e));
  }
  if (db.entries.empty()) throw Error(Errc::EmptyGrid, "fingerprint CSV has no rows");
  // Infer the spacing from the smallest nonzero coordinate gap.
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t a = 1; a < db.entries.size(); ++a) {
    for (const double gap : {std::abs(db.entries[a].position.x - db.entries[0].position.x),
                             std::abs(db.entries[a].position.y - db.entries[0].position.y)}) {
      if (gap > 1e-9) step = std::min(step, gap);
    }
  }
  if (std::isfinite(step)) db.grid_step = step;
  return db;
}

}  // namespace rssdloc
