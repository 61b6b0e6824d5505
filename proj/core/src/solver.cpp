#include "rssdloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rssdloc/error.hpp"

namespace rssdloc {

double SearchRegion::resolution() const { return std::ldexp(coarse_step, -refine_iterations); }

void validate(const SearchRegion& r) {
  if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max)) {
    throw Error(Errc::EmptyRegion, "search region has no interior");
  }
  if (!(r.coarse_step > 0.0)) throw Error(Errc::EmptyRegion, "coarse step must be positive");
  if (r.refine_iterations < 0) {
    throw Error(Errc::InvalidArgument, "refine_iterations must be >= 0");
  }
}

void validate(const SolverConfig& cfg) {
  validate(cfg.region);
  validate(cfg.params);
  for (const auto& s : cfg.bs) {
    validate(s);
    if (cfg.antenna_model == AntennaModel::Directional && measures_rss(s.role) &&
        !s.is_directional()) {
      throw Error(Errc::InvalidArgument,
                  "directional model needs a directional antenna on station " +
                      std::to_string(s.id));
    }
  }
}

RssdObjective::RssdObjective(const SolverConfig& cfg, const MeasurementSet& m)
    : five_alpha_(5.0 * cfg.params.alpha),
      directional_(cfg.antenna_model == AntennaModel::Directional) {
  std::vector<std::ptrdiff_t> slot(cfg.bs.size(), -1);
  const auto compact = [&](std::size_t idx) {
    if (idx >= cfg.bs.size()) {
      throw Error(Errc::InvalidArgument, "measurement references unknown station " +
                                             std::to_string(idx));
    }
    if (slot[idx] < 0) {
      const auto& s = cfg.bs[idx];
      const auto* dir = s.directional();
      slot[idx] = static_cast<std::ptrdiff_t>(stations_.size());
      stations_.push_back({s.position, directional_ && dir != nullptr,
                           dir ? dir->gain_db : 0.0, dir ? dir->orientation : 0.0});
    }
    return static_cast<std::size_t>(slot[idx]);
  };
  for (const auto& p : m.rssd_pairs) {
    if (p.i >= p.j) throw Error(Errc::InvalidArgument, "RSSD pair must satisfy i < j");
    pair_i_.push_back(compact(p.i));
    pair_j_.push_back(compact(p.j));
    pair_value_.push_back(p.value);
  }
}

double RssdObjective::operator()(Point2D p) const {
  constexpr double kSingular2 = kSingularRadius * kSingularRadius;
  // log10 of squared distance and antenna gain, per involved station.
  std::vector<double> lg(stations_.size());
  std::vector<double> g(stations_.size(), 0.0);
  for (std::size_t s = 0; s < stations_.size(); ++s) {
    const auto& st = stations_[s];
    const double d2 = squared_distance(p, st.position);
    if (d2 < kSingular2) return std::numeric_limits<double>::infinity();
    lg[s] = std::log10(d2);
    if (st.directional) {
      g[s] = antenna_gain(st.gain_db, azimuth(st.position, p) - st.orientation);
    }
  }
  double q = 0.0;
  for (std::size_t n = 0; n < pair_value_.size(); ++n) {
    const std::size_t i = pair_i_[n];
    const std::size_t j = pair_j_[n];
    const double res = pair_value_[n] - five_alpha_ * (lg[j] - lg[i]) - g[i] + g[j];
    q += res * res;
  }
  return q;
}

double rssd_objective(const SolverConfig& cfg, const MeasurementSet& m, Point2D p) {
  for (const auto& pair : m.rssd_pairs) {
    for (const std::size_t idx : {pair.i, pair.j}) {
      if (idx < cfg.bs.size() && distance(cfg.bs[idx].position, p) < kSingularRadius) {
        throw Error(Errc::SingularCandidate,
                    "candidate on station " + std::to_string(cfg.bs[idx].id));
      }
    }
  }
  return RssdObjective(cfg, m)(p);
}

namespace {

// Near a corner the directional objective can have a second, narrow valley;
// refining a few coarse minima instead of one keeps the global one.
constexpr int kRefineCandidates = 8;

}  // namespace

Point2D solve_rssd(const SolverConfig& cfg, const MeasurementSet& m) {
  validate(cfg.region);
  const RssdObjective objective(cfg, m);
  return grid_refine_minimize(objective, cfg.region.box(), cfg.region.coarse_step,
                              cfg.region.refine_iterations, kRefineCandidates)
      .argmin;
}

TdoaConstraint make_tdoa_constraint(std::span<const BaseStation> bs, const TdoaMeasurement& t) {
  if (t.k >= bs.size() || t.l >= bs.size()) {
    throw Error(Errc::InvalidArgument, "TDOA references unknown station");
  }
  CanonicalFrame frame(bs[t.k].position, bs[t.l].position);
  const Hyperbola h = Hyperbola::from_tdoa(frame.half_separation(), t.delta_t);
  return {frame, h};
}

Point2D solve_rssd_tdoa(const SolverConfig& cfg, const MeasurementSet& m) {
  validate(cfg.region);
  if (!m.tdoa) throw Error(Errc::MissingTdoa, "measurement set carries no TDOA");
  const auto [frame, h] = make_tdoa_constraint(cfg.bs, *m.tdoa);

  // Ordinate range in the TDOA frame that covers the search region.
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  const SearchRegion& r = cfg.region;
  for (const Point2D corner : {Point2D{r.x_min, r.y_min}, Point2D{r.x_max, r.y_min},
                               Point2D{r.x_min, r.y_max}, Point2D{r.x_max, r.y_max}}) {
    const double y = frame.to_canonical(corner).y;
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }

  const RssdObjective objective(cfg, m);
  const auto along_curve = [&](double y) {
    return objective(frame.from_canonical(hyperbola_point(h, y)));
  };
  const auto best = scan_then_golden(along_curve, y_lo, y_hi, r.coarse_step, 1e-7, kRefineCandidates);
  return frame.from_canonical(hyperbola_point(h, best.argmin));
}

}  // namespace rssdloc
