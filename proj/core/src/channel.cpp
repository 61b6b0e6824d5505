#include "rssdloc/channel.hpp"

#include <string>

#include "rssdloc/error.hpp"

namespace rssdloc {

Rng derive_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

double gaussian(Rng& rng, double sigma) {
  std::normal_distribution<double> unit(0.0, 1.0);
  return sigma * unit(rng);
}

void validate(const ChannelParams& p) {
  if (!(p.alpha > 0.0)) throw Error(Errc::InvalidArgument, "path-loss exponent must be positive");
  if (!(p.sigma_beta >= 0.0)) throw Error(Errc::InvalidArgument, "shadow-fading std must be >= 0");
  if (!(p.d0 > 0.0)) throw Error(Errc::InvalidArgument, "reference distance must be positive");
}

void validate(const ChannelPresets& p) {
  validate(p.omni_omni);
  validate(p.omni_dir);
  if (p.omni_dir.alpha < p.omni_omni.alpha) {
    throw Error(Errc::InvalidArgument, "omni/dir path-loss exponent must not be below omni/omni");
  }
  if (p.omni_dir.sigma_beta > p.omni_omni.sigma_beta) {
    throw Error(Errc::InvalidArgument, "omni/dir shadow fading must not exceed omni/omni");
  }
}

double received_power(const ChannelParams& params, double d, double beta) {
  if (!(d > 0.0)) {
    throw Error(Errc::NonPositiveDistance, "distance " + std::to_string(d) + " m");
  }
  return params.p0 - 10.0 * params.alpha * std::log10(d / params.d0) + beta;
}

double antenna_gain(double gain_db, double phi) {
  const double a = normalize_angle(phi);
  if (std::abs(a) > std::numbers::pi / 2) return 0.0;
  return std::max(0.0, gain_db * std::cos(a));
}

double pointing_angle(const BaseStation& bs, Point2D target) {
  const auto* dir = bs.directional();
  if (dir == nullptr) return 0.0;
  return normalize_angle(azimuth(bs.position, target) - dir->orientation);
}

double gain_toward(const BaseStation& bs, Point2D target) {
  const auto* dir = bs.directional();
  if (dir == nullptr) return 0.0;
  return antenna_gain(dir->gain_db, pointing_angle(bs, target));
}

std::vector<std::size_t> rss_station_indices(std::span<const BaseStation> bs) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (measures_rss(bs[i].role)) out.push_back(i);
  }
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> tdoa_pair(std::span<const BaseStation> bs) {
  std::optional<std::size_t> k;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!measures_tdoa(bs[i].role)) continue;
    if (!k) {
      k = i;
    } else {
      return std::pair{*k, i};
    }
  }
  return std::nullopt;
}

namespace {

void check_not_coincident(std::span<const BaseStation> bs, Point2D mu) {
  for (const auto& s : bs) {
    if (distance(s.position, mu) == 0.0) {
      throw Error(Errc::CoincidentPosition,
                  "mobile coincides with station " + std::to_string(s.id));
    }
  }
}

}  // namespace

std::vector<double> simulate_rss(std::span<const BaseStation> bs, Point2D mu,
                                 const ChannelParams& params, Rng& rng) {
  check_not_coincident(bs, mu);
  std::vector<double> rss;
  for (const std::size_t i : rss_station_indices(bs)) {
    const auto& s = bs[i];
    const double beta = gaussian(rng, params.sigma_beta);
    rss.push_back(received_power(params, distance(s.position, mu), beta) + gain_toward(s, mu) -
                  s.obstruction_db);
  }
  return rss;
}

MeasurementSet rssd_from_rss(std::span<const std::size_t> stations, std::span<const double> rss) {
  if (stations.size() != rss.size()) {
    throw Error(Errc::LengthMismatch, "station index list and RSS vector differ in length");
  }
  MeasurementSet m;
  m.rssd_pairs.reserve(rss.size() * (rss.size() - (rss.empty() ? 0 : 1)) / 2);
  for (std::size_t a = 0; a < rss.size(); ++a) {
    for (std::size_t b = a + 1; b < rss.size(); ++b) {
      m.rssd_pairs.push_back({stations[a], stations[b], rss[a] - rss[b]});
    }
  }
  return m;
}

TdoaMeasurement simulate_tdoa(std::span<const BaseStation> bs, std::size_t k, std::size_t l,
                              Point2D mu, const TdoaNoiseParams& noise, Rng& rng) {
  const double range_diff = distance(mu, bs[k].position) - distance(mu, bs[l].position);
  return {k, l, range_diff / kSpeedOfLight + gaussian(rng, noise.sigma_tdoa)};
}

MeasurementSet simulate_measurements(std::span<const BaseStation> bs, Point2D mu,
                                     const ChannelParams& params,
                                     const TdoaNoiseParams& tdoa_params, Rng& shadowing_rng,
                                     Rng& tdoa_rng) {
  const auto stations = rss_station_indices(bs);
  if (stations.size() < 2) {
    throw Error(Errc::TooFewStations, "need at least two RSS stations");
  }
  check_not_coincident(bs, mu);
  const auto rss = simulate_rss(bs, mu, params, shadowing_rng);
  MeasurementSet m = rssd_from_rss(stations, rss);
  if (const auto pair = tdoa_pair(bs)) {
    m.tdoa = simulate_tdoa(bs, pair->first, pair->second, mu, tdoa_params, tdoa_rng);
  }
  return m;
}

}  // namespace rssdloc
