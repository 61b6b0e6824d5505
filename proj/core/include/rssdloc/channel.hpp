#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rssdloc/geometry.hpp"

namespace rssdloc {

using Rng = std::mt19937_64;

// Independent generator for (seed, trial, stream tag). Different tags give
// decorrelated streams for the same trial.
Rng derive_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag);

// sigma * z with z ~ N(0, 1). Always consumes exactly one standard-normal
// draw, so paired runs stay aligned when sigma is zero.
double gaussian(Rng& rng, double sigma);

// Log-distance path loss model.
struct ChannelParams {
  double alpha = 1.7;       // path-loss exponent
  double sigma_beta = 2.0;  // shadow-fading std, dB
  double p0 = -40.0;        // power at d0, dBm
  double d0 = 1.0;          // reference distance, m

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

void validate(const ChannelParams& p);

enum class ChannelPreset { OmniOmni, OmniDir };

// Propagation constants for the two antenna combinations. The defaults are
// placeholders that respect the required ordering: the directional receiver
// sees a steeper path loss and less shadowing.
struct ChannelPresets {
  ChannelParams omni_omni{1.7, 2.0, -40.0, 1.0};
  ChannelParams omni_dir{2.1, 1.0, -40.0, 1.0};

  const ChannelParams& get(ChannelPreset preset) const {
    return preset == ChannelPreset::OmniOmni ? omni_omni : omni_dir;
  }
  friend bool operator==(const ChannelPresets&, const ChannelPresets&) = default;
};

// Validates both parameter sets and the alpha/sigma ordering between them.
void validate(const ChannelPresets& p);

struct TdoaNoiseParams {
  double sigma_tdoa = 330e-12;  // seconds
  friend bool operator==(const TdoaNoiseParams&, const TdoaNoiseParams&) = default;
};

// Station indices refer to positions in the station list the set was built
// from.
struct RssdPair {
  std::size_t i;
  std::size_t j;
  double value;  // P_i - P_j, dB
  friend bool operator==(const RssdPair&, const RssdPair&) = default;
};

struct TdoaMeasurement {
  std::size_t k;
  std::size_t l;
  double delta_t;  // t_k - t_l, seconds
  friend bool operator==(const TdoaMeasurement&, const TdoaMeasurement&) = default;
};

struct MeasurementSet {
  std::vector<RssdPair> rssd_pairs;
  std::optional<TdoaMeasurement> tdoa;
  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;
};

// P0 - 10 alpha log10(d / d0) + beta.
double received_power(const ChannelParams& params, double d, double beta);

// G cos(phi) inside the front half-plane, 0 behind it.
double antenna_gain(double gain_db, double phi);

// Signed angle from the station's boresight to the direction of target.
// Zero for omni stations.
double pointing_angle(const BaseStation& bs, Point2D target);

// Gain (dB) the station's antenna contributes toward target.
double gain_toward(const BaseStation& bs, Point2D target);

// Indices of stations that report RSS, in list order.
std::vector<std::size_t> rss_station_indices(std::span<const BaseStation> bs);

// Indices (k, l) of the first two TDOA-capable stations, if there are two.
std::optional<std::pair<std::size_t, std::size_t>> tdoa_pair(std::span<const BaseStation> bs);

// One RSS value (dBm) per RSS station, in rss_station_indices order; includes
// antenna gain and obstruction. One shadow-fading draw per RSS station.
std::vector<double> simulate_rss(std::span<const BaseStation> bs, Point2D mu,
                                 const ChannelParams& params, Rng& rng);

// All pairwise differences i < j of an RSS vector. `stations` maps positions
// in `rss` to station indices.
MeasurementSet rssd_from_rss(std::span<const std::size_t> stations, std::span<const double> rss);

// True TDOA of the pair plus Gaussian timing error.
TdoaMeasurement simulate_tdoa(std::span<const BaseStation> bs, std::size_t k, std::size_t l,
                              Point2D mu, const TdoaNoiseParams& noise, Rng& rng);

MeasurementSet simulate_measurements(std::span<const BaseStation> bs, Point2D mu,
                                     const ChannelParams& params,
                                     const TdoaNoiseParams& tdoa_params, Rng& shadowing_rng,
                                     Rng& tdoa_rng);

inline MeasurementSet simulate_measurements(std::span<const BaseStation> bs, Point2D mu,
                                            const ChannelParams& params,
                                            const TdoaNoiseParams& tdoa_params, Rng& rng) {
  return simulate_measurements(bs, mu, params, tdoa_params, rng, rng);
}

}  // namespace rssdloc
