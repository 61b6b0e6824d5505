#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rssdloc/channel.hpp"
#include "rssdloc/geometry.hpp"

namespace rssdloc {

struct Waveform {
  std::vector<double> samples;
  double sample_rate = 12.5e9;  // Hz
  double t0 = 0.0;              // time of samples[0], s

  double period() const { return 1.0 / sample_rate; }
  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
  double end_time() const { return time_at(samples.empty() ? 0 : samples.size() - 1); }
};

// Band-limited reconstruction of the waveform at an arbitrary time
// (Kaiser-windowed sinc, zero outside the record).
double interpolate(const Waveform& w, double t);

// CSV with header `t,amplitude`.
void write_waveform_csv(std::ostream& out, const Waveform& w);
Waveform read_waveform_csv(std::istream& in);

inline constexpr std::size_t kChipCount = 128;

// Bi-phase pulse train: one band-limited pulse per chip, repeated at the PRF.
struct SignalSpec {
  std::vector<double> chips;  // +-1, kChipCount entries
  double prf = 3e6;           // Hz
  double f_low = 2.3e9;       // Hz, -10 dB edge
  double f_high = 3.9e9;      // Hz, -10 dB edge
};

void validate(const SignalSpec& spec);

// Fixed pseudorandom +-1 code of kChipCount chips.
std::vector<double> default_chip_code(std::uint64_t seed = 0x5eed);

SignalSpec default_signal_spec();

// Gaussian envelope width of the pulse: its power spectrum is 10 dB down at
// the band edges.
double pulse_sigma(const SignalSpec& spec);

// Offset of the first pulse centre from the start of the train.
double pulse_group_delay(const SignalSpec& spec);

// Unit-amplitude pulse shape at time t relative to its centre.
double pulse_shape(const SignalSpec& spec, double t);

// Samples the train delayed by `delay` (>= 0), scaled by 10^(attenuation/20),
// plus white Gaussian noise. The record starts at t = 0 and ends 100 ns after
// the last pulse. Throws AliasingSampleRate when sample_rate < 2 f_high.
Waveform generate_signal(const SignalSpec& spec, double delay, double attenuation_db,
                         double sample_rate, double noise_std, Rng& rng);

// Ideal transmit signal used as the correlation template.
Waveform make_template(const SignalSpec& spec, double sample_rate);

// Zero-phase Butterworth-shaped bandpass magnitude response.
struct BandpassFilter {
  double f_low = 2.3e9;
  double f_high = 3.9e9;
  int order = 4;

  double magnitude(double f) const;
};

struct CorrelationResult {
  Waveform c;  // correlation over lags, t0 = most negative lag
  double peak_time = 0.0;
  double peak_value = 0.0;
};

// Bandpass filtering, cross-correlation with a fixed template and
// band-limited upsampled peak search. Keeps the template spectrum so many
// receptions can be processed against it.
class MatchedFilter {
 public:
  MatchedFilter(Waveform templ, BandpassFilter band, int upsample_factor);
  ~MatchedFilter();
  MatchedFilter(MatchedFilter&&) noexcept;
  MatchedFilter& operator=(MatchedFilter&&) noexcept;

  CorrelationResult detect(const Waveform& r) const;

  int upsample_factor() const { return upsample_factor_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int upsample_factor_;
};

CorrelationResult correlate_and_detect(const Waveform& r, const Waveform& templ,
                                       int upsample_factor, const BandpassFilter& band = {});

inline double estimate_tdoa(const CorrelationResult& a, const CorrelationResult& b) {
  return a.peak_time - b.peak_time;
}

// Mean squared correlation over [peak, peak + window], trapezoidal rule on
// the band-limited reconstruction. Throws WindowOutOfSupport.
double rss_from_correlation(const CorrelationResult& c, double window = 70e-9);

struct ReceiverConfig {
  SignalSpec signal = default_signal_spec();
  double sample_rate = 12.5e9;
  int upsample_factor = 8;
  int filter_order = 4;
  double noise_std = 0.0;
  double rss_window = 70e-9;
  double transmit_offset = 20e-9;  // unknown transmit time, common to all stations
};

// Per-station RSS (dB, up to a common constant) and TDOA obtained by
// synthesizing each station's reception and running the matched filter.
struct ReceiverMeasurement {
  std::vector<double> rss_db;  // rss_station_indices order
  std::optional<TdoaMeasurement> tdoa;
};

ReceiverMeasurement receive(std::span<const BaseStation> bs, Point2D mu,
                            const ChannelParams& params, const ReceiverConfig& cfg, Rng& rng);

}  // namespace rssdloc
