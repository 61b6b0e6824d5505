#include "rssdloc/receiver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <mutex>
#include <random>
#include <ostream>
#include <sstream>

#include "rssdloc/csv.hpp"
#include "rssdloc/error.hpp"
#include "rssdloc/optimize.hpp"

namespace rssdloc {

namespace {

constexpr int kInterpHalfWidth = 32;  // samples on each side
constexpr double kKaiserBeta = 8.0;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double kaiser(double x) {
  const double u = x / (kInterpHalfWidth + 1);
  if (std::abs(u) >= 1.0) return 0.0;
  static const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) / norm;
}

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Real forward transform of `in` zero-padded to n points.
ComplexBuffer forward(const std::vector<double>& in, std::size_t n) {
  RealBuffer buf = alloc_real(n);
  ComplexBuffer out = alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.get(), out.get(), FFTW_ESTIMATE);
  }
  std::copy(in.begin(), in.end(), buf.get());
  std::fill(buf.get() + in.size(), buf.get() + n, 0.0);
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> inverse(ComplexBuffer spectrum, std::size_t n) {
  RealBuffer buf = alloc_real(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum.get(), buf.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> out(buf.get(), buf.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace

double interpolate(const Waveform& w, double t) {
  const double pos = (t - w.t0) * w.sample_rate;
  const auto centre = static_cast<long>(std::floor(pos));
  const long n = static_cast<long>(w.samples.size());
  double acc = 0.0;
  for (long k = centre - kInterpHalfWidth; k <= centre + kInterpHalfWidth + 1; ++k) {
    if (k < 0 || k >= n) continue;
    const double x = pos - static_cast<double>(k);
    acc += w.samples[static_cast<std::size_t>(k)] * sinc(x) * kaiser(x);
  }
  return acc;
}

void write_waveform_csv(std::ostream& out, const Waveform& w) {
  out << "t,amplitude\n";
  char buf[64];
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.15e,%.15e\n", w.time_at(i), w.samples[i]);
    out << buf;
  }
}

Waveform read_waveform_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t ct = table.column("t");
  const std::size_t ca = table.column("amplitude");
  if (table.rows.size() < 2) throw Error(Errc::ParseError, "waveform needs at least two samples");
  Waveform w;
  w.t0 = table.rows.front()[ct];
  const double span = table.rows.back()[ct] - w.t0;
  if (!(span > 0.0)) throw Error(Errc::ParseError, "waveform times must increase");
  w.sample_rate = static_cast<double>(table.rows.size() - 1) / span;
  for (const auto& row : table.rows) w.samples.push_back(row[ca]);
  return w;
}

void validate(const SignalSpec& spec) {
  if (spec.chips.size() != kChipCount) {
    throw Error(Errc::InvalidArgument, "chip code must have " + std::to_string(kChipCount) + " chips");
  }
  for (double c : spec.chips) {
    if (c != 1.0 && c != -1.0) throw Error(Errc::InvalidArgument, "chips must be +-1");
  }
  if (!(spec.prf > 0.0)) throw Error(Errc::InvalidArgument, "PRF must be positive");
  if (!(spec.f_low > 0.0 && spec.f_low < spec.f_high)) {
    throw Error(Errc::InvalidArgument, "band must satisfy 0 < f_low < f_high");
  }
}

std::vector<double> default_chip_code(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> chips(kChipCount);
  for (double& c : chips) c = (rng() >> 63) ? 1.0 : -1.0;
  return chips;
}

SignalSpec default_signal_spec() { return {default_chip_code(), 3e6, 2.3e9, 3.9e9}; }

double pulse_sigma(const SignalSpec& spec) {
  // |P(f)|^2 ~ exp(-4 pi^2 sigma^2 (f - fc)^2) reaches 0.1 at half the band.
  const double half_band = 0.5 * (spec.f_high - spec.f_low);
  return std::sqrt(std::log(10.0)) / (2.0 * std::numbers::pi * half_band);
}

double pulse_group_delay(const SignalSpec& spec) { return 6.0 * pulse_sigma(spec); }

double pulse_shape(const SignalSpec& spec, double t) {
  const double sigma = pulse_sigma(spec);
  if (std::abs(t) > 6.0 * sigma) return 0.0;
  const double fc = 0.5 * (spec.f_low + spec.f_high);
  return std::exp(-t * t / (2.0 * sigma * sigma)) * std::cos(2.0 * std::numbers::pi * fc * t);
}

Waveform generate_signal(const SignalSpec& spec, double delay, double attenuation_db,
                         double sample_rate, double noise_std, Rng& rng) {
  validate(spec);
  if (!(sample_rate >= 2.0 * spec.f_high)) {
    throw Error(Errc::AliasingSampleRate, "sample rate " + std::to_string(sample_rate) +
                                              " Hz is below twice the upper band edge");
  }
  if (!(delay >= 0.0)) throw Error(Errc::InvalidArgument, "delay must be >= 0");
  if (!(noise_std >= 0.0)) throw Error(Errc::InvalidArgument, "noise std must be >= 0");

  const double span = pulse_group_delay(spec);
  const double train = static_cast<double>(spec.chips.size()) / spec.prf;
  const double duration = delay + train + 2.0 * span + 100e-9;
  const auto n = static_cast<std::size_t>(std::ceil(duration * sample_rate)) + 1;
  const double amplitude = std::pow(10.0, attenuation_db / 20.0);

  Waveform w;
  w.sample_rate = sample_rate;
  w.t0 = 0.0;
  w.samples.assign(n, 0.0);
  for (std::size_t chip = 0; chip < spec.chips.size(); ++chip) {
    const double centre = delay + span + static_cast<double>(chip) / spec.prf;
    const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((centre - span) * sample_rate)));
    const auto last = std::min(n - 1, static_cast<std::size_t>(std::floor((centre + span) * sample_rate)));
    for (std::size_t i = first; i <= last; ++i) {
      w.samples[i] += amplitude * spec.chips[chip] * pulse_shape(spec, w.time_at(i) - centre);
    }
  }
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (double& s : w.samples) s += noise(rng);
  }
  return w;
}

Waveform make_template(const SignalSpec& spec, double sample_rate) {
  Rng unused(0);
  return generate_signal(spec, 0.0, 0.0, sample_rate, 0.0, unused);
}

double BandpassFilter::magnitude(double f) const {
  f = std::abs(f);
  if (f == 0.0) return 0.0;
  const double f0_sq = f_low * f_high;
  const double x = (f * f - f0_sq) / (f * (f_high - f_low));
  return 1.0 / std::sqrt(1.0 + std::pow(std::abs(x), order));
}

struct MatchedFilter::Impl {
  Waveform templ;
  BandpassFilter band;
  std::size_t fft_size = 0;
  std::size_t max_r = 0;
  // conj(T(f)) * H(f)
  std::vector<std::complex<double>> weighted;
  std::mutex mutex;

  void prepare(std::size_t r_size) {
    fft_size = next_pow2(r_size + templ.samples.size() - 1);
    max_r = fft_size - templ.samples.size() + 1;
    ComplexBuffer t = forward(templ.samples, fft_size);
    weighted.resize(fft_size / 2 + 1);
    for (std::size_t k = 0; k < weighted.size(); ++k) {
      const double f = static_cast<double>(k) * templ.sample_rate / static_cast<double>(fft_size);
      weighted[k] = band.magnitude(f) * std::complex<double>(t[k][0], -t[k][1]);
    }
  }
};

MatchedFilter::MatchedFilter(Waveform templ, BandpassFilter band, int upsample_factor)
    : impl_(std::make_unique<Impl>()), upsample_factor_(upsample_factor) {
  if (upsample_factor < 1) throw Error(Errc::InvalidArgument, "upsample factor must be >= 1");
  if (templ.samples.empty()) throw Error(Errc::InvalidArgument, "empty template");
  if (!(templ.sample_rate > 0.0)) throw Error(Errc::InvalidArgument, "sample rate must be positive");
  if (!(band.f_low > 0.0 && band.f_low < band.f_high)) {
    throw Error(Errc::InvalidArgument, "bandpass needs 0 < f_low < f_high");
  }
  impl_->templ = std::move(templ);
  impl_->band = band;
}

MatchedFilter::~MatchedFilter() = default;
MatchedFilter::MatchedFilter(MatchedFilter&&) noexcept = default;
MatchedFilter& MatchedFilter::operator=(MatchedFilter&&) noexcept = default;

CorrelationResult MatchedFilter::detect(const Waveform& r) const {
  const Waveform& t = impl_->templ;
  if (t.samples.size() > r.samples.size()) {
    throw Error(Errc::TemplateTooLong, "template has " + std::to_string(t.samples.size()) +
                                           " samples, reception only " +
                                           std::to_string(r.samples.size()));
  }
  if (std::abs(r.sample_rate - t.sample_rate) > 1e-9 * t.sample_rate) {
    throw Error(Errc::InvalidArgument, "reception and template sample rates differ");
  }
  // The template spectrum is reused while receptions fit the transform size.
  Impl& impl = *impl_;
  std::size_t n = 0;
  std::vector<std::complex<double>> weighted;
  {
    std::lock_guard lock(impl.mutex);
    if (impl.fft_size == 0 || r.samples.size() > impl.max_r) impl.prepare(r.samples.size());
    n = impl.fft_size;
    weighted = impl.weighted;
  }
  ComplexBuffer spectrum = forward(r.samples, n);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    const std::complex<double> v = std::complex<double>(spectrum[k][0], spectrum[k][1]) * weighted[k];
    spectrum[k][0] = v.real();
    spectrum[k][1] = v.imag();
  }
  const std::vector<double> circular = inverse(std::move(spectrum), n);

  // Reorder circular lags into -(len_t - 1) .. len_r - 1.
  const std::size_t neg = t.samples.size() - 1;
  const std::size_t len = r.samples.size() + neg;
  CorrelationResult out;
  out.c.sample_rate = r.sample_rate;
  out.c.t0 = r.t0 - t.t0 - static_cast<double>(neg) / r.sample_rate;
  out.c.samples.resize(len);
  for (std::size_t i = 0; i < neg; ++i) out.c.samples[i] = circular[n - neg + i];
  std::copy(circular.begin(), circular.begin() + static_cast<std::ptrdiff_t>(r.samples.size()),
            out.c.samples.begin() + static_cast<std::ptrdiff_t>(neg));

  std::size_t coarse = 0;
  for (std::size_t i = 1; i < len; ++i) {
    if (std::abs(out.c.samples[i]) > std::abs(out.c.samples[coarse])) coarse = i;
  }
  // Upsampled search within one sample either side of the coarse peak.
  const double tc = out.c.time_at(coarse);
  const double dt = out.c.period() / upsample_factor_;
  double best_t = tc;
  double best_v = out.c.samples[coarse];
  for (int k = -upsample_factor_; k <= upsample_factor_; ++k) {
    const double tk = tc + k * dt;
    const double v = k == 0 ? out.c.samples[coarse] : interpolate(out.c, tk);
    if (std::abs(v) > std::abs(best_v) || (std::abs(v) == std::abs(best_v) && tk < best_t)) {
      best_t = tk;
      best_v = v;
    }
  }
  // Polish between the upsampled points on the same reconstruction.
  const auto neg_mag = [&](double t) { return -std::abs(interpolate(out.c, t)); };
  const ScalarMinimum fine = golden_section_minimize(neg_mag, best_t - dt, best_t + dt, 1e-16);
  if (-fine.value > std::abs(best_v)) {
    best_t = fine.argmin;
    best_v = interpolate(out.c, best_t);
  }
  out.peak_time = best_t;
  out.peak_value = best_v;
  return out;
}

CorrelationResult correlate_and_detect(const Waveform& r, const Waveform& templ,
                                       int upsample_factor, const BandpassFilter& band) {
  return MatchedFilter(templ, band, upsample_factor).detect(r);
}

double rss_from_correlation(const CorrelationResult& c, double window) {
  if (!(window > 0.0)) throw Error(Errc::WindowOutOfSupport, "window must be positive");
  const double ta = c.peak_time;
  const double tb = ta + window;
  if (c.c.samples.empty() || ta < c.c.t0 || tb > c.c.end_time()) {
    throw Error(Errc::WindowOutOfSupport, "integration window leaves the correlation record");
  }
  const auto intervals =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window * c.c.sample_rate)));
  const double h = window / static_cast<double>(intervals);
  double acc = 0.0;
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double v = interpolate(c.c, ta + static_cast<double>(k) * h);
    const double w = (k == 0 || k == intervals) ? 0.5 : 1.0;
    acc += w * v * v;
  }
  return acc * h / window;
}

ReceiverMeasurement receive(std::span<const BaseStation> bs, Point2D mu,
                            const ChannelParams& params, const ReceiverConfig& cfg, Rng& rng) {
  const auto rss_idx = rss_station_indices(bs);
  const auto pair = tdoa_pair(bs);
  const std::vector<double> rss_model = simulate_rss(bs, mu, params, rng);

  const Waveform templ = make_template(cfg.signal, cfg.sample_rate);
  const MatchedFilter filter(templ, {cfg.signal.f_low, cfg.signal.f_high, cfg.filter_order},
                             cfg.upsample_factor);

  const auto process = [&](std::size_t station, double power_dbm) {
    const double delay = cfg.transmit_offset + distance(bs[station].position, mu) / kSpeedOfLight;
    const Waveform r = generate_signal(cfg.signal, delay, power_dbm - params.p0, cfg.sample_rate,
                                       cfg.noise_std, rng);
    return filter.detect(r);
  };

  ReceiverMeasurement out;
  std::vector<std::optional<double>> peak(bs.size());
  for (std::size_t n = 0; n < rss_idx.size(); ++n) {
    const auto result = process(rss_idx[n], rss_model[n]);
    out.rss_db.push_back(10.0 * std::log10(rss_from_correlation(result, cfg.rss_window)));
    peak[rss_idx[n]] = result.peak_time;
  }
  if (pair) {
    for (const std::size_t s : {pair->first, pair->second}) {
      if (peak[s]) continue;
      const double power = received_power(params, distance(bs[s].position, mu), 0.0) +
                           gain_toward(bs[s], mu) - bs[s].obstruction_db;
      peak[s] = process(s, power).peak_time;
    }
    out.tdoa = TdoaMeasurement{pair->first, pair->second, *peak[pair->first] - *peak[pair->second]};
  }
  return out;
}

}  // namespace rssdloc
