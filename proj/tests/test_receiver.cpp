#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rssdloc/error.hpp"
#include "rssdloc/receiver.hpp"

using namespace rssdloc;

namespace {

const SignalSpec kSpec = default_signal_spec();
constexpr double kFs = 12.5e9;
constexpr double kUpPeriod = 1.0 / (8 * kFs);

Waveform noiseless(double delay, double attenuation_db = 0.0) {
  Rng rng(0);
  return generate_signal(kSpec, delay, attenuation_db, kFs, 0.0, rng);
}

const MatchedFilter& filter() {
  static const MatchedFilter f(make_template(kSpec, kFs), {}, 8);
  return f;
}

}  // namespace

TEST_CASE("first pulse sits at the group delay") {
  const Waveform w = noiseless(0.0);
  const double gd = pulse_group_delay(kSpec);
  // Search the first pulse only.
  const auto n = static_cast<std::size_t>(2 * gd * kFs);
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(w.samples[i]) > std::abs(w.samples[best])) best = i;
  }
  CHECK(std::abs(w.time_at(best) - gd) <= 0.5 / kFs);
  const Waveform t = make_template(kSpec, kFs);
  CHECK(t.samples == w.samples);
}

TEST_CASE("attenuation scales amplitude in dB") {
  const Waveform a = noiseless(3e-9);
  const Waveform b = noiseless(3e-9, -6.0);
  REQUIRE(a.samples.size() == b.samples.size());
  const double ratio = std::pow(10.0, -6.0 / 20.0);
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.003));
  for (std::size_t i = 0; i < a.samples.size(); i += 97) {
    CHECK(b.samples[i] == doctest::Approx(ratio * a.samples[i]).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("spectral -10 dB edges match the band") {
  const Waveform w = noiseless(0.0);
  std::vector<std::pair<double, double>> nz;  // (t, value)
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (w.samples[i] != 0.0) nz.emplace_back(w.time_at(i), w.samples[i]);
  }
  // Direct DFT on a 1 MHz grid, then averaged over 50 MHz to smooth the
  // chip-code line structure.
  const double f0 = 1.5e9;
  const double df = 1e6;
  const int nf = 3400;
  std::vector<double> power(nf);
  for (int k = 0; k < nf; ++k) {
    const double f = f0 + k * df;
    std::complex<double> acc{};
    for (const auto& [t, v] : nz) acc += v * std::polar(1.0, -2.0 * std::numbers::pi * f * t);
    power[k] = std::norm(acc);
  }
  std::vector<double> smooth(nf, 0.0);
  for (int k = 25; k < nf - 25; ++k) {
    for (int j = -25; j <= 25; ++j) smooth[k] += power[k + j];
  }
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  int lo = -1;
  int hi = -1;
  for (int k = 25; k < nf - 25; ++k) {
    if (smooth[k] >= 0.1 * peak) {
      if (lo < 0) lo = k;
      hi = k;
    }
  }
  REQUIRE(lo > 0);
  const double f_lo = f0 + lo * df;
  const double f_hi = f0 + hi * df;
  CHECK(std::abs(f_lo - 2.3e9) <= 0.2e9);
  CHECK(std::abs(f_hi - 3.9e9) <= 0.2e9);
}

TEST_CASE("autocorrelation peak and shift") {
  const Waveform t = make_template(kSpec, kFs);
  const auto self = correlate_and_detect(t, t, 8);
  CHECK(std::abs(self.peak_time) <= kUpPeriod);

  for (const double d : {10e-9, 10.037e-9, 23.5e-9}) {
    const auto r = filter().detect(noiseless(d));
    CHECK(std::abs(r.peak_time - d) <= kUpPeriod);
  }
}

TEST_CASE("timing under 20 dB SNR against a parabolic oracle") {
  const Waveform clean = noiseless(7.3e-9);
  double ps = 0.0;
  std::size_t active = 0;
  for (double v : clean.samples) {
    if (v != 0.0) {
      ps += v * v;
      ++active;
    }
  }
  ps /= static_cast<double>(active);
  const double noise_std = std::sqrt(ps / 100.0);

  double sum = 0.0;
  double sum2 = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Waveform r = generate_signal(kSpec, 7.3e-9, 0.0, kFs, noise_std, rng);
    const auto res = filter().detect(r);
    // Three-point parabola through |c| at the coarse maximum.
    const auto& c = res.c.samples;
    std::size_t m = 1;
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      if (std::abs(c[i]) > std::abs(c[m])) m = i;
    }
    const double a = std::abs(c[m - 1]);
    const double b = std::abs(c[m]);
    const double d = std::abs(c[m + 1]);
    const double offset = 0.5 * (a - d) / (a - 2.0 * b + d);
    const double parabolic = res.c.time_at(m) + offset / kFs;
    CHECK(std::abs(res.peak_time - parabolic) < 0.5 / kFs);
    const double e = res.peak_time - 7.3e-9;
    sum += e;
    sum2 += e * e;
  }
  const double sd = std::sqrt(sum2 / 100.0 - (sum / 100.0) * (sum / 100.0));
  CHECK(sd < 1.0 / kFs);
  CHECK(std::abs(sum / 100.0) < 1.0 / kFs);
}

TEST_CASE("TDOA from correlation peaks") {
  CorrelationResult a;
  CorrelationResult b;
  a.peak_time = 15e-9;
  b.peak_time = 10e-9;
  CHECK(estimate_tdoa(a, b) == doctest::Approx(5e-9).epsilon(1e-12));
  CHECK(estimate_tdoa(a, a) == 0.0);

  const auto ra = filter().detect(noiseless(12.34e-9));
  const auto rb = filter().detect(noiseless(4.56e-9));
  CHECK(estimate_tdoa(ra, rb) == -estimate_tdoa(rb, ra));
  CHECK(std::abs(estimate_tdoa(ra, rb) - (12.34e-9 - 4.56e-9)) <= kUpPeriod);
}

TEST_CASE("two receivers at known positions") {
  const Point2D source{1.2, 2.1};
  const Point2D rx1{0.0, 0.0};
  const Point2D rx2{3.0, 0.0};
  const double d1 = distance(source, rx1) / kSpeedOfLight;
  const double d2 = distance(source, rx2) / kSpeedOfLight;
  const double offset = 20e-9;
  const auto a = filter().detect(noiseless(offset + d1, -5.0));
  const auto b = filter().detect(noiseless(offset + d2, -9.0));
  CHECK(std::abs(estimate_tdoa(a, b) - (d1 - d2)) <= kUpPeriod);
}

TEST_CASE("energy window properties") {
  CorrelationResult z;
  z.c.sample_rate = kFs;
  z.c.samples.assign(2000, 0.0);
  z.peak_time = 10e-9;
  CHECK(rss_from_correlation(z, 70e-9) == 0.0);

  auto res = filter().detect(noiseless(5e-9));
  const double p = rss_from_correlation(res);
  CHECK(p > 0.0);
  for (double& v : res.c.samples) v *= 2.0;
  CHECK(rss_from_correlation(res) == doctest::Approx(4.0 * p).epsilon(1e-12));

  // The window follows the peak.
  const double p2 = rss_from_correlation(filter().detect(noiseless(17.77e-9)));
  CHECK(std::abs(10.0 * std::log10(p2 / p)) < 0.01);

  // Amplitude 6 dB down means a quarter of the power.
  const double p6 = rss_from_correlation(filter().detect(noiseless(5e-9, -6.0)));
  CHECK(10.0 * std::log10(p6 / p) == doctest::Approx(-6.0).epsilon(1e-6));

  CHECK_THROWS_AS(rss_from_correlation(res, 0.0), Error);
  try {
    rss_from_correlation(res, 1.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WindowOutOfSupport);
  }
}

TEST_CASE("receiver errors") {
  Rng rng(1);
  try {
    generate_signal(kSpec, 0.0, 0.0, 7e9, 0.0, rng);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AliasingSampleRate);
  }
  Waveform short_r;
  short_r.sample_rate = kFs;
  short_r.samples.assign(100, 1.0);
  try {
    filter().detect(short_r);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TemplateTooLong);
  }
  SignalSpec bad = kSpec;
  bad.chips.pop_back();
  CHECK_THROWS_AS(validate(bad), Error);
  bad = kSpec;
  bad.f_low = 4e9;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_THROWS_AS(MatchedFilter(make_template(kSpec, kFs), {}, 0), Error);
}

TEST_CASE("receive produces model-consistent RSSD and TDOA") {
  std::vector<BaseStation> bs{
      {1, {0, 0}, StationRole::RssAndTdoa, OmniAntenna{}},
      {2, {3, 0}, StationRole::RssAndTdoa, OmniAntenna{}},
      {3, {0, 3}, StationRole::RssOnly, OmniAntenna{}},
  };
  const ChannelParams ch{2.0, 0.0, -40.0, 1.0};
  const Point2D mu{1.0, 1.3};
  Rng rng(2);
  const auto m = receive(bs, mu, ch, {}, rng);
  REQUIRE(m.rss_db.size() == 3);
  REQUIRE(m.tdoa);
  Rng rng2(2);
  const auto model = simulate_rss(bs, mu, ch, rng2);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      CHECK(std::abs((m.rss_db[i] - m.rss_db[j]) - (model[i] - model[j])) < 0.01);
    }
  }
  const double truth = (distance(mu, bs[0].position) - distance(mu, bs[1].position)) / kSpeedOfLight;
  CHECK(std::abs(m.tdoa->delta_t - truth) <= kUpPeriod);
}

TEST_CASE("waveform CSV round trip") {
  Waveform w;
  w.sample_rate = kFs;
  w.t0 = 1e-9;
  w.samples = {0.0, 0.5, -0.25, 1.0};
  std::stringstream ss;
  write_waveform_csv(ss, w);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,amplitude");
  ss.clear();
  ss.seekg(0);
  const Waveform back = read_waveform_csv(ss);
  CHECK(back.samples == w.samples);
  CHECK(back.sample_rate == doctest::Approx(kFs).epsilon(1e-12));
  CHECK(back.t0 == doctest::Approx(1e-9).epsilon(1e-12));
}
