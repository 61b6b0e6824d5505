// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rssdloc/experiment.hpp"
#include "rssdloc/receiver.hpp"
#include "rssdloc/scenario.hpp"
#include "rssdloc/solver.hpp"

using namespace rssdloc;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario sim(std::vector<Override> o = {}) {
  return load_scenario(RSSDLOC_SCENARIO_DIR "/sim_8x8.json", o);
}

Scenario fp(std::vector<Override> o = {}) {
  return load_scenario(RSSDLOC_SCENARIO_DIR "/fp_3x3.json", o);
}

std::vector<RunReport> trials(Scenario s, int n) {
  s.trials = n;
  return run_trials(s);
}

double mean_of(const std::vector<RunReport>& rs, double RunReport::*field) {
  double acc = 0.0;
  for (const auto& r : rs) acc += r.*field;
  return acc / static_cast<double>(rs.size());
}

double rmse_median(const std::vector<RunReport>& rs) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.rmse);
  return median(v);
}

void noiseless_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  double length = 0.0;
  for (const char* mode : {"SIM_RSSD", "SIM_RSSD_TDOA"}) {
    for (const char* ant : {"DIRECTIONAL", "OMNI"}) {
      const Scenario s = sim({{"mode", mode}, {"antenna_model", ant},
                              {"channel.omni_dir.sigma_beta_db", "0"},
                              {"channel.omni_omni.sigma_beta_db", "0"},
                              {"tdoa_noise.sigma_ps", "0"}});
      const RunReport r = run_scenario(s, 0);
      worst = std::max(worst, r.rmse);
      length = 0.0;
      for (std::size_t i = 1; i < r.epochs.size(); ++i) {
        length += distance(r.epochs[i].truth, r.epochs[i - 1].truth);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  report("noiseless-recovery", worst < 2e-3 && elapsed < 30.0 && length >= 18.0,
         fmt("worst RMSE %.3e m (< 2e-3) on a %.2f m track, %.1f s (< 30 s)", worst, length, elapsed));
}

struct SimRuns {
  std::vector<RunReport> rssd_dir, tdoa_dir, rssd_omni, tdoa_omni;
  double elapsed = 0.0;
};

SimRuns sim_runs() {
  const auto t0 = std::chrono::steady_clock::now();
  SimRuns r;
  r.rssd_dir = trials(sim({{"mode", "SIM_RSSD"}}), 100);
  r.tdoa_dir = trials(sim({{"mode", "SIM_RSSD_TDOA"}}), 100);
  r.rssd_omni = trials(sim({{"mode", "SIM_RSSD"}, {"antenna_model", "OMNI"}}), 100);
  r.tdoa_omni = trials(sim({{"mode", "SIM_RSSD_TDOA"}, {"antenna_model", "OMNI"}}), 100);
  r.elapsed = seconds_since(t0);
  return r;
}

void tdoa_ordering(const SimRuns& r) {
  const auto d = compare_paired(r.rssd_dir, r.tdoa_dir);
  const auto o = compare_paired(r.rssd_omni, r.tdoa_omni);
  const auto in_band = [](double x) { return x >= 1.1 && x <= 3.0; };
  const bool ok = d.candidate_median < d.baseline_median && o.candidate_median < o.baseline_median &&
                  in_band(d.improvement_ratio) && in_band(o.improvement_ratio) && r.elapsed < 600.0;
  report("tdoa-assist-ordering", ok,
         fmt("directional %.3f -> %.3f m (ratio %.2f), omni %.3f -> %.3f m (ratio %.2f), "
             "ratios in [1.1, 3.0], 100 seeds, %.0f s (< 600 s)",
             d.baseline_median, d.candidate_median, d.improvement_ratio, o.baseline_median,
             o.candidate_median, o.improvement_ratio, r.elapsed));
}

void directional_ordering(const SimRuns& r) {
  const double a = rmse_median(r.rssd_dir), b = rmse_median(r.rssd_omni);
  const double c = rmse_median(r.tdoa_dir), d = rmse_median(r.tdoa_omni);
  report("directional-antenna-ordering", a < b && c < d,
         fmt("SIM_RSSD %.3f < %.3f m, SIM_RSSD_TDOA %.3f < %.3f m (median RMSE, directional vs omni)",
             a, b, c, d));
}

void theta_statistics() {
  const auto at2 = trials(sim({{"mobility.update_rate_hz", "2"}}), 100);
  const auto at1 = trials(sim({{"mobility.update_rate_hz", "1"}}), 100);
  const double t2 = rad_to_deg(mean_of(at2, &RunReport::theta_std));
  const double t1 = rad_to_deg(mean_of(at1, &RunReport::theta_std));
  report("theta-statistics", t1 > t2 && t2 >= 1.0 && t2 <= 15.0,
         fmt("theta_std %.2f deg at 1 Hz > %.2f deg at 2 Hz; 2 Hz value in [1, 15] deg; 100 seeds", t1, t2));
}

void fingerprint_ordering() {
  const Scenario base = fp();
  const double sigma = base.active_channel().sigma_beta;
  const auto plain = trials(fp({{"mode", "FP_RSSD"}}), 100);
  const auto refined = trials(fp({{"mode", "FP_RSSD_TDOA"}}), 100);
  const double ep = mean_of(plain, &RunReport::mean_error);
  const double er = mean_of(refined, &RunReport::mean_error);
  report("fingerprint-ordering", er <= ep && sigma <= 1.0 && ep <= 0.35 && er <= 0.35,
         fmt("mean error %.3f m with TDOA <= %.3f m without; both <= 0.35 m at sigma_beta %.1f dB; "
             "100 seeds, M = 48",
             er, ep, sigma));
}

double reference_objective(const SolverConfig& cfg, const MeasurementSet& m, Point2D p) {
  double q = 0.0;
  for (const auto& pr : m.rssd_pairs) {
    const auto& a = cfg.bs[pr.i];
    const auto& b = cfg.bs[pr.j];
    const double di = std::hypot(p.x - a.position.x, p.y - a.position.y);
    const double dj = std::hypot(p.x - b.position.x, p.y - b.position.y);
    if (di < 1e-6 || dj < 1e-6) return std::numeric_limits<double>::infinity();
    double model = 10.0 * cfg.params.alpha * std::log10(dj / di);
    if (cfg.antenna_model == AntennaModel::Directional) {
      const auto gain = [&](const BaseStation& s) {
        const auto* d = s.directional();
        double phi = std::remainder(std::atan2(p.y - s.position.y, p.x - s.position.x) - d->orientation,
                                    2.0 * std::numbers::pi);
        return std::abs(phi) > std::numbers::pi / 2 ? 0.0 : d->gain_db * std::cos(phi);
      };
      model += gain(a) - gain(b);
    }
    q += (pr.value - model) * (pr.value - model);
  }
  return q;
}

void solver_oracles() {
  double worst2d = 0.0;
  double worst1d = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Scenario s = sim({{"antenna_model", seed % 2 ? "OMNI" : "DIRECTIONAL"}});
    std::vector<BaseStation> bs = stations_for(s);
    Rng rng = derive_stream(1000 + seed, 0, 1);
    std::uniform_real_distribution<double> u(-3.5, 3.5);
    const Point2D mu{u(rng), u(rng)};
    // Boresights slightly off the truth, as after a noisy previous estimate.
    const Point2D aim{mu.x + 0.2 * std::cos(seed), mu.y + 0.2 * std::sin(seed)};
    for (auto& b : bs) {
      if (auto* d = b.directional()) d->orientation = azimuth(b.position, aim);
    }
    const SolverConfig cfg{s.active_channel(), bs, s.region, s.antenna_model};
    const MeasurementSet m = simulate_measurements(bs, mu, cfg.params, s.tdoa_noise, rng);

    Point2D best{};
    double best_q = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy <= 700; ++iy) {
      for (int ix = 0; ix <= 700; ++ix) {
        const Point2D p{-3.5 + 0.01 * ix, -3.5 + 0.01 * iy};
        const double q = reference_objective(cfg, m, p);
        if (q < best_q) {
          best_q = q;
          best = p;
        }
      }
    }
    worst2d = std::max(worst2d, distance(solve_rssd(cfg, m), best));

    // TDOA pair sits at (-4, 0) and (4, 0): the canonical frame is the scenario frame.
    const double sh = 0.5 * distance(bs[m.tdoa->k].position, bs[m.tdoa->l].position);
    const double r = 0.5 * kSpeedOfLight * m.tdoa->delta_t;
    const double b = std::sqrt(sh * sh - r * r);
    best_q = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 14000; ++k) {
      const double y = -3.5 + 0.0005 * k;
      const Point2D p{r * std::cosh(std::asinh(y / b)), y};
      const double q = reference_objective(cfg, m, p);
      if (q < best_q) {
        best_q = q;
        best = p;
      }
    }
    worst1d = std::max(worst1d, distance(solve_rssd_tdoa(cfg, m), best));
  }
  report("solver-oracle-equivalence", worst2d < 0.02 && worst1d < 1e-3,
         fmt("20 noisy instances: 2D vs 1 cm brute force worst %.4f m (< 0.02), "
             "1D vs 0.5 mm scan worst %.2e m (< 1e-3)",
             worst2d, worst1d));
}

void receiver_checks() {
  const ReceiverConfig cfg;
  const Waveform templ = make_template(cfg.signal, cfg.sample_rate);
  const MatchedFilter filter(templ, {cfg.signal.f_low, cfg.signal.f_high, cfg.filter_order},
                             cfg.upsample_factor);
  const double period = 1.0 / (cfg.upsample_factor * cfg.sample_rate);
  Rng rng(1);

  const Point2D source{1.1, 2.3};
  const Point2D rx_a{0.0, 0.0};
  const Point2D rx_b{3.0, 0.0};
  const double da = distance(source, rx_a) / kSpeedOfLight;
  const double db = distance(source, rx_b) / kSpeedOfLight;
  const auto ca = filter.detect(generate_signal(cfg.signal, 20e-9 + da, -3.0, cfg.sample_rate, 0.0, rng));
  const auto cb = filter.detect(generate_signal(cfg.signal, 20e-9 + db, -7.0, cfg.sample_rate, 0.0, rng));
  const double err = std::abs(estimate_tdoa(ca, cb) - (da - db));
  report("receiver-tdoa-timing", err < period && err < 10e-12,
         fmt("two-receiver TDOA error %.3g ps (< %.1f ps, one upsampled period)", err * 1e12, period * 1e12));

  const auto ref = filter.detect(generate_signal(cfg.signal, 15e-9, 0.0, cfg.sample_rate, 0.0, rng));
  const auto att = filter.detect(generate_signal(cfg.signal, 15e-9, -6.0, cfg.sample_rate, 0.0, rng));
  const double diff_db = 10.0 * std::log10(rss_from_correlation(ref, cfg.rss_window) /
                                           rss_from_correlation(att, cfg.rss_window));
  report("receiver-rss-6db-path", std::abs(diff_db - 12.0) <= 0.5,
         fmt("RSS difference %.3f dB for a -6 dB amplitude path; expected 12 +- 0.5 dB", diff_db));
}

void invariant_suite() {
  int bad = 0;
  std::string notes;

  // RSSD cycle consistency.
  const Scenario s = sim();
  const auto bs = stations_for(s);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto m = simulate_measurements(bs, {0.3, -1.2}, s.active_channel(), s.tdoa_noise, rng);
    const auto value = [&](std::size_t i, std::size_t j) {
      for (const auto& p : m.rssd_pairs) {
        if (p.i == i && p.j == j) return p.value;
      }
      return std::numeric_limits<double>::quiet_NaN();
    };
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = i + 1; j < 8; ++j) {
        for (std::size_t k = j + 1; k < 8; ++k) {
          if (std::abs(value(i, j) + value(j, k) - value(i, k)) > 1e-12 * (1.0 + std::abs(value(i, k)))) {
            ++bad;
            notes += " cycle";
          }
        }
      }
    }
  }

  // Common RSS offset leaves the argmin unchanged.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ChannelParams shifted = s.active_channel();
    shifted.p0 += 11.5;
    Rng a(seed);
    Rng b(seed);
    const auto ma = simulate_measurements(bs, {1.0, 0.5}, s.active_channel(), s.tdoa_noise, a);
    const auto mb = simulate_measurements(bs, {1.0, 0.5}, shifted, s.tdoa_noise, b);
    const SolverConfig cfg{s.active_channel(), bs, s.region, s.antenna_model};
    if (!(solve_rssd(cfg, ma) == solve_rssd(cfg, mb)) || !(solve_rssd_tdoa(cfg, ma) == solve_rssd_tdoa(cfg, mb))) {
      ++bad;
      notes += " offset";
    }
  }

  // Hyperbola points lie on the curve.
  Rng rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    const double sh = 0.5 + 4.0 * (u(rng) + 1.0);
    const Hyperbola h = Hyperbola::from_range_difference(sh, 0.999 * sh * u(rng));
    if (std::abs(range_difference_residual(h, hyperbola_point(h, 10.0 * u(rng)))) >= 1e-9) {
      ++bad;
      notes += " hyperbola";
    }
  }

  // Circular route radius.
  for (const Point2D p : circular_track({})) {
    if (std::abs(distance(p, {1.5, 1.5}) - 1.0) > 1e-14) {
      ++bad;
      notes += " circle";
    }
  }

  // Determinism.
  for (const Scenario& sc : {sim(), fp()}) {
    if (!run_scenario(sc, 2).same_result(run_scenario(sc, 2))) {
      ++bad;
      notes += " determinism";
    }
  }
  report("invariant-suites", bad == 0,
         fmt("cycle consistency, offset argmin invariance, hyperbola residual < 1e-9 m, circle radius, "
             "determinism: %d violations%s",
             bad, notes.c_str()));
}

void guarded(const char* name, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(name, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded("noiseless-recovery", noiseless_recovery);
  SimRuns runs;
  guarded("tdoa-assist-ordering", [&] {
    runs = sim_runs();
    tdoa_ordering(runs);
  });
  guarded("directional-antenna-ordering", [&] { directional_ordering(runs); });
  guarded("theta-statistics", theta_statistics);
  guarded("fingerprint-ordering", fingerprint_ordering);
  guarded("solver-oracle-equivalence", solver_oracles);
  guarded("receiver", receiver_checks);
  guarded("invariant-suites", invariant_suite);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
