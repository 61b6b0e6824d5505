#include "rssdloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "rssdloc/csv.hpp"
#include "rssdloc/error.hpp"

namespace rssdloc {

namespace {

enum StreamTag : std::uint64_t {
  kTrackStream = 1,
  kShadowStream = 2,
  kTdoaStream = 3,
  kDatabaseStream = 4,
};

struct Observation {
  std::vector<double> rss;
  std::optional<TdoaMeasurement> tdoa;
};

Observation observe(const Scenario& s, std::span<const BaseStation> bs, Point2D mu,
                    const ChannelParams& params, Rng& shadow_rng, Rng& tdoa_rng) {
  if (s.source == MeasurementSource::Receiver) {
    auto r = receive(bs, mu, params, s.receiver, shadow_rng);
    return {std::move(r.rss_db), r.tdoa};
  }
  Observation o;
  o.rss = simulate_rss(bs, mu, params, shadow_rng);
  if (const auto pair = tdoa_pair(bs)) {
    o.tdoa = simulate_tdoa(bs, pair->first, pair->second, mu, s.tdoa_noise, tdoa_rng);
  }
  return o;
}

Track make_track(const Scenario& s, Rng& rng) {
  if (const auto* wp = std::get_if<WaypointModelParams>(&s.mobility)) {
    return generate_track(*wp, rng);
  }
  const auto pts = circular_track(std::get<CircularTrackParams>(s.mobility));
  return track_from_points(pts, s.circular_update_rate);
}

std::vector<StationAngle> angles(const OrientationState& state, std::span<const BaseStation> bs,
                                 Point2D truth) {
  std::vector<StationAngle> out;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!bs[i].is_directional() || !measures_rss(bs[i].role)) continue;
    out.push_back({bs[i].id, misorientation(state, bs, i, truth)});
  }
  return out;
}

[[noreturn]] void rethrow_with_epoch(const Error& e, std::size_t epoch) {
  throw Error(e.code(), "epoch " + std::to_string(epoch) + ": " + e.what());
}

}  // namespace

bool RunReport::same_result(const RunReport& o) const {
  const auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return label == o.label && seed == o.seed && trial == o.trial && epochs == o.epochs &&
         same(rmse, o.rmse) && same(mean_error, o.mean_error) && same(theta_std, o.theta_std);
}

double rmse(std::span<const EpochRecord> epochs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : epochs) {
    if (!e.included) continue;
    sum += e.error * e.error;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(sum / static_cast<double>(n));
}

double mean_error(std::span<const EpochRecord> epochs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : epochs) {
    if (!e.included) continue;
    sum += e.error;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

double theta_std(std::span<const EpochRecord> epochs) {
  std::vector<double> v;
  for (const auto& e : epochs) {
    if (!e.included) continue;
    for (const auto& a : e.theta) v.push_back(a.theta);
  }
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void finalize(RunReport& report) {
  report.rmse = rmse(report.epochs);
  report.mean_error = mean_error(report.epochs);
  report.theta_std = theta_std(report.epochs);
}

std::string run_label(const Scenario& s) {
  return std::string(to_string(s.mode)) + "@" + std::string(to_string(s.antenna_model));
}

RunContext prepare(const Scenario& s) {
  RunContext ctx;
  if (is_fingerprint(s.mode) && s.fingerprint.db_file) {
    std::ifstream in(*s.fingerprint.db_file);
    if (!in) throw Error(Errc::IoError, "cannot open database " + s.fingerprint.db_file->string());
    ctx.measured_db = read_db_csv(in);
    if (ctx.measured_db->station_count() != rss_station_indices(s.bs).size()) {
      throw Error(Errc::LengthMismatch, "database columns do not match the RSS stations");
    }
  }
  return ctx;
}

FingerprintDB synthesize_db(const Scenario& s, std::uint64_t trial) {
  Rng rng = derive_stream(s.seed, trial, kDatabaseStream);
  return build_db(stations_for(s), s.fingerprint.area, s.fingerprint.grid_step,
                  s.fingerprint.excluded, s.active_channel(), rng,
                  {s.fingerprint.noiseless_db, s.fingerprint.offline_averages});
}

RunReport run_scenario(const Scenario& s, std::uint64_t trial, const RunContext& ctx) {
  validate(s);
  const auto started = std::chrono::steady_clock::now();

  RunReport report;
  report.label = run_label(s);
  report.seed = s.seed;
  report.trial = trial;

  Rng track_rng = derive_stream(s.seed, trial, kTrackStream);
  Rng shadow_rng = derive_stream(s.seed, trial, kShadowStream);
  Rng tdoa_rng = derive_stream(s.seed, trial, kTdoaStream);

  const ChannelParams& params = s.active_channel();
  std::vector<BaseStation> bs = stations_for(s);
  const Track track = make_track(s, track_rng);
  const auto rss_idx = rss_station_indices(bs);

  if (is_fingerprint(s.mode)) {
    FingerprintDB db;
    if (ctx.measured_db) {
      db = *ctx.measured_db;
    } else {
      db = synthesize_db(s, trial);
    }
    OrientationState state = current_orientation(bs, track.epochs.front().position);
    for (std::size_t n = 0; n < track.epochs.size(); ++n) {
      const auto& ep = track.epochs[n];
      try {
        const Observation obs = observe(s, bs, ep.position, params, shadow_rng, tdoa_rng);
        Point2D estimate = coarse_estimate(db, obs.rss);
        if (uses_tdoa(s.mode)) estimate = refine_with_tdoa(estimate, *obs.tdoa, bs);
        report.epochs.push_back({ep.t, ep.position, estimate, distance(estimate, ep.position),
                                 angles(state, bs, ep.position), true});
        if (s.dynamic_orientation) {
          state = update_orientation(state, bs, estimate);
          apply_orientation(state, bs);
        }
      } catch (const Error& e) {
        rethrow_with_epoch(e, n);
      }
    }
  } else {
    // The first position is known and the antennas start on target.
    const Point2D start = track.epochs.front().position;
    OrientationState state = current_orientation(bs, start);
    if (s.antenna_model == AntennaModel::Directional) {
      state = update_orientation(state, bs, start);
      apply_orientation(state, bs);
    }
    report.epochs.push_back({track.epochs.front().t, start, start, 0.0, angles(state, bs, start), false});

    for (std::size_t n = 1; n < track.epochs.size(); ++n) {
      const auto& ep = track.epochs[n];
      try {
        const Observation obs = observe(s, bs, ep.position, params, shadow_rng, tdoa_rng);
        MeasurementSet m = rssd_from_rss(rss_idx, obs.rss);
        m.tdoa = obs.tdoa;
        const SolverConfig cfg{params, bs, s.region, s.antenna_model};
        const Point2D estimate = uses_tdoa(s.mode) ? solve_rssd_tdoa(cfg, m) : solve_rssd(cfg, m);
        report.epochs.push_back({ep.t, ep.position, estimate, distance(estimate, ep.position),
                                 angles(state, bs, ep.position), true});
        if (s.antenna_model == AntennaModel::Directional && s.dynamic_orientation) {
          state = update_orientation(state, bs, estimate);
          apply_orientation(state, bs);
        }
      } catch (const Error& e) {
        rethrow_with_epoch(e, n);
      }
    }
  }

  finalize(report);
  report.runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::vector<RunReport> run_trials(const Scenario& s, unsigned workers) {
  validate(s);
  const RunContext ctx = prepare(s);
  const auto count = static_cast<std::size_t>(s.trials);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

  std::vector<RunReport> out(count);
  std::vector<std::optional<Error>> failures(count);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = run_scenario(s, i, ctx);
      } catch (const Error& e) {
        failures[i] = e;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (failures[i]) throw Error(failures[i]->code(), "trial " + std::to_string(i) + ": " + failures[i]->what());
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "median of nothing");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Summary aggregate(std::span<const RunReport> reports) {
  if (reports.empty()) throw Error(Errc::EmptyInput, "no reports to aggregate");
  Summary s;
  s.label = reports.front().label;
  s.trials = reports.size();
  std::vector<double> rm;
  std::vector<double> th;
  double err_sum = 0.0;
  for (const auto& r : reports) {
    rm.push_back(r.rmse);
    err_sum += r.mean_error;
    if (!std::isnan(r.theta_std)) th.push_back(r.theta_std);
  }
  s.rmse_median = median(rm);
  s.rmse_mean = std::accumulate(rm.begin(), rm.end(), 0.0) / static_cast<double>(rm.size());
  s.mean_error_mean = err_sum / static_cast<double>(reports.size());
  if (th.empty()) {
    s.theta_std_median = s.theta_std_mean = std::numeric_limits<double>::quiet_NaN();
  } else {
    s.theta_std_median = median(th);
    s.theta_std_mean = std::accumulate(th.begin(), th.end(), 0.0) / static_cast<double>(th.size());
  }
  return s;
}

PairedComparison compare_paired(std::span<const RunReport> baseline,
                                std::span<const RunReport> candidate) {
  if (baseline.empty() || candidate.empty()) throw Error(Errc::EmptyInput, "nothing to compare");
  if (baseline.size() != candidate.size()) {
    throw Error(Errc::LengthMismatch, "paired comparison needs equally many trials");
  }
  PairedComparison c;
  c.baseline = baseline.front().label;
  c.candidate = candidate.front().label;
  c.pairs = baseline.size();
  std::vector<double> b;
  std::vector<double> k;
  std::size_t wins = 0;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (baseline[i].trial != candidate[i].trial || baseline[i].seed != candidate[i].seed) {
      throw Error(Errc::LengthMismatch, "reports are not paired by seed and trial");
    }
    b.push_back(baseline[i].rmse);
    k.push_back(candidate[i].rmse);
    if (candidate[i].rmse < baseline[i].rmse) ++wins;
  }
  c.baseline_median = median(b);
  c.candidate_median = median(k);
  c.improvement_ratio = c.baseline_median / c.candidate_median;
  c.candidate_win_rate = static_cast<double>(wins) / static_cast<double>(c.pairs);
  return c;
}

void write_track_report_csv(std::ostream& out, const RunReport& r) {
  out << "t,x,y,x_hat,y_hat,err\n";
  for (const auto& e : r.epochs) {
    out << format_fixed(e.t, 6) << ',' << format_fixed(e.truth.x, 6) << ','
        << format_fixed(e.truth.y, 6) << ',' << format_fixed(e.estimate.x, 6) << ','
        << format_fixed(e.estimate.y, 6) << ',' << format_fixed(e.error, 6) << '\n';
  }
}

void write_theta_csv(std::ostream& out, const RunReport& r) {
  out << "t,bs_id,theta_deg\n";
  for (const auto& e : r.epochs) {
    for (const auto& a : e.theta) {
      out << format_fixed(e.t, 6) << ',' << a.bs_id << ',' << format_fixed(rad_to_deg(a.theta), 6)
          << '\n';
    }
  }
}

void write_summary_header(std::ostream& out) {
  out << "mode,trials,rmse_median,rmse_mean,theta_std_deg\n";
}

void write_summary_row(std::ostream& out, const Summary& s) {
  out << s.label << ',' << s.trials << ',' << format_fixed(s.rmse_median, 6) << ','
      << format_fixed(s.rmse_mean, 6) << ','
      << (std::isnan(s.theta_std_mean) ? std::string("nan")
                                       : format_fixed(rad_to_deg(s.theta_std_mean), 6))
      << '\n';
}

}  // namespace rssdloc
