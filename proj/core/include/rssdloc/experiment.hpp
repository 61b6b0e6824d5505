#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rssdloc/fingerprint.hpp"
#include "rssdloc/scenario.hpp"

namespace rssdloc {

struct StationAngle {
  int bs_id;
  double theta;  // radians, [0, pi]
  friend bool operator==(const StationAngle&, const StationAngle&) = default;
};

struct EpochRecord {
  double t = 0.0;
  Point2D truth;
  Point2D estimate;
  double error = 0.0;  // m
  std::vector<StationAngle> theta;
  bool included = true;  // counted in the error statistics
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct RunReport {
  std::string label;  // "<MODE>@<ANTENNA>"
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::vector<EpochRecord> epochs;
  double rmse = 0.0;        // m
  double mean_error = 0.0;  // m
  double theta_std = 0.0;   // rad; NaN without directional antennas
  double runtime = 0.0;     // s, wall clock

  // Everything except the wall-clock runtime.
  bool same_result(const RunReport& other) const;
};

// Statistics over the included epochs.
double rmse(std::span<const EpochRecord> epochs);
double mean_error(std::span<const EpochRecord> epochs);
// Sample standard deviation of every recorded misorientation angle.
double theta_std(std::span<const EpochRecord> epochs);

// Recomputes rmse, mean_error and theta_std from the epochs.
void finalize(RunReport& report);

std::string run_label(const Scenario& s);

// Everything a trial needs that does not depend on the trial index.
struct RunContext {
  std::optional<FingerprintDB> measured_db;  // from the scenario's db_file
};

RunContext prepare(const Scenario& s);

// The offline database a fingerprint trial uses when no measured one is given.
FingerprintDB synthesize_db(const Scenario& s, std::uint64_t trial = 0);

// One closed-loop trial. Random streams derive from (scenario seed, trial),
// so the same pair always reproduces the same report and different modes of
// the same seed see the same track and noise draws.
RunReport run_scenario(const Scenario& s, std::uint64_t trial = 0, const RunContext& ctx = {});

// Trials 0 .. s.trials-1, spread over worker threads; results are ordered by
// trial index.
std::vector<RunReport> run_trials(const Scenario& s, unsigned workers = 0);

struct Summary {
  std::string label;
  std::size_t trials = 0;
  double rmse_median = 0.0;
  double rmse_mean = 0.0;
  double mean_error_mean = 0.0;
  double theta_std_median = 0.0;  // rad
  double theta_std_mean = 0.0;    // rad
};

// Throws EmptyInput.
Summary aggregate(std::span<const RunReport> reports);

struct PairedComparison {
  std::string baseline;
  std::string candidate;
  std::size_t pairs = 0;
  double baseline_median = 0.0;
  double candidate_median = 0.0;
  double improvement_ratio = 0.0;  // baseline median / candidate median
  double candidate_win_rate = 0.0;  // share of seeds where candidate rmse < baseline rmse
};

// Pairs reports by trial index. Throws EmptyInput / LengthMismatch.
PairedComparison compare_paired(std::span<const RunReport> baseline,
                                std::span<const RunReport> candidate);

double median(std::vector<double> values);

// track.csv: t,x,y,x_hat,y_hat,err
void write_track_report_csv(std::ostream& out, const RunReport& r);
// theta.csv: t,bs_id,theta_deg
void write_theta_csv(std::ostream& out, const RunReport& r);
// summary.csv: mode,trials,rmse_median,rmse_mean,theta_std_deg
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const Summary& s);

}  // namespace rssdloc
