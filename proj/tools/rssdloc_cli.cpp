#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rssdloc/csv.hpp"
#include "rssdloc/error.hpp"
#include "rssdloc/experiment.hpp"
#include "rssdloc/scenario.hpp"

namespace fs = std::filesystem;
using namespace rssdloc;

namespace {

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out = ".";
  std::vector<std::string> set;
  unsigned workers = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scenario", c.scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Override the scenario seed");
  app->add_option("--trials", c.trials, "Override the number of trials");
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--set", c.set, "Scenario override path=value, e.g. mode=SIM_RSSD")->take_all();
  app->add_option("--workers", c.workers, "Worker threads (0 = all cores)")->capture_default_str();
}

std::vector<Override> parse_overrides(const std::vector<std::string>& items) {
  std::vector<Override> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(Errc::InvalidArgument, "override '" + item + "' is not path=value");
    }
    out.push_back({item.substr(0, eq), item.substr(eq + 1)});
  }
  return out;
}

Scenario load(const Common& c, std::vector<Override> extra = {}) {
  auto overrides = parse_overrides(c.set);
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  Scenario s = load_scenario(c.scenario, overrides);
  if (c.seed) s.seed = *c.seed;
  if (c.trials) s.trials = *c.trials;
  validate(s);
  return s;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw Error(Errc::IoError, "cannot write " + (dir / name).string());
  return f;
}

void write_trials(const fs::path& dir, const std::vector<RunReport>& reports) {
  auto f = open_out(dir, "trials.csv");
  f << "mode,trial,rmse,mean_error,theta_std_deg,runtime_s\n";
  for (const auto& r : reports) {
    f << r.label << ',' << r.trial << ',' << format_fixed(r.rmse, 6) << ','
      << format_fixed(r.mean_error, 6) << ','
      << (std::isnan(r.theta_std) ? std::string("nan") : format_fixed(rad_to_deg(r.theta_std), 6))
      << ',' << format_fixed(r.runtime, 6) << '\n';
  }
}

void print_summary(const Summary& s) {
  std::printf("%-28s trials=%zu rmse_median=%.4f m rmse_mean=%.4f m mean_err=%.4f m theta_std=%.3f deg\n",
              s.label.c_str(), s.trials, s.rmse_median, s.rmse_mean, s.mean_error_mean,
              rad_to_deg(s.theta_std_mean));
}

int cmd_run(const Common& c) {
  const Scenario s = load(c);
  const auto reports = run_trials(s, c.workers);
  const fs::path dir = c.out;
  {
    auto f = open_out(dir, "track.csv");
    write_track_report_csv(f, reports.front());
  }
  {
    auto f = open_out(dir, "theta.csv");
    write_theta_csv(f, reports.front());
  }
  const Summary sum = aggregate(reports);
  {
    auto f = open_out(dir, "summary.csv");
    write_summary_header(f);
    write_summary_row(f, sum);
  }
  write_trials(dir, reports);
  print_summary(sum);
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& values) {
  const fs::path dir = c.out;
  auto f = open_out(dir, "summary.csv");
  write_summary_header(f);
  for (const auto& v : values) {
    const Scenario s = load(c, {{param, v}});
    const auto reports = run_trials(s, c.workers);
    Summary sum = aggregate(reports);
    sum.label += "[" + param + "=" + v + "]";
    write_summary_row(f, sum);
    print_summary(sum);
  }
  return 0;
}

int cmd_build_db(const Common& c) {
  const Scenario s = load(c);
  const FingerprintDB db = synthesize_db(s);
  auto f = open_out(c.out, "db.csv");
  write_db_csv(f, db);
  std::printf("%zu reference points, %zu stations -> %s\n", db.entries.size(), db.station_count(),
              (fs::path(c.out) / "db.csv").string().c_str());
  return 0;
}

int cmd_compare(const Common& c, std::string baseline, std::string candidate) {
  const Scenario probe = load(c);
  if (baseline.empty()) baseline = is_fingerprint(probe.mode) ? "FP_RSSD" : "SIM_RSSD";
  if (candidate.empty()) candidate = is_fingerprint(probe.mode) ? "FP_RSSD_TDOA" : "SIM_RSSD_TDOA";
  const Scenario sb = load(c, {{"mode", baseline}});
  const Scenario sc = load(c, {{"mode", candidate}});
  const auto rb = run_trials(sb, c.workers);
  const auto rc = run_trials(sc, c.workers);
  const PairedComparison cmp = compare_paired(rb, rc);
  const fs::path dir = c.out;
  {
    auto f = open_out(dir, "summary.csv");
    write_summary_header(f);
    write_summary_row(f, aggregate(rb));
    write_summary_row(f, aggregate(rc));
  }
  {
    auto f = open_out(dir, "compare.csv");
    f << "baseline,candidate,pairs,baseline_rmse_median,candidate_rmse_median,improvement_ratio,"
         "candidate_win_rate\n";
    f << cmp.baseline << ',' << cmp.candidate << ',' << cmp.pairs << ','
      << format_fixed(cmp.baseline_median, 6) << ',' << format_fixed(cmp.candidate_median, 6) << ','
      << format_fixed(cmp.improvement_ratio, 6) << ',' << format_fixed(cmp.candidate_win_rate, 6)
      << '\n';
  }
  print_summary(aggregate(rb));
  print_summary(aggregate(rc));
  std::printf("improvement ratio %.3f, candidate better on %.0f%% of %zu seeds\n",
              cmp.improvement_ratio, 100.0 * cmp.candidate_win_rate, cmp.pairs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TDOA-assisted RSSD indoor localization simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Run a scenario and write track/theta/summary CSVs");
  add_common(run, run_opts);

  Common sweep_opts;
  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario for several values of one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param, "Scenario path, e.g. mobility.update_rate_hz")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  Common db_opts;
  auto* db = app.add_subcommand("build-db", "Synthesize a fingerprint database (db.csv)");
  add_common(db, db_opts);

  Common cmp_opts;
  std::string baseline;
  std::string candidate;
  auto* cmp = app.add_subcommand("compare", "Paired-seed comparison of two modes");
  add_common(cmp, cmp_opts);
  cmp->add_option("--baseline", baseline, "Baseline mode (default: RSSD only)");
  cmp->add_option("--candidate", candidate, "Candidate mode (default: with TDOA)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, param, values);
    if (*db) return cmd_build_db(db_opts);
    if (*cmp) return cmd_compare(cmp_opts, baseline, candidate);
  } catch (const Error& e) {
    std::fprintf(stderr, "rssdloc: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rssdloc: %s\n", e.what());
    return 2;
  }
  return 1;
}
