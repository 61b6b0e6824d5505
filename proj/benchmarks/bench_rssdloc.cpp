#include <benchmark/benchmark.h>

#include "rssdloc/experiment.hpp"
#include "rssdloc/fingerprint.hpp"
#include "rssdloc/receiver.hpp"
#include "rssdloc/scenario.hpp"
#include "rssdloc/solver.hpp"

using namespace rssdloc;

namespace {

struct SimInstance {
  SolverConfig cfg;
  MeasurementSet m;
};

SimInstance sim_instance(AntennaModel model) {
  Scenario s = load_scenario(RSSDLOC_SCENARIO_DIR "/sim_8x8.json");
  s.antenna_model = model;
  std::vector<BaseStation> bs = stations_for(s);
  const Point2D mu{0.8, -1.3};
  for (auto& b : bs) {
    if (auto* d = b.directional()) d->orientation = azimuth(b.position, mu);
  }
  Rng rng(7);
  SimInstance inst{{s.active_channel(), bs, s.region, model}, {}};
  inst.m = simulate_measurements(bs, mu, inst.cfg.params, s.tdoa_noise, rng);
  return inst;
}

void BM_SolveRssd(benchmark::State& state) {
  const auto inst = sim_instance(state.range(0) ? AntennaModel::Directional : AntennaModel::Omni);
  for (auto _ : state) benchmark::DoNotOptimize(solve_rssd(inst.cfg, inst.m));
}
BENCHMARK(BM_SolveRssd)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolveRssdTdoa(benchmark::State& state) {
  const auto inst = sim_instance(state.range(0) ? AntennaModel::Directional : AntennaModel::Omni);
  for (auto _ : state) benchmark::DoNotOptimize(solve_rssd_tdoa(inst.cfg, inst.m));
}
BENCHMARK(BM_SolveRssdTdoa)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_CorrelateAndDetect(benchmark::State& state) {
  const ReceiverConfig cfg;
  const MatchedFilter filter(make_template(cfg.signal, cfg.sample_rate), {}, cfg.upsample_factor);
  Rng rng(3);
  const Waveform r = generate_signal(cfg.signal, 12.3e-9, -4.0, cfg.sample_rate, 0.01, rng);
  for (auto _ : state) benchmark::DoNotOptimize(filter.detect(r));
}
BENCHMARK(BM_CorrelateAndDetect)->Unit(benchmark::kMillisecond);

void BM_CoarseEstimate(benchmark::State& state) {
  const Scenario s = load_scenario(RSSDLOC_SCENARIO_DIR "/fp_3x3.json");
  const FingerprintDB db = synthesize_db(s);
  Rng rng(5);
  const auto meas = simulate_rss(stations_for(s), {1.2, 0.9}, s.active_channel(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(coarse_estimate(db, meas));
}
BENCHMARK(BM_CoarseEstimate)->Unit(benchmark::kMicrosecond);

void BM_ClosedLoopTrial(benchmark::State& state) {
  const Scenario s = load_scenario(RSSDLOC_SCENARIO_DIR "/sim_8x8.json");
  std::uint64_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s, trial++));
}
BENCHMARK(BM_ClosedLoopTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
