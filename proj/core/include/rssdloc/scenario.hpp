#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rssdloc/channel.hpp"
#include "rssdloc/fingerprint.hpp"
#include "rssdloc/mobility.hpp"
#include "rssdloc/receiver.hpp"
#include "rssdloc/solver.hpp"

namespace rssdloc {

enum class Mode { SimRssd, SimRssdTdoa, FpRssd, FpRssdTdoa };

std::string_view to_string(Mode m);
std::string_view to_string(AntennaModel a);
Mode parse_mode(std::string_view s);
AntennaModel parse_antenna_model(std::string_view s);

inline bool is_fingerprint(Mode m) { return m == Mode::FpRssd || m == Mode::FpRssdTdoa; }
inline bool uses_tdoa(Mode m) { return m == Mode::SimRssdTdoa || m == Mode::FpRssdTdoa; }

// Where per-epoch RSS/TDOA values come from.
enum class MeasurementSource { Model, Receiver };

struct FingerprintSetup {
  Box area{0.0, 3.0, 0.0, 3.0};
  double grid_step = 0.25;
  std::vector<Point2D> excluded;
  int offline_averages = 1;
  bool noiseless_db = false;
  std::optional<std::filesystem::path> db_file;  // measured database, replaces synthesis
};

using MobilitySetup = std::variant<WaypointModelParams, CircularTrackParams>;

struct Scenario {
  std::string name = "scenario";
  std::vector<BaseStation> bs;
  ChannelPresets channel;
  TdoaNoiseParams tdoa_noise;
  MobilitySetup mobility = WaypointModelParams{};
  double circular_update_rate = 1.0;  // Hz, sampling of a circular route
  SearchRegion region;
  AntennaModel antenna_model = AntennaModel::Directional;
  Mode mode = Mode::SimRssdTdoa;
  // Re-point directional antennas at each new estimate; fingerprint runs keep
  // them fixed.
  bool dynamic_orientation = true;
  std::uint64_t seed = 1;
  int trials = 1;
  FingerprintSetup fingerprint;
  MeasurementSource source = MeasurementSource::Model;
  ReceiverConfig receiver;

  // Channel constants that match the antenna model.
  const ChannelParams& active_channel() const {
    return channel.get(antenna_model == AntennaModel::Directional ? ChannelPreset::OmniDir
                                                                   : ChannelPreset::OmniOmni);
  }
};

// Throws InvalidArgument when required pieces are missing or inconsistent.
void validate(const Scenario& s);

// `path=value` edits applied to the parsed document before interpretation,
// e.g. {"mobility.update_rate_hz", "1"}. Values are read as JSON when they
// parse, as plain strings otherwise.
struct Override {
  std::string path;
  std::string value;
};

Scenario parse_scenario(std::string_view text, std::span<const Override> overrides = {});
Scenario load_scenario(const std::filesystem::path& file, std::span<const Override> overrides = {});

// Serializes a scenario back to the configuration format.
std::string dump_scenario(const Scenario& s);

// Stations as seen by a run: omni antennas everywhere in the omni model.
std::vector<BaseStation> stations_for(const Scenario& s);

}  // namespace rssdloc
