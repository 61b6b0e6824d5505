#include "rssdloc/error.hpp"

namespace rssdloc {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DegenerateHyperbola: return "DegenerateHyperbola";
    case Errc::NonPositiveDistance: return "NonPositiveDistance";
    case Errc::TooFewStations: return "TooFewStations";
    case Errc::CoincidentPosition: return "CoincidentPosition";
    case Errc::SingularCandidate: return "SingularCandidate";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::MissingTdoa: return "MissingTdoa";
    case Errc::CoincidentWithStation: return "CoincidentWithStation";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::AliasingSampleRate: return "AliasingSampleRate";
    case Errc::TemplateTooLong: return "TemplateTooLong";
    case Errc::WindowOutOfSupport: return "WindowOutOfSupport";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rssdloc
