#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rssdloc {

enum class Errc {
  InvalidArgument,
  DegenerateHyperbola,
  NonPositiveDistance,
  TooFewStations,
  CoincidentPosition,
  SingularCandidate,
  EmptyRegion,
  MissingTdoa,
  CoincidentWithStation,
  EmptyGrid,
  LengthMismatch,
  AliasingSampleRate,
  TemplateTooLong,
  WindowOutOfSupport,
  EmptyInput,
  ParseError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

// All library failures are reported through this type; code() identifies the
// condition, what() carries a human readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rssdloc
