#pragma once

#include <stdexcept>
#include <string>

namespace wavetank {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define WAVETANK_ERROR(Name)                                          \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

WAVETANK_ERROR(GeometryError)
WAVETANK_ERROR(AmbiguousIntersection)
WAVETANK_ERROR(CornerContact)
WAVETANK_ERROR(NotACharacteristicCorner)
WAVETANK_ERROR(NoPeriodicOrbit)
WAVETANK_ERROR(BranchViolation)
WAVETANK_ERROR(PoleAtIntegerS)
WAVETANK_ERROR(OnCharacteristic)
WAVETANK_ERROR(QuadratureNotConverged)
WAVETANK_ERROR(NearDiagonalBreakdown)
WAVETANK_ERROR(DiagonalSingular)
WAVETANK_ERROR(IllConditioned)
WAVETANK_ERROR(MeshFailure)
WAVETANK_ERROR(SolverBreakdown)
WAVETANK_ERROR(BlowupDetected)
WAVETANK_ERROR(ConfigInvalid)
WAVETANK_ERROR(IoError)

#undef WAVETANK_ERROR

}  // namespace wavetank
