#pragma once

#include <stdexcept>
#include <string>

namespace handover {

/// Base class for every failure raised by the handover library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HANDOVER_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// geometry
HANDOVER_DEFINE_ERROR(OutOfBounds);

// scene
HANDOVER_DEFINE_ERROR(ParseError);

/// Raised when a document parses but violates a schema or type invariant.
/// `path()` names the offending field, e.g. "object.grasps[2].id".
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// costs / optimizer
HANDOVER_DEFINE_ERROR(NoHumanGrasp);
HANDOVER_DEFINE_ERROR(NoRobotGrasp);
HANDOVER_DEFINE_ERROR(NoFeasibleHandover);

// effort
HANDOVER_DEFINE_ERROR(Unreachable);
HANDOVER_DEFINE_ERROR(LimitViolation);

// mln
HANDOVER_DEFINE_ERROR(DomainMissing);
HANDOVER_DEFINE_ERROR(TooLarge);

// dataset
HANDOVER_DEFINE_ERROR(CountMismatch);
HANDOVER_DEFINE_ERROR(OverlapError);

// stats
HANDOVER_DEFINE_ERROR(EmptySample);
HANDOVER_DEFINE_ERROR(UnbalancedWithin);
HANDOVER_DEFINE_ERROR(InvalidDesign);

// srl
HANDOVER_DEFINE_ERROR(UncoveredKey);
HANDOVER_DEFINE_ERROR(UnknownDomainValue);
HANDOVER_DEFINE_ERROR(NoWinningAtom);

#undef HANDOVER_DEFINE_ERROR

/// A transfer pose was rejected by one of the guarded-move checks.
class SafetyGateFailed : public Error {
 public:
  SafetyGateFailed(std::string gate, double distance, double threshold)
      : Error("safety gate '" + gate + "' failed: distance " + std::to_string(distance) +
              " m vs threshold " + std::to_string(threshold) + " m"),
        gate_(std::move(gate)),
        distance_(distance),
        threshold_(threshold) {}

  const std::string& gate() const noexcept { return gate_; }
  double distance() const noexcept { return distance_; }
  double threshold() const noexcept { return threshold_; }

 private:
  std::string gate_;
  double distance_;
  double threshold_;
};

}  // namespace handover
