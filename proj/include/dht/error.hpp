#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dht {

enum class ErrorKind {
  DuplicatePoint,
  NonPositiveWeight,
  EmptyInput,
  InvalidArgument,
  ExtrapolationUnstable,
  AtomOnNode,
  EvaluationAtNode,
  SparsenessViolation,
  NotBesselWeighted,
  BoundednessPrecheckFailed,
  SingularSystem,
  ConditionCapExceeded,
  IterationStalled,
  InvalidRatio,
  ClusterOverlap,
  AlignmentViolated,
  RegimeUndetected,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dht
