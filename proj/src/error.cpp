#include "dht/error.hpp"

#include <cstdlib>
#include <thread>

#include "dht/config.hpp"

namespace dht {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicatePoint: return "DuplicatePoint";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::AtomOnNode: return "AtomOnNode";
    case ErrorKind::EvaluationAtNode: return "EvaluationAtNode";
    case ErrorKind::SparsenessViolation: return "SparsenessViolation";
    case ErrorKind::NotBesselWeighted: return "NotBesselWeighted";
    case ErrorKind::BoundednessPrecheckFailed: return "BoundednessPrecheckFailed";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::ConditionCapExceeded: return "ConditionCapExceeded";
    case ErrorKind::IterationStalled: return "IterationStalled";
    case ErrorKind::InvalidRatio: return "InvalidRatio";
    case ErrorKind::ClusterOverlap: return "ClusterOverlap";
    case ErrorKind::AlignmentViolated: return "AlignmentViolated";
    case ErrorKind::RegimeUndetected: return "RegimeUndetected";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::size_t thread_cap() {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("DHT_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return std::min<std::size_t>(static_cast<std::size_t>(v), hw);
  }
  return hw;
}

}  // namespace dht
