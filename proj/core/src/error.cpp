#include "mixoram/error.hpp"

namespace mixoram {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kIdentityElement: return "IdentityElement";
    case Errc::kUnsupportedKappa: return "UnsupportedKappa";
    case Errc::kSizeMismatch: return "SizeMismatch";
    case Errc::kCounterOutOfRange: return "CounterOutOfRange";
    case Errc::kIndivisible: return "Indivisible";
    case Errc::kNotAProbabilityVector: return "NotAProbabilityVector";
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kBadInstruction: return "BadInstruction";
    case Errc::kPhaseOrderViolation: return "PhaseOrderViolation";
    case Errc::kMissingBatch: return "MissingBatch";
    case Errc::kConfigMismatch: return "ConfigMismatch";
    case Errc::kCacheFull: return "CacheFull";
    case Errc::kStaleState: return "StaleState";
    case Errc::kExhaustedHistory: return "ExhaustedHistory";
    case Errc::kMalformedFrame: return "MalformedFrame";
    case Errc::kTransport: return "Transport";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kBadSnapshot: return "BadSnapshot";
    case Errc::kCrypto: return "Crypto";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace mixoram
