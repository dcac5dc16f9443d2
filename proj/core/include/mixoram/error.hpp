#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixoram {

enum class Errc {
  kIdentityElement,
  kUnsupportedKappa,
  kSizeMismatch,
  kCounterOutOfRange,
  kIndivisible,
  kNotAProbabilityVector,
  kOutOfRange,
  kBadInstruction,
  kPhaseOrderViolation,
  kMissingBatch,
  kConfigMismatch,
  kCacheFull,
  kStaleState,
  kExhaustedHistory,
  kMalformedFrame,
  kTransport,
  kInvalidArgument,
  kBadSnapshot,
  kCrypto,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail);

inline void require(bool ok, Errc code, const char* detail) {
  if (!ok) fail(code, detail);
}

}  // namespace mixoram
