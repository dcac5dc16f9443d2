#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixoram/bytes.hpp"
#include "mixoram/group.hpp"
#include "mixoram/hash.hpp"
#include "mixoram/shuffle.hpp"

namespace mixoram {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  bool operator==(const Endpoint&) const = default;
};

std::string to_string(const Endpoint& e);
// "host:port"
Endpoint parse_endpoint(const std::string& text);

// Everything one mix needs for one eviction. Old elements describe the layers being removed
// (rebuild only), new ones the layers being applied.
struct MixInstruction {
  Design design = Design::kCascadeLayered;
  Kappa kappa = Kappa::k128;
  std::uint64_t n = 0;
  std::uint32_t cell_bytes = 0;
  std::uint32_t rounds = 0;  // parallel designs only
  std::uint64_t epoch = 0;   // epoch produced by this eviction
  std::uint32_t mix_index = 0;
  Endpoint db;
  std::vector<Endpoint> mixes;

  std::optional<RistrettoPoint> alpha_old;
  RistrettoPoint alpha_new;
  std::optional<RistrettoPoint> beta_old;
  std::optional<RistrettoScalar> share_old;
  std::optional<RistrettoPoint> beta_new;
  std::optional<RistrettoScalar> share_new;
  std::optional<RistrettoPoint> client_public;

  std::uint32_t mix_count() const { return static_cast<std::uint32_t>(mixes.size()); }
  std::size_t group_element_count() const;
};

// Throws kBadInstruction when a design-required field is missing or the geometry is invalid.
void validate(const MixInstruction& in);
Bytes encode_instruction(const MixInstruction& in);
MixInstruction decode_instruction(ByteView payload);

}  // namespace mixoram
