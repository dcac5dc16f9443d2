#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "mixoram/client.hpp"
#include "mixoram/mixnode.hpp"
#include "mixoram/ports.hpp"
#include "mixoram/storage.hpp"
#include "mixoram/transport.hpp"

namespace mixoram {

enum class TransportKind : std::uint8_t { kInProcess, kTcp };

std::string_view to_string(TransportKind t);
// "in-process" or "tcp".
TransportKind parse_transport(std::string_view name);

struct DeploymentConfig {
  Design design = Design::kCascadeLayered;
  std::uint64_t n = 16;
  std::size_t payload_bytes = 32;
  std::size_t cache_slots = 4;
  std::uint32_t m = 2;
  std::uint32_t refresh_per_access = 1;
  Kappa kappa = Kappa::k128;
  std::optional<std::uint32_t> rounds_override;
  bool null_cipher = false;
  bool skip_encdec = false;
  TransportKind transport = TransportKind::kInProcess;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  // Passed to every mix (in-process transport only).
  std::function<void(NodeId, Phase, std::uint16_t, const std::vector<SlotCell>&)> on_state;
};

// 32 bytes derived from (seed, trial, label); every key and seed of a deployment comes from here.
Bytes derive_seed(std::uint64_t seed, std::uint64_t trial, std::string_view label,
                  std::uint64_t index = 0);

// Storage, storage node, m mixes and a client wired together over the chosen transport. The
// client always talks to storage through frames, so both transports see the same traffic.
class Deployment {
 public:
  explicit Deployment(DeploymentConfig cfg);
  ~Deployment();
  Deployment(const Deployment&) = delete;
  Deployment& operator=(const Deployment&) = delete;

  const DeploymentConfig& config() const;
  Client& client();
  StoreApi& store();
  Storage& storage();
  MixNode& mix(std::uint32_t i);
  std::uint32_t mix_count() const;
  const RistrettoScalar& mix_private(std::uint32_t i) const;
  // Null for the TCP transport.
  LoopbackNetwork* network();

  void preprocess(const std::vector<Bytes>& payloads);
  Bytes read(std::uint64_t v);
  void write(std::uint64_t v, ByteView data);
  void evict();

  // Summed over all mixes.
  CostCounters totals() const;
  std::vector<CostCounters> per_mix() const;
  void reset_counters();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mixoram
