#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "mixoram/group.hpp"
#include "mixoram/instruction.hpp"
#include "mixoram/ports.hpp"
#include "mixoram/routing.hpp"
#include "mixoram/shuffle.hpp"
#include "mixoram/sym.hpp"

namespace mixoram {

struct ClientConfig {
  Design design = Design::kCascadeLayered;
  std::uint64_t n = 0;
  std::size_t payload_bytes = 32;  // b
  std::size_t cache_slots = 0;     // s
  // Records refreshed per access, the accessed one included; 1 disables extra refreshes.
  std::uint32_t refresh_per_access = 1;
  Kappa kappa = Kappa::k128;
  std::optional<std::uint32_t> rounds_override;
  bool null_cipher = false;
  // Must match the mixes' MixOptions::skip_encdec (rebuild records then carry no E/D layers).
  bool skip_encdec = false;

  std::size_t cell_bytes() const;
  std::uint32_t rounds(std::uint32_t m) const;
  // Throws kConfigMismatch for an unusable geometry.
  void validate(std::uint32_t m) const;
};

struct MixInfo {
  RistrettoPoint public_key;
  Endpoint endpoint;
};

struct LayeredDecryption {
  Bytes payload;
  std::uint32_t peeled_epochs = 0;
  std::uint64_t layers_removed = 0;  // mix layers, client layer excluded
};

struct RebuildDecryption {
  Bytes payload;
  std::uint64_t layers_removed = 0;  // wrap + E/D + client layers
};

struct AccessStats {
  bool dummy = false;
  std::uint64_t fetched_slot = 0;
  std::vector<std::uint64_t> refreshed_slots;
  std::uint32_t peeled_epochs = 0;  // layered designs, for the fetched record
};

// E_all = n/(s d) H_n and E_per_record = r/(s d) ((n+1)/2 (H_n - 1/2) + 1/2).
struct ExpectedLayers {
  double all = 0;
  double per_record = 0;
};
ExpectedLayers expected_layers(std::uint64_t n, std::uint64_t s, std::uint64_t d, double r);

// Key and slot material of one epoch, rebuilt from the stored exponents on demand.
struct EpochMaterial {
  std::uint64_t epoch = 0;
  std::uint32_t rounds = 0;
  std::vector<std::vector<DerivedSecrets>> priv;  // [mix][schedule entry]
  std::vector<Bytes> pub_seeds;
  EpochRouting routing;
};

class Client {
 public:
  Client(ClientConfig cfg, std::vector<MixInfo> mixes, ByteView seed);

  const ClientConfig& config() const { return cfg_; }
  std::uint32_t mix_count() const { return static_cast<std::uint32_t>(mixes_.size()); }
  std::uint64_t epoch() const { return epoch_; }
  const RistrettoPoint& public_key() const { return keys_.pub; }

  // Encrypts and uploads the database; payloads[v] belongs to virtual index v.
  void preprocess(const std::vector<Bytes>& payloads, StoreApi& store);

  // Throws kCacheFull once s records were cached this epoch.
  Bytes access(AccessOp op, std::uint64_t v, StoreApi& store, ByteView data = {},
               AccessStats* stats = nullptr);
  Bytes read(std::uint64_t v, StoreApi& store) { return access(AccessOp::kRead, v, store); }
  void write(std::uint64_t v, ByteView data, StoreApi& store) {
    access(AccessOp::kWrite, v, store, data);
  }
  // Reads a record without the access protocol (no cache, no dummy). Verification only.
  Bytes peek(std::uint64_t v, StoreApi& store);

  bool cache_full() const { return cache_.size() >= cfg_.cache_slots; }
  std::size_t cache_fill() const { return cache_.size(); }

  // Samples fresh secrets for the next epoch and returns one instruction per mix. The secrets
  // stay pending until finish_eviction().
  std::vector<MixInstruction> make_instructions(const Endpoint& db);
  // Writes the cache back, flushes the server cache and prepares instructions.
  std::vector<MixInstruction> begin_eviction(StoreApi& store, const Endpoint& db);
  // Number of ACK frames the client waits for.
  std::uint32_t expected_acks() const;
  void finish_eviction();
  // begin_eviction, send instructions, wait for the ACKs, finish_eviction.
  void evict(StoreApi& store, FramePort& port, const Endpoint& db);

  // Current slot of v.
  std::uint64_t lookup(std::uint64_t v) const;
  // Rebuild designs: slot and per-hop counters of v in the current epoch.
  Trace lookup_trace(std::uint64_t v) const;

  LayeredDecryption decrypt_layered(ByteView cell, std::uint64_t v, std::uint64_t slot) const;
  RebuildDecryption decrypt_rebuild(ByteView cell, std::uint64_t v) const;
  // Full onion for v in the current epoch (rebuild designs).
  Bytes encrypt_rebuild(std::uint64_t v, ByteView payload) const;
  // v's payload under the client layer only, as it would appear if every mix layer were gone.
  Bytes client_layer_only(std::uint64_t v, ByteView payload) const;

  // Drops layered history by re-encrypting every record under the client layer only.
  void reinitialize(StoreApi& store);

  // Client state accounting: index table bits plus 2 kappa bits per stored exponent.
  std::uint64_t state_bits() const;
  std::size_t history_epochs() const { return history_.size(); }
  const EpochMaterial& material(std::uint64_t epoch) const;

 private:
  struct EpochSecrets {
    std::uint64_t epoch = 0;
    std::uint32_t rounds = 0;
    std::vector<RistrettoScalar> z;
    std::vector<RistrettoScalar> shares;
  };
  struct CacheEntry {
    std::uint64_t v;
    Bytes payload;
  };

  std::size_t schedule_entries(std::uint32_t rounds) const;
  EpochMaterial build_material(const EpochSecrets& s) const;
  EpochSecrets sample_secrets(std::uint64_t epoch);
  const EpochSecrets* secrets_for(std::uint64_t epoch) const;

  Bytes fetch_plain(std::uint64_t slot, std::uint64_t v, StoreApi& store, std::uint32_t* peeled);
  Bytes encrypt_for_slot(std::uint64_t v, ByteView payload);
  std::uint64_t virtual_of(std::uint64_t slot) const;
  std::uint64_t draw_unfetched();
  void mark_fetched(std::uint64_t slot);
  void upload_cache(StoreApi& store);
  Bytes random_cell();

  ClientConfig cfg_;
  std::vector<MixInfo> mixes_;
  Ristretto255 group_;
  Prg rng_;
  // Epoch secrets come from their own stream so they do not depend on the access history.
  Prg secret_rng_;
  KeyPair<Ristretto255> keys_;
  Bytes client_key_;
  Bytes cache_key_;
  RecordCipher cipher_;
  LayeredFormat format_;

  std::uint64_t epoch_ = 0;
  std::uint64_t reset_epoch_ = 0;  // epoch of the last preprocess or reinitialisation
  bool loaded_ = false;
  std::uint32_t uploads_ = 0;
  // Layered: index table and its inverse; exponents of every epoch since the last reset.
  std::vector<std::uint64_t> slot_of_;
  std::vector<std::uint64_t> virtual_at_;
  std::vector<EpochSecrets> history_;
  // Rebuild: current epoch only.
  std::optional<EpochSecrets> current_;
  std::optional<EpochSecrets> pending_;

  std::vector<CacheEntry> cache_;
  std::set<std::uint64_t> refreshed_;  // layered: virtual indices rewritten this epoch
  std::vector<std::uint64_t> unfetched_;
  std::vector<std::uint64_t> unfetched_pos_;

  mutable std::map<std::uint64_t, std::shared_ptr<const EpochMaterial>> materials_;
};

}  // namespace mixoram
