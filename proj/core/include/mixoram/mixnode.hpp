#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mixoram/group.hpp"
#include "mixoram/instruction.hpp"
#include "mixoram/permutation.hpp"
#include "mixoram/sym.hpp"
#include "mixoram/transport.hpp"

namespace mixoram {

struct CostCounters {
  std::uint64_t encryptions = 0;        // record-layer cipher applications
  std::uint64_t permuted_elements = 0;  // elements passed through a permutation or sort
  std::uint64_t records_sent = 0;       // records in outgoing batches and stores
  std::uint64_t records_fetched = 0;    // records received from storage
  std::uint64_t bytes_sent = 0;         // cell bytes of records_sent
  std::uint64_t bytes_fetched = 0;      // cell bytes of records_fetched
  std::uint64_t messages_sent = 0;

  CostCounters& operator+=(const CostCounters& o);
  bool operator==(const CostCounters&) const = default;
};

// Key and seed schedules a mix derives from its instruction.
struct MixSchedule {
  std::vector<DerivedSecrets> old_private;  // rebuild only
  std::vector<DerivedSecrets> new_private;
  std::vector<Bytes> old_public;            // parallel rebuild only
  std::vector<Bytes> new_public;            // parallel only
};

// Cascades: one entry per chain. Parallel layered: r. Parallel rebuild: r wrap entries plus one
// E/D entry at index r, and r public seeds per epoch.
MixSchedule derive_mix_schedule(const Ristretto255& g, const MixInstruction& in,
                                const RistrettoScalar& own_private);

struct MixOptions {
  bool null_cipher = false;
  // Naive rebuild without the E/D phase; only for demonstrating the exposure it causes.
  bool skip_encdec = false;
  // Observer for the records a mix holds after each processing step.
  std::function<void(NodeId mix, Phase phase, std::uint16_t round,
                     const std::vector<SlotCell>& held)>
      on_state;
};

class MixNode : public Node {
 public:
  MixNode(NodeId id, RistrettoScalar private_key, MixOptions opts = {});

  NodeId id() const override { return id_; }
  std::vector<Outbound> handle(const Frame& frame) override;
  std::optional<Endpoint> endpoint_of(NodeId peer) const override;

  // Throws kBadInstruction. Resets all per-epoch state.
  void bootstrap(const MixInstruction& in);

  // Batch entries carry their current global slot.
  std::vector<SlotCell> cascade_layered_round(std::vector<SlotCell> batch);
  // Enforces unwrap -> E/D -> wrap per mix (kPhaseOrderViolation otherwise).
  std::vector<SlotCell> cascade_rebuild_phase(Phase phase, std::vector<SlotCell> batch);
  // One barrier-synchronised parallel round. inbound maps sender to batch and must hold all m
  // mixes (kMissingBatch) and exactly n/m records (kSizeMismatch). Returns the batches for each
  // destination mix, already carrying their next-round slots.
  std::vector<std::vector<SlotCell>> parallel_round(
      Phase phase, std::uint32_t round, const std::map<NodeId, std::vector<SlotCell>>& inbound);

  const CostCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }
  const MixSchedule& schedule() const { return sched_; }
  const std::optional<MixInstruction>& instruction() const { return instr_; }
  const std::vector<SlotCell>& held() const { return held_; }
  bool finished() const { return stage_ == Stage::kDone; }

 private:
  enum class Stage { kIdle, kCascade, kShuffle, kUnwrap, kEncDec, kWrap, kStoring, kDone };
  using InboxKey = std::pair<std::uint8_t, std::uint16_t>;

  std::vector<Outbound> on_instruction(const Frame& frame);
  std::vector<Outbound> on_frame(const Frame& frame);
  void on_cascade_batch(const Frame& frame, std::vector<Outbound>& out);
  void progress_parallel(std::vector<Outbound>& out);
  bool barrier_ready(Phase phase, std::uint16_t round, std::size_t expected) const;
  std::map<NodeId, std::vector<SlotCell>> take_inbox(Phase phase, std::uint16_t round);

  void start(std::vector<Outbound>& out);
  void fetch(std::vector<Outbound>& out, std::vector<std::uint64_t> slots, Phase phase,
             std::uint16_t round);
  void send_batch(std::vector<Outbound>& out, NodeId to, Phase phase, std::uint16_t round,
                  const std::vector<SlotCell>& cells);
  void store(std::vector<Outbound>& out, std::vector<SlotCell> cells);
  void dispatch(std::vector<Outbound>& out, const Permutation& pub, Phase phase,
                std::uint16_t round);
  Frame frame(FrameType type, Phase phase, std::uint16_t round, Bytes payload) const;
  void observe(Phase phase, std::uint16_t round);

  void encdec(std::vector<SlotCell>& group, ByteView old_key, ByteView new_key);
  void check_batch(const std::vector<SlotCell>& batch, std::size_t expected) const;
  std::vector<SlotCell> merge_sorted(const std::map<NodeId, std::vector<SlotCell>>& inbound);

  const Permutation& cascade_perm(bool old_epoch);
  const Permutation& local_perm(bool old_epoch, std::uint32_t round);
  const Permutation& public_perm(bool old_epoch, std::uint32_t round);

  std::uint32_t m() const { return instr_->mix_count(); }
  std::uint64_t chunk() const { return instr_->n / m(); }
  std::uint32_t old_epoch() const { return static_cast<std::uint32_t>(instr_->epoch - 1); }
  std::uint32_t new_epoch() const { return static_cast<std::uint32_t>(instr_->epoch); }
  bool reports_to_client() const;

  NodeId id_;
  RistrettoScalar priv_;
  MixOptions opts_;
  Ristretto255 group_;
  RecordCipher cipher_;

  std::optional<MixInstruction> instr_;
  MixSchedule sched_;
  LayeredFormat format_;
  Stage stage_ = Stage::kIdle;
  std::uint32_t cur_round_ = 0;
  bool unwrapped_ = false;
  bool ed_done_ = false;
  bool wrapped_ = false;

  std::vector<Frame> pending_;
  std::map<InboxKey, std::map<NodeId, std::vector<SlotCell>>> inbox_;
  std::vector<SlotCell> held_;
  CostCounters counters_;

  std::map<std::pair<bool, std::uint32_t>, Permutation> perm_cache_;
  std::map<std::pair<bool, std::uint32_t>, Permutation> pub_cache_;
};

}  // namespace mixoram
