#include "mixoram/mixnode.hpp"

#include <algorithm>
#include <string>

#include "mixoram/shuffle.hpp"

namespace mixoram {
namespace {

bool by_slot(const SlotCell& a, const SlotCell& b) { return a.slot < b.slot; }

[[noreturn]] void order_violation(const std::string& what) {
  fail(Errc::kPhaseOrderViolation, what);
}

}  // namespace

CostCounters& CostCounters::operator+=(const CostCounters& o) {
  encryptions += o.encryptions;
  permuted_elements += o.permuted_elements;
  records_sent += o.records_sent;
  records_fetched += o.records_fetched;
  bytes_sent += o.bytes_sent;
  bytes_fetched += o.bytes_fetched;
  messages_sent += o.messages_sent;
  return *this;
}

MixSchedule derive_mix_schedule(const Ristretto255& g, const MixInstruction& in,
                                const RistrettoScalar& own_private) {
  validate(in);
  MixSchedule s;
  switch (in.design) {
    case Design::kCascadeLayered:
      s.new_private = mix_private_schedule(g, in.alpha_new, own_private, 1, in.kappa);
      break;
    case Design::kCascadeRebuild:
      s.old_private = mix_private_schedule(g, *in.alpha_old, own_private, 1, in.kappa);
      s.new_private = mix_private_schedule(g, in.alpha_new, own_private, 1, in.kappa);
      break;
    case Design::kParallelLayered:
      s.new_private = mix_private_schedule(g, in.alpha_new, own_private, in.rounds, in.kappa);
      s.new_public =
          mix_public_schedule(g, *in.beta_new, *in.share_new, in.rounds, in.kappa, std::nullopt);
      break;
    case Design::kParallelRebuild:
      s.old_private = mix_private_schedule(g, *in.alpha_old, own_private, in.rounds + 1, in.kappa);
      s.new_private = mix_private_schedule(g, in.alpha_new, own_private, in.rounds + 1, in.kappa);
      s.old_public =
          mix_public_schedule(g, *in.beta_old, *in.share_old, in.rounds, in.kappa, in.client_public);
      s.new_public =
          mix_public_schedule(g, *in.beta_new, *in.share_new, in.rounds, in.kappa, in.client_public);
      break;
  }
  return s;
}

MixNode::MixNode(NodeId id, RistrettoScalar private_key, MixOptions opts)
    : id_(id), priv_(private_key), opts_(std::move(opts)), cipher_(opts_.null_cipher) {
  if (id_ >= kStorageNode) fail(Errc::kInvalidArgument, "mix ids must be below 0xFE");
}

std::optional<Endpoint> MixNode::endpoint_of(NodeId peer) const {
  if (!instr_) return std::nullopt;
  if (peer == kStorageNode) return instr_->db;
  if (peer < instr_->mixes.size()) return instr_->mixes[peer];
  return std::nullopt;
}

void MixNode::bootstrap(const MixInstruction& in) {
  validate(in);
  if (in.mix_index != id_) fail(Errc::kBadInstruction, "instruction addressed to another mix");
  if (in.epoch == 0) fail(Errc::kBadInstruction, "eviction epochs start at 1");
  LayeredFormat fmt;
  if (!is_rebuild(in.design)) {
    fmt.label_bytes = label_bytes(in.n);
    if (in.cell_bytes < 2 * fmt.label_bytes + 16 ||
        (in.cell_bytes - 2 * fmt.label_bytes) % 16 != 0) {
      fail(Errc::kBadInstruction, "cell size does not fit the layered record format");
    }
    fmt.payload_bytes = in.cell_bytes - 2 * fmt.label_bytes;
  }
  sched_ = derive_mix_schedule(group_, in, priv_);
  instr_ = in;
  format_ = fmt;
  stage_ = Stage::kIdle;
  cur_round_ = 0;
  unwrapped_ = ed_done_ = wrapped_ = false;
  inbox_.clear();
  held_.clear();
  perm_cache_.clear();
  pub_cache_.clear();
}

Frame MixNode::frame(FrameType type, Phase phase, std::uint16_t round, Bytes payload) const {
  Frame f;
  f.type = type;
  f.epoch = instr_ ? instr_->epoch : 0;
  f.phase = phase;
  f.round = round;
  f.from = id_;
  f.payload = std::move(payload);
  return f;
}

void MixNode::observe(Phase phase, std::uint16_t round) {
  if (opts_.on_state) opts_.on_state(id_, phase, round, held_);
}

bool MixNode::reports_to_client() const {
  switch (instr_->design) {
    case Design::kCascadeLayered: return id_ == m() - 1;
    case Design::kCascadeRebuild: return id_ == 0;
    default: return true;
  }
}

const Permutation& MixNode::cascade_perm(bool old_epoch) {
  auto key = std::make_pair(old_epoch, 0u);
  auto it = perm_cache_.find(key);
  if (it == perm_cache_.end()) {
    const auto& secrets = old_epoch ? sched_.old_private : sched_.new_private;
    it = perm_cache_.emplace(key, permutation_from_seed(secrets.at(0).perm_seed, instr_->n)).first;
  }
  return it->second;
}

const Permutation& MixNode::local_perm(bool old_epoch, std::uint32_t round) {
  auto key = std::make_pair(old_epoch, round);
  auto it = perm_cache_.find(key);
  if (it == perm_cache_.end()) {
    const auto& secrets = old_epoch ? sched_.old_private : sched_.new_private;
    it = perm_cache_.emplace(key, permutation_from_seed(secrets.at(round - 1).perm_seed, chunk()))
             .first;
  }
  return it->second;
}

const Permutation& MixNode::public_perm(bool old_epoch, std::uint32_t round) {
  auto key = std::make_pair(old_epoch, round);
  auto it = pub_cache_.find(key);
  if (it == pub_cache_.end()) {
    const auto& seeds = old_epoch ? sched_.old_public : sched_.new_public;
    it = pub_cache_.emplace(key, permutation_from_seed(seeds.at(round - 1), instr_->n)).first;
  }
  return it->second;
}

void MixNode::check_batch(const std::vector<SlotCell>& batch, std::size_t expected) const {
  if (batch.size() != expected) {
    fail(Errc::kSizeMismatch, "expected " + std::to_string(expected) + " records, got " +
                                  std::to_string(batch.size()));
  }
  for (const auto& sc : batch) {
    if (sc.cell.size() != instr_->cell_bytes) fail(Errc::kSizeMismatch, "cell length mismatch");
    if (sc.slot >= instr_->n) fail(Errc::kSizeMismatch, "slot outside the database");
  }
}

// ---- transport-facing side ---------------------------------------------------

std::vector<Outbound> MixNode::handle(const Frame& f) {
  if (f.type == FrameType::kInstruction) return on_instruction(f);
  if (f.type != FrameType::kRecordBatch && f.type != FrameType::kAck) {
    fail(Errc::kBadInstruction, "mixes do not serve storage requests");
  }
  if (!instr_ || f.epoch > instr_->epoch) {
    pending_.push_back(f);
    return {};
  }
  if (f.epoch < instr_->epoch) order_violation("frame from a finished epoch");
  return on_frame(f);
}

std::vector<Outbound> MixNode::on_instruction(const Frame& f) {
  if (f.from != kClientNode) fail(Errc::kBadInstruction, "instructions must come from the client");
  bootstrap(decode_instruction(f.payload));
  std::vector<Outbound> out;
  start(out);
  // Frames that raced ahead of the instruction.
  std::vector<Frame> later;
  auto queued = std::move(pending_);
  pending_.clear();
  for (auto& p : queued) {
    if (p.epoch == instr_->epoch) {
      auto more = on_frame(p);
      out.insert(out.end(), more.begin(), more.end());
    } else if (p.epoch > instr_->epoch) {
      later.push_back(std::move(p));
    }
  }
  pending_ = std::move(later);
  return out;
}

void MixNode::start(std::vector<Outbound>& out) {
  const auto n = instr_->n;
  std::vector<std::uint64_t> all(n);
  for (std::uint64_t i = 0; i < n; ++i) all[i] = i;
  switch (instr_->design) {
    case Design::kCascadeLayered:
      stage_ = Stage::kCascade;
      if (id_ == 0) fetch(out, std::move(all), Phase::kShuffle, 0);
      break;
    case Design::kCascadeRebuild:
      stage_ = Stage::kCascade;
      if (id_ == 0) fetch(out, std::move(all), Phase::kUnwrap, 0);
      break;
    case Design::kParallelLayered:
    case Design::kParallelRebuild: {
      std::vector<std::uint64_t> own(all.begin() + static_cast<std::ptrdiff_t>(id_ * chunk()),
                                     all.begin() + static_cast<std::ptrdiff_t>((id_ + 1) * chunk()));
      if (instr_->design == Design::kParallelLayered) {
        stage_ = Stage::kShuffle;
        cur_round_ = 1;
        fetch(out, std::move(own), Phase::kShuffle, 1);
      } else {
        stage_ = Stage::kUnwrap;
        cur_round_ = 0;
        fetch(out, std::move(own), Phase::kUnwrap, 0);
      }
      break;
    }
  }
}

void MixNode::fetch(std::vector<Outbound>& out, std::vector<std::uint64_t> slots, Phase phase,
                    std::uint16_t round) {
  out.push_back({kStorageNode, frame(FrameType::kDbFetch, phase, round, encode_slots(slots))});
}

void MixNode::send_batch(std::vector<Outbound>& out, NodeId to, Phase phase, std::uint16_t round,
                         const std::vector<SlotCell>& cells) {
  counters_.records_sent += cells.size();
  counters_.bytes_sent += cells.size() * instr_->cell_bytes;
  counters_.messages_sent += 1;
  out.push_back({to, frame(FrameType::kRecordBatch, phase, round, encode_batch(cells))});
}

void MixNode::store(std::vector<Outbound>& out, std::vector<SlotCell> cells) {
  counters_.records_sent += cells.size();
  counters_.bytes_sent += cells.size() * instr_->cell_bytes;
  counters_.messages_sent += 1;
  out.push_back({kStorageNode, frame(FrameType::kDbStore, Phase::kStore, 0, encode_batch(cells))});
  stage_ = Stage::kStoring;
}

std::vector<Outbound> MixNode::on_frame(const Frame& f) {
  std::vector<Outbound> out;
  if (f.type == FrameType::kAck) {
    if (f.from != kStorageNode || stage_ != Stage::kStoring) {
      order_violation("unexpected acknowledgement");
    }
    stage_ = Stage::kDone;
    if (reports_to_client()) out.push_back({kClientNode, frame(FrameType::kAck, Phase::kControl, 0, {})});
    return out;
  }
  auto batch = decode_batch(f.payload);
  if (f.from == kStorageNode) {
    counters_.records_fetched += batch.size();
    counters_.bytes_fetched += batch.size() * instr_->cell_bytes;
  }
  if (!is_parallel(instr_->design)) {
    on_cascade_batch(f, out);
    return out;
  }
  auto& slot = inbox_[{static_cast<std::uint8_t>(f.phase), f.round}];
  if (slot.count(f.from)) fail(Errc::kMalformedFrame, "duplicate batch from one sender");
  slot.emplace(f.from, std::move(batch));
  progress_parallel(out);
  return out;
}

// ---- cascade designs -------------------------------------------------------------

void MixNode::on_cascade_batch(const Frame& f, std::vector<Outbound>& out) {
  if (stage_ != Stage::kCascade) order_violation("batch after this mix finished its part");
  if (f.round != id_) fail(Errc::kMalformedFrame, "cascade batch addressed to another hop");
  auto batch = decode_batch(f.payload);
  const auto last = static_cast<NodeId>(m() - 1);
  if (instr_->design == Design::kCascadeLayered) {
    if (f.phase != Phase::kShuffle) order_violation("layered cascade only runs one phase");
    auto result = cascade_layered_round(std::move(batch));
    if (id_ < last) {
      send_batch(out, static_cast<NodeId>(id_ + 1), Phase::kShuffle,
                 static_cast<std::uint16_t>(id_ + 1), result);
      stage_ = Stage::kDone;
    } else {
      store(out, std::move(result));
    }
    return;
  }

  auto result = cascade_rebuild_phase(f.phase, std::move(batch));
  switch (f.phase) {
    case Phase::kUnwrap:
      if (id_ < last) {
        send_batch(out, static_cast<NodeId>(id_ + 1), Phase::kUnwrap,
                   static_cast<std::uint16_t>(id_ + 1), result);
        return;
      }
      // Turning point: the last mix carries on locally.
      if (opts_.skip_encdec) {
        result = cascade_rebuild_phase(Phase::kWrap, std::move(result));
        if (id_ == 0) {
          store(out, std::move(result));
        } else {
          send_batch(out, static_cast<NodeId>(id_ - 1), Phase::kWrap,
                     static_cast<std::uint16_t>(id_ - 1), result);
          stage_ = Stage::kDone;
        }
        return;
      }
      result = cascade_rebuild_phase(Phase::kEncDec, std::move(result));
      [[fallthrough]];
    case Phase::kEncDec:
      if (id_ > 0) {
        send_batch(out, static_cast<NodeId>(id_ - 1), Phase::kEncDec,
                   static_cast<std::uint16_t>(id_ - 1), result);
      } else {
        send_batch(out, last, Phase::kWrap, last, result);
      }
      return;
    case Phase::kWrap:
      if (id_ > 0) {
        send_batch(out, static_cast<NodeId>(id_ - 1), Phase::kWrap,
                   static_cast<std::uint16_t>(id_ - 1), result);
        stage_ = Stage::kDone;
      } else {
        store(out, std::move(result));
      }
      return;
    default:
      order_violation("unknown rebuild phase");
  }
}

std::vector<SlotCell> MixNode::cascade_layered_round(std::vector<SlotCell> batch) {
  if (!instr_ || instr_->design != Design::kCascadeLayered) {
    fail(Errc::kBadInstruction, "mix not bootstrapped for the layered cascade");
  }
  check_batch(batch, instr_->n);
  std::sort(batch.begin(), batch.end(), by_slot);
  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    if (batch[i].slot != i) fail(Errc::kSizeMismatch, "batch does not cover every slot once");
  }
  const auto& key = sched_.new_private[0].enc_key;
  const auto& sigma = cascade_perm(false);
  std::vector<SlotCell> out(batch.size());
  for (auto& sc : batch) {
    auto rec = cipher_.wrap(layered_from_cell(sc.cell, format_), key);
    counters_.encryptions += 1;
    auto dest = sigma[sc.slot];
    out[dest] = {dest, to_cell(rec)};
  }
  counters_.permuted_elements += batch.size();
  held_ = out;
  observe(Phase::kShuffle, static_cast<std::uint16_t>(id_));
  return out;
}

void MixNode::encdec(std::vector<SlotCell>& group, ByteView old_key, ByteView new_key) {
  for (auto& sc : group) {
    cipher_.ctr(sc.cell, old_key, {old_epoch(), LayerPhase::kEncDec, sc.slot});
    cipher_.ctr(sc.cell, new_key, {new_epoch(), LayerPhase::kEncDec, sc.slot});
    counters_.encryptions += 2;
  }
}

std::vector<SlotCell> MixNode::cascade_rebuild_phase(Phase phase, std::vector<SlotCell> batch) {
  if (!instr_ || instr_->design != Design::kCascadeRebuild) {
    fail(Errc::kBadInstruction, "mix not bootstrapped for the rebuild cascade");
  }
  check_batch(batch, instr_->n);
  std::sort(batch.begin(), batch.end(), by_slot);
  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    if (batch[i].slot != i) fail(Errc::kSizeMismatch, "batch does not cover every slot once");
  }
  std::vector<SlotCell> out(batch.size());
  switch (phase) {
    case Phase::kUnwrap: {
      if (unwrapped_) order_violation("unwrap phase repeated");
      const auto& key = sched_.old_private[0].enc_key;
      auto inv = cascade_perm(true).inverse();
      for (auto& sc : batch) {
        cipher_.ctr(sc.cell, key, {old_epoch(), LayerPhase::kWrap, sc.slot});
        counters_.encryptions += 1;
        auto dest = inv[sc.slot];
        out[dest] = {dest, std::move(sc.cell)};
      }
      counters_.permuted_elements += batch.size();
      unwrapped_ = true;
      break;
    }
    case Phase::kEncDec:
      if (!unwrapped_) order_violation("E/D phase before unwrap");
      if (ed_done_) order_violation("E/D phase repeated");
      if (opts_.skip_encdec) order_violation("E/D phase disabled");
      out = std::move(batch);
      encdec(out, sched_.old_private[0].enc_key, sched_.new_private[0].enc_key);
      ed_done_ = true;
      break;
    case Phase::kWrap: {
      if (!(ed_done_ || (opts_.skip_encdec && unwrapped_))) order_violation("wrap phase before E/D");
      if (wrapped_) order_violation("wrap phase repeated");
      const auto& key = sched_.new_private[0].enc_key;
      const auto& sigma = cascade_perm(false);
      for (auto& sc : batch) {
        auto dest = sigma[sc.slot];
        cipher_.ctr(sc.cell, key, {new_epoch(), LayerPhase::kWrap, dest});
        counters_.encryptions += 1;
        out[dest] = {dest, std::move(sc.cell)};
      }
      counters_.permuted_elements += batch.size();
      wrapped_ = true;
      break;
    }
    default:
      order_violation("not a rebuild phase");
  }
  held_ = out;
  observe(phase, static_cast<std::uint16_t>(id_));
  return out;
}

// ---- parallel designs ------------------------------------------------------------

bool MixNode::barrier_ready(Phase phase, std::uint16_t round, std::size_t expected) const {
  auto it = inbox_.find({static_cast<std::uint8_t>(phase), round});
  return it != inbox_.end() && it->second.size() >= expected;
}

std::map<NodeId, std::vector<SlotCell>> MixNode::take_inbox(Phase phase, std::uint16_t round) {
  auto it = inbox_.find({static_cast<std::uint8_t>(phase), round});
  auto batches = std::move(it->second);
  inbox_.erase(it);
  return batches;
}

std::vector<SlotCell> MixNode::merge_sorted(
    const std::map<NodeId, std::vector<SlotCell>>& inbound) {
  std::vector<SlotCell> all;
  for (const auto& [from, batch] : inbound) all.insert(all.end(), batch.begin(), batch.end());
  check_batch(all, chunk());
  std::stable_sort(all.begin(), all.end(), by_slot);
  const auto base = id_ * chunk();
  for (std::uint64_t i = 0; i < all.size(); ++i) {
    if (all[i].slot != base + i) fail(Errc::kSizeMismatch, "inbound records do not tile the chunk");
  }
  counters_.permuted_elements += all.size();
  return all;
}

void MixNode::dispatch(std::vector<Outbound>& out, const Permutation& pub, Phase phase,
                       std::uint16_t round) {
  auto alloc = public_allocation(pub, m(), id_, round, instr_->epoch);
  const auto base = id_ * chunk();
  for (std::uint32_t d = 0; d < m(); ++d) {
    std::vector<SlotCell> batch;
    batch.reserve(alloc.per_destination[d].size());
    for (auto x : alloc.per_destination[d]) batch.push_back({pub[x], held_[x - base].cell});
    send_batch(out, static_cast<NodeId>(d), phase, round, batch);
  }
}

std::vector<std::vector<SlotCell>> MixNode::parallel_round(
    Phase phase, std::uint32_t round, const std::map<NodeId, std::vector<SlotCell>>& inbound) {
  if (!instr_ || !is_parallel(instr_->design)) {
    fail(Errc::kBadInstruction, "mix not bootstrapped for a parallel design");
  }
  const auto r = instr_->rounds;
  const bool from_storage = (phase == Phase::kShuffle && round == 1);
  const bool single = from_storage || (phase == Phase::kWrap && round == 1);
  if (single) {
    if (inbound.size() != 1) fail(Errc::kMissingBatch, "expected exactly one inbound batch");
  } else {
    for (std::uint32_t j = 0; j < m(); ++j) {
      if (!inbound.count(static_cast<NodeId>(j))) {
        fail(Errc::kMissingBatch, "no batch from mix " + std::to_string(j));
      }
    }
  }
  if (round == 0 || round > r) fail(Errc::kOutOfRange, "round outside the schedule");

  held_ = merge_sorted(inbound);
  const auto base = id_ * chunk();
  std::vector<std::vector<SlotCell>> result(m());

  auto place_local = [&](const Permutation& local) {
    std::vector<SlotCell> next(held_.size());
    for (std::uint64_t q = 0; q < held_.size(); ++q) {
      auto dest = local[q];
      next[dest] = {base + dest, std::move(held_[q].cell)};
    }
    counters_.permuted_elements += held_.size();
    held_ = std::move(next);
  };
  auto split = [&](const Permutation& pub) {
    auto alloc = public_allocation(pub, m(), id_, round, instr_->epoch);
    for (std::uint32_t d = 0; d < m(); ++d) {
      for (auto x : alloc.per_destination[d]) result[d].push_back({pub[x], held_[x - base].cell});
    }
  };

  if (phase == Phase::kShuffle) {
    if (instr_->design != Design::kParallelLayered) order_violation("shuffle phase in rebuild");
    const auto& key = sched_.new_private[round - 1].enc_key;
    for (auto& sc : held_) {
      auto rec = cipher_.wrap(layered_from_cell(sc.cell, format_), key);
      sc.cell = to_cell(rec);
      counters_.encryptions += 1;
    }
    place_local(local_perm(false, round));
    observe(phase, static_cast<std::uint16_t>(round));
    split(public_perm(false, round));
  } else if (phase == Phase::kUnwrap) {
    if (instr_->design != Design::kParallelRebuild) order_violation("unwrap phase in layered");
    const auto& key = sched_.old_private[round - 1].enc_key;
    for (auto& sc : held_) {
      cipher_.ctr(sc.cell, key, {old_epoch(), LayerPhase::kWrap, sc.slot});
      counters_.encryptions += 1;
    }
    place_local(local_perm(true, round).inverse());
    observe(phase, static_cast<std::uint16_t>(round));
    if (round > 1) {
      split(public_perm(true, round - 1).inverse());
    } else {
      result[id_] = held_;
    }
  } else if (phase == Phase::kWrap) {
    if (instr_->design != Design::kParallelRebuild) order_violation("wrap phase in layered");
    const auto& key = sched_.new_private[round - 1].enc_key;
    place_local(local_perm(false, round));
    for (auto& sc : held_) {
      cipher_.ctr(sc.cell, key, {new_epoch(), LayerPhase::kWrap, sc.slot});
      counters_.encryptions += 1;
    }
    observe(phase, static_cast<std::uint16_t>(round));
    split(public_perm(false, round));
  } else {
    order_violation("phase has no parallel round");
  }
  (void)r;
  return result;
}

void MixNode::progress_parallel(std::vector<Outbound>& out) {
  const auto r = instr_->rounds;
  const auto mm = m();
  auto send_all = [&](std::vector<std::vector<SlotCell>> batches, Phase phase,
                      std::uint16_t round) {
    for (std::uint32_t d = 0; d < mm; ++d) {
      send_batch(out, static_cast<NodeId>(d), phase, round, batches[d]);
    }
  };
  auto next_hop = static_cast<NodeId>((id_ + 1) % mm);

  for (bool progressed = true; progressed;) {
    progressed = false;

    // E/D visits of other mixes' groups may arrive any time after this mix's own unwrap.
    if (stage_ == Stage::kEncDec || stage_ == Stage::kWrap) {
      for (std::uint16_t t = 2; t <= mm; ++t) {
        if (!barrier_ready(Phase::kEncDec, t, 1)) continue;
        auto batches = take_inbox(Phase::kEncDec, t);
        auto group = std::move(batches.begin()->second);
        check_batch(group, chunk());
        auto owner = (id_ + mm - (t - 1)) % mm;
        for (const auto& sc : group) {
          if (sc.slot / chunk() != owner) fail(Errc::kSizeMismatch, "E/D group left its chunk");
        }
        encdec(group, sched_.old_private[r].enc_key, sched_.new_private[r].enc_key);
        held_ = group;
        observe(Phase::kEncDec, t);
        send_batch(out, next_hop, Phase::kEncDec, static_cast<std::uint16_t>(t + 1), group);
        progressed = true;
      }
    }

    switch (stage_) {
      case Stage::kShuffle: {
        const auto round = static_cast<std::uint16_t>(cur_round_);
        const std::size_t need = round == 1 ? 1 : mm;
        if (!barrier_ready(Phase::kShuffle, round, need)) break;
        auto inbound = take_inbox(Phase::kShuffle, round);
        if (cur_round_ <= r) {
          auto batches = parallel_round(Phase::kShuffle, cur_round_, inbound);
          send_all(std::move(batches), Phase::kShuffle, static_cast<std::uint16_t>(round + 1));
          ++cur_round_;
        } else {
          std::vector<SlotCell> all;
          for (auto& [from, b] : inbound) all.insert(all.end(), b.begin(), b.end());
          check_batch(all, chunk());
          std::sort(all.begin(), all.end(), by_slot);
          held_ = all;
          observe(Phase::kStore, round);
          store(out, std::move(all));
        }
        progressed = true;
        break;
      }
      case Stage::kUnwrap: {
        const auto round = static_cast<std::uint16_t>(cur_round_);
        if (cur_round_ == 0) {
          if (!barrier_ready(Phase::kUnwrap, 0, 1)) break;
          auto inbound = take_inbox(Phase::kUnwrap, 0);
          auto fetched = std::move(inbound.begin()->second);
          check_batch(fetched, chunk());
          std::sort(fetched.begin(), fetched.end(), by_slot);
          held_ = std::move(fetched);
          dispatch(out, public_perm(true, r).inverse(), Phase::kUnwrap,
                   static_cast<std::uint16_t>(r));
          cur_round_ = r;
          progressed = true;
          break;
        }
        if (!barrier_ready(Phase::kUnwrap, round, mm)) break;
        auto batches = parallel_round(Phase::kUnwrap, cur_round_, take_inbox(Phase::kUnwrap, round));
        if (cur_round_ > 1) {
          send_all(std::move(batches), Phase::kUnwrap, static_cast<std::uint16_t>(round - 1));
          --cur_round_;
        } else if (opts_.skip_encdec) {
          std::map<NodeId, std::vector<SlotCell>> home{{id_, std::move(batches[id_])}};
          send_all(parallel_round(Phase::kWrap, 1, home), Phase::kWrap, 2);
          stage_ = Stage::kWrap;
          cur_round_ = 2;
        } else {
          auto group = std::move(batches[id_]);
          encdec(group, sched_.old_private[r].enc_key, sched_.new_private[r].enc_key);
          held_ = group;
          observe(Phase::kEncDec, 1);
          send_batch(out, next_hop, Phase::kEncDec, 2, group);
          stage_ = Stage::kEncDec;
        }
        progressed = true;
        break;
      }
      case Stage::kEncDec: {
        const auto home_tag = static_cast<std::uint16_t>(mm + 1);
        if (!barrier_ready(Phase::kEncDec, home_tag, 1)) break;
        auto home = take_inbox(Phase::kEncDec, home_tag);
        std::map<NodeId, std::vector<SlotCell>> own{{id_, std::move(home.begin()->second)}};
        send_all(parallel_round(Phase::kWrap, 1, own), Phase::kWrap, 2);
        stage_ = Stage::kWrap;
        cur_round_ = 2;
        progressed = true;
        break;
      }
      case Stage::kWrap: {
        const auto round = static_cast<std::uint16_t>(cur_round_);
        if (!barrier_ready(Phase::kWrap, round, mm)) break;
        auto inbound = take_inbox(Phase::kWrap, round);
        if (cur_round_ <= r) {
          send_all(parallel_round(Phase::kWrap, cur_round_, inbound), Phase::kWrap,
                   static_cast<std::uint16_t>(round + 1));
          ++cur_round_;
        } else {
          std::vector<SlotCell> all;
          for (auto& [from, b] : inbound) all.insert(all.end(), b.begin(), b.end());
          check_batch(all, chunk());
          std::sort(all.begin(), all.end(), by_slot);
          held_ = all;
          observe(Phase::kStore, round);
          store(out, std::move(all));
        }
        progressed = true;
        break;
      }
      default:
        break;
    }
  }
}

}  // namespace mixoram
