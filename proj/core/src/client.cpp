#include "mixoram/client.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace mixoram {
namespace {

constexpr std::uint64_t kNotPresent = std::numeric_limits<std::uint64_t>::max();

Bytes stream_seed(ByteView seed, std::string_view label) {
  ByteWriter w;
  w.str("mixoram/client/").str(label).blob(seed);
  auto h = sha256(w.bytes());
  return Bytes(h.begin(), h.end());
}

}  // namespace

// ---- configuration ------------------------------------------------------------------

std::size_t ClientConfig::cell_bytes() const {
  if (is_rebuild(design)) return payload_bytes;
  return LayeredFormat::for_database(n, payload_bytes).cell_bytes();
}

std::uint32_t ClientConfig::rounds(std::uint32_t m) const {
  if (!is_parallel(design)) return 0;
  if (rounds_override) return *rounds_override;
  return round_count(design, n, cache_slots, m);
}

void ClientConfig::validate(std::uint32_t m) const {
  if (n == 0) fail(Errc::kConfigMismatch, "database must hold at least one record");
  if (m == 0 || m >= kStorageNode) fail(Errc::kConfigMismatch, "need 1..253 mixes");
  if (is_parallel(design) && n % m != 0) fail(Errc::kIndivisible, "m must divide n");
  if (cache_slots == 0 || cache_slots > n) fail(Errc::kConfigMismatch, "cache size must be in 1..n");
  if (design == Design::kParallelLayered && !rounds_override && cache_slots >= n) {
    fail(Errc::kConfigMismatch, "parallel layered needs s < n for its round count");
  }
  if (refresh_per_access == 0) fail(Errc::kConfigMismatch, "refresh count d must be at least 1");
  if (payload_bytes == 0) fail(Errc::kConfigMismatch, "payload must not be empty");
  if (rounds_override && *rounds_override == 0) fail(Errc::kConfigMismatch, "rounds must be positive");
  if (!is_rebuild(design)) LayeredFormat::for_database(n, payload_bytes);
}

ExpectedLayers expected_layers(std::uint64_t n, std::uint64_t s, std::uint64_t d, double r) {
  if (n == 0 || s == 0 || d == 0) fail(Errc::kInvalidArgument, "n, s and d must be positive");
  const double h = harmonic(n);
  const double sd = static_cast<double>(s) * static_cast<double>(d);
  ExpectedLayers e;
  e.all = static_cast<double>(n) / sd * h;
  e.per_record = r / sd * ((static_cast<double>(n) + 1) / 2 * (h - 0.5) + 0.5);
  return e;
}

// ---- construction and epoch material --------------------------------------------

Client::Client(ClientConfig cfg, std::vector<MixInfo> mixes, ByteView seed)
    : cfg_(cfg),
      mixes_(std::move(mixes)),
      rng_(seed),
      secret_rng_(stream_seed(seed, "epoch-secrets")),
      cipher_(cfg.null_cipher) {
  cfg_.validate(mix_count());
  keys_ = keygen(group_, rng_);
  auto secrets = derive_secrets(group_.encode(keys_.priv), cfg_.kappa);
  client_key_ = std::move(secrets.enc_key);
  cache_key_ = std::move(secrets.perm_seed);
  if (!is_rebuild(cfg_.design)) format_ = LayeredFormat::for_database(cfg_.n, cfg_.payload_bytes);
}

std::size_t Client::schedule_entries(std::uint32_t rounds) const {
  switch (cfg_.design) {
    case Design::kParallelLayered: return rounds;
    case Design::kParallelRebuild: return rounds + 1;
    default: return 1;
  }
}

Client::EpochSecrets Client::sample_secrets(std::uint64_t epoch) {
  EpochSecrets s;
  s.epoch = epoch;
  s.rounds = cfg_.rounds(mix_count());
  for (std::uint32_t i = 0; i < mix_count(); ++i) s.z.push_back(group_.random_scalar(secret_rng_));
  if (is_parallel(cfg_.design)) {
    for (std::uint32_t i = 0; i < mix_count(); ++i) s.shares.push_back(group_.random_scalar(secret_rng_));
  }
  return s;
}

EpochMaterial Client::build_material(const EpochSecrets& s) const {
  EpochMaterial mat;
  mat.epoch = s.epoch;
  mat.rounds = s.rounds;
  const auto m = mix_count();
  const auto entries = schedule_entries(s.rounds);
  for (std::uint32_t i = 0; i < m; ++i) {
    mat.priv.push_back(
        client_private_schedule(group_, s.z[i], mixes_[i].public_key, entries, cfg_.kappa));
  }
  if (!is_parallel(cfg_.design)) {
    std::vector<Permutation> perms;
    std::vector<std::uint32_t> order(m);
    for (std::uint32_t i = 0; i < m; ++i) {
      perms.push_back(permutation_from_seed(mat.priv[i][0].perm_seed, cfg_.n));
      order[i] = is_rebuild(cfg_.design) ? m - 1 - i : i;
    }
    mat.routing = EpochRouting::cascade(std::move(perms), std::move(order));
    return mat;
  }
  auto product = group_.one();
  for (const auto& share : s.shares) product = group_.mul(product, share);
  std::optional<RistrettoPoint> context;
  if (is_rebuild(cfg_.design)) context = keys_.pub;
  mat.pub_seeds = client_public_schedule(group_, product, s.rounds, cfg_.kappa, context);
  const auto c = cfg_.n / m;
  std::vector<std::vector<Permutation>> local(s.rounds);
  std::vector<Permutation> pub;
  for (std::uint32_t l = 0; l < s.rounds; ++l) {
    for (std::uint32_t j = 0; j < m; ++j) {
      local[l].push_back(permutation_from_seed(mat.priv[j][l].perm_seed, c));
    }
    pub.push_back(permutation_from_seed(mat.pub_seeds[l], cfg_.n));
  }
  mat.routing = EpochRouting::parallel(cfg_.n, m, std::move(local), std::move(pub));
  return mat;
}

const Client::EpochSecrets* Client::secrets_for(std::uint64_t epoch) const {
  for (const auto& s : history_) {
    if (s.epoch == epoch) return &s;
  }
  if (current_ && current_->epoch == epoch) return &*current_;
  if (pending_ && pending_->epoch == epoch) return &*pending_;
  return nullptr;
}

const EpochMaterial& Client::material(std::uint64_t epoch) const {
  auto it = materials_.find(epoch);
  if (it != materials_.end()) return *it->second;
  const auto* s = secrets_for(epoch);
  if (!s) fail(Errc::kStaleState, "no secrets kept for epoch " + std::to_string(epoch));
  auto mat = std::make_shared<const EpochMaterial>(build_material(*s));
  return *materials_.emplace(epoch, std::move(mat)).first->second;
}

// ---- record encryption ----------------------------------------------------------------

Bytes Client::client_layer_only(std::uint64_t v, ByteView payload) const {
  if (!is_rebuild(cfg_.design)) fail(Errc::kInvalidArgument, "client layer cells are rebuild-only");
  Bytes body(payload.begin(), payload.end());
  cipher_.ctr(body, client_key_, {0, LayerPhase::kClient, v});
  return body;
}

Bytes Client::encrypt_rebuild(std::uint64_t v, ByteView payload) const {
  if (payload.size() != cfg_.payload_bytes) fail(Errc::kSizeMismatch, "payload length mismatch");
  const auto& mat = material(epoch_);
  const auto e = static_cast<std::uint32_t>(epoch_);
  const auto ed = schedule_entries(mat.rounds) - 1;
  auto body = client_layer_only(v, payload);
  if (!cfg_.skip_encdec) {
    for (const auto& sched : mat.priv) cipher_.ctr(body, sched[ed].enc_key, {e, LayerPhase::kEncDec, v});
  }
  for (const auto& hop : mat.routing.trace_forward(v).hops) {
    const auto entry = hop.round == 0 ? 0 : hop.round - 1;
    cipher_.ctr(body, mat.priv[hop.mix][entry].enc_key, {e, LayerPhase::kWrap, hop.counter});
  }
  return body;
}

RebuildDecryption Client::decrypt_rebuild(ByteView cell, std::uint64_t v) const {
  if (cell.size() != cfg_.payload_bytes) fail(Errc::kSizeMismatch, "cell length mismatch");
  const auto& mat = material(epoch_);
  const auto e = static_cast<std::uint32_t>(epoch_);
  const auto ed = schedule_entries(mat.rounds) - 1;
  RebuildDecryption out;
  out.payload.assign(cell.begin(), cell.end());
  auto hops = mat.routing.trace_forward(v).hops;
  for (auto it = hops.rbegin(); it != hops.rend(); ++it) {
    const auto entry = it->round == 0 ? 0 : it->round - 1;
    cipher_.ctr(out.payload, mat.priv[it->mix][entry].enc_key, {e, LayerPhase::kWrap, it->counter});
    ++out.layers_removed;
  }
  if (!cfg_.skip_encdec) {
    for (const auto& sched : mat.priv) {
      cipher_.ctr(out.payload, sched[ed].enc_key, {e, LayerPhase::kEncDec, v});
      ++out.layers_removed;
    }
  }
  cipher_.ctr(out.payload, client_key_, {0, LayerPhase::kClient, v});
  ++out.layers_removed;
  return out;
}

LayeredDecryption Client::decrypt_layered(ByteView cell, std::uint64_t v,
                                          std::uint64_t slot) const {
  if (cell.size() != format_.cell_bytes()) fail(Errc::kSizeMismatch, "cell length mismatch");
  LayeredDecryption out;
  auto rec = layered_from_cell(cell, format_);
  // Records refreshed since the last eviction carry the client layer alone. Everything else
  // has at least one epoch of mix layers, so the bare client check is skipped there.
  if (epoch_ == reset_epoch_ || refreshed_.count(v)) {
    auto trial = cipher_.unwrap(rec, client_key_);
    if (record_label(trial, format_) == v) {
      out.payload = record_payload(trial, format_);
      return out;
    }
  }
  auto p = slot;
  for (auto h = history_.rbegin(); h != history_.rend(); ++h) {
    const auto& mat = material(h->epoch);
    auto trace = mat.routing.trace_backward(p);
    for (auto hop = trace.hops.rbegin(); hop != trace.hops.rend(); ++hop) {
      const auto entry = hop->round == 0 ? 0 : hop->round - 1;
      rec = cipher_.unwrap(rec, mat.priv[hop->mix][entry].enc_key);
      ++out.layers_removed;
    }
    p = trace.start;
    ++out.peeled_epochs;
    rec = cipher_.unwrap(rec, client_key_);
    if (record_label(rec, format_) == v) {
      out.payload = record_payload(rec, format_);
      return out;
    }
    rec = cipher_.wrap(rec, client_key_);
  }
  fail(Errc::kExhaustedHistory, "no epoch yields label " + std::to_string(v));
}

Bytes Client::encrypt_for_slot(std::uint64_t v, ByteView payload) {
  if (is_rebuild(cfg_.design)) return encrypt_rebuild(v, payload);
  auto rec = make_layered_record(format_, v, payload, rng_.bytes(format_.label_bytes));
  return to_cell(cipher_.wrap(rec, client_key_));
}

Bytes Client::random_cell() { return rng_.bytes(cfg_.cell_bytes()); }

// ---- lookup -----------------------------------------------------------------------------

std::uint64_t Client::lookup(std::uint64_t v) const {
  if (v >= cfg_.n) fail(Errc::kOutOfRange, "virtual index out of range");
  if (!loaded_) fail(Errc::kStaleState, "database not preprocessed");
  if (!is_rebuild(cfg_.design)) return slot_of_[v];
  return material(epoch_).routing.forward(v);
}

Trace Client::lookup_trace(std::uint64_t v) const {
  if (!is_rebuild(cfg_.design)) fail(Errc::kInvalidArgument, "hop traces exist for rebuild designs");
  if (v >= cfg_.n) fail(Errc::kOutOfRange, "virtual index out of range");
  if (!loaded_) fail(Errc::kStaleState, "database not preprocessed");
  return material(epoch_).routing.trace_forward(v);
}

std::uint64_t Client::virtual_of(std::uint64_t slot) const {
  if (!is_rebuild(cfg_.design)) return virtual_at_[slot];
  return material(epoch_).routing.trace_backward(slot).start;
}

// ---- preprocessing and access ------------------------------------------------------------

void Client::preprocess(const std::vector<Bytes>& payloads, StoreApi& store) {
  if (loaded_) fail(Errc::kStaleState, "database already preprocessed");
  if (payloads.size() != cfg_.n) fail(Errc::kSizeMismatch, "need exactly n payloads");
  for (const auto& p : payloads) {
    if (p.size() != cfg_.payload_bytes) fail(Errc::kSizeMismatch, "payload length mismatch");
  }
  if (is_rebuild(cfg_.design)) {
    current_ = sample_secrets(0);
  } else {
    auto pi = permutation_from_seed(rng_.bytes(kappa_bytes(cfg_.kappa)), cfg_.n);
    slot_of_ = pi.mapping();
    virtual_at_ = pi.inverse().mapping();
  }
  loaded_ = true;
  store.set_epoch(0);
  // Written in slot order so the upload order says nothing about the placement.
  for (std::uint64_t p = 0; p < cfg_.n; ++p) {
    auto v = virtual_of(p);
    store.write(p, encrypt_for_slot(v, payloads[v]));
  }
  unfetched_.resize(cfg_.n);
  unfetched_pos_.resize(cfg_.n);
  for (std::uint64_t i = 0; i < cfg_.n; ++i) unfetched_[i] = unfetched_pos_[i] = i;
}

std::uint64_t Client::draw_unfetched() {
  if (unfetched_.empty()) fail(Errc::kCacheFull, "every slot was fetched this epoch");
  auto slot = unfetched_[rng_.uniform(unfetched_.size())];
  mark_fetched(slot);
  return slot;
}

void Client::mark_fetched(std::uint64_t slot) {
  auto pos = unfetched_pos_[slot];
  if (pos == kNotPresent) return;
  auto last = unfetched_.back();
  unfetched_[pos] = last;
  unfetched_pos_[last] = pos;
  unfetched_.pop_back();
  unfetched_pos_[slot] = kNotPresent;
}

Bytes Client::fetch_plain(std::uint64_t slot, std::uint64_t v, StoreApi& store,
                          std::uint32_t* peeled) {
  auto cell = store.read(slot);
  if (is_rebuild(cfg_.design)) return decrypt_rebuild(cell, v).payload;
  auto d = decrypt_layered(cell, v, slot);
  if (peeled) *peeled = d.peeled_epochs;
  return std::move(d.payload);
}

void Client::upload_cache(StoreApi& store) {
  std::vector<Bytes> cells;
  cells.reserve(cfg_.cache_slots);
  for (std::uint64_t i = 0; i < cfg_.cache_slots; ++i) {
    if (i >= cache_.size()) {
      cells.push_back(random_cell());
    } else if (is_rebuild(cfg_.design)) {
      Bytes body = cache_[i].payload;
      cipher_.ctr(body, cache_key_, {uploads_, LayerPhase::kCache, i});
      cells.push_back(std::move(body));
    } else {
      auto rec = make_layered_record(format_, cache_[i].v, cache_[i].payload,
                                     rng_.bytes(format_.label_bytes));
      cells.push_back(to_cell(cipher_.wrap(rec, cache_key_)));
    }
  }
  ++uploads_;
  store.upload_cache(cells);
}

Bytes Client::access(AccessOp op, std::uint64_t v, StoreApi& store, ByteView data,
                     AccessStats* stats) {
  if (!loaded_) fail(Errc::kStaleState, "database not preprocessed");
  if (pending_) fail(Errc::kStaleState, "eviction in progress");
  if (v >= cfg_.n) fail(Errc::kOutOfRange, "virtual index out of range");
  if (op == AccessOp::kWrite && data.size() != cfg_.payload_bytes) {
    fail(Errc::kSizeMismatch, "payload length mismatch");
  }
  if (cache_full()) fail(Errc::kCacheFull, "cache holds s records; evict first");

  AccessStats local;
  auto& st = stats ? *stats : local;
  st = {};
  Bytes result;
  auto hit = std::find_if(cache_.begin(), cache_.end(), [&](const auto& e) { return e.v == v; });
  if (hit != cache_.end()) {
    // Already cached: fetch something nobody asked for so the server sees a normal access.
    const auto at = static_cast<std::size_t>(hit - cache_.begin());
    result = cache_[at].payload;
    if (op == AccessOp::kWrite) cache_[at].payload.assign(data.begin(), data.end());
    st.dummy = true;
    st.fetched_slot = draw_unfetched();
    auto u = virtual_of(st.fetched_slot);
    cache_.push_back({u, fetch_plain(st.fetched_slot, u, store, &st.peeled_epochs)});
  } else {
    st.fetched_slot = lookup(v);
    mark_fetched(st.fetched_slot);
    result = fetch_plain(st.fetched_slot, v, store, &st.peeled_epochs);
    cache_.push_back({v, op == AccessOp::kWrite ? Bytes(data.begin(), data.end()) : result});
  }
  upload_cache(store);

  for (std::uint32_t k = 1; k < cfg_.refresh_per_access && !unfetched_.empty(); ++k) {
    auto slot = draw_unfetched();
    auto u = virtual_of(slot);
    auto plain = fetch_plain(slot, u, store, nullptr);
    store.write(slot, encrypt_for_slot(u, plain));
    if (!is_rebuild(cfg_.design)) refreshed_.insert(u);
    st.refreshed_slots.push_back(slot);
  }
  return result;
}

Bytes Client::peek(std::uint64_t v, StoreApi& store) {
  for (const auto& e : cache_) {
    if (e.v == v) return e.payload;
  }
  return fetch_plain(lookup(v), v, store, nullptr);
}

// ---- eviction -------------------------------------------------------------------------------

std::vector<MixInstruction> Client::make_instructions(const Endpoint& db) {
  if (!loaded_) fail(Errc::kStaleState, "database not preprocessed");
  const auto m = mix_count();
  auto next = sample_secrets(epoch_ + 1);
  if (cfg_.design == Design::kParallelRebuild && current_->rounds != next.rounds) {
    fail(Errc::kConfigMismatch, "round count changed between epochs");
  }
  std::vector<Endpoint> list;
  for (const auto& mix : mixes_) list.push_back(mix.endpoint);

  auto beta_for = [&](const std::vector<RistrettoScalar>& shares, std::uint32_t i) {
    auto e = group_.one();
    for (std::uint32_t l = 0; l < m; ++l) {
      if (l != i) e = group_.mul(e, shares[l]);
    }
    return group_.exp_base(e);
  };

  std::vector<MixInstruction> out;
  for (std::uint32_t i = 0; i < m; ++i) {
    MixInstruction in;
    in.design = cfg_.design;
    in.kappa = cfg_.kappa;
    in.n = cfg_.n;
    in.cell_bytes = static_cast<std::uint32_t>(cfg_.cell_bytes());
    in.rounds = next.rounds;
    in.epoch = epoch_ + 1;
    in.mix_index = i;
    in.db = db;
    in.mixes = list;
    in.alpha_new = group_.exp_base(next.z[i]);
    if (is_rebuild(cfg_.design)) in.alpha_old = group_.exp_base(current_->z[i]);
    if (is_parallel(cfg_.design)) {
      in.beta_new = beta_for(next.shares, i);
      in.share_new = next.shares[i];
    }
    if (cfg_.design == Design::kParallelRebuild) {
      in.beta_old = beta_for(current_->shares, i);
      in.share_old = current_->shares[i];
      in.client_public = keys_.pub;
    }
    out.push_back(std::move(in));
  }
  pending_ = std::move(next);
  return out;
}

std::vector<MixInstruction> Client::begin_eviction(StoreApi& store, const Endpoint& db) {
  if (pending_) fail(Errc::kStaleState, "eviction already in progress");
  // TODO: rebuild write-backs land on the same slot under the same epoch layers and client
  // nonce, so storage can XOR old and new cells and tell a read from a write.
  for (const auto& e : cache_) store.write(lookup(e.v), encrypt_for_slot(e.v, e.payload));
  store.flush_cache();
  cache_.clear();
  return make_instructions(db);
}

std::uint32_t Client::expected_acks() const {
  return is_parallel(cfg_.design) ? mix_count() : 1;
}

void Client::finish_eviction() {
  if (!pending_) fail(Errc::kStaleState, "no eviction in progress");
  const auto next_epoch = pending_->epoch;
  if (is_rebuild(cfg_.design)) {
    materials_.erase(epoch_);
    current_ = std::move(pending_);
  } else {
    history_.push_back(std::move(*pending_));
    auto moved = material(next_epoch).routing.composite();
    for (auto& slot : slot_of_) slot = moved[slot];
    for (std::uint64_t v = 0; v < cfg_.n; ++v) virtual_at_[slot_of_[v]] = v;
  }
  pending_.reset();
  epoch_ = next_epoch;
  cache_.clear();
  refreshed_.clear();
  unfetched_.resize(cfg_.n);
  for (std::uint64_t i = 0; i < cfg_.n; ++i) unfetched_[i] = unfetched_pos_[i] = i;
}

void Client::evict(StoreApi& store, FramePort& port, const Endpoint& db) {
  auto instructions = begin_eviction(store, db);
  for (const auto& in : instructions) {
    Frame f;
    f.type = FrameType::kInstruction;
    f.epoch = in.epoch;
    f.phase = Phase::kControl;
    f.from = kClientNode;
    f.payload = encode_instruction(in);
    port.send(static_cast<NodeId>(in.mix_index), f);
  }
  const auto target = pending_->epoch;
  for (std::uint32_t acks = 0; acks < expected_acks();) {
    auto f = port.receive();
    if (f.type != FrameType::kAck || f.epoch != target || f.from >= mix_count()) {
      fail(Errc::kTransport, "unexpected frame while waiting for the mixes");
    }
    ++acks;
  }
  finish_eviction();
  store.set_epoch(epoch_);
}

void Client::reinitialize(StoreApi& store) {
  if (is_rebuild(cfg_.design)) fail(Errc::kInvalidArgument, "rebuild designs keep no layer history");
  if (!loaded_ || pending_) fail(Errc::kStaleState, "nothing to reinitialise right now");
  if (!cache_.empty()) fail(Errc::kStaleState, "evict before reinitialising");
  std::vector<Bytes> plain(cfg_.n);
  for (std::uint64_t p = 0; p < cfg_.n; ++p) {
    auto v = virtual_at_[p];
    plain[v] = fetch_plain(p, v, store, nullptr);
  }
  auto pi = permutation_from_seed(rng_.bytes(kappa_bytes(cfg_.kappa)), cfg_.n);
  slot_of_ = pi.mapping();
  virtual_at_ = pi.inverse().mapping();
  history_.clear();
  materials_.clear();
  refreshed_.clear();
  reset_epoch_ = epoch_;
  for (std::uint64_t p = 0; p < cfg_.n; ++p) {
    auto v = virtual_at_[p];
    store.write(p, encrypt_for_slot(v, plain[v]));
  }
}

std::uint64_t Client::state_bits() const {
  const std::uint64_t kappa = static_cast<std::uint64_t>(cfg_.kappa);
  // Exponents needed for decryption: one z per mix, plus the share product for parallel.
  auto exponents = [&](const EpochSecrets& s) {
    return s.z.size() + (s.shares.empty() ? 0 : 1);
  };
  if (is_rebuild(cfg_.design)) return current_ ? 2 * kappa * exponents(*current_) : 0;
  const std::uint64_t width = std::max<std::uint64_t>(1, std::bit_width(cfg_.n - 1));
  std::uint64_t bits = cfg_.n * width;
  for (const auto& s : history_) bits += 2 * kappa * exponents(s);
  return bits;
}

}  // namespace mixoram
