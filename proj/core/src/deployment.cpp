#include "mixoram/deployment.hpp"

#include <string>

#include "mixoram/hash.hpp"
#include "mixoram/storage_node.hpp"
#include "mixoram/tcp.hpp"

namespace mixoram {

std::string_view to_string(TransportKind t) {
  return t == TransportKind::kTcp ? "tcp" : "in-process";
}

TransportKind parse_transport(std::string_view name) {
  if (name == "in-process" || name == "inprocess") return TransportKind::kInProcess;
  if (name == "tcp") return TransportKind::kTcp;
  fail(Errc::kInvalidArgument, "unknown transport: " + std::string(name));
}

Bytes derive_seed(std::uint64_t seed, std::uint64_t trial, std::string_view label,
                  std::uint64_t index) {
  ByteWriter w;
  w.str("mixoram/deployment/v1").str(label).u64(seed).u64(trial).u64(index);
  auto h = sha256(w.bytes());
  return Bytes(h.begin(), h.end());
}

struct Deployment::Impl {
  DeploymentConfig cfg;
  Storage storage;
  StorageNode storage_node;
  std::vector<RistrettoScalar> mix_keys;
  std::vector<std::unique_ptr<MixNode>> mixes;
  Endpoint db;

  // In-process.
  std::unique_ptr<LoopbackNetwork> net;
  // TCP.
  std::unique_ptr<TcpNodeServer> storage_server;
  std::vector<std::unique_ptr<TcpNodeServer>> mix_servers;

  std::unique_ptr<FramePort> port;
  std::unique_ptr<RemoteStore> remote;
  std::unique_ptr<Client> client;

  static std::size_t cell_bytes(const DeploymentConfig& c) {
    ClientConfig cc;
    cc.design = c.design;
    cc.n = c.n;
    cc.payload_bytes = c.payload_bytes;
    return cc.cell_bytes();
  }

  explicit Impl(DeploymentConfig c)
      : cfg(std::move(c)), storage(cfg.n, cell_bytes(cfg), cfg.cache_slots), storage_node(storage) {
    ClientConfig cc;
    cc.design = cfg.design;
    cc.n = cfg.n;
    cc.payload_bytes = cfg.payload_bytes;
    cc.cache_slots = cfg.cache_slots;
    cc.refresh_per_access = cfg.refresh_per_access;
    cc.kappa = cfg.kappa;
    cc.rounds_override = cfg.rounds_override;
    cc.null_cipher = cfg.null_cipher;
    cc.skip_encdec = cfg.skip_encdec;
    cc.validate(cfg.m);

    Ristretto255 g;
    MixOptions opts;
    opts.null_cipher = cfg.null_cipher;
    opts.skip_encdec = cfg.skip_encdec;
    if (cfg.transport == TransportKind::kInProcess) opts.on_state = cfg.on_state;
    for (std::uint32_t i = 0; i < cfg.m; ++i) {
      Prg rng(derive_seed(cfg.seed, cfg.trial, "mix", i));
      mix_keys.push_back(g.random_scalar(rng));
      mixes.push_back(std::make_unique<MixNode>(static_cast<NodeId>(i), mix_keys.back(), opts));
    }

    std::vector<MixInfo> infos;
    if (cfg.transport == TransportKind::kInProcess) {
      net = std::make_unique<LoopbackNetwork>();
      net->attach(storage_node);
      for (auto& mx : mixes) net->attach(*mx);
      db = {"loopback", 0};
      for (std::uint32_t i = 0; i < cfg.m; ++i) {
        infos.push_back({g.exp_base(mix_keys[i]), {"loopback", static_cast<std::uint16_t>(i + 1)}});
      }
      port = std::make_unique<LoopbackPort>(*net);
    } else {
      storage_server = std::make_unique<TcpNodeServer>(storage_node, Endpoint{"127.0.0.1", 0});
      db = {"127.0.0.1", storage_server->port()};
      for (std::uint32_t i = 0; i < cfg.m; ++i) {
        mix_servers.push_back(std::make_unique<TcpNodeServer>(*mixes[i], Endpoint{"127.0.0.1", 0}));
        infos.push_back({g.exp_base(mix_keys[i]), {"127.0.0.1", mix_servers.back()->port()}});
      }
      storage_server->start();
      for (auto& s : mix_servers) s->start();
      auto tcp = std::make_unique<TcpPort>();
      tcp->connect(kStorageNode, db);
      for (std::uint32_t i = 0; i < cfg.m; ++i) tcp->connect(static_cast<NodeId>(i), infos[i].endpoint);
      port = std::move(tcp);
    }
    remote = std::make_unique<RemoteStore>(*port);
    client = std::make_unique<Client>(cc, std::move(infos), derive_seed(cfg.seed, cfg.trial, "client"));
  }

  ~Impl() {
    // Servers reference the nodes; stop them before the nodes go away.
    for (auto& s : mix_servers) s->stop();
    if (storage_server) storage_server->stop();
  }

  void check_servers() const {
    auto check = [](const std::unique_ptr<TcpNodeServer>& s) {
      if (auto e = s->error()) std::rethrow_exception(e);
    };
    if (storage_server) check(storage_server);
    for (const auto& s : mix_servers) check(s);
  }
};

Deployment::Deployment(DeploymentConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Deployment::~Deployment() = default;

const DeploymentConfig& Deployment::config() const { return impl_->cfg; }
Client& Deployment::client() { return *impl_->client; }
StoreApi& Deployment::store() { return *impl_->remote; }
Storage& Deployment::storage() { return impl_->storage; }
MixNode& Deployment::mix(std::uint32_t i) { return *impl_->mixes.at(i); }
std::uint32_t Deployment::mix_count() const { return impl_->cfg.m; }
const RistrettoScalar& Deployment::mix_private(std::uint32_t i) const {
  return impl_->mix_keys.at(i);
}
LoopbackNetwork* Deployment::network() { return impl_->net.get(); }

void Deployment::preprocess(const std::vector<Bytes>& payloads) {
  impl_->client->preprocess(payloads, *impl_->remote);
}

Bytes Deployment::read(std::uint64_t v) { return impl_->client->read(v, *impl_->remote); }

void Deployment::write(std::uint64_t v, ByteView data) {
  impl_->client->write(v, data, *impl_->remote);
}

void Deployment::evict() {
  try {
    impl_->client->evict(*impl_->remote, *impl_->port, impl_->db);
  } catch (...) {
    // A failing server is the more useful diagnostic than the client's timeout.
    impl_->check_servers();
    throw;
  }
}

CostCounters Deployment::totals() const {
  CostCounters sum;
  for (const auto& mx : impl_->mixes) sum += mx->counters();
  return sum;
}

std::vector<CostCounters> Deployment::per_mix() const {
  std::vector<CostCounters> out;
  for (const auto& mx : impl_->mixes) out.push_back(mx->counters());
  return out;
}

void Deployment::reset_counters() {
  for (auto& mx : impl_->mixes) mx->reset_counters();
}

}  // namespace mixoram
