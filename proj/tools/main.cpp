// mixoram command-line tool: simulations, cost audits, statistics and TCP nodes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixoram/client.hpp"
#include "mixoram/config.hpp"
#include "mixoram/deployment.hpp"
#include "mixoram/harness.hpp"
#include "mixoram/logging.hpp"
#include "mixoram/mixnode.hpp"
#include "mixoram/storage_node.hpp"
#include "mixoram/tcp.hpp"

namespace {

using namespace mixoram;

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// String-valued flags; only the ones given on the command line override the config file.
struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, values[key], help);
  }

  ConfigMap merged() const {
    ConfigMap cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg[key == "r-override" ? "r" : key] = values.at(key);
    }
    return cfg;
  }
};

void add_scenario_flags(CLI::App* app, Flags& f) {
  f.add(app, "design", "cascade-layered | cascade-rebuild | parallel-layered | parallel-rebuild");
  f.add(app, "n", "number of records");
  f.add(app, "b", "payload bytes per record");
  f.add(app, "s", "cache slots (default ceil(sqrt(n)))");
  f.add(app, "m", "number of mixes");
  f.add(app, "ma", "number of corrupted mixes");
  f.add(app, "d", "records refreshed per access");
  f.add(app, "r-override", "rounds per permutation phase");
  f.add(app, "seed", "experiment seed");
  f.add(app, "transport", "in-process | tcp");
  f.add(app, "trials", "number of trials");
  f.add(app, "evictions", "evictions per trial");
  app->add_option("--config", f.config_path, "key=value file; flags take precedence");
}

Scenario scenario_of(const ConfigMap& cfg, std::initializer_list<const char*> required) {
  for (const char* key : required) {
    if (!cfg.count(key)) throw UsageError(std::string("missing --") + key);
  }
  auto sc = scenario_from_config(cfg);
  sc.validate();
  return sc;
}

int finish(const ExperimentReport& rep, const std::string& out) {
  std::cout << rep.summary();
  if (!out.empty()) {
    auto path = rep.write(out);
    std::cerr << "report written to " << path.string() << "\n";
  }
  return rep.passed() ? 0 : 1;
}

// Mix keys are either loaded (hex scalar) or derived from the seed like the in-process
// deployment does, which lets separate processes agree without a key exchange step.
RistrettoScalar mix_key(const ConfigMap& cfg, std::uint32_t index) {
  Ristretto255 g;
  auto path = config_string(cfg, "key-file", "");
  if (!path.empty()) {
    std::ifstream in(path);
    std::string hex;
    if (!(in >> hex)) fail(Errc::kInvalidArgument, "cannot read key file " + path);
    return g.decode_scalar(from_hex(hex));
  }
  Prg rng(derive_seed(config_u64(cfg, "seed", 1), 0, "mix", index));
  return g.random_scalar(rng);
}

// "0=host:port,1=host:port,storage=host:port"
std::map<std::string, Endpoint> parse_peers(const std::string& text) {
  std::map<std::string, Endpoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("peer entries look like name=host:port");
    out[item.substr(0, eq)] = parse_endpoint(item.substr(eq + 1));
  }
  return out;
}

int cmd_node(const ConfigMap& cfg) {
  auto role = config_string(cfg, "role", "");
  if (!cfg.count("listen") && role != "client") throw UsageError("missing --listen");
  if (role == "storage") {
    auto sc = scenario_of(cfg, {"design", "n", "m"});
    ClientConfig cc;
    cc.design = sc.design;
    cc.n = sc.n;
    cc.payload_bytes = sc.b;
    Storage storage(sc.n, cc.cell_bytes(), sc.cache_slots());
    StorageNode node(storage);
    TcpNodeServer server(node, parse_endpoint(cfg.at("listen")));
    std::cerr << "storage listening on port " << server.port() << "\n";
    server.run();
    return 0;
  }
  if (role == "mix") {
    if (!cfg.count("id")) throw UsageError("missing --id");
    auto id = static_cast<std::uint32_t>(config_u64(cfg, "id", 0));
    MixNode node(static_cast<NodeId>(id), mix_key(cfg, id));
    TcpNodeServer server(node, parse_endpoint(cfg.at("listen")));
    std::cerr << "mix " << id << " listening on port " << server.port() << "\n";
    server.run();
    return 0;
  }
  if (role == "client") {
    auto sc = scenario_of(cfg, {"design", "n", "m"});
    auto peers = parse_peers(config_string(cfg, "peers", ""));
    if (!peers.count("storage")) throw UsageError("--peers needs storage=host:port");
    Ristretto255 g;
    std::vector<MixInfo> mixes;
    TcpPort port;
    port.connect(kStorageNode, peers.at("storage"));
    for (std::uint32_t i = 0; i < sc.m; ++i) {
      auto key = std::to_string(i);
      if (!peers.count(key)) throw UsageError("--peers is missing mix " + key);
      mixes.push_back({g.exp_base(mix_key(cfg, i)), peers.at(key)});
      port.connect(static_cast<NodeId>(i), peers.at(key));
    }
    ClientConfig cc;
    cc.design = sc.design;
    cc.n = sc.n;
    cc.payload_bytes = sc.b;
    cc.cache_slots = sc.cache_slots();
    cc.refresh_per_access = sc.d;
    cc.rounds_override = sc.r_override;
    Client client(cc, mixes, derive_seed(sc.seed, 0, "client"));
    RemoteStore store(port);
    auto rng = trial_rng(sc.seed, 0, "node-client");
    std::vector<Bytes> reference(sc.n, Bytes(sc.b));
    for (auto& p : reference) {
      for (auto& byte : p) byte = static_cast<std::uint8_t>(rng());
    }
    client.preprocess(reference, store);
    std::uint64_t bad = 0;
    for (std::uint32_t e = 0; e < sc.evictions; ++e) {
      for (std::uint64_t i = 0; i < sc.cache_slots(); ++i) {
        auto v = uniform_below(rng, sc.n);
        if (client.read(v, store) != reference[v]) ++bad;
      }
      client.evict(store, port, peers.at("storage"));
    }
    for (std::uint64_t v = 0; v < sc.n; ++v) {
      if (client.peek(v, store) != reference[v]) ++bad;
    }
    std::cout << "epoch=" << client.epoch() << "\nmismatches=" << bad << "\n";
    return bad == 0 ? 0 : 1;
  }
  throw UsageError("--role must be storage, mix or client");
}

int cmd_reinit(const ConfigMap& cfg) {
  auto sc = scenario_of(cfg, {"design", "n", "m"});
  if (is_rebuild(sc.design)) throw UsageError("reinit applies to layered designs");
  Deployment dep(sc.deployment(0));
  auto rng = trial_rng(sc.seed, 0, "reinit");
  std::vector<Bytes> reference(sc.n, Bytes(sc.b));
  for (auto& p : reference) {
    for (auto& byte : p) byte = static_cast<std::uint8_t>(rng());
  }
  dep.preprocess(reference);
  for (std::uint32_t e = 0; e < sc.evictions; ++e) dep.evict();
  const auto before = dep.client().history_epochs();
  const auto bits_before = dep.client().state_bits();
  dep.client().reinitialize(dep.store());
  std::uint64_t bad = 0;
  for (std::uint64_t v = 0; v < sc.n; ++v) {
    if (dep.client().peek(v, dep.store()) != reference[v]) ++bad;
  }
  std::cout << "history_epochs_before=" << before << "\nhistory_epochs_after="
            << dep.client().history_epochs() << "\nstate_bits_before=" << bits_before
            << "\nstate_bits_after=" << dep.client().state_bits() << "\nmismatches=" << bad << "\n";
  return bad == 0 && dep.client().history_epochs() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    init_logging();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }

  CLI::App app{"Mix-net delegated ORAM eviction: simulator, auditor and nodes"};
  app.require_subcommand(1);
  std::string out;

  Flags sim_flags, audit_flags, node_flags, reinit_flags, stats_flags;
  auto* sim = app.add_subcommand("sim", "preprocess, access, evict and read everything back");
  add_scenario_flags(sim, sim_flags);
  sim->add_option("--out", out, "directory for the CSV and summary");

  auto* audit = app.add_subcommand("audit", "measure eviction costs against the closed forms");
  add_scenario_flags(audit, audit_flags);
  audit->add_option("--out", out, "directory for the CSV and summary");

  auto* node = app.add_subcommand("node", "serve one role over TCP");
  add_scenario_flags(node, node_flags);
  node_flags.add(node, "role", "storage | mix | client");
  node_flags.add(node, "listen", "host:port to listen on (port 0 picks one)");
  node_flags.add(node, "peers", "client: 0=host:port,...,storage=host:port");
  node_flags.add(node, "id", "mix index");
  node_flags.add(node, "key-file", "mix: hex private key (default: derived from --seed)");

  auto* reinit = app.add_subcommand("reinit", "drop layered history by re-encrypting the database");
  add_scenario_flags(reinit, reinit_flags);

  auto* stats = app.add_subcommand("stats", "statistical experiments");
  stats->require_subcommand(1);
  std::string kind;
  std::map<std::string, CLI::App*> stat_cmds;
  std::map<std::string, Flags> stat_flags;
  for (const char* name : {"phi", "krts", "merge", "coupon", "coverage"}) {
    auto* cmd = stats->add_subcommand(name);
    stat_cmds[name] = cmd;
    auto& f = stat_flags[name];
    add_scenario_flags(cmd, f);
    f.add(cmd, "k", "transposition width");
    f.add(cmd, "rounds", "rounds (merge; 0 = default)");
    f.add(cmd, "sim-n", "coupon: simulated database size (0 skips the simulation)");
    f.add(cmd, "sim-s", "coupon: simulated cache size");
    cmd->add_option("--out", out, "directory for the CSV and summary");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) return finish(run_eviction_e2e(scenario_of(sim_flags.merged(), {"design", "n", "m"})), out);
    if (audit->parsed()) return finish(audit_costs(scenario_of(audit_flags.merged(), {"design", "n", "m"})), out);
    if (node->parsed()) return cmd_node(node_flags.merged());
    if (reinit->parsed()) return cmd_reinit(reinit_flags.merged());
    for (auto& [name, cmd] : stat_cmds) {
      if (!cmd->parsed()) continue;
      auto cfg = stat_flags[name].merged();
      const auto seed = config_u64(cfg, "seed", 1);
      const auto trials = config_u64(cfg, "trials", 10000);
      if (name == "phi") {
        auto sc = scenario_from_config(cfg);
        if (!cfg.count("m")) throw UsageError("missing --m");
        sc.trials = trials;
        return finish(run_phi_experiment(sc), out);
      }
      if (name == "krts") {
        if (!cfg.count("n") || !cfg.count("k")) throw UsageError("krts needs --n and --k");
        return finish(run_krts_experiment(config_u64(cfg, "n", 0), config_u64(cfg, "k", 0), trials, seed), out);
      }
      if (name == "merge") {
        if (!cfg.count("n") || !cfg.count("s")) throw UsageError("merge needs --n and --s");
        return finish(run_merge_experiment(config_u64(cfg, "n", 0), config_u64(cfg, "s", 0),
                                           config_u64(cfg, "k", 2), config_u64(cfg, "rounds", 0),
                                           trials, seed),
                      out);
      }
      if (name == "coupon") {
        if (!cfg.count("n") || !cfg.count("s")) throw UsageError("coupon needs --n and --s");
        return finish(run_coupon_experiment(config_u64(cfg, "n", 0), config_u64(cfg, "s", 0),
                                            config_u64(cfg, "d", 1), config_u64(cfg, "sim-n", 0),
                                            config_u64(cfg, "sim-s", 0), trials, seed),
                      out);
      }
      if (name == "coverage") {
        auto sc = scenario_of(cfg, {"design", "n", "m"});
        sc.trials = trials;
        return finish(run_coverage_experiment(sc), out);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
