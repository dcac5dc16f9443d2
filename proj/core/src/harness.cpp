#include "mixoram/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <unordered_map>

#include "mixoram/shuffle.hpp"
#include "mixoram/stats.hpp"

namespace mixoram {

namespace {

std::string str(std::uint64_t v) { return std::to_string(v); }

Bytes random_bytes(std::mt19937_64& rng, std::size_t len) {
  Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

std::vector<Bytes> make_payloads(const Scenario& sc, std::uint64_t trial) {
  auto rng = trial_rng(sc.seed, trial, "payloads");
  std::vector<Bytes> out(sc.n);
  for (auto& p : out) p = random_bytes(rng, sc.b);
  return out;
}

struct CostCheck {
  bool comm = false;
  bool bytes = false;
  bool enc = false;
  bool perm = false;
  bool all() const { return comm && bytes && enc && perm; }
};

CostCheck check_costs(const ExpectedCosts& want, const std::vector<CostCounters>& per_mix,
                      std::size_t cell) {
  CostCounters sum;
  for (const auto& c : per_mix) sum += c;
  CostCheck out;
  out.comm = sum.records_sent + sum.records_fetched == want.comm_records;
  out.bytes = sum.bytes_sent + sum.bytes_fetched == want.comm_records * cell;
  if (want.per_mix) {
    out.enc = out.perm = true;
    for (const auto& c : per_mix) {
      out.enc = out.enc && c.encryptions == want.encryptions;
      out.perm = out.perm && c.permuted_elements == want.permuted;
    }
  } else {
    out.enc = sum.encryptions == want.encryptions;
    out.perm = sum.permuted_elements == want.permuted;
  }
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Index of every s-subset mask of [0, n).
std::unordered_map<std::uint64_t, std::size_t> subset_index(std::uint64_t n, std::uint64_t s) {
  std::unordered_map<std::uint64_t, std::size_t> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::uint64_t>(std::popcount(mask)) == s) out.emplace(mask, out.size());
  }
  return out;
}

std::string pass_text(bool ok) { return ok ? "1" : "0"; }

}  // namespace

// ---- scenario ---------------------------------------------------------------------------

std::uint64_t ceil_sqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return r;
}

std::uint64_t Scenario::cache_slots() const { return s ? s : ceil_sqrt(n); }

std::uint32_t Scenario::rounds() const {
  if (!is_parallel(design)) return m;
  if (r_override) return *r_override;
  return round_count(design, n, cache_slots(), m);
}

void Scenario::validate() const {
  if (ma >= m) fail(Errc::kConfigMismatch, "at least one mix must be honest (ma < m)");
  if (trials == 0) fail(Errc::kConfigMismatch, "trials must be positive");
  deployment(0);  // geometry checks
  ClientConfig cc;
  cc.design = design;
  cc.n = n;
  cc.payload_bytes = b;
  cc.cache_slots = cache_slots();
  cc.refresh_per_access = d;
  cc.rounds_override = r_override;
  cc.validate(m);
  if (design == Design::kParallelLayered && !r_override && cache_slots() >= n) {
    fail(Errc::kConfigMismatch, "parallel layered needs s < n");
  }
}

DeploymentConfig Scenario::deployment(std::uint64_t trial) const {
  DeploymentConfig c;
  c.design = design;
  c.n = n;
  c.payload_bytes = b;
  c.cache_slots = cache_slots();
  c.m = m;
  c.refresh_per_access = d;
  c.kappa = kappa;
  c.rounds_override = r_override;
  c.transport = transport;
  c.seed = seed;
  c.trial = trial;
  return c;
}

std::string Scenario::stem() const {
  return std::string(to_string(design)) + "_" + str(n) + "_" + str(m) + "_" + str(seed);
}

Scenario scenario_from_config(const ConfigMap& cfg, Scenario base) {
  Scenario sc = base;
  if (cfg.count("design")) sc.design = parse_design(cfg.at("design"));
  sc.n = config_u64(cfg, "n", sc.n);
  sc.b = config_u64(cfg, "b", sc.b);
  sc.s = config_u64(cfg, "s", sc.s);
  sc.m = static_cast<std::uint32_t>(config_u64(cfg, "m", sc.m));
  sc.ma = static_cast<std::uint32_t>(config_u64(cfg, "ma", sc.ma));
  sc.d = static_cast<std::uint32_t>(config_u64(cfg, "d", sc.d));
  sc.seed = config_u64(cfg, "seed", sc.seed);
  if (cfg.count("transport")) sc.transport = parse_transport(cfg.at("transport"));
  sc.trials = config_u64(cfg, "trials", sc.trials);
  if (cfg.count("r")) sc.r_override = static_cast<std::uint32_t>(config_u64(cfg, "r", 0));
  if (cfg.count("kappa")) {
    sc.kappa = kappa_from_bits(static_cast<unsigned>(config_u64(cfg, "kappa", 128)));
  }
  sc.evictions = static_cast<std::uint32_t>(config_u64(cfg, "evictions", sc.evictions));
  return sc;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::string_view label) {
  auto h = derive_seed(seed, trial, label);
  std::seed_seq seq(h.begin(), h.end());
  return std::mt19937_64(seq);
}

// ---- costs ------------------------------------------------------------------------------

ExpectedCosts expected_costs(Design d, std::uint64_t n, std::uint64_t s, std::uint32_t m,
                             std::uint32_t r, Kappa kappa) {
  ExpectedCosts e;
  e.rounds = r;
  const std::uint64_t k2 = 2 * static_cast<std::uint64_t>(kappa);
  const std::uint64_t index_bits = n * std::max<std::uint64_t>(1, std::bit_width(n - 1));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  switch (d) {
    case Design::kCascadeLayered:
      e.comm_records = (m + 1) * n;
      e.encryptions = m * n;
      e.permuted = m * n;
      e.client_state_bits = index_bits + k2 * m;
      break;
    case Design::kCascadeRebuild:
      e.comm_records = 3 * m * n;
      e.encryptions = 4 * m * n;
      e.permuted = 2 * m * n;
      e.client_state_bits = k2 * m;
      e.client_decrypt_layers = 2 * m;
      break;
    case Design::kParallelLayered: {
      const std::uint64_t c = n / m;
      e.per_mix = true;
      e.rounds_real = dm / 2 * std::log(dn / static_cast<double>(s));
      e.comm_records = (r + 2) * n;
      e.encryptions = r * c;
      e.permuted = 2 * r * c;
      e.comm_records_real = (e.rounds_real + 2) * dn;
      e.encryptions_real = dn / 2 * std::log(dn / static_cast<double>(s));
      e.permuted_real = dm * std::log(dn / static_cast<double>(s)) * (dn / dm);
      e.client_state_bits = index_bits + k2 * (m + 1);
      break;
    }
    case Design::kParallelRebuild: {
      const std::uint64_t c = n / m;
      e.per_mix = true;
      e.rounds_real = 2 * dm * std::log(dn);
      e.comm_records = (2 * r + m + 2) * n;
      e.encryptions = 2 * r * c + 2 * n;
      e.permuted = 4 * r * c;
      e.comm_records_real = (2 * e.rounds_real + dm + 2) * dn;
      e.encryptions_real = dn * (4 * std::log(dn) + 2);
      e.permuted_real = 8 * dm * std::log(dn) * (dn / dm);
      e.client_state_bits = k2 * (m + 1);
      e.client_decrypt_layers = m + r;
      break;
    }
  }
  if (!e.per_mix) {
    e.rounds_real = m;
    e.comm_records_real = static_cast<double>(e.comm_records);
    e.encryptions_real = static_cast<double>(e.encryptions);
    e.permuted_real = static_cast<double>(e.permuted);
  }
  return e;
}

ExperimentReport audit_costs(const Scenario& sc) {
  sc.validate();
  ExperimentReport rep("audit");
  rep.set_stem(sc.stem() + "_audit");
  rep.set_columns({"trial", "mix", "records_fetched", "records_sent", "bytes", "encryptions",
                   "permuted_elements", "messages"});
  const auto s = sc.cache_slots();
  const auto r = sc.rounds();
  const auto want = expected_costs(sc.design, sc.n, s, sc.m, r, sc.kappa);

  bool costs_ok = true;
  bool state_ok = true;
  bool decrypt_ok = true;
  std::uint64_t measured_state = 0;
  std::uint64_t measured_layers = 0;
  CostCounters total;
  std::vector<CostCounters> last_per_mix;
  for (std::uint64_t t = 0; t < sc.trials; ++t) {
    Deployment dep(sc.deployment(t));
    auto payloads = make_payloads(sc, t);
    dep.preprocess(payloads);
    auto rng = trial_rng(sc.seed, t, "audit");
    for (std::uint64_t i = 0; i < s; ++i) dep.read(uniform_below(rng, sc.n));
    dep.reset_counters();
    dep.evict();
    last_per_mix = dep.per_mix();
    const auto cell = dep.storage().cell_bytes();
    auto chk = check_costs(want, last_per_mix, cell);
    costs_ok = costs_ok && chk.all();
    for (std::uint32_t i = 0; i < sc.m; ++i) {
      const auto& c = last_per_mix[i];
      rep.add_row({str(t), str(i), str(c.records_fetched), str(c.records_sent),
                   str(c.bytes_fetched + c.bytes_sent), str(c.encryptions),
                   str(c.permuted_elements), str(c.messages_sent)});
    }
    total = dep.totals();
    measured_state = dep.client().state_bits();
    state_ok = state_ok && measured_state == want.client_state_bits;
    if (is_rebuild(sc.design)) {
      auto v = uniform_below(rng, sc.n);
      auto slot = dep.client().lookup(v);
      auto dec = dep.client().decrypt_rebuild(dep.storage().raw_database()[slot], v);
      measured_layers = dec.layers_removed;
      // The table leaves out the client's own layer.
      decrypt_ok = decrypt_ok && dec.payload == payloads[v] &&
                   dec.layers_removed == want.client_decrypt_layers + 1;
    }
  }

  rep.set("design", std::string(to_string(sc.design)));
  rep.set("n", sc.n);
  rep.set("m", std::uint64_t{sc.m});
  rep.set("s", s);
  rep.set("r", std::uint64_t{r});
  rep.set("r_real", want.rounds_real);
  rep.set("cell_bytes", std::uint64_t{total.bytes_sent + total.bytes_fetched} /
                            std::max<std::uint64_t>(1, total.records_sent + total.records_fetched));
  rep.set("expected.comm_records", want.comm_records);
  rep.set("measured.comm_records", total.records_sent + total.records_fetched);
  rep.set("measured.comm_bytes", total.bytes_sent + total.bytes_fetched);
  rep.set("expected.encryptions", want.encryptions);
  rep.set("expected.permuted", want.permuted);
  rep.set("scope", std::string(want.per_mix ? "per_mix" : "total"));
  if (want.per_mix) {
    std::uint64_t emin = UINT64_MAX, emax = 0, pmin = UINT64_MAX, pmax = 0;
    for (const auto& c : last_per_mix) {
      emin = std::min(emin, c.encryptions);
      emax = std::max(emax, c.encryptions);
      pmin = std::min(pmin, c.permuted_elements);
      pmax = std::max(pmax, c.permuted_elements);
    }
    rep.set("measured.encryptions_min", emin);
    rep.set("measured.encryptions_max", emax);
    rep.set("measured.permuted_min", pmin);
    rep.set("measured.permuted_max", pmax);
    rep.set("real.encryptions", want.encryptions_real);
    rep.set("real.permuted", want.permuted_real);
    rep.set("real.comm_records", want.comm_records_real);
    // Distance from the unrounded row values, entirely due to r being rounded up.
    rep.set("rounding.encryptions", static_cast<double>(want.encryptions) - want.encryptions_real);
    rep.set("rounding.permuted", static_cast<double>(want.permuted) - want.permuted_real);
    rep.set("rounding.comm_records",
            static_cast<double>(want.comm_records) - want.comm_records_real);
  } else {
    rep.set("measured.encryptions", total.encryptions);
    rep.set("measured.permuted", total.permuted_elements);
  }
  rep.set("expected.client_state_bits", want.client_state_bits);
  rep.set("measured.client_state_bits", measured_state);
  if (is_rebuild(sc.design)) {
    rep.set("expected.client_decrypt_layers", want.client_decrypt_layers);
    rep.set("measured.client_decrypt_layers", measured_layers);
  }

  rep.verdict("costs_exact", costs_ok, "comm records, bytes, encryptions and permuted elements at integer r");
  if (is_parallel(sc.design) && !sc.r_override) {
    const double gap = static_cast<double>(r) - want.rounds_real;
    rep.verdict("round_rounding", (gap >= 0 && gap < 1) || r == 1, "0 <= r - r_real < 1");
  }
  rep.verdict("client_state", state_ok, "one retained epoch");
  if (is_rebuild(sc.design)) rep.verdict("client_decrypt", decrypt_ok, "table layers plus the client layer");
  return rep;
}

// ---- end to end ---------------------------------------------------------------------------

ExperimentReport run_eviction_e2e(const Scenario& sc) {
  sc.validate();
  ExperimentReport rep("e2e");
  rep.set_stem(sc.stem());
  rep.set_columns({"trial", "epoch", "reads", "writes", "dummies", "access_mismatches",
                   "readback_mismatches", "comm_records", "encryptions", "permuted_elements",
                   "costs_ok"});
  const auto s = sc.cache_slots();
  const auto want = expected_costs(sc.design, sc.n, s, sc.m, sc.rounds(), sc.kappa);

  std::uint64_t mismatches = 0;
  bool costs_ok = true;
  std::string error;
  for (std::uint64_t t = 0; t < sc.trials && error.empty(); ++t) {
    try {
      Deployment dep(sc.deployment(t));
      auto reference = make_payloads(sc, t);
      dep.preprocess(reference);
      auto rng = trial_rng(sc.seed, t, "accesses");
      for (std::uint32_t e = 0; e < sc.evictions; ++e) {
        std::uint64_t reads = 0, writes = 0, dummies = 0, bad_access = 0;
        for (std::uint64_t i = 0; i < s; ++i) {
          const auto v = uniform_below(rng, sc.n);
          AccessStats st;
          if (uniform_below(rng, 2) == 0) {
            auto got = dep.client().access(AccessOp::kRead, v, dep.store(), {}, &st);
            if (got != reference[v]) ++bad_access;
            ++reads;
          } else {
            auto data = random_bytes(rng, sc.b);
            dep.client().access(AccessOp::kWrite, v, dep.store(), data, &st);
            reference[v] = std::move(data);
            ++writes;
          }
          if (st.dummy) ++dummies;
        }
        dep.reset_counters();
        dep.evict();
        auto chk = check_costs(want, dep.per_mix(), dep.storage().cell_bytes());
        costs_ok = costs_ok && chk.all();

        std::uint64_t bad_readback = 0;
        if (e + 1 == sc.evictions) {
          for (std::uint64_t v = 0; v < sc.n; ++v) {
            if (dep.client().peek(v, dep.store()) != reference[v]) ++bad_readback;
          }
        }
        mismatches += bad_access + bad_readback;
        auto tot = dep.totals();
        rep.add_row({str(t), str(e + 1), str(reads), str(writes), str(dummies), str(bad_access),
                     str(bad_readback), str(tot.records_fetched + tot.records_sent),
                     str(tot.encryptions), str(tot.permuted_elements), pass_text(chk.all())});
      }
    } catch (const Error& err) {
      error = std::string(to_string(err.code())) + ": " + err.what();
    }
  }
  rep.set("design", std::string(to_string(sc.design)));
  rep.set("n", sc.n);
  rep.set("m", std::uint64_t{sc.m});
  rep.set("s", s);
  rep.set("r", std::uint64_t{sc.rounds()});
  rep.set("transport", std::string(to_string(sc.transport)));
  rep.set("trials", sc.trials);
  rep.set("mismatches", mismatches);
  if (!error.empty()) rep.set("error", error);
  rep.verdict("protocol", error.empty(), error);
  rep.verdict("round_trip", error.empty() && mismatches == 0);
  rep.verdict("costs", error.empty() && costs_ok);
  return rep;
}

// ---- potential decay ---------------------------------------------------------------------

ExperimentReport run_phi_experiment(const Scenario& sc, std::vector<std::uint64_t> checkpoints) {
  if (sc.ma >= sc.m) fail(Errc::kConfigMismatch, "at least one mix must be honest (ma < m)");
  if (sc.n % sc.m != 0) fail(Errc::kIndivisible, "m must divide n");
  const auto n = sc.n;
  const auto c = n / sc.m;
  const auto target = phi_target_rounds(n, sc.m, sc.ma);
  std::set<std::uint64_t> ts(checkpoints.begin(), checkpoints.end());
  ts.insert(target);
  const auto horizon = *ts.rbegin();

  ExperimentReport rep("phi");
  rep.set_stem(sc.stem() + "_phi");
  std::vector<std::string> cols{"trial", "start"};
  for (auto t : ts) cols.push_back("phi_" + str(t));
  rep.set_columns(cols);

  std::map<std::uint64_t, RunningStats> acc;
  std::vector<double> w(n);
  for (std::uint64_t trial = 0; trial < sc.trials; ++trial) {
    auto rng = trial_rng(sc.seed, trial, "phi");
    std::fill(w.begin(), w.end(), 0.0);
    const auto start = uniform_below(rng, n);
    w[start] = 1.0;
    std::vector<std::string> row{str(trial), str(start)};
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      // Honest mixes (the last m - ma) apply a permutation the adversary cannot see.
      for (std::uint32_t j = sc.ma; j < sc.m; ++j) {
        double sum = 0;
        for (std::uint64_t x = j * c; x < (j + 1) * c; ++x) sum += w[x];
        for (std::uint64_t x = j * c; x < (j + 1) * c; ++x) w[x] = sum / static_cast<double>(c);
      }
      // Corrupted local permutations and the public one are known, so they only relabel.
      std::shuffle(w.begin(), w.end(), rng);
      if (ts.count(t)) {
        const double phi = phi_potential(w);
        acc[t].add(phi);
        row.push_back(format_double(phi));
      }
    }
    rep.add_row(std::move(row));
  }

  rep.set("n", n);
  rep.set("m", std::uint64_t{sc.m});
  rep.set("ma", std::uint64_t{sc.ma});
  rep.set("trials", sc.trials);
  rep.set("target_rounds", target);
  rep.set("phi_0", 1.0 - 1.0 / static_cast<double>(n));
  for (auto t : ts) {
    const double closed = phi_closed_form(n, sc.m, sc.ma, t);
    const double mean = acc[t].mean();
    rep.set("phi_" + str(t) + ".mean", mean);
    rep.set("phi_" + str(t) + ".stderr", acc[t].std_error());
    rep.set("phi_" + str(t) + ".closed_form", closed);
    rep.set("phi_" + str(t) + ".closed_form_scaled", closed * (1.0 - 1.0 / static_cast<double>(n)));
    rep.set("phi_" + str(t) + ".rel_err", relative_error(mean, closed));
  }
  for (auto t : checkpoints) {
    rep.verdict("decay_t" + str(t), relative_error(acc[t].mean(), phi_closed_form(n, sc.m, sc.ma, t)) <= 0.10,
                "within 10% of the closed form");
  }
  const double bound = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  rep.set("bound", bound);
  rep.verdict("bound_at_target", acc[target].mean() <= bound,
              "E[phi] <= 1/n^2 at t=" + str(target));
  return rep;
}

// ---- k-RTS and merge -----------------------------------------------------------------------

ExperimentReport run_krts_experiment(std::uint64_t n, std::uint64_t k, std::uint64_t trials,
                                     std::uint64_t seed) {
  ExperimentReport rep("krts");
  rep.set_stem("krts_" + str(n) + "_" + str(k) + "_" + str(seed));
  rep.set_columns({"trial", "stopping_round"});
  RunningStats st;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t, "krts");
    auto stop = krts_simulate(n, k, rng);
    st.add(static_cast<double>(stop));
    rep.add_row({str(t), str(stop)});
  }
  const double bound = krts_bound(n, k);
  rep.set("n", n);
  rep.set("k", k);
  rep.set("trials", trials);
  rep.set("mean", st.mean());
  rep.set("stderr", st.std_error());
  rep.set("bound", bound);
  rep.verdict("below_bound", st.mean() < bound, "mean stopping time < (2n/k) ln n");
  return rep;
}

ExperimentReport run_merge_experiment(std::uint64_t n, std::uint64_t s, std::uint64_t k,
                                      std::uint64_t rounds, std::uint64_t trials,
                                      std::uint64_t seed) {
  if (n > 20 || s == 0 || s >= n) fail(Errc::kInvalidArgument, "merge experiment needs 0 < s < n <= 20");
  if (rounds == 0) {
    rounds = static_cast<std::uint64_t>(
        std::ceil(2.0 * (static_cast<double>(n) / 2.0) *
                  std::log(static_cast<double>(n) / static_cast<double>(s))));
  }
  ExperimentReport rep("merge");
  rep.set_stem("merge_" + str(n) + "_" + str(s) + "_" + str(seed));
  rep.set_columns({"trial", "arrangement"});
  auto index = subset_index(n, s);
  std::vector<std::uint64_t> counts(index.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t, "merge");
    auto mask = merge_simulate(n, s, k, rounds, rng);
    ++counts[index.at(mask)];
    rep.add_row({str(t), str(mask)});
  }
  auto chi = chi_squared_uniform(counts);
  rep.set("n", n);
  rep.set("s", s);
  rep.set("k", k);
  rep.set("rounds", rounds);
  rep.set("trials", trials);
  rep.set("arrangements", std::uint64_t{counts.size()});
  rep.set("chi2", chi.statistic);
  rep.set("dof", chi.dof);
  rep.set("p_value", chi.p_value);
  rep.set("min_count", *std::min_element(counts.begin(), counts.end()));
  rep.set("max_count", *std::max_element(counts.begin(), counts.end()));
  rep.verdict("uniform", chi.p_value > 0.001, "chi-squared p > 0.001");
  return rep;
}

// ---- coupon collector ---------------------------------------------------------------------

ExperimentReport run_coupon_experiment(std::uint64_t n, std::uint64_t s, std::uint64_t d,
                                       std::uint64_t sim_n, std::uint64_t sim_s,
                                       std::uint64_t trials, std::uint64_t seed) {
  ExperimentReport rep("coupon");
  rep.set_stem("coupon_" + str(n) + "_" + str(s) + "_" + str(seed));
  const auto e = expected_layers(n, s, d, 1.0);
  rep.set("n", n);
  rep.set("s", s);
  rep.set("d", d);
  rep.set("E_all", e.all);
  rep.set("E_per_record_epochs", e.per_record);
  if (sim_n == 0) return rep;
  if (sim_s == 0 || sim_s * d > sim_n) fail(Errc::kInvalidArgument, "need 0 < s*d <= n");

  // Each epoch the client touches s uniformly chosen records and refreshes d per access. A record
  // read in epoch E that was last rewritten in epoch e0 carries E - e0 epochs of layers.
  rep.set_columns({"trial", "epochs_to_cover", "accesses", "mean_peeled"});
  RunningStats peeled_all;
  RunningStats cover;
  std::vector<std::uint64_t> last(sim_n);
  std::vector<std::uint64_t> pool(sim_n);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t, "coupon");
    std::fill(last.begin(), last.end(), 0);
    std::vector<bool> touched(sim_n, false);
    std::uint64_t untouched = sim_n;
    RunningStats peeled;
    std::uint64_t epoch = 0;
    for (; untouched > 0; ++epoch) {
      std::iota(pool.begin(), pool.end(), 0);
      const std::uint64_t picks = sim_s * d;
      for (std::uint64_t i = 0; i < picks; ++i) {
        auto j = i + uniform_below(rng, sim_n - i);
        std::swap(pool[i], pool[j]);
        const auto v = pool[i];
        if (i % d == 0) peeled.add(static_cast<double>(epoch - last[v]));
        last[v] = epoch;
        if (!touched[v]) {
          touched[v] = true;
          --untouched;
        }
      }
    }
    // The last epoch's refreshes completed the cover, so it counts in full.
    cover.add(static_cast<double>(epoch));
    peeled_all.add(peeled.mean());
    rep.add_row({str(t), str(epoch), str(peeled.count()), format_double(peeled.mean())});
  }
  const auto sim = expected_layers(sim_n, sim_s, d, 1.0);
  rep.set("sim.n", sim_n);
  rep.set("sim.s", sim_s);
  rep.set("sim.trials", trials);
  rep.set("sim.E_all", sim.all);
  rep.set("sim.E_per_record_epochs", sim.per_record);
  rep.set("sim.mean_epochs_to_cover", cover.mean());
  rep.set("sim.mean_peeled", peeled_all.mean());
  rep.set("sim.mean_peeled_stderr", peeled_all.std_error());
  rep.set("sim.rel_err_peeled", relative_error(peeled_all.mean(), sim.per_record));
  rep.set("sim.rel_err_cover", relative_error(cover.mean(), sim.all));
  rep.verdict("peeled_matches_formula", relative_error(peeled_all.mean(), sim.per_record) <= 0.15,
              "mean peeled epochs within 15% of E_per_record");
  return rep;
}

// ---- honest-mix coverage ---------------------------------------------------------------

ExperimentReport run_coverage_experiment(const Scenario& sc) {
  if (!is_parallel(sc.design)) fail(Errc::kInvalidArgument, "coverage applies to parallel designs");
  if (sc.n % sc.m != 0) fail(Errc::kIndivisible, "m must divide n");
  const auto n = sc.n;
  const auto c = n / sc.m;
  const auto r = sc.rounds();
  const std::uint32_t honest = sc.m - 1;
  ExperimentReport rep("coverage");
  rep.set_stem(sc.stem() + "_coverage");
  rep.set_columns({"trial", "missed"});
  RunningStats frac;
  std::vector<std::uint64_t> pos(n);
  std::vector<bool> seen(n);
  for (std::uint64_t t = 0; t < sc.trials; ++t) {
    auto rng = trial_rng(sc.seed, t, "coverage");
    std::iota(pos.begin(), pos.end(), 0);  // record v starts at slot v
    for (std::uint64_t v = 0; v < n; ++v) seen[v] = pos[v] / c == honest;
    for (std::uint32_t l = 1; l < r; ++l) {
      std::shuffle(pos.begin(), pos.end(), rng);
      for (std::uint64_t v = 0; v < n; ++v) {
        if (pos[v] / c == honest) seen[v] = true;
      }
    }
    const auto missed = static_cast<std::uint64_t>(std::count(seen.begin(), seen.end(), false));
    frac.add(static_cast<double>(missed) / static_cast<double>(n));
    rep.add_row({str(t), str(missed)});
  }
  const double predicted = std::exp(-static_cast<double>(r) / sc.m);
  const double exact = std::pow(1.0 - 1.0 / sc.m, static_cast<double>(r));
  const double sigma = frac.std_error();
  rep.set("design", std::string(to_string(sc.design)));
  rep.set("n", n);
  rep.set("m", std::uint64_t{sc.m});
  rep.set("r", std::uint64_t{r});
  rep.set("trials", sc.trials);
  rep.set("missed_fraction", frac.mean());
  rep.set("sigma", sigma);
  rep.set("exp_neg_r_over_m", predicted);
  rep.set("one_minus_inv_m_pow_r", exact);
  rep.set("z_exp", sigma > 0 ? std::abs(frac.mean() - predicted) / sigma : 0.0);
  rep.set("z_pow", sigma > 0 ? std::abs(frac.mean() - exact) / sigma : 0.0);
  rep.verdict("matches_exp", std::abs(frac.mean() - predicted) <= 3 * sigma,
              "|missed - e^(-r/m)| <= 3 sigma");
  return rep;
}

// ---- indistinguishability -------------------------------------------------------------

namespace {

struct Traffic {
  std::vector<AccessEntry> storage;
  std::vector<WireEvent> wire;
};

Traffic run_sequence(const Scenario& sc, const std::vector<Query>& seq) {
  Deployment dep(sc.deployment(0));
  dep.preprocess(make_payloads(sc, 0));
  auto rng = trial_rng(sc.seed, 0, "probe-writes");
  const auto s = sc.cache_slots();
  std::uint64_t in_epoch = 0;
  for (const auto& q : seq) {
    if (in_epoch == s) {
      dep.evict();
      in_epoch = 0;
    }
    if (q.op == AccessOp::kWrite) {
      dep.write(q.v, random_bytes(rng, sc.b));
    } else {
      dep.read(q.v);
    }
    ++in_epoch;
  }
  dep.evict();
  Traffic out;
  out.storage = dep.storage().export_view();
  if (auto* net = dep.network()) out.wire = net->transcript();
  return out;
}

}  // namespace

ExperimentReport run_indistinguishability_probe(const Scenario& sc, const std::vector<Query>& a,
                                                const std::vector<Query>& b) {
  sc.validate();
  ExperimentReport rep("indistinguishability");
  rep.set_stem(sc.stem() + "_probe");
  rep.set("design", std::string(to_string(sc.design)));
  rep.set("length_a", std::uint64_t{a.size()});
  rep.set("length_b", std::uint64_t{b.size()});
  if (a.size() != b.size()) {
    rep.set("comparable", std::string("0"));
    rep.verdict("comparable", false, "sequences differ in length");
    return rep;
  }
  rep.set("comparable", std::string("1"));
  auto ta = run_sequence(sc, a);
  auto tb = run_sequence(sc, b);

  auto shape = [](AccessEntry e) {
    e.slot = 0;
    return e;
  };
  bool storage_same = ta.storage.size() == tb.storage.size();
  std::uint64_t slot_diffs = 0;
  for (std::size_t i = 0; storage_same && i < ta.storage.size(); ++i) {
    storage_same = shape(ta.storage[i]) == shape(tb.storage[i]);
    if (ta.storage[i].slot != tb.storage[i].slot) ++slot_diffs;
  }
  const bool wire_same = ta.wire == tb.wire;
  rep.set("storage_events", std::uint64_t{ta.storage.size()});
  rep.set("wire_events", std::uint64_t{ta.wire.size()});
  rep.set("slot_differences", slot_diffs);
  rep.verdict("storage_shape", storage_same, "op, array, actor, epoch, round and size per access");
  rep.verdict("wire_shape", wire_same, "sender, receiver, type, phase, round and size per frame");
  return rep;
}

ExperimentReport run_feasible_set_uniformity(const Scenario& sc) {
  if (is_rebuild(sc.design)) fail(Errc::kInvalidArgument, "arrangement test applies to layered designs");
  const auto n = sc.n;
  const auto s = sc.cache_slots();
  if (n > 20 || s == 0 || s >= n) fail(Errc::kInvalidArgument, "need 0 < s < n <= 20");
  if (is_parallel(sc.design) && n % sc.m != 0) fail(Errc::kIndivisible, "m must divide n");
  const auto r = sc.rounds();
  auto index = subset_index(n, s);
  std::vector<std::uint64_t> counts(index.size(), 0);
  ExperimentReport rep("arrangement");
  rep.set_stem(sc.stem() + "_arrangement");
  rep.set_columns({"trial", "arrangement"});
  const std::size_t seed_len = kappa_bytes(sc.kappa);
  for (std::uint64_t t = 0; t < sc.trials; ++t) {
    auto rng = trial_rng(sc.seed, t, "arrangement");
    auto seed = [&] { return random_bytes(rng, seed_len); };
    EpochRouting routing;
    if (!is_parallel(sc.design)) {
      std::vector<Permutation> perms;
      std::vector<std::uint32_t> order;
      for (std::uint32_t i = 0; i < sc.m; ++i) {
        perms.push_back(permutation_from_seed(seed(), n));
        order.push_back(i);
      }
      routing = EpochRouting::cascade(std::move(perms), std::move(order));
    } else {
      const auto c = n / sc.m;
      std::vector<std::vector<Permutation>> local(r);
      std::vector<Permutation> pub;
      for (std::uint32_t l = 0; l < r; ++l) {
        for (std::uint32_t j = 0; j < sc.m; ++j) local[l].push_back(permutation_from_seed(seed(), c));
        pub.push_back(permutation_from_seed(seed(), n));
      }
      routing = EpochRouting::parallel(n, sc.m, std::move(local), std::move(pub));
    }
    // The cached records are written back to their slots, here the first s.
    std::uint64_t mask = 0;
    for (std::uint64_t x = 0; x < s; ++x) mask |= std::uint64_t{1} << routing.forward(x);
    ++counts[index.at(mask)];
    rep.add_row({str(t), str(mask)});
  }
  auto chi = chi_squared_uniform(counts);
  rep.set("design", std::string(to_string(sc.design)));
  rep.set("n", n);
  rep.set("s", s);
  rep.set("m", std::uint64_t{sc.m});
  rep.set("rounds", std::uint64_t{r});
  rep.set("arrangements", binomial(n, s));
  rep.set("trials", sc.trials);
  rep.set("chi2", chi.statistic);
  rep.set("dof", chi.dof);
  rep.set("p_value", chi.p_value);
  rep.verdict("uniform", chi.p_value > 0.001, "chi-squared p > 0.001");
  return rep;
}

// ---- sentinel -------------------------------------------------------------------------

ExperimentReport run_sentinel_probe(const Scenario& sc, bool skip_encdec) {
  if (!is_rebuild(sc.design)) fail(Errc::kInvalidArgument, "sentinel probe applies to rebuild designs");
  sc.validate();
  auto exposed_cells = std::make_shared<std::map<Bytes, std::uint64_t>>();
  auto exposed = std::make_shared<std::set<std::uint64_t>>();
  auto cfg = sc.deployment(0);
  cfg.transport = TransportKind::kInProcess;
  cfg.skip_encdec = skip_encdec;
  cfg.on_state = [exposed_cells, exposed](NodeId, Phase, std::uint16_t,
                                          const std::vector<SlotCell>& held) {
    for (const auto& sc : held) {
      auto it = exposed_cells->find(sc.cell);
      if (it != exposed_cells->end()) exposed->insert(it->second);
    }
  };
  Deployment dep(cfg);
  auto payloads = make_payloads(sc, 0);
  dep.preprocess(payloads);
  for (std::uint64_t v = 0; v < sc.n; ++v) {
    (*exposed_cells)[dep.client().client_layer_only(v, payloads[v])] = v;
  }
  std::string error;
  std::uint64_t bad = 0;
  try {
    dep.evict();
    for (std::uint64_t v = 0; v < sc.n; ++v) {
      if (dep.client().peek(v, dep.store()) != payloads[v]) ++bad;
    }
  } catch (const Error& err) {
    error = err.what();
  }
  ExperimentReport rep("sentinel");
  rep.set_stem(sc.stem() + (skip_encdec ? "_sentinel_naive" : "_sentinel"));
  rep.set("design", std::string(to_string(sc.design)));
  rep.set("skip_encdec", std::string(skip_encdec ? "1" : "0"));
  rep.set("exposed_records", std::uint64_t{exposed->size()});
  rep.set("readback_mismatches", bad);
  rep.verdict("protocol", error.empty() && bad == 0, error);
  if (skip_encdec) {
    rep.verdict("exposure_detected", !exposed->empty(), "naive variant leaves client-layer-only records");
  } else {
    rep.verdict("no_exposure", exposed->empty(), "no mix ever holds a client-layer-only record");
  }
  return rep;
}

}  // namespace mixoram
