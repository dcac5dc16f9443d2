#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mixoram/config.hpp"
#include "mixoram/deployment.hpp"
#include "mixoram/report.hpp"

namespace mixoram {

struct Scenario {
  Design design = Design::kParallelLayered;
  std::uint64_t n = 16;
  std::size_t b = 32;
  std::uint64_t s = 0;  // 0 selects ceil(sqrt(n))
  std::uint32_t m = 2;
  std::uint32_t ma = 0;  // corrupted mixes
  std::uint32_t d = 1;
  std::uint64_t seed = 1;
  TransportKind transport = TransportKind::kInProcess;
  std::uint64_t trials = 1;
  std::optional<std::uint32_t> r_override;
  Kappa kappa = Kappa::k128;
  std::uint32_t evictions = 1;

  std::uint64_t cache_slots() const;
  std::uint32_t rounds() const;
  // Throws kConfigMismatch / kIndivisible.
  void validate() const;
  DeploymentConfig deployment(std::uint64_t trial) const;
  // <design>_<n>_<m>_<seed>
  std::string stem() const;
};

// Keys: design n b s m ma d seed transport trials r kappa evictions.
Scenario scenario_from_config(const ConfigMap& cfg, Scenario base = {});

std::uint64_t ceil_sqrt(std::uint64_t n);

// Independent stream per (seed, trial, label).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::string_view label);

// Closed-form eviction costs at integer round count r. Records count fetched plus sent cells.
// Parallel designs report encryptions and permuted elements per mix, cascades in total.
struct ExpectedCosts {
  std::uint32_t rounds = 0;
  double rounds_real = 0;  // the unrounded round formula (parallel designs)
  std::uint64_t comm_records = 0;
  std::uint64_t encryptions = 0;
  std::uint64_t permuted = 0;
  bool per_mix = false;
  double encryptions_real = 0;  // at rounds_real
  double permuted_real = 0;
  double comm_records_real = 0;
  std::uint64_t client_state_bits = 0;  // for one retained epoch
  std::uint64_t client_decrypt_layers = 0;  // rebuild designs: table value, client layer excluded
};
ExpectedCosts expected_costs(Design d, std::uint64_t n, std::uint64_t s, std::uint32_t m,
                             std::uint32_t r, Kappa kappa);

// Preprocess, s mixed accesses and an eviction per epoch, then a full readback against a
// reference copy. Cost counters of every eviction are checked against audit_costs' formulas.
ExperimentReport run_eviction_e2e(const Scenario& sc);

// Measured eviction costs against the closed-form cost rows of every design.
ExperimentReport audit_costs(const Scenario& sc);

// Potential decay of a marked record's position distribution with m - ma honest mixes.
ExperimentReport run_phi_experiment(const Scenario& sc,
                                    std::vector<std::uint64_t> checkpoints = {5, 10, 20});

// Mean stopping time of the k-RTS marking process against (2n/k) ln n.
ExperimentReport run_krts_experiment(std::uint64_t n, std::uint64_t k, std::uint64_t trials,
                                     std::uint64_t seed);

// Arrangement histogram of the 0/1 merge model. rounds == 0 selects ceil(n ln(n/s)).
ExperimentReport run_merge_experiment(std::uint64_t n, std::uint64_t s, std::uint64_t k,
                                      std::uint64_t rounds, std::uint64_t trials,
                                      std::uint64_t seed);

// Formula values of expected_layers plus a simulated peeled-epoch count under uniform accesses.
// sim_n == 0 skips the simulation.
ExperimentReport run_coupon_experiment(std::uint64_t n, std::uint64_t s, std::uint64_t d,
                                       std::uint64_t sim_n, std::uint64_t sim_s,
                                       std::uint64_t trials, std::uint64_t seed);

// Fraction of records that never pass through one designated mix during r parallel rounds.
ExperimentReport run_coverage_experiment(const Scenario& sc);

struct Query {
  AccessOp op = AccessOp::kRead;
  std::uint64_t v = 0;
};

// Runs both sequences on identically seeded deployments and compares the traffic shapes seen
// by storage and by the network.
ExperimentReport run_indistinguishability_probe(const Scenario& sc, const std::vector<Query>& a,
                                                const std::vector<Query>& b);

// Final arrangement of the s accessed slots after one layered eviction (routing only), tested
// for uniformity over all C(n, s) arrangements. n <= 20.
ExperimentReport run_feasible_set_uniformity(const Scenario& sc);

// Rebuild designs: counts records a mix ever holds under the client layer alone.
ExperimentReport run_sentinel_probe(const Scenario& sc, bool skip_encdec);

}  // namespace mixoram
