#include "mixoram/shuffle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixoram {

std::string_view to_string(Design d) {
  switch (d) {
    case Design::kCascadeLayered: return "cascade-layered";
    case Design::kCascadeRebuild: return "cascade-rebuild";
    case Design::kParallelLayered: return "parallel-layered";
    case Design::kParallelRebuild: return "parallel-rebuild";
  }
  return "unknown";
}

Design parse_design(std::string_view name) {
  for (auto d : kAllDesigns) {
    if (to_string(d) == name) return d;
  }
  fail(Errc::kInvalidArgument, "unknown design '" + std::string(name) + "'");
}

std::uint32_t round_count(Design d, std::uint64_t n, std::uint64_t s, std::uint32_t m) {
  if (m == 0) fail(Errc::kInvalidArgument, "need at least one mix");
  double r = 0;
  switch (d) {
    case Design::kCascadeLayered:
    case Design::kCascadeRebuild:
      return m;
    case Design::kParallelLayered:
      if (s == 0 || s >= n) fail(Errc::kInvalidArgument, "need n > s >= 1");
      r = std::ceil((m / 2.0) * std::log(static_cast<double>(n) / static_cast<double>(s)));
      break;
    case Design::kParallelRebuild:
      r = std::ceil(2.0 * m * std::log(static_cast<double>(n)));
      break;
  }
  return static_cast<std::uint32_t>(std::max(1.0, r));
}

Allocation public_allocation(const Permutation& pub, std::uint32_t m, std::uint32_t idx,
                             std::uint32_t round, std::uint64_t epoch) {
  const std::uint64_t n = pub.size();
  if (m == 0 || n % m != 0) fail(Errc::kIndivisible, "m must divide n");
  if (idx >= m) fail(Errc::kOutOfRange, "mix index out of range");
  const std::uint64_t c = n / m;
  // list[k] = slot whose record lands at position k after the public permutation.
  auto list = pub.inverse();
  Allocation out;
  out.round = round;
  out.epoch = epoch;
  out.per_destination.resize(m);
  for (std::uint64_t pos = 0; pos < n; ++pos) {
    auto slot = list[pos];
    if (slot / c == idx) out.per_destination[pos / c].push_back(slot);
  }
  return out;
}

Allocation public_allocation(ByteView pub_seed, std::uint64_t n, std::uint32_t m,
                             std::uint32_t idx, std::uint32_t round, std::uint64_t epoch) {
  if (m == 0 || n % m != 0) fail(Errc::kIndivisible, "m must divide n");
  return public_allocation(permutation_from_seed(pub_seed, n), m, idx, round, epoch);
}

double harmonic(std::uint64_t n) {
  double h = 0;
  for (std::uint64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

double krts_bound(std::uint64_t n, std::uint64_t k) {
  return 2.0 * static_cast<double>(n) / static_cast<double>(k) * std::log(static_cast<double>(n));
}

double merge_bound(std::uint64_t n, std::uint64_t s, std::uint64_t k) {
  return static_cast<double>(n) / (2.0 * static_cast<double>(k)) *
         std::log(static_cast<double>(n) / static_cast<double>(s));
}

double phi_potential(std::span<const double> weights) {
  const double n = static_cast<double>(weights.size());
  double sum = 0;
  double phi = 0;
  for (double w : weights) {
    sum += w;
    phi += (w - 1.0 / n) * (w - 1.0 / n);
  }
  if (weights.empty() || std::abs(sum - 1.0) > 1e-9) {
    fail(Errc::kNotAProbabilityVector, "weights do not sum to 1");
  }
  return phi;
}

double phi_closed_form(std::uint64_t n, std::uint32_t m, std::uint32_t m_a, std::uint64_t t) {
  const double k = static_cast<double>(n) / m;
  const double rho = 1.0 - (m - m_a) * (k - 1.0) / (static_cast<double>(n) - 1.0);
  return std::pow(rho, static_cast<double>(t));
}

std::uint64_t phi_target_rounds(std::uint64_t n, std::uint32_t m, std::uint32_t m_a) {
  if (m_a >= m) fail(Errc::kInvalidArgument, "need at least one honest mix");
  return static_cast<std::uint64_t>(
      std::ceil(2.0 * (static_cast<double>(m) / (m - m_a)) * std::log(static_cast<double>(n))));
}

}  // namespace mixoram
