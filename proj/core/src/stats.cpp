#include "mixoram/stats.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "mixoram/error.hpp"

namespace mixoram {

double chi_squared_sf(double statistic, std::uint64_t dof) {
  if (dof == 0) fail(Errc::kInvalidArgument, "chi-squared needs at least one degree of freedom");
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

ChiSquared chi_squared_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) fail(Errc::kInvalidArgument, "need at least two categories");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) fail(Errc::kInvalidArgument, "no observations");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  ChiSquared out;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    out.statistic += d * d / expected;
  }
  out.dof = counts.size() - 1;
  out.p_value = chi_squared_sf(out.statistic, out.dof);
  return out;
}

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

double RunningStats::std_error() const {
  return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
}

double relative_error(double measured, double expected) {
  if (expected == 0) return measured == 0 ? 0.0 : INFINITY;
  return std::abs(measured - expected) / std::abs(expected);
}

}  // namespace mixoram
