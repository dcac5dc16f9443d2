#pragma once

#include <cstdint>
#include <span>

namespace mixoram {

struct ChiSquared {
  double statistic = 0;
  std::uint64_t dof = 0;
  double p_value = 1;
};

// Goodness of fit of observed counts against equal expected counts.
ChiSquared chi_squared_uniform(std::span<const std::uint64_t> counts);

// Upper tail probability of the chi-squared distribution.
double chi_squared_sf(double statistic, std::uint64_t dof);

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance
  double stddev() const;
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

double relative_error(double measured, double expected);

}  // namespace mixoram
