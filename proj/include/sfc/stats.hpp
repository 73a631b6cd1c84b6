#pragma once
#include <cstdint>
#include <utility>

namespace sfc {

// log C(n,k); -inf when out of range
double log_binom(double n, double k);

// Poisson(mean) pmf at c
double poisson_pmf(int c, double mean);
// P[X > c] for X ~ Poisson(mean)
double poisson_tail(int c, double mean);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Wilson score interval for a binomial proportion (z defaults to 95%)
Interval wilson_interval(double successes, double trials, double z = 1.959963984540054);

// upper critical value of the chi-square distribution (Wilson-Hilferty cube
// approximation; adequate for goodness-of-fit gating in the tests)
double chi_square_critical(int dof, double upper_tail_prob);

}  // namespace sfc
