#include "sfc/stats.hpp"

#include <cmath>
#include <limits>

namespace sfc {

double log_binom(double n, double k) {
  if (k < 0 || k > n || n < 0) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double poisson_pmf(int c, double mean) {
  if (c < 0) return 0.0;
  if (mean == 0.0) return c == 0 ? 1.0 : 0.0;
  return std::exp(-mean + c * std::log(mean) - std::lgamma(c + 1.0));
}

double poisson_tail(int c, double mean) {
  if (c < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  // sum upward from c+1 so tails far below 1 ulp of the head still resolve;
  // cut off once terms stop contributing
  double tail = 0.0;
  double term = poisson_pmf(c + 1, mean);
  for (int i = c + 1; term > 0.0; ++i) {
    tail += term;
    if (term < tail * 1e-18 && i > mean) break;
    term *= mean / (i + 1);
  }
  return tail > 1.0 ? 1.0 : tail;
}

Interval wilson_interval(double successes, double trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  double p = successes / trials;
  double z2 = z * z;
  double denom = 1.0 + z2 / trials;
  double center = (p + z2 / (2.0 * trials)) / denom;
  double half = (z / denom) * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials));
  double lo = center - half, hi = center + half;
  if (lo < 0.0) lo = 0.0;
  if (hi > 1.0) hi = 1.0;
  return {lo, hi};
}

namespace {

// regularized lower incomplete gamma P(a, x): series for x < a+1, Lentz
// continued fraction for the complement otherwise
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::exp(log_prefix) * sum;
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, f = d;
  for (int n = 1; n < 500; ++n) {
    double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return 1.0 - std::exp(log_prefix) * f;
}

}  // namespace

double chi_square_critical(int dof, double upper_tail_prob) {
  // Wilson-Hilferty start, then Newton on the regularized gamma CDF with a
  // bisection bracket as the safety net
  const double a = dof / 2.0;
  const double target = 1.0 - upper_tail_prob;
  double h = 2.0 / (9.0 * dof);
  double z = 1.0 - h;  // rough normal quantile via Wilson-Hilferty back-out
  // invert the normal by bisection on erfc (cheap, runs once per call)
  {
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < target ? lo : hi) = mid;
    }
    z = 0.5 * (lo + hi);
  }
  double v = 1.0 - h + z * std::sqrt(h);
  double x = dof * v * v * v;
  if (!(x > 0.0)) x = 0.5;

  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    double err = gamma_p(a, x / 2.0) - target;
    (err < 0.0 ? lo : hi) = x;
    // chi2 pdf at x
    double logpdf = (a - 1.0) * std::log(x) - x / 2.0 - a * std::log(2.0) - std::lgamma(a);
    double step = err / std::exp(logpdf);  // d/dx P(a, x/2) = chi2 pdf(x)
    double next = x - step;
    if (!(next > lo && (hi == std::numeric_limits<double>::infinity() || next < hi)))
      next = hi == std::numeric_limits<double>::infinity() ? x * 2.0 : 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-12 * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace sfc
