#include "sfc/analytics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sfc/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sfc {

double hypergeom_pmf(int64_t covered, double q, int t, const AnalyticParams& p) {
  const double M = p.frame.pattern_space();
  const int N = p.frame.num_sensors;
  const int idle = N - t;
  if (covered < 0 || covered > idle) return 0.0;
  if (q < t || q > M) throw std::invalid_argument("hypergeom_pmf: need t <= q <= R^k");
  // idle maps draw distinct patterns from the M-t unregistered ones; q-t of
  // those are energized
  double logp = log_binom(q - t, static_cast<double>(covered)) +
                log_binom(M - q, static_cast<double>(idle - covered)) -
                log_binom(M - t, static_cast<double>(idle));
  return std::isfinite(logp) ? std::exp(logp) : 0.0;
}

double error_prob_exact(double q, int t, const AnalyticParams& p) {
  const double M = p.frame.pattern_space();
  const int N = p.frame.num_sensors;
  const int idle = N - t;
  if (idle <= 0) return 0.0;
  if (q <= t) return 0.0;  // no spare energized patterns to be confused by
  if (M - q < idle) return 1.0;  // not enough clean patterns for every idle map
  // 1 - P[all idle maps avoid the q-t spare energized patterns]
  double log_avoid = 0.0;
  for (int i = 0; i < idle; ++i) log_avoid += std::log(M - q - i) - std::log(M - t - i);
  return -std::expm1(log_avoid);
}

BoundsPair error_prob_bounds(double q, int t, const AnalyticParams& p) {
  const double M = p.frame.pattern_space();
  const int N = p.frame.num_sensors;
  const int idle = N - t;
  if (idle <= 0 || q <= t) return {0.0, 0.0};
  if (M - q < idle) return {1.0, 1.0};
  // exact form: 1 - rho * prod_{i=1..q} (1 - idle/(M-i+1)) with
  // rho = C(M, idle) / C(M - t, idle); bound every factor by its extremes
  double log_rho = log_binom(M, idle) - log_binom(M - t, idle);
  double lo = 1.0 - std::exp(log_rho + q * std::log1p(-idle / (M + 1.0)));
  double hi = 1.0 - std::exp(log_rho + q * std::log1p(-idle / (M - q + 1.0)));
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  return {lo, hi};
}

double single_event_error(double q, int t, const AnalyticParams& p) {
  const double M = p.frame.pattern_space();
  const int N = p.frame.num_sensors;
  if (t >= N || q <= t) return 0.0;
  double idle_prior = std::exp(-p.lambda / N);
  return (q - t) / (M - t) * idle_prior;
}

BoundsPair single_event_error_bounds(double q, int t, const AnalyticParams& p) {
  const double M = p.frame.pattern_space();
  const int N = p.frame.num_sensors;
  if (t >= N || q <= t) return {0.0, 0.0};
  double idle_prior = std::exp(-p.lambda / N);
  return {(q - t) / M * idle_prior, (q - t) / (M - N) * idle_prior};
}

std::vector<double> occupancy_dist(int arrivals, int num_slots) {
  if (arrivals < 0 || num_slots < 1) throw std::invalid_argument("occupancy: bad arguments");
  const int R = num_slots;
  std::vector<double> p(static_cast<size_t>(R) + 1, 0.0);
  p[0] = 1.0;
  for (int a = 0; a < arrivals; ++a) {
    // one more throw either repeats an occupied slot or claims a fresh one
    for (int u = std::min(a + 1, R); u >= 1; --u)
      p[u] = p[u] * (static_cast<double>(u) / R) + p[u - 1] * (static_cast<double>(R - u + 1) / R);
    p[0] = 0.0;
  }
  return p;
}

double occupancy_pmf(int u, int arrivals, int num_slots) {
  if (u < 0 || u > num_slots) return 0.0;
  return occupancy_dist(arrivals, num_slots)[static_cast<size_t>(u)];
}

double expected_occupancy(int arrivals, int num_slots) {
  const double R = num_slots;
  return R * -std::expm1(arrivals * std::log1p(-1.0 / R));
}

double pattern_cover_prob(double lambda, int codeword_len, int num_slots) {
  // inclusion-exclusion over which of the pattern's k cells stay cold.
  // Starts in interval j cover cell i of the window with prob 1/R when the
  // codeword spans it; a subset S of cells all stay cold with probability
  // exp(lambda * sum_j ((1-1/R)^{q_j} - 1)) where q_j counts how many cells
  // of S a start at relative interval j could hit.
  const int k = codeword_len;
  if (k < 1 || k > 24) throw std::invalid_argument("pattern_cover_prob: codeword_len out of range");
  const double miss = 1.0 - 1.0 / num_slots;
  double total = 0.0;
  for (uint32_t subset = 0; subset < (1u << k); ++subset) {
    int overlap[64] = {0};  // relative intervals -(k-1)..k-1 -> 2k-1 entries
    for (int cell = 0; cell < k; ++cell)
      if (subset >> cell & 1)
        for (int j = cell; j < cell + k; ++j) ++overlap[j];
    double exponent = 0.0;
    for (int j = 0; j < 2 * k - 1; ++j)
      exponent += std::pow(miss, overlap[j]) - 1.0;
    double term = std::exp(lambda * exponent);
    total += (std::popcount(subset) & 1) ? -term : term;
  }
  return total;
}

double expected_energized_patterns(const AnalyticParams& p) {
  return p.frame.pattern_space() *
         pattern_cover_prob(p.lambda, p.frame.codeword_len, p.frame.num_slots);
}

// ---------------------------------------------------------------------------
// Windowed-decoder error, averaged over traffic.
//
// Condition on T, the number of codewords starting exactly at the window
// offset. Every other interval count in the 2k-1 intervals feeding the window
// is Poisson(lambda). Window row j collects A_j = sum of the k counts at
// relative intervals j..j+k-1; given the counts, the number of energized
// slots U_j in row j follows the occupancy law independently across rows, and
// the number of fully energized patterns is Q = prod_j U_j. The error at the
// offset is then error_prob_exact(Q, T).
//
// The sweep over count tuples is a sliding-window DP: state = (the k-1 counts
// still feeding future rows, the partial product of U draws). Branches whose
// product hits zero contribute exactly zero error and are dropped outright.
// Truncated Poisson mass and pruned low-weight states are accumulated into
// the certificate; the budget split guarantees certificate <= epsilon:
//   T tail <= eps/4, Poisson caps <= eps/4 total, pruning <= eps/2 total.
// ---------------------------------------------------------------------------

namespace {

struct DpShape {
  int count_bits = 0;
  int count_max = 0;  // inclusive cap per Poisson draw
  int t_max = 0;
  double prune_budget = 0.0;  // per prune pass
};

DpShape plan_dp(const AnalyticParams& p) {
  const int k = p.frame.codeword_len;
  const double M = p.frame.pattern_space();
  DpShape shape;
  const int draws = std::max(2 * k - 2, 1);
  const double eps_var = p.epsilon / (4.0 * draws);
  int cap = 0;
  while (poisson_tail(cap, p.lambda) > eps_var) ++cap;
  shape.count_max = cap;
  shape.t_max = 0;
  while (poisson_tail(shape.t_max, p.lambda) > p.epsilon / 4.0) ++shape.t_max;
  shape.prune_budget = p.epsilon / (2.0 * (2 * k - 1));
  shape.count_bits = std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(cap))));
  // packed state: (k-1) counts + a 32-bit partial product
  if (k > 16 || (k - 1) * shape.count_bits + 32 > 64 || M > 4294967295.0)
    throw CertificateError("sfc_error_prob: frame too large for the packed sweep state");
  return shape;
}

// Open-addressing accumulator for the sweep states. The fixed mix function
// and in-slot accumulation make every table a pure function of the operation
// sequence, so results cannot drift between runs or thread counts.
struct FlatMap {
  std::vector<uint64_t> keys;
  std::vector<double> vals;
  std::vector<uint8_t> full;
  size_t count = 0;

  explicit FlatMap(size_t expect = 16) {
    size_t cap = 16;
    while (cap < expect * 2) cap <<= 1;
    keys.resize(cap);
    vals.resize(cap);
    full.assign(cap, 0);
  }
  static uint64_t mix(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }
  void add(uint64_t key, double w) {
    const size_t mask = keys.size() - 1;
    size_t at = mix(key) & mask;
    while (full[at]) {
      if (keys[at] == key) {
        vals[at] += w;
        return;
      }
      at = (at + 1) & mask;
    }
    keys[at] = key;
    vals[at] = w;
    full[at] = 1;
    if (++count * 10 > keys.size() * 7) grow();
  }
  void grow() {
    FlatMap bigger(keys.size());  // doubles: cap(expect=old cap) = 2*old
    for (size_t i = 0; i < keys.size(); ++i)
      if (full[i]) bigger.add(keys[i], vals[i]);
    *this = std::move(bigger);
  }
  template <class F>
  void for_each(F f) const {  // slot order: deterministic for a given history
    for (size_t i = 0; i < keys.size(); ++i)
      if (full[i]) f(keys[i], vals[i]);
  }
  double total_mass() const {
    double m = 0.0;
    for (size_t i = 0; i < keys.size(); ++i)
      if (full[i]) m += vals[i];
    return m;
  }
};

}  // namespace

CertifiedValue sfc_error_prob(const AnalyticParams& p) {
  p.frame.validate();
  const int k = p.frame.codeword_len;
  const int R = p.frame.num_slots;
  const double lam = p.lambda;
  if (lam == 0.0) return {0.0, 0.0};
  const DpShape shape = plan_dp(p);

  // occupancy tables for every arrival total a row can see
  const int a_max = (k - 1) * shape.count_max + std::max(shape.count_max, shape.t_max);
  std::vector<std::vector<double>> occ(static_cast<size_t>(a_max) + 1);
  for (int a = 0; a <= a_max; ++a) occ[static_cast<size_t>(a)] = occupancy_dist(a, R);

  std::vector<double> count_pmf(static_cast<size_t>(shape.count_max) + 1);
  for (int c = 0; c <= shape.count_max; ++c) count_pmf[static_cast<size_t>(c)] = poisson_pmf(c, lam);
  const double count_tail = poisson_tail(shape.count_max, lam);
  const double count_head = 1.0 - count_tail;

  const int cb = shape.count_bits;
  const uint64_t qmask = 0xFFFFFFFFULL;

  // per-t partials summed in index order at the end: the result must not
  // depend on how many threads ran or how a reduction happened to associate
  std::vector<double> totals(static_cast<size_t>(shape.t_max) + 1, 0.0);
  std::vector<double> certs(static_cast<size_t>(shape.t_max) + 1, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int t = 0; t <= shape.t_max; ++t) {
    const double wt = poisson_pmf(t, lam);
    if (wt == 0.0) continue;

    FlatMap cur;
    cur.add(0, 1.0);
    double branch_cert = 0.0;
    std::vector<double> masses;  // prune scratch

    // spends the pass budget exactly: sorts the state masses and drops the
    // lightest prefix it can afford, so heavy traffic never gets discarded
    auto prune = [&branch_cert, &shape, &masses](FlatMap& m) {
      if (m.count < 1024) return;
      masses.clear();
      masses.reserve(m.count);
      m.for_each([&](uint64_t, double w) { masses.push_back(w); });
      std::sort(masses.begin(), masses.end());
      double spend = 0.0;
      double cutoff = 0.0;  // first mass the budget cannot afford
      for (double w : masses) {
        if (spend + w > shape.prune_budget) {
          cutoff = w;
          break;
        }
        spend += w;
      }
      if (cutoff == 0.0) return;  // budget covers everything (or nothing to cut)
      FlatMap kept(m.count);
      double dropped = 0.0;
      m.for_each([&](uint64_t key, double w) {
        if (w < cutoff)
          dropped += w;
        else
          kept.add(key, w);
      });
      branch_cert += dropped;
      m = std::move(kept);
    };

    // seed with the k-1 counts preceding the offset interval; the count at
    // the offset itself is pinned to t and enters through row 0's transition
    {
      double mass = 1.0;
      for (int init = 0; init < k - 1; ++init) {
        branch_cert += mass * count_tail;
        mass *= count_head;
        FlatMap next(cur.count * static_cast<size_t>(shape.count_max + 1));
        cur.for_each([&](uint64_t key, double w) {
          for (int c = 0; c <= shape.count_max; ++c) {
            double wc = w * count_pmf[static_cast<size_t>(c)];
            if (wc == 0.0) continue;
            // counts live above the 32-bit product field, oldest lowest
            next.add(key + (static_cast<uint64_t>(c) << (32 + init * cb)), wc);
          }
        });
        prune(next);
        cur = std::move(next);
      }
      FlatMap seeded(cur.count);  // the product field starts at 1
      cur.for_each([&](uint64_t key, double w) { seeded.add(key | 1ULL, w); });
      cur = std::move(seeded);
    }

    double branch_value = 0.0;
    FlatMap finals;  // final-row products; error evaluated once per value
    for (int row = 0; row < k; ++row) {
      const bool pinned = row == 0;       // row 0 consumes the offset count = t
      const bool last = row == k - 1;
      if (!pinned) branch_cert += count_tail * cur.total_mass();
      FlatMap next(last ? 16 : cur.count * 4);
      cur.for_each([&](uint64_t key, double w) {
        const uint64_t q = key & qmask;
        int held[16];
        int held_sum = 0;
        for (int i = 0; i < k - 1; ++i) {
          held[i] = static_cast<int>((key >> (32 + i * cb)) & ((1u << cb) - 1));
          held_sum += held[i];
        }
        const int c_lo = pinned ? t : 0;
        const int c_hi = pinned ? t : shape.count_max;
        for (int c = c_lo; c <= c_hi; ++c) {
          const double wc = pinned ? w : w * count_pmf[static_cast<size_t>(c)];
          if (wc == 0.0) continue;
          const int a = held_sum + c;
          const auto& udist = occ[static_cast<size_t>(a)];
          // shift the held counts down one row and append the new draw
          uint64_t base = 0;
          if (!last) {
            for (int i = 1; i < k - 1; ++i)
              base |= static_cast<uint64_t>(held[i]) << (32 + (i - 1) * cb);
            if (k >= 2) base |= static_cast<uint64_t>(c) << (32 + (k - 2) * cb);
          }
          for (int u = 1; u <= R; ++u) {
            const double wu = wc * udist[static_cast<size_t>(u)];
            if (wu == 0.0) continue;
            const uint64_t q2 = q * static_cast<uint64_t>(u);
            if (last)
              finals.add(q2, wu);
            else
              next.add(base | q2, wu);
          }
          // u = 0 kills the product: those branches contribute zero error
        }
      });
      if (!last) {
        prune(next);
        cur = std::move(next);
      }
    }
    // sum in q order: independent of the table's layout history
    std::vector<std::pair<uint64_t, double>> by_q;
    by_q.reserve(finals.count);
    finals.for_each([&](uint64_t q, double w) { by_q.emplace_back(q, w); });
    std::sort(by_q.begin(), by_q.end());
    for (const auto& [q, w] : by_q)
      branch_value += w * error_prob_exact(static_cast<double>(q), t, p);

    totals[static_cast<size_t>(t)] = wt * branch_value;
    certs[static_cast<size_t>(t)] = wt * branch_cert;
  }

  double total = 0.0;
  double cert = poisson_tail(shape.t_max, lam);
  for (int t = 0; t <= shape.t_max; ++t) {
    total += totals[static_cast<size_t>(t)];
    cert += certs[static_cast<size_t>(t)];
  }

  // truncated branches can carry error at most 1, as can the T tail
  if (!(cert <= p.epsilon))
    throw CertificateError("sfc_error_prob: certificate exceeded the requested budget");
  return {total, cert};
}

double tdma_error_prob(const AnalyticParams& p) {
  const int k = p.frame.codeword_len;
  const int R = p.frame.num_slots;
  const double lam = p.lambda;
  double per_slot_ok = (lam / R) * std::exp(-2.0 * k * lam / R) + std::exp(-lam / R);
  return 1.0 - std::pow(per_slot_ok, R);
}

double saloha_error_prob(const AnalyticParams& p) {
  const double load = p.lambda * p.frame.codeword_len / p.frame.num_slots;
  // per shared slot: fine unless two or more packets land together
  return 1.0 - (1.0 + load) * std::exp(-load);
}

EfficiencyReport efficiency_closed_forms(const AnalyticParams& p) {
  p.frame.validate();
  const int k = p.frame.codeword_len;
  const int R = p.frame.num_slots;
  const int N = p.frame.num_sensors;
  const double lam = p.lambda;
  const double M = p.frame.pattern_space();

  EfficiencyReport rep;
  // reserved-slot scheme: detect iff no other start lands in the overlap
  // window of 2k-1 intervals around the transmission; false reports never
  rep.tdma = std::exp(-(2.0 * k - 1.0) * lam / R);
  // shared-slot scheme: detect iff no other sensor's packet shares the slot
  rep.saloha = std::exp(-(N - 1.0) * k * lam / (N * R));

  // frame scheme: detect always; quiet side bracketed through E[Q]
  const double cover = pattern_cover_prob(lam, k, R);
  rep.expected_energized = M * cover;
  // The ends are valid but can be vacuous: at k=1 the lower end is always
  // <= 0, so only the efficiency view below is clamped into [0,1].
  const double lo = cover - lam / M;  // E[(Q-T)] / M
  const double hi = std::min((M * cover - lam) / (M - N), 1.0);
  // false_flag_rate folds in the idle prior; the efficiency bracket is the
  // conditional version 1 - rate/P[idle]
  const double idle_prior = std::exp(-lam / N);
  rep.false_flag_rate = {lo * idle_prior, hi * idle_prior};
  rep.sfc = {std::clamp(1.0 - hi, 0.0, 1.0), std::clamp(1.0 - lo, 0.0, 1.0)};
  return rep;
}

}  // namespace sfc
