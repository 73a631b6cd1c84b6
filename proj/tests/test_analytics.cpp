#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sfc/analytics.hpp"
#include "sfc/rng.hpp"
#include "sfc/stats.hpp"

using namespace sfc;

static FrameParams frame(int n, int k, int r) {
  FrameParams f;
  f.num_sensors = n;
  f.codeword_len = k;
  f.num_slots = r;
  return f;
}

static AnalyticParams params(double lambda, int k, int r, int n, double eps = 1e-9) {
  AnalyticParams p;
  p.frame = frame(n, k, r);
  p.lambda = lambda;
  p.epsilon = eps;
  return p;
}

// ---------------------------------------------------------------- stats ----

TEST_CASE("binomial log coefficients") {
  CHECK(log_binom(5, 2) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  CHECK(log_binom(0, 0) == 0.0);
  CHECK(log_binom(40, 20) == doctest::Approx(std::log(137846528820.0)).epsilon(1e-12));
  CHECK(std::isinf(log_binom(3, 5)));
  CHECK(std::isinf(log_binom(3, -1)));
}

TEST_CASE("poisson head and tail partition the mass") {
  for (double mean : {0.2, 1.5, 6.0}) {
    for (int c : {0, 3, 10}) {
      double head = 0.0;
      for (int i = 0; i <= c; ++i) head += poisson_pmf(i, mean);
      CHECK(head + poisson_tail(c, mean) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(poisson_tail(5, mean) > poisson_tail(6, mean));
  }
  CHECK(poisson_pmf(0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(poisson_pmf(-1, 0.5) == 0.0);
  CHECK(poisson_tail(-1, 0.5) == 1.0);
}

TEST_CASE("poisson tail resolves far below double rounding of the head") {
  double t = poisson_tail(60, 0.2);
  CHECK(t > 0.0);
  CHECK(t < 1e-100);  // 1 - head would round to exactly 0 long before this
}

TEST_CASE("wilson intervals match precomputed anchors") {
  Interval a = wilson_interval(50, 100);
  CHECK(a.lower == doctest::Approx(0.4038315303659956).epsilon(1e-12));
  CHECK(a.upper == doctest::Approx(0.5961684696340044).epsilon(1e-12));
  Interval b = wilson_interval(8, 10);
  CHECK(b.lower == doctest::Approx(0.4901624715366418).epsilon(1e-12));
  CHECK(b.upper == doctest::Approx(0.9433178485456248).epsilon(1e-12));
  Interval c = wilson_interval(0, 20);
  CHECK(c.lower == 0.0);
  CHECK(c.upper == doctest::Approx(0.16112515805281938).epsilon(1e-12));
  Interval d = wilson_interval(20, 20);
  CHECK(d.upper == 1.0);
  CHECK(d.lower > 0.8);
}

TEST_CASE("chi-square critical values") {
  CHECK(chi_square_critical(3, 0.01) == doctest::Approx(11.344866730144373).epsilon(1e-6));
  CHECK(chi_square_critical(7, 0.01) == doctest::Approx(18.475306906582357).epsilon(1e-6));
  CHECK(chi_square_critical(10, 0.01) == doctest::Approx(23.209251158954356).epsilon(1e-6));
}

// ---------------------------------------------- conditional window laws ----

TEST_CASE("covered-count pmf on a tiny frame") {
  // M = 4 patterns, q = 3 energized of which t = 1 transmitted: the 3 idle
  // maps must fill all remaining patterns, so exactly 2 land on energy
  AnalyticParams p = params(0.5, 2, 2, 4);
  CHECK(hypergeom_pmf(2, 3, 1, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hypergeom_pmf(0, 3, 1, p) == 0.0);
  CHECK(hypergeom_pmf(1, 3, 1, p) == 0.0);
  CHECK(hypergeom_pmf(3, 3, 1, p) == 0.0);  // only 2 spare energized patterns
  CHECK(hypergeom_pmf(-1, 3, 1, p) == 0.0);
  CHECK_THROWS_AS(hypergeom_pmf(0, 0, 1, p), std::invalid_argument);  // q < t
}

TEST_CASE("covered-count pmf normalizes and has the hypergeometric mean") {
  Rng rng(20240101);
  for (int trial = 0; trial < 500; ++trial) {
    int r = 2 + static_cast<int>(rng.next_below(11));
    int k = 1 + static_cast<int>(rng.next_below(4));
    double M = std::pow(r, k);
    int maxn = static_cast<int>(std::min(200.0, M));
    int n = 1 + static_cast<int>(rng.next_below(static_cast<uint32_t>(maxn)));
    int t = static_cast<int>(rng.next_below(static_cast<uint32_t>(n + 1)));
    double q = t + rng.next_below(static_cast<uint32_t>(M - t + 1));
    AnalyticParams p = params(0.1, k, r, n);
    double sum = 0.0, mean = 0.0;
    for (int e = 0; e <= n - t; ++e) {
      double w = hypergeom_pmf(e, q, t, p);
      CHECK(w >= 0.0);
      sum += w;
      mean += e * w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    // every pattern transmitted leaves nothing for the idle maps to cover
    double want = M > t ? (n - t) * (q - t) / (M - t) : 0.0;
    CHECK(mean == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("window error probability agrees with the covered-count law") {
  Rng rng(77001);
  for (int trial = 0; trial < 200; ++trial) {
    int r = 2 + static_cast<int>(rng.next_below(11));
    int k = 1 + static_cast<int>(rng.next_below(4));
    double M = std::pow(r, k);
    int maxn = static_cast<int>(std::min(150.0, M));
    int n = 1 + static_cast<int>(rng.next_below(static_cast<uint32_t>(maxn)));
    int t = static_cast<int>(rng.next_below(static_cast<uint32_t>(n + 1)));
    double q = t + rng.next_below(static_cast<uint32_t>(M - t + 1));
    AnalyticParams p = params(0.1, k, r, n);

    double exact = error_prob_exact(q, t, p);
    CHECK(exact >= 0.0);
    CHECK(exact <= 1.0);
    CHECK(exact == doctest::Approx(1.0 - hypergeom_pmf(0, q, t, p)).epsilon(1e-9));

    BoundsPair b = error_prob_bounds(q, t, p);
    CHECK(b.lower <= exact + 1e-12);
    CHECK(b.upper >= exact - 1e-12);
  }
}

TEST_CASE("window error probability saturates at its clamps") {
  AnalyticParams p = params(0.2, 2, 3, 6);  // M = 9
  CHECK(error_prob_exact(2, 2, p) == 0.0);   // nothing energized beyond truth
  CHECK(error_prob_exact(1, 2, p) == 0.0);
  CHECK(error_prob_exact(8, 1, p) == 1.0);   // idle maps cannot all dodge
  CHECK(error_prob_exact(9, 0, p) == 1.0);
  CHECK(error_prob_exact(0, 0, p) == 0.0);
}

TEST_CASE("window error probability, worked point with its bracket") {
  // M = 4, N = 3, two energized maps of which one was sent
  AnalyticParams p = params(0.2, 2, 2, 3);
  CHECK(error_prob_exact(2, 1, p) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  BoundsPair b = error_prob_bounds(2, 1, p);
  CHECK(b.lower == doctest::Approx(0.28).epsilon(1e-14));
  CHECK(b.upper == doctest::Approx(7.0 / 9.0).epsilon(1e-14));
  CHECK(b.lower <= 2.0 / 3.0);
  CHECK(2.0 / 3.0 <= b.upper);
}

TEST_CASE("tagged-sensor false report rate, worked point") {
  // M = 4, N = 3, q = 3, t = 1, lambda = 0.5
  AnalyticParams p = params(0.5, 2, 2, 3);
  CHECK(single_event_error(3, 1, p) == doctest::Approx(0.564321149927076).epsilon(1e-12));
  BoundsPair b = single_event_error_bounds(3, 1, p);
  CHECK(b.lower == doctest::Approx(0.42324086244530706).epsilon(1e-12));
  CHECK(b.upper == doctest::Approx(1.6929634497812283).epsilon(1e-12));
  CHECK(b.lower <= single_event_error(3, 1, p));
  CHECK(single_event_error(3, 1, p) <= b.upper);
  CHECK(single_event_error(1, 1, p) == 0.0);
  CHECK(single_event_error(4, 3, p) == 0.0);  // t == N: nobody idle
}

// ------------------------------------------------------- slot occupancy ----

TEST_CASE("occupancy pmf matches exhaustive enumeration") {
  for (int r = 2; r <= 4; ++r) {
    for (int a = 0; a <= 8; ++a) {
      // walk all r^a slot assignments with an odometer
      std::vector<int> digits(static_cast<size_t>(a), 0);
      std::vector<int64_t> hits(static_cast<size_t>(r) + 1, 0);
      int64_t total = 0;
      for (;;) {
        std::vector<bool> used(static_cast<size_t>(r), false);
        for (int d : digits) used[static_cast<size_t>(d)] = true;
        int distinct = 0;
        for (bool u : used) distinct += u;
        ++hits[static_cast<size_t>(distinct)];
        ++total;
        int pos = 0;
        while (pos < a && ++digits[static_cast<size_t>(pos)] == r) digits[static_cast<size_t>(pos++)] = 0;
        if (pos == a) break;
      }
      for (int u = 0; u <= r; ++u) {
        double want = static_cast<double>(hits[static_cast<size_t>(u)]) / static_cast<double>(total);
        CHECK(occupancy_pmf(u, a, r) == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("occupancy worked fractions and moments") {
  CHECK(occupancy_pmf(1, 3, 3) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(occupancy_pmf(2, 3, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(occupancy_pmf(3, 3, 3) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(occupancy_pmf(0, 0, 5) == 1.0);
  CHECK(occupancy_pmf(0, 2, 5) == 0.0);

  for (int r : {3, 7, 12}) {
    for (int a : {0, 1, 5, 23, 40}) {
      std::vector<double> dist = occupancy_dist(a, r);
      double sum = 0.0, mean = 0.0;
      for (int u = 0; u <= r; ++u) {
        sum += dist[static_cast<size_t>(u)];
        mean += u * dist[static_cast<size_t>(u)];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(mean == doctest::Approx(expected_occupancy(a, r)).epsilon(1e-10));
      double closed = r * (1.0 - std::pow(1.0 - 1.0 / r, a));
      CHECK(expected_occupancy(a, r) == doctest::Approx(closed).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(occupancy_dist(-1, 3), std::invalid_argument);
  CHECK_THROWS_AS(occupancy_dist(2, 0), std::invalid_argument);
}

// ------------------------------------------------ pattern coverage rate ----

TEST_CASE("single-subsymbol coverage reduces to one poisson splash") {
  CHECK(pattern_cover_prob(0.7, 1, 5) == doctest::Approx(0.13064176460119414).epsilon(1e-12));
  CHECK(pattern_cover_prob(1.3, 1, 9) == doctest::Approx(0.13449700543282306).epsilon(1e-12));
  Rng rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    double lam = 0.01 + 2.0 * rng.next_unit();
    int r = 2 + static_cast<int>(rng.next_below(29));
    double want = -std::expm1(-lam / r);
    CHECK(pattern_cover_prob(lam, 1, r) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("coverage probability is a probability and grows with load") {
  double prev = 0.0;
  for (double lam : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    double v = pattern_cover_prob(lam, 6, 11);
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
  CHECK(pattern_cover_prob(0.0, 6, 11) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pattern_cover_prob(0.2, 0, 11), std::invalid_argument);
  CHECK_THROWS_AS(pattern_cover_prob(0.2, 25, 11), std::invalid_argument);
}

TEST_CASE("expected energized patterns at the reference operating points") {
  CHECK(expected_energized_patterns(params(0.32, 6, 11, 64)) ==
        doctest::Approx(298.5215383497664).epsilon(1e-11));
  CHECK(expected_energized_patterns(params(0.2, 6, 11, 64)) ==
        doctest::Approx(58.30848298804633).epsilon(1e-11));
  CHECK(expected_energized_patterns(params(0.1, 6, 7, 64)) ==
        doctest::Approx(4.899432656177384).epsilon(1e-11));
}

// --------------------------------------------------------- closed forms ----

TEST_CASE("efficiency closed forms at the reference operating points") {
  EfficiencyReport a = efficiency_closed_forms(params(0.32, 6, 11, 64));
  CHECK(a.tdma == doctest::Approx(0.7261490370736909).epsilon(1e-12));
  CHECK(a.saloha == doctest::Approx(0.8421322742087488).epsilon(1e-12));
  CHECK(a.sfc.lower == doctest::Approx(0.9998316669244431).epsilon(1e-12));
  CHECK(a.sfc.upper == doctest::Approx(0.9998316730056996).epsilon(1e-12));
  CHECK(a.false_flag_rate.lower == doctest::Approx(0.0001674874599138685).epsilon(1e-11));
  CHECK(a.false_flag_rate.upper == doctest::Approx(0.00016749351083996913).epsilon(1e-11));
  CHECK(a.expected_energized == doctest::Approx(298.5215383497664).epsilon(1e-11));

  EfficiencyReport b = efficiency_closed_forms(params(0.2, 6, 11, 64));
  CHECK(b.saloha == doctest::Approx(0.898178582399832).epsilon(1e-12));
  CHECK(b.sfc.lower == doctest::Approx(0.9999671980912257).epsilon(1e-12));
  CHECK(b.sfc.upper == doctest::Approx(0.9999671992762382).epsilon(1e-12));

  EfficiencyReport c = efficiency_closed_forms(params(0.1, 6, 7, 64));
  CHECK(c.sfc.lower == doctest::Approx(0.9999591832916088).epsilon(1e-12));
  CHECK(c.sfc.upper == doctest::Approx(0.9999592054955318).epsilon(1e-12));

  for (const EfficiencyReport& r : {a, b, c}) {
    CHECK(r.sfc.lower <= r.sfc.upper);
    CHECK(r.false_flag_rate.lower <= r.false_flag_rate.upper);
    CHECK(r.sfc.lower > r.tdma);  // the frame scheme wins at these points
    CHECK(r.sfc.lower > r.saloha);
  }
}

TEST_CASE("baseline per-offset error closed forms") {
  AnalyticParams p = params(0.2, 6, 11, 64);
  CHECK(tdma_error_prob(p) == doctest::Approx(0.03676768130568275).epsilon(1e-12));
  CHECK(saloha_error_prob(p) == doctest::Approx(0.005534856079070782).epsilon(1e-12));
  AnalyticParams quiet = params(0.0, 6, 11, 64);
  CHECK(tdma_error_prob(quiet) == 0.0);
  CHECK(saloha_error_prob(quiet) == 0.0);
}

// ------------------------------------------- windowed decoder, averaged ----

TEST_CASE("windowed decoder error matches exhaustive enumeration anchors") {
  // anchors were produced by brute-force enumeration of per-interval start
  // counts with exact conditional laws; their truncation limits the match
  CertifiedValue a = sfc_error_prob(params(0.4, 2, 3, 4));
  CHECK(std::abs(a.value - 0.10884816590912957) < 5e-6);
  CHECK(a.certificate <= 1e-9);
  CHECK(a.certificate >= 0.0);

  CertifiedValue b = sfc_error_prob(params(0.3, 2, 4, 6));
  CHECK(std::abs(b.value - 0.06815948670818597) < 5e-6);

  CertifiedValue c = sfc_error_prob(params(0.5, 3, 3, 5));
  CHECK(std::abs(c.value - 0.24009303362920947) < 1.2e-3);
}

TEST_CASE("windowed decoder error reduces to the direct sum when k = 1") {
  AnalyticParams p = params(0.7, 1, 5, 5);
  CertifiedValue got = sfc_error_prob(p);
  double want = 0.0;
  for (int t = 0; t <= 80; ++t) {
    double inner = 0.0;
    std::vector<double> occ = occupancy_dist(t, 5);
    for (int u = 0; u <= 5; ++u)
      inner += occ[static_cast<size_t>(u)] * error_prob_exact(u, t, p);
    want += poisson_pmf(t, 0.7) * inner;
  }
  CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
  CHECK(got.certificate <= p.epsilon);
}

TEST_CASE("windowed decoder error housekeeping") {
  CertifiedValue quiet = sfc_error_prob(params(0.0, 6, 11, 64));
  CHECK(quiet.value == 0.0);
  CHECK(quiet.certificate == 0.0);

  // deterministic across calls (and across however many threads ran)
  CertifiedValue x = sfc_error_prob(params(0.32, 6, 11, 64));
  CertifiedValue y = sfc_error_prob(params(0.32, 6, 11, 64));
  CHECK(x.value == y.value);
  CHECK(x.certificate == y.certificate);
  CHECK(x.certificate <= 1e-9);
  CHECK(x.value > 0.0);
  CHECK(x.value < 1.0);

  // a tighter budget still resolves (tails are summed, not complemented)
  CertifiedValue tight = sfc_error_prob(params(0.4, 2, 3, 4, 1e-13));
  CHECK(std::abs(tight.value - 0.10884816590912957) < 5e-6);
  CHECK(tight.certificate <= 1e-13);
}

TEST_CASE("oversized frames refuse rather than silently truncate") {
  CHECK_THROWS_AS(sfc_error_prob(params(0.2, 12, 11, 64)), CertificateError);
}
