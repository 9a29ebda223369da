#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "wetting/walks.hpp"

using namespace wetting;

TEST_CASE("increment laws") {
  const IncrementDist s = IncrementDist::simple();
  CHECK(s.unit_step());
  CHECK(s.mean_dx() == 1);
  CHECK(s.var_dy() == doctest::Approx(1));
  const IncrementDist l = IncrementDist::lazy(0.5);
  CHECK(l.var_dy() == doctest::Approx(0.5));
  CHECK_THROWS_AS(IncrementDist::from_steps({{0, 0, 1.0}}), InvalidDistribution);
  CHECK_THROWS_AS(IncrementDist::from_steps({{1, 2, 1.0}}), InvalidDistribution);
  CHECK_THROWS_AS(IncrementDist::from_steps({{1, 0, 0.4}}), InvalidDistribution);
  const IncrementDist t = IncrementDist::from_steps({{1, 1, 0.25}, {1, -1, 0.25}, {2, 0, 0.5}});
  CHECK(!t.unit_step());
  CHECK(t.mean_dx() == doctest::Approx(1.5));
  CHECK(t.max_dx() == 2);
}

TEST_CASE("synchronisation") {
  const Walk a = walk_from_steps({0, 0}, {{1, 1}, {1, -1}, {1, 1}});
  const Walk b = walk_from_steps({0, 0}, {{1, -1}, {1, -1}, {1, 1}});
  const auto sync = synchronize(a, b);
  REQUIRE(sync.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(sync[k].T == static_cast<long>(k));
    CHECK(sync[k].S == a[k].y);
    CHECK(sync[k].Sp == b[k].y);
  }
  const Walk c = walk_from_steps({0, 0}, {{2, 0}, {1, 0}});
  const Walk e = walk_from_steps({0, 0}, {{1, 0}, {1, 0}, {1, 0}});
  const auto s2 = synchronize(c, e);
  REQUIRE(s2.size() == 3);
  CHECK(s2[0].T == 0);
  CHECK(s2[1].T == 2);
  CHECK(s2[2].T == 3);
  // hand trace: gaps 2, 2, 0 -> first k with S <= S' is 2
  const Walk u = walk_from_steps({0, 2}, {{1, 1}, {1, -1}, {1, -1}});
  const Walk v = walk_from_steps({0, 0}, {{1, 1}, {1, 1}, {1, -1}});
  CHECK(first_crossing(synchronize(u, v)) == 2);
  CHECK(first_crossing(synchronize(u, walk_from_steps({0, -5}, {{1, 0}, {1, 0}, {1, 0}}))) == -1);
}

TEST_CASE("kernel tables") {
  const IncrementDist s = IncrementDist::simple();
  const SyncWalkKernels k = kernel_dp(s, 0, -2, 4, -8, 8, {0, 1, 2, 3, 4});
  double m = 0;
  for (int jp = k.lo; jp <= k.hi; ++jp) m += k.q_at(2, 0, jp);
  CHECK(m == doctest::Approx(0.5).epsilon(1e-14));
  for (std::size_t t = 0; t < k.times.size(); ++t)
    for (int j = k.lo; j <= k.hi; ++j)
      for (int jp = k.lo; jp <= k.hi; ++jp) REQUIRE(k.qplus_at(t, j, jp) <= k.q_at(t, j, jp) + 1e-15);
  // against the closed forms of the D/S split
  for (int j = -4; j <= 4; ++j)
    for (int jp = -6; jp <= 2; ++jp) {
      CHECK(k.q_at(4, j, jp) == doctest::Approx(pair_kernel_pm1(0, -2, 4, j, jp)).epsilon(1e-13));
      CHECK(k.qplus_at(4, j, jp) == doctest::Approx(ordered_pair_kernel_pm1(0, -2, 4, j, jp)).epsilon(1e-13));
    }
}

TEST_CASE("ordered survival decays like n^-1/2") {
  const std::vector<double> surv = ordered_survival_pm1(2, 4096);
  std::vector<double> xs, ys;
  for (int n = 64; n <= 4096; n *= 2) {
    xs.push_back(n);
    ys.push_back(surv[n]);
  }
  const LinearFit f = loglog_fit(xs, ys);
  CHECK(f.slope >= -0.6);
  CHECK(f.slope <= -0.4);
}

TEST_CASE("bridge sampler") {
  const IncrementDist s = IncrementDist::simple();
  Rng rng(5);
  int up_first = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Walk w = sample_bridge(s, {0, 0}, {2, 0}, rng);
    REQUIRE(w.size() == 3);
    REQUIRE(w.back() == Point{2, 0});
    up_first += w[1].y == 1;
  }
  CHECK(std::abs(up_first - draws / 2.0) <= 3 * std::sqrt(draws * 0.25));
  const Walk one = sample_bridge(s, {0, 0}, {1, -1}, rng);
  CHECK(one.size() == 2);
  CHECK_THROWS_AS(sample_bridge(s, {0, 0}, {1, 0}, rng), UnreachableEndpoint);
  const IncrementDist t = IncrementDist::from_steps({{1, 1, 0.25}, {1, -1, 0.25}, {2, 0, 0.5}});
  for (int i = 0; i < 2000; ++i) REQUIRE(sample_bridge(t, {0, 0}, {9, 1}, rng).back() == Point{9, 1});
}

TEST_CASE("pair conditioning") {
  const IncrementDist s = IncrementDist::simple();
  // gap too wide to close in 10 steps: the conditioning is vacuous
  PairSampler far(s, {0, 40}, {0, 0}, {10, 40}, {10, 0}, PairConditioning::Ordered);
  CHECK(far.acceptance_probability() == doctest::Approx(1).epsilon(1e-12));
  // one step from gap 2: of the four joint paths only (-1, +1) meets
  int ordered = 0;
  for (int a : {-1, 1})
    for (int b : {-1, 1}) {
      const Walk up = walk_from_steps({0, 2}, {{1, a}});
      const Walk lo = walk_from_steps({0, 0}, {{1, b}});
      ordered += ordered_at_sync_times(up, lo);
    }
  CHECK(ordered == 3);
  PairSampler same(s, {0, 2}, {0, 0}, {1, 3}, {1, 1}, PairConditioning::Ordered);
  CHECK(same.acceptance_probability() == doctest::Approx(1));
  // two steps, gap 2 to gap 2: 4 paths each way independent, 10 of 16 stay ordered... checked by enumeration
  int kept = 0, total = 0;
  for (int a1 : {-1, 1})
    for (int a2 : {-1, 1})
      for (int b1 : {-1, 1})
        for (int b2 : {-1, 1}) {
          if (a1 + a2 != 0 || b1 + b2 != 0) continue;
          ++total;
          kept += ordered_at_sync_times(walk_from_steps({0, 2}, {{1, a1}, {1, a2}}),
                                        walk_from_steps({0, 0}, {{1, b1}, {1, b2}}));
        }
  PairSampler two(s, {0, 2}, {0, 0}, {2, 2}, {2, 0}, PairConditioning::Ordered);
  CHECK(two.acceptance_probability() == doctest::Approx(static_cast<double>(kept) / total).epsilon(1e-12));
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const BridgePair p = two.sample(rng);
    REQUIRE(ordered_at_sync_times(p.upper, p.lower));
  }
}

TEST_CASE("watermelon reference") {
  const WatermelonTable a = watermelon_reference(256, 2);
  for (auto [g, p] : a.gap) CHECK((p == 0 || g > 0));
  // exchange symmetry: upper and reflected lower marginals agree
  std::map<long, double> up, low;
  for (auto [y, p] : a.upper) up[std::lround(y * 1e6)] += p;
  for (auto [y, p] : a.lower) low[std::lround(-y * 1e6)] += p;
  REQUIRE(up.size() == low.size());
  for (auto [k, p] : up) CHECK(p == doctest::Approx(low[k]).epsilon(1e-12));
  // lattice spacing dominates the KS distance at these sizes; it shrinks with K
  const WatermelonTable b = watermelon_reference(512, 2), c = watermelon_reference(1024, 2);
  const double ks1 = ks_distance(a.gap, b.gap), ks2 = ks_distance(b.gap, c.gap);
  CHECK(ks2 < ks1);
  CHECK(ks2 <= 0.06);
  CHECK(b.mean_gap / a.mean_gap == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
  CHECK(c.mean_gap / b.mean_gap == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
  // an odd sum window used to drop every term
  const MidpointLaw odd = midpoint_law_pm1(64, 2, 2, 21);
  double mass = 0;
  for (auto [g, p] : odd.gap) mass += p;
  CHECK(mass == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("local limit theorem") {
  const std::vector<std::pair<int, double>> lazy{{-1, 0.25}, {0, 0.5}, {1, 0.25}};
  const LltReport r = llt_check(lazy, 400);
  CHECK(r.exact_at_mean == doctest::Approx(0.028209).epsilon(0.02));
  CHECK(r.gauss_at_mean == doctest::Approx(1 / std::sqrt(2 * M_PI * 400 * 0.5)).epsilon(1e-12));
  CHECK(r.sup_rel_error <= 0.02);
  CHECK(llt_check(lazy, 100).sup_rel_error > r.sup_rel_error);
  CHECK_THROWS_AS(llt_check({{1, 1.0}}, 10), PeriodicityError);
  CHECK_THROWS_AS(llt_check({{-1, 0.5}, {1, 0.5}}, 10), PeriodicityError);
}

TEST_CASE("renewal hitting") {
  const RenewalReport unit = renewal_hit_check(IncrementDist::simple(), 400);
  CHECK(unit.mu == 1);
  long off = 0;
  const std::vector<double> hit = renewal_hit_law(IncrementDist::simple(), 10, &off);
  const std::vector<double> conv = convolve_power({{-1, 0.5}, {1, 0.5}}, 10, &off);
  for (std::size_t i = 0; i < conv.size(); ++i) CHECK(hit[i] == doctest::Approx(conv[i]).epsilon(1e-14));
  const IncrementDist t = IncrementDist::from_steps({{1, 1, 0.25}, {1, -1, 0.25}, {2, 0, 0.5}});
  const RenewalReport r = renewal_hit_check(t, 400);
  CHECK(r.mu == doctest::Approx(1.5));
  CHECK(r.sup_rel_error <= 0.05);
  long o = 0;
  const std::vector<double> law = renewal_hit_law(t, 30, &o);
  for (std::size_t i = 0; i < law.size(); ++i) {
    const long x = static_cast<long>(i) + o;
    if (std::abs(x) > 30) CHECK(law[i] == 0);
  }
}

TEST_CASE("total variation helpers") {
  CHECK(tv_distance({0.2, 0.8}, {0.2, 0.8}) == 0);
  CHECK(tv_distance({1, 0}, {0, 1}) == 1);
  CHECK_THROWS_AS(tv_distance({1}, {0.5, 0.5}), SupportMismatch);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0, 1);
  auto random_law = [&](int k) {
    std::vector<double> p(k);
    double s = 0;
    for (double& v : p) s += v = u(gen);
    for (double& v : p) v /= s;
    return p;
  };
  for (int it = 0; it < 200; ++it) {
    const auto p1 = random_law(4), q1 = random_law(4), p2 = random_law(4), q2 = random_law(4);
    const double e1 = tv_distance(p1, q1), e2 = tv_distance(p2, q2);
    CHECK(tv_distance(product_law(p1, p2), product_law(q1, q2)) <= product_tv_bound(e1, e2) + 1e-15);
    const std::vector<std::uint8_t> ev{1, 1, 0, 1};
    const auto pc = condition_on(p1, ev), qc = condition_on(q1, ev);
    const double delta = std::min(p1[0] + p1[1] + p1[3], q1[0] + q1[1] + q1[3]);
    CHECK(tv_distance(pc, qc) <= conditional_tv_bound(e1, delta) + 1e-15);
  }
  CHECK(product_tv_bound(0.01, 0.01) == doctest::Approx(0.02));
}

TEST_CASE("fits") {
  const LinearFit f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  const LinearFit g = loglog_fit({1, 4, 16}, {1, 2, 4});
  CHECK(g.slope == doctest::Approx(0.5));
}
