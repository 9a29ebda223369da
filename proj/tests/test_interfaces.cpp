#include "doctest.h"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "wetting/interfaces.hpp"

using namespace wetting;

namespace {

// Interior open except the vertical edges crossing y = -1/2.
BondConfig ground_state(const DobrushinDomain& d) {
  BondConfig w = d.xi();
  for (int e = 0; e < d.num_interior(); ++e) {
    const Segment s = d.tile(e).primal;
    w[e] = !(s.a.y == -2 && s.b.y == 0);
  }
  return w;
}

std::vector<int> ground_colours(const DobrushinDomain& d) {
  std::vector<int> c(d.num_primal());
  for (int i = 0; i < d.num_primal(); ++i) c[i] = d.primal_vertex(i).y >= 0 ? 1 : 2;
  return c;
}

// Reflection through y = -1/2. The box is symmetric about y = 0, so the
// top band has no image; edges without a preimage are set open.
BondConfig reflect(const DobrushinDomain& d, const BondConfig& w) {
  BondConfig r(w.size(), 1);
  for (int e = 0; e < d.num_edges(); ++e) {
    const Vertex c = d.tile(e).center;
    const int pre = d.tile_at({c.x, -2 - c.y});
    if (pre >= 0) r[e] = w[pre];
  }
  return r;
}

}  // namespace

TEST_CASE("Potts envelopes of the ground state") {
  DobrushinDomain d(4, 4);
  std::vector<int> col = ground_colours(d);
  const EnvelopeSet e = potts_envelopes(d, col);
  // + envelopes sit on the phase's lowest row, - envelopes one row below it
  for (int k = -4; k <= 4; ++k) {
    CHECK(e[0].at(k) == 0);
    CHECK(e[1].at(k) == -1);
    CHECK(e[2].at(k) == 0);
    CHECK(e[3].at(k) == -1);
  }
  CHECK(layer_gap(e, 0) == 1);
  CHECK(envelope_width(e) == 0);
  // a bulk spin not connected to the boundary changes nothing
  col[d.primal_index(Vertex::primal(0, 3))] = 3;
  const EnvelopeSet f = potts_envelopes(d, col);
  for (int s = 0; s < 4; ++s) CHECK(f[s].y == e[s].y);
  for (int s = 0; s < 2; ++s)
    for (int k = -4; k <= 4; ++k) CHECK(f[2 * s].at(k) >= f[2 * s + 1].at(k));
}

TEST_CASE("FK envelopes of the ground state") {
  DobrushinDomain d(5, 5);
  const EnvelopeSet e = fk_envelopes(d, ground_state(d));
  for (int k = -5; k <= 5; ++k) {
    CHECK(e[0].at(k) == 0);
    CHECK(e[1].at(k) == -1);
    CHECK(e[2].at(k) == 0);
    CHECK(e[3].at(k) == -1);
  }
  CHECK(layer_gap(e, 0) == 1);
  CHECK(envelope_width(e) == 0);
}

TEST_CASE("reflection through y=-1/2 swaps the two interfaces") {
  DobrushinDomain d(4, 4);
  SwendsenWang sw(d, params_from_q(25).p, 25, 8, 0);
  sw.set_state(ground_state(d));
  const MeasureSpec sep = fk_dobrushin(d, 25, true);
  int used = 0;
  for (int it = 0; it < 30; ++it) {
    sw.sweep();
    BondConfig w = sw.state();
    for (int e = 0; e < d.num_interior(); ++e)
      if (std::abs(d.tile(e).center.y + 1) >= 2 * d.m()) w[e] = 1;
    const BondConfig r = reflect(d, w);
    if (!satisfies_condition(w, sep) || !satisfies_condition(r, sep)) continue;
    REQUIRE(d.respects_xi(r));
    ++used;
    const EnvelopeSet a = fk_envelopes(d, w), b = fk_envelopes(d, r);
    for (int k = -4; k <= 4; ++k) {
      CHECK(b[0].at(k) == -1 - a[3].at(k));
      CHECK(b[1].at(k) == -1 - a[2].at(k));
      CHECK(layer_gap(a, k) == layer_gap(b, k));
    }
    CHECK(envelope_width(a) == envelope_width(b));
  }
  CHECK(used > 10);
}

TEST_CASE("FK envelopes ignore edges away from the interfaces") {
  DobrushinDomain d(5, 5);
  BondConfig w = ground_state(d);
  const EnvelopeSet e = fk_envelopes(d, w);
  // closing a few bulk edges high above leaves the separating loop in place
  for (int e2 = 0; e2 < d.num_interior(); ++e2)
    if (d.tile(e2).center.y >= 8 && d.tile(e2).center.x % 4 == 1) w[e2] = 0;
  const EnvelopeSet f = fk_envelopes(d, w);
  for (int s = 0; s < 4; ++s) CHECK(f[s].y == e[s].y);
}

TEST_CASE("ground-state sample statistics") {
  DobrushinDomain d(6, 6);
  const BondConfig w = ground_state(d);
  Rng rng(1);
  const CouplingThresholds th = CouplingThresholds::from(params_from_q(25));
  const ChainSample chain = run_chain(d, w, th, rng);
  const SampleStats s = sample_stats(d, w, potts_from_fk(d, w, 25, rng), chain, StatsConfig{});
  CHECK(s.gap == 1);
  CHECK(s.width == 0);
}

TEST_CASE("rescaling") {
  Envelope env{"c", 4, std::vector<int>(9, 3)};
  const RescaledPath c = rescale(env);
  for (double t : {0.0, 0.3, 0.5, 1.0}) CHECK(c(t) == doctest::Approx(3 / 2.0));
  Envelope ramp{"r", 4, {0, 1, 2, 3, 5, 8, 13, 21, 34}};
  const RescaledPath r = rescale(ramp);
  CHECK(r(0) == doctest::Approx(0));
  CHECK(r(1) == doctest::Approx(34 / 2.0));
  // 2tn - n = k + 1/2 with k = 1
  const double t = (1.5 + 4) / 8;
  CHECK(r(t) == doctest::Approx((ramp.at(1) + ramp.at(2)) / 2.0 / 2.0));
}

TEST_CASE("one-sided Hausdorff distance") {
  CHECK(hausdorff_one_sided({{0, 0}}, {{6, 8}}) == doctest::Approx(4));
  CHECK(hausdorff_one_sided({{0, 0}, {2, 2}}, {{0, 0}, {2, 2}, {4, 0}}) == 0);
  CHECK(hausdorff_one_sided({{0, 0}}, {{0, 0}, {18, 0}}) == 0);
  CHECK(hausdorff_one_sided({{0, 0}, {18, 0}}, {{0, 0}}) == doctest::Approx(9));
  CHECK_THROWS_AS(hausdorff_one_sided({}, {{0, 0}}), EmptySetError);
  CHECK(std::isinf(set_distance({}, {{0, 0}})));
}

TEST_CASE("Mdist of two sets at distance 7") {
  CrossingClusters c;
  c.primal.vertices = {{0, 0}, {2, 0}};
  c.dual.vertices = {{4, -14}, {6, -16}};
  CHECK(mdist(c, 20, 0) == doctest::Approx(7));
  // the slab excludes far points
  c.dual.vertices.push_back({36, 0});
  CHECK(mdist(c, 20, 0) == doctest::Approx(7));
}

TEST_CASE("cone points") {
  const ConeDecomposition line = cone_points({{0, 0}, {2, 0}, {4, 0}});
  CHECK(line.points.size() == 3);
  const ConeDecomposition v = cone_points({{0, 0}, {2, 2}, {2, -2}});
  std::set<std::pair<int, int>> pts;
  for (Vertex p : v.points) pts.insert({p.x, p.y});
  CHECK(pts.count({0, 0}) == 1);
  CHECK(pts.count({2, 2}) == 0);
  CHECK(in_diamond({0, 0}, {4, 0}, {2, 2}));
  CHECK(in_diamond({0, 0}, {4, 0}, {2, -2}));
  CHECK(!in_diamond({0, 0}, {4, 0}, {2, 4}));
}

TEST_CASE("good clusters need to stay in the strip") {
  const int n = 3;
  REQUIRE(scale_sc(n) == 2);
  StatsConfig cfg;
  cfg.slab_exponent = 0;
  CrossingClusters c;
  for (int x = -4; x <= 4; ++x) c.primal.vertices.push_back(Vertex::primal(x, 2));
  for (int x = -9; x <= 9; x += 2) c.dual.vertices.push_back({x, -5});
  c.primal_crossing = c.dual_crossing = true;
  CHECK(good_clusters(c, n, cfg));
  c.primal.vertices.push_back(Vertex::primal(4, 4));
  CHECK(!good_clusters(c, n, cfg));
  c.primal.vertices.pop_back();
  c.dual_crossing = false;
  CHECK(!good_clusters(c, n, cfg));
}

TEST_CASE("crossing clusters of a straight path") {
  DobrushinDomain d(2, 2);
  AtrcConfig x{BondConfig(d.num_edges(), 0), BondConfig(d.num_edges(), 0)};
  CrossingClusters none = atrc_clusters(d, x);
  CHECK(!none.primal_crossing);
  CHECK(none.top_path.empty());
  for (int e = 0; e < d.num_edges(); ++e) {
    const Segment s = d.tile(e).primal;
    if (s.a.y == 0 && s.b.y == 0) x.tau[e] = x.tautau[e] = 1;
  }
  const CrossingClusters c = atrc_clusters(d, x);
  CHECK(c.primal_crossing);
  CHECK(c.dual_crossing);
  REQUIRE(c.top_path.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(c.top_path[i] == Vertex::primal(i - 3, 0));
  CHECK(c.primal.vertices.size() == 7);
}

TEST_CASE("extreme paths against brute force") {
  DobrushinDomain d(1, 1);
  std::mt19937_64 gen(12);
  int tested = 0;
  for (int it = 0; it < 300; ++it) {
    BondConfig w(d.num_edges());
    for (auto& b : w) b = gen() % 10 < 6;
    for (bool dual : {false, true}) {
      // adjacency over open edges of the chosen lattice
      std::map<std::pair<int, int>, std::vector<Vertex>> adj;
      for (int e = 0; e < d.num_edges(); ++e) {
        if (w[e] == dual) continue;
        const Segment s = dual ? d.tile(e).dual : d.tile(e).primal;
        adj[{s.a.x, s.a.y}].push_back(s.b);
        adj[{s.b.x, s.b.y}].push_back(s.a);
      }
      const Vertex s = dual ? d.vLd() : d.vL(), t = dual ? d.vRd() : d.vR();
      std::map<int, int> hi, lo;
      std::set<std::pair<int, int>> on;
      std::vector<Vertex> stack;
      std::function<void(Vertex)> dfs = [&](Vertex v) {
        stack.push_back(v);
        on.insert({v.x, v.y});
        if (v == t) {
          for (Vertex p : stack) {
            hi[p.x] = hi.count(p.x) ? std::max(hi[p.x], p.y) : p.y;
            lo[p.x] = lo.count(p.x) ? std::min(lo[p.x], p.y) : p.y;
          }
        } else {
          for (Vertex u : adj[{v.x, v.y}])
            if (!on.count({u.x, u.y})) dfs(u);
        }
        on.erase({v.x, v.y});
        stack.pop_back();
      };
      dfs(s);
      for (bool top : {true, false}) {
        const std::vector<Vertex> path = extreme_path(d, w, s, t, top, dual);
        if (hi.empty()) {
          CHECK(path.empty());
          continue;
        }
        ++tested;
        REQUIRE(!path.empty());
        CHECK(path.front() == s);
        CHECK(path.back() == t);
        std::set<std::pair<int, int>> seen;
        std::map<int, int> ext;
        for (std::size_t i = 0; i < path.size(); ++i) {
          CHECK(seen.insert({path[i].x, path[i].y}).second);
          if (i > 0) {
            const int e = d.tile_at({(path[i].x + path[i - 1].x) / 2, (path[i].y + path[i - 1].y) / 2});
            REQUIRE(e >= 0);
            CHECK(w[e] != dual);
          }
          const int x = path[i].x, y = path[i].y;
          ext[x] = ext.count(x) ? (top ? std::max(ext[x], y) : std::min(ext[x], y)) : y;
        }
        for (auto [x, y] : top ? hi : lo) CHECK(ext[x] == y);
      }
    }
  }
  CHECK(tested > 50);
}

TEST_CASE("batch means and autocorrelation") {
  const Estimate c = batch_means(std::vector<double>(1000, 2.5));
  CHECK(c.mean == doctest::Approx(2.5));
  CHECK(c.half_width == doctest::Approx(0).epsilon(1e-12));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  std::vector<double> xs(400000);
  double x = 0;
  for (double& v : xs) v = x = 0.5 * x + z(gen);
  CHECK(integrated_autocorrelation(xs) == doctest::Approx(3).epsilon(0.1));
  std::vector<double> iid(100000);
  for (double& v : iid) v = z(gen);
  CHECK(integrated_autocorrelation(iid) == doctest::Approx(1).epsilon(0.1));
}
