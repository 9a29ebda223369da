#include "doctest.h"

#include <set>
#include <utility>

#include "wetting/lattice.hpp"

using namespace wetting;

namespace {

// Unit segments of the box [-W, W] x [-H, H] in real coordinates.
std::set<std::pair<int, int>> box_edge_midpoints(int W, int H) {
  std::set<std::pair<int, int>> mids;
  for (int x = -W; x <= W; ++x)
    for (int y = -H; y <= H; ++y) {
      if (x < W) mids.insert({2 * x + 1, 2 * y});
      if (y < H) mids.insert({2 * x, 2 * y + 1});
    }
  return mids;
}

}  // namespace

TEST_CASE("K_{0,0} counts") {
  DobrushinDomain d(0, 0);
  CHECK(d.num_edges() == 12);
  int in_b = 0;
  for (int i = 0; i < d.num_primal(); ++i) in_b += d.in_B(d.primal_vertex(i));
  CHECK(in_b == 1);
  CHECK(d.num_primal() == 9);
}

TEST_CASE("edge table matches a brute-force scan") {
  for (auto [n, m] : {std::pair{0, 0}, {1, 0}, {2, 2}, {3, 1}}) {
    DobrushinDomain d(n, m);
    const auto mids = box_edge_midpoints(n + 1, m + 1);
    CHECK(d.num_edges() == static_cast<int>(mids.size()));
    int in_b = 0;
    for (int i = 0; i < d.num_primal(); ++i) in_b += d.in_B(d.primal_vertex(i));
    CHECK(in_b == (2 * n + 1) * (2 * m + 1));
    int touching = 0;
    for (auto [x, y] : mids) {
      const int e = d.tile_at({x, y});
      REQUIRE(e >= 0);
      const Segment s = d.tile(e).primal;
      const bool meets = d.in_B(s.a) || d.in_B(s.b);
      touching += meets;
      CHECK(d.is_interior(e) == meets);
    }
    CHECK(d.num_interior() == touching);
    CHECK(d.tile_at({2 * n + 5, 0}) == -1);
  }
}

TEST_CASE("marked vertices") {
  DobrushinDomain d(1, 0);
  CHECK(d.vL() == Vertex::primal(-2, 0));
  CHECK(d.vR() == Vertex::primal(2, 0));
  CHECK(d.vLd().rx() == -2.5);
  CHECK(d.vLd().ry() == -0.5);
  CHECK(d.vRd().rx() == 2.5);
}

TEST_CASE("dual segments") {
  const Segment h = make_segment(Vertex::primal(0, 0), Vertex::primal(1, 0));
  CHECK(dual_segment(h) == make_segment({1, -1}, {1, 1}));
  const Segment v = make_segment(Vertex::primal(0, 0), Vertex::primal(0, 1));
  CHECK(dual_segment(v) == make_segment({-1, 1}, {1, 1}));
  CHECK(dual_segment(h).is_dual());
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y)
      for (Vertex step : {Vertex{2, 0}, Vertex{0, 2}}) {
        const Segment s = make_segment(Vertex::primal(x, y), Vertex::primal(x, y) + step);
        CHECK(dual_segment(dual_segment(s)) == s);
        CHECK(dual_segment(s).mid() == s.mid());
      }
}

TEST_CASE("cluster counts on K_{0,0}") {
  DobrushinDomain d(0, 0);
  const BondConfig closed(d.num_edges(), 0), open(d.num_edges(), 1);
  CHECK(cluster_count(closed, d, View::K) == 9);
  // K^1 glues the upper and the lower inner boundary; only the centre is free.
  CHECK(cluster_count(closed, d, View::K1) == 3);
  CHECK(cluster_count(open, d, View::K) == 1);
  for (int n : {1, 2}) {
    DobrushinDomain e(n, n);
    CHECK(cluster_count(BondConfig(e.num_edges(), 1), e, View::K) == 1);
  }
}

TEST_CASE("xi is open except on the two ring tiles crossing y=-1/2") {
  DobrushinDomain d(2, 1);
  const BondConfig xi = d.xi();
  int closed = 0;
  for (int e = d.num_interior(); e < d.num_edges(); ++e) closed += !xi[e];
  CHECK(closed == 2);
  CHECK(!xi[d.t1()]);
  CHECK(!xi[d.t2()]);
  CHECK(d.tile(d.t1()).center.y == -1);
  CHECK(d.respects_xi(xi));
  BondConfig bad = xi;
  bad[d.t1()] = 1;
  CHECK(!d.respects_xi(bad));
}

TEST_CASE("bond helpers") {
  const BondConfig w = config_from_mask(0b1011, 5);
  CHECK(config_mask(w) == 0b1011);
  CHECK(open_count(w) == 3);
  CHECK(config_mask(complement(w)) == 0b10100);
  UnionFind uf(5);
  CHECK(uf.unite(0, 1));
  CHECK(!uf.unite(1, 0));
  uf.unite(3, 4);
  CHECK(uf.components() == 3);
  CHECK(uf.size_of(4) == 2);
}

TEST_CASE("indices and capacity") {
  DobrushinDomain d(1, 1);
  for (int i = 0; i < d.num_primal(); ++i) CHECK(d.primal_index(d.primal_vertex(i)) == i);
  for (int i = 0; i < d.num_dual(); ++i) CHECK(d.dual_index(d.dual_vertex(i)) == i);
  CHECK_THROWS_AS(DobrushinDomain(2000, 2000), CapacityError);
  CHECK(d.to_json().find("\"n\"") != std::string::npos);
}
