#include "wetting/lattice.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace wetting {

Segment make_segment(Vertex a, Vertex b) {
  if (b < a) std::swap(a, b);
  return {a, b};
}

Segment dual_segment(const Segment& s) {
  const Vertex c = s.mid();
  const Vertex h = s.b - c;
  return make_segment(c - rot90(h), c + rot90(h));
}

BondConfig complement(const BondConfig& w) {
  BondConfig r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[i] ? 0 : 1;
  return r;
}

BondConfig config_from_mask(std::uint64_t mask, int len) {
  BondConfig w(len);
  for (int i = 0; i < len; ++i) w[i] = (mask >> i) & 1u;
  return w;
}

std::uint64_t config_mask(const BondConfig& w) {
  if (w.size() > 64) throw CapacityError("config_mask: more than 64 edges");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i]) m |= std::uint64_t{1} << i;
  return m;
}

int open_count(const BondConfig& w) { return static_cast<int>(std::count(w.begin(), w.end(), 1)); }

void UnionFind::reset(int n) {
  parent_.resize(n);
  std::iota(parent_.begin(), parent_.end(), 0);
  size_.assign(n, 1);
  components_ = n;
}

bool UnionFind::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  --components_;
  return true;
}

int cluster_count(const BondConfig& w, const GraphView& g) {
  if (w.size() != g.ends.size()) throw IndexError("cluster_count: config length does not match view");
  UnionFind uf(g.num_vertices);
  for (std::size_t e = 0; e < w.size(); ++e)
    if (w[e]) uf.unite(g.ends[e][0], g.ends[e][1]);
  return uf.components();
}

bool connected(const BondConfig& w, const GraphView& g, int s, int t) {
  if (w.size() != g.ends.size()) throw IndexError("connected: config length does not match view");
  UnionFind uf(g.num_vertices);
  for (std::size_t e = 0; e < w.size(); ++e)
    if (w[e]) uf.unite(g.ends[e][0], g.ends[e][1]);
  return uf.find(s) == uf.find(t);
}

DobrushinDomain::DobrushinDomain(int n, int m) : n_(n), m_(m) {
  if (n < 0 || m < 0) throw std::invalid_argument("DobrushinDomain: negative size");
  pw_ = 2 * n + 3;
  ph_ = 2 * m + 3;
  dw_ = 2 * n + 4;
  dh_ = 2 * m + 4;
  const long long ne = 1LL * (pw_ - 1) * ph_ + 1LL * pw_ * (ph_ - 1);
  if (ne > kMaxEdges) throw CapacityError("DobrushinDomain: edge count above limit");

  std::vector<Tile> inner, ring;
  auto add = [&](Vertex a, Vertex b) {
    Tile t;
    t.primal = make_segment(a, b);
    t.center = t.primal.mid();
    t.dual = dual_segment(t.primal);
    t.boundary = !in_B(a) && !in_B(b);
    (t.boundary ? ring : inner).push_back(t);
  };
  for (int y = -m - 1; y <= m + 1; ++y)
    for (int x = -n - 1; x <= n + 1; ++x) {
      if (x <= n) add(Vertex::primal(x, y), Vertex::primal(x + 1, y));
      if (y <= m) add(Vertex::primal(x, y), Vertex::primal(x, y + 1));
    }
  auto row_major = [](const Tile& a, const Tile& b) {
    return a.center.y != b.center.y ? a.center.y < b.center.y : a.center.x < b.center.x;
  };
  std::sort(inner.begin(), inner.end(), row_major);
  std::sort(ring.begin(), ring.end(), row_major);
  num_interior_ = static_cast<int>(inner.size());
  tiles_ = std::move(inner);
  tiles_.insert(tiles_.end(), ring.begin(), ring.end());

  const int cw = 4 * n + 5, ch = 4 * m + 5;
  tile_lookup_.assign(static_cast<std::size_t>(cw) * ch, -1);
  for (int e = 0; e < num_edges(); ++e) {
    tiles_[e].edge = e;
    const Vertex c = tiles_[e].center;
    tile_lookup_[(c.y + 2 * m + 2) * cw + (c.x + 2 * n + 2)] = e;
  }
  t1_ = tile_at({-2 * n - 2, -1});
  t2_ = tile_at({2 * n + 2, -1});

  // K and K1.
  k_.num_vertices = num_primal();
  k1_map_.assign(num_primal(), -1);
  int next = 0;
  for (int i = 0; i < num_primal(); ++i)
    if (!on_primal_ring(primal_vertex(i))) k1_map_[i] = next++;
  for (int i = 0; i < num_primal(); ++i)
    if (on_primal_ring(primal_vertex(i))) k1_map_[i] = boundary_sign(primal_vertex(i)) > 0 ? next : next + 1;
  k1_.num_vertices = next + 2;

  // K' and (K')^1; the four corners of the dual box are not vertices of K'.
  dk_map_.assign(num_dual(), -1);
  dk1_map_.assign(num_dual(), -1);
  int nd = 0, nd1 = 0;
  auto corner = [&](Vertex v) { return std::abs(v.x) == 2 * n + 3 && std::abs(v.y) == 2 * m + 3; };
  for (int i = 0; i < num_dual(); ++i) {
    const Vertex v = dual_vertex(i);
    if (corner(v)) continue;
    dk_map_[i] = nd++;
    if (!on_dual_ring(v)) dk1_map_[i] = nd1++;
  }
  for (int i = 0; i < num_dual(); ++i) {
    const Vertex v = dual_vertex(i);
    if (!corner(v) && on_dual_ring(v)) dk1_map_[i] = boundary_sign(v) > 0 ? nd1 : nd1 + 1;
  }
  dk_.num_vertices = nd;
  dk1_.num_vertices = nd1 + 2;

  for (const Tile& t : tiles_) {
    const int a = primal_index(t.primal.a), b = primal_index(t.primal.b);
    k_.ends.push_back({a, b});
    k1_.ends.push_back({k1_map_[a], k1_map_[b]});
    const int u = dual_index(t.dual.a), v = dual_index(t.dual.b);
    dk_.ends.push_back({dk_map_[u], dk_map_[v]});
    dk1_.ends.push_back({dk1_map_[u], dk1_map_[v]});
  }
}

int DobrushinDomain::tile_at(Vertex c) const {
  const int cx = c.x + 2 * n_ + 2, cy = c.y + 2 * m_ + 2;
  const int cw = 4 * n_ + 5, ch = 4 * m_ + 5;
  if (cx < 0 || cy < 0 || cx >= cw || cy >= ch) return -1;
  return tile_lookup_[cy * cw + cx];
}

int DobrushinDomain::primal_index(Vertex v) const {
  if (!v.is_primal()) return -1;
  const int x = v.x / 2 + n_ + 1, y = v.y / 2 + m_ + 1;
  if (x < 0 || y < 0 || x >= pw_ || y >= ph_) return -1;
  return y * pw_ + x;
}

bool DobrushinDomain::on_primal_ring(Vertex v) const {
  return primal_index(v) >= 0 && (std::abs(v.x) == 2 * n_ + 2 || std::abs(v.y) == 2 * m_ + 2);
}

int DobrushinDomain::dual_index(Vertex v) const {
  if (!v.is_dual()) return -1;
  const int x = (v.x + 2 * n_ + 3) / 2, y = (v.y + 2 * m_ + 3) / 2;
  if (v.x < -2 * n_ - 3 || v.y < -2 * m_ - 3 || x >= dw_ || y >= dh_) return -1;
  return y * dw_ + x;
}

bool DobrushinDomain::on_dual_ring(Vertex v) const {
  return dual_index(v) >= 0 && (std::abs(v.x) == 2 * n_ + 3 || std::abs(v.y) == 2 * m_ + 3);
}

BondConfig DobrushinDomain::xi() const {
  BondConfig w(num_edges(), 0);
  for (int e = num_interior_; e < num_edges(); ++e) w[e] = (e == t1_ || e == t2_) ? 0 : 1;
  return w;
}

bool DobrushinDomain::respects_xi(const BondConfig& w) const {
  if (static_cast<int>(w.size()) != num_edges()) return false;
  for (int e = num_interior_; e < num_edges(); ++e)
    if (w[e] != ((e == t1_ || e == t2_) ? 0 : 1)) return false;
  return true;
}

const GraphView& DobrushinDomain::view(View v) const {
  switch (v) {
    case View::K: return k_;
    case View::K1: return k1_;
    case View::DualK: return dk_;
    case View::DualK1: return dk1_;
  }
  return k_;
}

int DobrushinDomain::view_vertex(View v, Vertex p) const {
  switch (v) {
    case View::K: return primal_index(p);
    case View::K1: {
      const int i = primal_index(p);
      return i < 0 ? -1 : k1_map_[i];
    }
    case View::DualK: {
      const int i = dual_index(p);
      return i < 0 ? -1 : dk_map_[i];
    }
    case View::DualK1: {
      const int i = dual_index(p);
      return i < 0 ? -1 : dk1_map_[i];
    }
  }
  return -1;
}

int cluster_count(const BondConfig& w, const DobrushinDomain& d, View v) { return cluster_count(w, d.view(v)); }

std::string DobrushinDomain::to_json() const {
  using nlohmann::json;
  auto pt = [](Vertex v) { return json::array({v.rx(), v.ry()}); };
  json j;
  j["n"] = n_;
  j["m"] = m_;
  j["num_interior"] = num_interior_;
  json edges = json::array();
  for (const Tile& t : tiles_)
    edges.push_back({{"index", t.edge}, {"a", pt(t.primal.a)}, {"b", pt(t.primal.b)}, {"boundary", t.boundary}});
  j["edges"] = std::move(edges);
  j["marked"] = {{"vL", pt(vL())}, {"vR", pt(vR())}, {"vL'", pt(vLd())}, {"vR'", pt(vRd())}};
  j["t1"] = t1_;
  j["t2"] = t2_;
  return j.dump();
}

}  // namespace wetting
