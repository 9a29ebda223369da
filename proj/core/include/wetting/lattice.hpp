#pragma once

#include <array>
#include <cstdlib>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wetting {

// Lattice points in doubled coordinates: primal vertices have both
// coordinates even, dual vertices both odd, tile centres (edge midpoints)
// one of each.
struct Vertex {
  int x = 0;
  int y = 0;

  static constexpr Vertex primal(int x, int y) { return {2 * x, 2 * y}; }
  bool is_primal() const { return (x & 1) == 0 && (y & 1) == 0; }
  bool is_dual() const { return (x & 1) != 0 && (y & 1) != 0; }
  double rx() const { return x / 2.0; }
  double ry() const { return y / 2.0; }
  friend bool operator==(Vertex a, Vertex b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Vertex a, Vertex b) { return !(a == b); }
  friend bool operator<(Vertex a, Vertex b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }
  friend Vertex operator+(Vertex a, Vertex b) { return {a.x + b.x, a.y + b.y}; }
  friend Vertex operator-(Vertex a, Vertex b) { return {a.x - b.x, a.y - b.y}; }
  friend Vertex operator*(int s, Vertex a) { return {s * a.x, s * a.y}; }
};

// Quarter turn counter-clockwise.
inline Vertex rot90(Vertex v) { return {-v.y, v.x}; }

struct Segment {
  Vertex a, b;  // a < b
  bool is_dual() const { return a.is_dual(); }
  Vertex mid() const { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }
  friend bool operator==(const Segment& s, const Segment& t) { return s.a == t.a && s.b == t.b; }
};

Segment make_segment(Vertex a, Vertex b);
// The unique dual segment crossing s (works for either kind).
Segment dual_segment(const Segment& s);

struct EdgeId {
  int index = -1;
  bool dual = false;
  Segment seg;
};

struct CapacityError : std::length_error {
  using std::length_error::length_error;
};
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// One byte per edge; index space is the domain's edge array.
using BondConfig = std::vector<std::uint8_t>;

BondConfig complement(const BondConfig& w);
BondConfig config_from_mask(std::uint64_t mask, int len);
std::uint64_t config_mask(const BondConfig& w);
int open_count(const BondConfig& w);

class UnionFind {
 public:
  explicit UnionFind(int n = 0) { reset(n); }
  void reset(int n);
  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  bool unite(int a, int b);
  int components() const { return components_; }
  int size_of(int v) { return size_[find(v)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int components_ = 0;
};

// Spanning-subgraph view of an edge set: edge i joins ends[i][0], ends[i][1]
// in the (possibly identified) vertex set.
struct GraphView {
  int num_vertices = 0;
  std::vector<std::array<int, 2>> ends;
};

int cluster_count(const BondConfig& w, const GraphView& g);
bool connected(const BondConfig& w, const GraphView& g, int s, int t);

enum class View { K, K1, DualK, DualK1 };

struct Tile {
  Vertex center;
  int edge = -1;  // index of e_t; the tile carries the same index
  Segment primal, dual;
  bool boundary = false;  // tile of the ring E_b
};

class DobrushinDomain {
 public:
  static constexpr int kMaxEdges = 1 << 22;

  DobrushinDomain(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }

  // Ē = E followed by E_b.
  int num_edges() const { return static_cast<int>(tiles_.size()); }
  int num_interior() const { return num_interior_; }
  int num_boundary() const { return num_edges() - num_interior_; }
  bool is_interior(int e) const { return e < num_interior_; }
  const Tile& tile(int e) const { return tiles_[e]; }
  const std::vector<Tile>& tiles() const { return tiles_; }
  // Tile index from a doubled-coordinate centre, or -1 outside Ē.
  int tile_at(Vertex c) const;

  EdgeId edge(int e) const { return {e, false, tiles_[e].primal}; }
  EdgeId dual_edge(const EdgeId& e) const { return {e.index, !e.dual, dual_segment(e.seg)}; }

  // Primal vertices of V̄ = B_{n+1,m+1}.
  int num_primal() const { return pw_ * ph_; }
  int primal_index(Vertex v) const;
  Vertex primal_vertex(int i) const { return {2 * (i % pw_ - n_ - 1), 2 * (i / pw_ - m_ - 1)}; }
  bool in_B(Vertex v) const { return v.is_primal() && std::abs(v.x) <= 2 * n_ && std::abs(v.y) <= 2 * m_; }
  bool on_primal_ring(Vertex v) const;

  // Dual vertices of K' (the dual box including its four unused corners).
  int num_dual() const { return dw_ * dh_; }
  int dual_index(Vertex v) const;
  Vertex dual_vertex(int i) const { return {2 * (i % dw_) - 2 * n_ - 3, 2 * (i / dw_) - 2 * m_ - 3}; }
  bool in_Bdual(Vertex v) const {
    return v.is_dual() && std::abs(v.x) <= 2 * n_ + 1 && std::abs(v.y) <= 2 * m_ + 1;
  }
  bool on_dual_ring(Vertex v) const;

  Vertex vL() const { return Vertex::primal(-n_ - 1, 0); }
  Vertex vR() const { return Vertex::primal(n_ + 1, 0); }
  Vertex vLd() const { return {-2 * n_ - 3, -1}; }
  Vertex vRd() const { return {2 * n_ + 3, -1}; }
  // Ring tiles crossing y = -1/2.
  int t1() const { return t1_; }
  int t2() const { return t2_; }

  // Dobrushin values: + on y >= 0 for primal, y > -1/2 for dual.
  static int boundary_sign(Vertex v) { return v.y >= 0 ? 1 : -1; }

  // xi_{1/1} restricted to E_b: open except t1, t2.
  BondConfig xi() const;
  bool respects_xi(const BondConfig& w) const;

  const GraphView& view(View v) const;
  // Vertex id of a lattice point in a view, -1 if absent.
  int view_vertex(View v, Vertex p) const;

  // JSON descriptor: n, m, edge table, marked vertices.
  std::string to_json() const;

 private:
  int n_, m_;
  int pw_, ph_, dw_, dh_;
  int num_interior_ = 0;
  int t1_ = -1, t2_ = -1;
  std::vector<Tile> tiles_;
  std::vector<int> tile_lookup_;
  GraphView k_, k1_, dk_, dk1_;
  std::vector<int> k1_map_, dk_map_, dk1_map_;
};

int cluster_count(const BondConfig& w, const DobrushinDomain& d, View v);

}  // namespace wetting
