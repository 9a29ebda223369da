#include "wetting/bkw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wetting {

namespace {

struct Corners {
  Vertex i, j, u, v;
};

Corners corners(const Tile& t) {
  const Vertex c = t.center;
  const Vertex e = t.primal.b - c;
  return {t.primal.a, t.primal.b, c + rot90(e), c - rot90(e)};
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

struct TraceState {
  Vertex c, d;
  int s;
  bool operator==(const TraceState& o) const { return c == o.c && d == o.d && s == o.s; }
};

class Tracer {
 public:
  Tracer(const DobrushinDomain& d, const BondConfig& w) : d_(d), w_(w), limit_(2 * d.n() + 8) {}

  bool open_at(Vertex c) const {
    const int e = d_.tile_at(c);
    if (e >= 0) return w_[e] != 0;
    // xi_{1/1} outside Ē: only vertical edges crossing y = -1/2 are closed.
    const bool vertical = (c.x & 1) == 0;
    return !(vertical && c.y == -1);
  }

  TraceState next(const TraceState& st) const {
    const Vertex k = st.c + st.d;
    const Vertex m = st.c - st.s * rot90(st.d);
    const Vertex c2 = k + m - st.c;
    const bool k_pivot = open_at(c2) == k.is_dual();
    if (k_pivot) return {c2, k - c2, st.s};
    return {c2, m - c2, -st.s};
  }

  int arc_of(const TraceState& st) const {
    const int e = d_.tile_at(st.c);
    if (e < 0) return -1;
    const Vertex pivot = st.c + st.d;
    return 2 * e + (pivot == arc_pivot(d_.tile(e), w_[e] != 0, 0) ? 0 : 1);
  }

  bool escaped(const TraceState& st) const { return std::abs(st.c.x) > 2 * limit_; }

 private:
  const DobrushinDomain& d_;
  const BondConfig& w_;
  int limit_;
};

}  // namespace

Vertex arc_pivot(const Tile& t, bool open, int k) {
  const Corners q = corners(t);
  if (open) return k == 0 ? q.u : q.v;
  return k == 0 ? q.i : q.j;
}

LoopConfig loops_from_bonds(const DobrushinDomain& d, const BondConfig& w) {
  if (static_cast<int>(w.size()) != d.num_edges()) throw IndexError("loops_from_bonds: config length");
  if (!d.respects_xi(w)) throw std::invalid_argument("loops_from_bonds: boundary edges must follow xi_{1/1}");
  const GraphView& g = d.view(View::K1);
  if (connected(w, g, d.view_vertex(View::K1, d.vR()), d.view_vertex(View::K1, Vertex::primal(d.n() + 1, -1))))
    throw EventViolation("loops_from_bonds: upper and lower boundaries are connected");

  LoopConfig L;
  L.domain = &d;
  L.open = w;
  const int num_arcs = 2 * d.num_edges();
  L.arc_loop.assign(num_arcs, -1);
  const Tracer tr(d, w);
  const long max_steps = 16L * (d.num_edges() + 64) + 64L * (d.n() + 8);

  for (int a = 0; a < num_arcs; ++a) {
    if (L.arc_loop[a] >= 0) continue;
    const Tile& t = d.tile(a / 2);
    const TraceState start{t.center, arc_pivot(t, w[a / 2] != 0, a % 2) - t.center, 1};
    Loop loop;
    bool outside = false, closed = false;
    int escape = 0;
    TraceState st = start;
    for (long step = 0;; ++step) {
      if (step > max_steps) throw std::logic_error("loops_from_bonds: trace did not terminate");
      const int arc = tr.arc_of(st);
      if (arc >= 0) {
        loop.arcs.push_back(arc);
        loop.sense.push_back(static_cast<std::int8_t>(st.s));
      } else {
        outside = true;
      }
      loop.winding += st.s;
      st = tr.next(st);
      if (st == start) {
        closed = true;
        break;
      }
      if (tr.escaped(st)) {
        escape = st.c.x > 0 ? 1 : -1;
        break;
      }
    }
    if (closed) {
      loop.kind = outside ? LoopKind::Exterior : LoopKind::Free;
    } else {
      // Follow the strand the other way and splice it in front.
      std::vector<int> back_arcs;
      std::vector<std::int8_t> back_sense;
      TraceState bt = tr.next({start.c, start.d, -1});
      for (long step = 0; !tr.escaped(bt); ++step) {
        if (step > max_steps) throw std::logic_error("loops_from_bonds: trace did not terminate");
        const int arc = tr.arc_of(bt);
        if (arc >= 0) {
          back_arcs.push_back(arc);
          back_sense.push_back(static_cast<std::int8_t>(-bt.s));
        }
        bt = tr.next(bt);
      }
      std::reverse(back_arcs.begin(), back_arcs.end());
      std::reverse(back_sense.begin(), back_sense.end());
      back_arcs.insert(back_arcs.end(), loop.arcs.begin(), loop.arcs.end());
      back_sense.insert(back_sense.end(), loop.sense.begin(), loop.sense.end());
      loop.arcs = std::move(back_arcs);
      loop.sense = std::move(back_sense);
      // Interface paths run from right to left.
      if (escape > 0) {
        std::reverse(loop.arcs.begin(), loop.arcs.end());
        std::reverse(loop.sense.begin(), loop.sense.end());
        for (auto& s : loop.sense) s = static_cast<std::int8_t>(-s);
      }
      loop.winding = 0;
      loop.kind = LoopKind::UpperPath;  // fixed below
    }
    const int id = static_cast<int>(L.loops.size());
    for (int arc : loop.arcs) L.arc_loop[arc] = id;
    if (loop.kind == LoopKind::Free) L.free_loops.push_back(id);
    L.loops.push_back(std::move(loop));
  }

  // In t1 (closed, vertical) arc 1 turns around the upper corner.
  L.upper = L.arc_loop[2 * d.t1() + 1];
  L.lower = L.arc_loop[2 * d.t1()];
  if (L.upper == L.lower) throw std::logic_error("loops_from_bonds: interface paths coincide");
  L.loops[L.lower].kind = LoopKind::LowerPath;
  for (std::size_t i = 0; i < L.loops.size(); ++i) {
    const bool is_path = static_cast<int>(i) == L.upper || static_cast<int>(i) == L.lower;
    const bool open_kind = L.loops[i].kind == LoopKind::UpperPath || L.loops[i].kind == LoopKind::LowerPath;
    if (is_path != open_kind) throw std::logic_error("loops_from_bonds: unexpected bi-infinite strand");
  }
  return L;
}

BondConfig bonds_from_loops(const LoopConfig& l) { return l.open; }

std::string to_string(TileType t) {
  static const char* names[] = {"1", "2", "3", "4", "5A", "5B", "6A", "6B"};
  return names[static_cast<int>(t)];
}

int type_number(TileType t) {
  static const int num[] = {1, 2, 3, 4, 5, 5, 6, 6};
  return num[static_cast<int>(t)];
}

CouplingThresholds CouplingThresholds::from(const CriticalParams& cp) {
  CouplingThresholds th;
  th.clockwise = cp.clockwise_threshold();
  th.split = cp.split_threshold();
  th.one_over_c = 1.0 / cp.c;
  th.two_over_c = 2.0 / cp.c;
  th.one_over_cb = 1.0 / cp.c_b;
  return th;
}

double CouplingThresholds::p_clockwise() const { return clamp01(clockwise); }
double CouplingThresholds::p_split() const { return clamp01(split); }
double CouplingThresholds::p11() const { return clamp01(one_over_c); }
double CouplingThresholds::p00() const { return std::max(0.0, clamp01(two_over_c) - clamp01(one_over_c)); }
double CouplingThresholds::p01() const { return 1.0 - std::max(clamp01(one_over_c), clamp01(two_over_c)); }
double CouplingThresholds::pb11() const { return clamp01(one_over_cb); }

OrientedLoops orient_loops_bits(const LoopConfig& l, const std::vector<std::uint8_t>& clockwise) {
  if (static_cast<int>(clockwise.size()) != l.num_free())
    throw std::invalid_argument("orient_loops: one orientation per free loop expected");
  const DobrushinDomain& d = *l.domain;
  OrientedLoops o;
  o.open = l.open;
  o.arc_sense.assign(l.arc_loop.size(), 0);
  o.loop_cw.assign(l.loops.size(), 0);
  std::vector<int> free_index(l.loops.size(), -1);
  for (int i = 0; i < l.num_free(); ++i) free_index[l.free_loops[i]] = i;
  for (std::size_t i = 0; i < l.loops.size(); ++i) {
    const Loop& lp = l.loops[i];
    bool flip = false;
    if (lp.kind == LoopKind::Free || lp.kind == LoopKind::Exterior) {
      const bool want_cw = lp.kind == LoopKind::Exterior || clockwise[free_index[i]] != 0;
      const bool traced_ccw = lp.winding > 0;
      flip = want_cw == traced_ccw;
      o.loop_cw[i] = want_cw ? 1 : 0;
    }
    for (std::size_t k = 0; k < lp.arcs.size(); ++k)
      o.arc_sense[lp.arcs[k]] = static_cast<std::int8_t>(flip ? -lp.sense[k] : lp.sense[k]);
  }
  o.types.resize(d.num_edges());
  for (int e = 0; e < d.num_edges(); ++e) {
    const int a = o.arc_sense[2 * e], b = o.arc_sense[2 * e + 1];
    if (l.open[e]) {
      o.types[e] = a > 0 ? (b > 0 ? TileType::T5A : TileType::T1) : (b > 0 ? TileType::T2 : TileType::T6A);
    } else {
      o.types[e] = a > 0 ? (b > 0 ? TileType::T6B : TileType::T3) : (b > 0 ? TileType::T4 : TileType::T5B);
    }
  }
  return o;
}

OrientedLoops orient_loops(const LoopConfig& l, const std::vector<double>& U, const CouplingThresholds& th) {
  if (static_cast<int>(U.size()) < l.num_free()) throw std::invalid_argument("orient_loops: missing uniforms");
  std::vector<std::uint8_t> cw(l.num_free());
  for (int i = 0; i < l.num_free(); ++i) cw[i] = U[i] < th.clockwise ? 1 : 0;
  return orient_loops_bits(l, cw);
}

SpinPair spins_from_orientations(const DobrushinDomain& d, const OrientedLoops& o, int root) {
  const int np = d.num_primal();
  const int nn = np + d.num_dual();
  std::vector<std::vector<std::pair<int, int>>> adj(nn);
  auto node = [&](Vertex v) { return v.is_primal() ? d.primal_index(v) : np + d.dual_index(v); };
  for (int e = 0; e < d.num_edges(); ++e) {
    const Tile& t = d.tile(e);
    for (int k = 0; k < 2; ++k) {
      const Vertex p = arc_pivot(t, o.open[e] != 0, k);
      const int s = o.arc_sense[2 * e + k];
      // sigma_prim * sigma_dual across a side is +1 iff the primal end lies
      // to the left of the arrow.
      const int r = p.is_primal() ? s : -s;
      const Vertex dd = p - t.center;
      for (const Vertex q : {t.center + rot90(dd), t.center - rot90(dd)}) {
        adj[node(p)].push_back({node(q), r});
        adj[node(q)].push_back({node(p), r});
      }
    }
  }
  std::vector<int> val(nn, 0);
  const int r0 = d.primal_index(d.vR());
  val[r0] = root;
  std::vector<int> queue{r0};
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int x = queue[h];
    for (auto [y, r] : adj[x]) {
      const int want = val[x] * r;
      if (val[y] == 0) {
        val[y] = want;
        queue.push_back(y);
      } else if (val[y] != want) {
        throw SpinInconsistency("spins_from_orientations: arc orientations do not match");
      }
    }
  }
  SpinPair sp;
  sp.primal.assign(val.begin(), val.begin() + np);
  sp.dual.assign(val.begin() + np, val.end());
  return sp;
}

bool has_dobrushin_boundary(const DobrushinDomain& d, const SpinPair& s) {
  for (int i = 0; i < d.num_primal(); ++i) {
    const Vertex v = d.primal_vertex(i);
    if (d.on_primal_ring(v) && s.primal[i] != DobrushinDomain::boundary_sign(v)) return false;
  }
  for (int i = 0; i < d.num_dual(); ++i) {
    const Vertex v = d.dual_vertex(i);
    if (d.view_vertex(View::DualK, v) < 0) continue;
    if (d.on_dual_ring(v) && s.dual[i] != DobrushinDomain::boundary_sign(v)) return false;
  }
  return true;
}

namespace {

struct TileSpins {
  int si, sj, su, sv;
};

TileSpins tile_spins(const DobrushinDomain& d, const SpinPair& s, const Tile& t) {
  const Corners q = corners(t);
  return {s.primal[d.primal_index(q.i)], s.primal[d.primal_index(q.j)], s.dual[d.dual_index(q.u)],
          s.dual[d.dual_index(q.v)]};
}

int type_of(const TileSpins& x) {
  const bool prim_agree = x.si == x.sj, dual_agree = x.su == x.sv;
  if (!prim_agree && !dual_agree) return 0;
  if (prim_agree && dual_agree) return x.si * x.su < 0 ? 5 : 6;
  if (prim_agree) {
    const int su = -x.si * x.su;  // sense of the arc around u
    return su > 0 ? 1 : 2;
  }
  const int si = x.si * x.su;  // sense of the arc around i
  return si > 0 ? 3 : 4;
}

}  // namespace

bool satisfies_ice_rule(const DobrushinDomain& d, const SpinPair& s) {
  for (const Tile& t : d.tiles())
    if (type_of(tile_spins(d, s, t)) == 0) return false;
  return true;
}

std::vector<int> tile_types(const DobrushinDomain& d, const SpinPair& s) {
  std::vector<int> out(d.num_edges());
  for (const Tile& t : d.tiles()) {
    out[t.edge] = type_of(tile_spins(d, s, t));
    if (out[t.edge] == 0) throw IceRuleViolation("tile_types: ice rule violated");
  }
  return out;
}

int count_t56(const DobrushinDomain& d, const std::vector<int>& types, bool boundary) {
  int c = 0;
  for (int e = 0; e < d.num_edges(); ++e)
    if (types[e] >= 5 && d.is_interior(e) != boundary) ++c;
  return c;
}

namespace {

struct SpinIndex {
  std::vector<int> B, Bd;  // primal / dual indices carrying a bit
  explicit SpinIndex(const DobrushinDomain& d) {
    for (int i = 0; i < d.num_primal(); ++i)
      if (d.in_B(d.primal_vertex(i))) B.push_back(i);
    for (int i = 0; i < d.num_dual(); ++i)
      if (d.in_Bdual(d.dual_vertex(i))) Bd.push_back(i);
  }
  int bits() const { return static_cast<int>(B.size() + Bd.size()); }
};

}  // namespace

int spin_bits(const DobrushinDomain& d) { return SpinIndex(d).bits(); }

std::uint64_t spin_key(const DobrushinDomain& d, const SpinPair& s) {
  const SpinIndex ix(d);
  if (ix.bits() > 62) throw CapacityError("spin_key: too many spins");
  std::uint64_t key = 0;
  int bit = 0;
  for (int i : ix.B) key |= std::uint64_t(s.primal[i] > 0) << bit++;
  for (int i : ix.Bd) key |= std::uint64_t(s.dual[i] > 0) << bit++;
  return key;
}

SpinPair spin_from_key(const DobrushinDomain& d, std::uint64_t key) {
  const SpinIndex ix(d);
  SpinPair s;
  s.primal.assign(d.num_primal(), 0);
  s.dual.assign(d.num_dual(), 0);
  for (int i = 0; i < d.num_primal(); ++i) s.primal[i] = static_cast<std::int8_t>(DobrushinDomain::boundary_sign(d.primal_vertex(i)));
  for (int i = 0; i < d.num_dual(); ++i)
    if (d.view_vertex(View::DualK, d.dual_vertex(i)) >= 0)
      s.dual[i] = static_cast<std::int8_t>(DobrushinDomain::boundary_sign(d.dual_vertex(i)));
  int bit = 0;
  for (int i : ix.B) s.primal[i] = ((key >> bit++) & 1u) ? 1 : -1;
  for (int i : ix.Bd) s.dual[i] = ((key >> bit++) & 1u) ? 1 : -1;
  return s;
}

BondConfig fk_from_spins_choice(const DobrushinDomain& d, const SpinPair& s, const std::vector<int>& types,
                                const std::vector<std::uint8_t>& right) {
  (void)s;
  BondConfig w = d.xi();
  for (int e = 0; e < d.num_interior(); ++e) {
    switch (types[e]) {
      case 1:
      case 2: w[e] = 1; break;
      case 3:
      case 4: w[e] = 0; break;
      // Right-oriented pair: 5B (closed) or 6A (open); left pair: 5A / 6B.
      case 5: w[e] = right[e] ? 0 : 1; break;
      case 6: w[e] = right[e] ? 1 : 0; break;
      default: throw IceRuleViolation("fk_from_spins: ice rule violated");
    }
  }
  return w;
}

AtrcConfig matrc_from_spins_choice(const DobrushinDomain& d, const SpinPair& s, const std::vector<int>& types,
                                   const std::vector<std::uint8_t>& state) {
  AtrcConfig x{BondConfig(d.num_edges(), 0), BondConfig(d.num_edges(), 0)};
  for (const Tile& t : d.tiles()) {
    const int e = t.edge;
    const TileSpins sp = tile_spins(d, s, t);
    if (sp.su != sp.sv) {
      x.tau[e] = x.tautau[e] = 1;
    } else if (sp.si != sp.sj) {
      x.tau[e] = x.tautau[e] = 0;
    } else {
      if (types[e] < 5) throw std::logic_error("matrc_from_spins: inconsistent tile types");
      if (state[e] == 1 && !d.is_interior(e)) throw std::invalid_argument("matrc_from_spins: (0,1) on a ring tile");
      x.tau[e] = state[e] == 2;
      x.tautau[e] = state[e] >= 1;
    }
  }
  return x;
}

BondConfig fk_from_spins(const DobrushinDomain& d, const SpinPair& s, const std::vector<double>& Uprime,
                         const CouplingThresholds& th) {
  const std::vector<int> types = tile_types(d, s);
  std::vector<std::uint8_t> right(d.num_edges(), 0);
  for (int e = 0; e < d.num_interior(); ++e) right[e] = Uprime[e] < th.split;
  return fk_from_spins_choice(d, s, types, right);
}

AtrcConfig matrc_from_spins(const DobrushinDomain& d, const SpinPair& s, const std::vector<double>& Uprime,
                            const CouplingThresholds& th) {
  const std::vector<int> types = tile_types(d, s);
  std::vector<std::uint8_t> state(d.num_edges(), 0);
  for (int e = 0; e < d.num_edges(); ++e) {
    const double u = Uprime[e];
    if (d.is_interior(e))
      state[e] = u < th.one_over_c ? 2 : (u < th.two_over_c ? 0 : 1);
    else
      state[e] = u < th.one_over_cb ? 2 : 0;
  }
  return matrc_from_spins_choice(d, s, types, state);
}

ChainSample run_chain(const DobrushinDomain& d, const BondConfig& w, const CouplingThresholds& th, Rng& rng) {
  ChainSample out;
  out.omega = w;
  out.loops = loops_from_bonds(d, w);
  std::vector<double> U(out.loops.num_free());
  for (double& u : U) u = rng.uniform();
  out.oriented = orient_loops(out.loops, U, th);
  out.spins = spins_from_orientations(d, out.oriented);
  std::vector<double> Up(d.num_edges());
  for (double& u : Up) u = rng.uniform();
  out.atrc = matrc_from_spins(d, out.spins, Up, th);
  return out;
}

}  // namespace wetting
