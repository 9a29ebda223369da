#include "wetting/interfaces.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace wetting {

namespace {

// Flood fill on the primal grid of V̄. Returns, per column x = -n..n, the
// lowest and highest reached row (INT_MAX / INT_MIN when none).
struct ColumnRange {
  std::vector<int> lo, hi;
};

ColumnRange flood(const DobrushinDomain& d, const std::vector<int>& colour, bool seed_upper,
                  const std::function<bool(int)>& allowed, bool diagonal) {
  const int n = d.n(), m = d.m();
  const int w = 2 * n + 3, h = 2 * m + 3;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::deque<int> queue;
  for (int i = 0; i < d.num_primal(); ++i) {
    const Vertex v = d.primal_vertex(i);
    if (!d.on_primal_ring(v)) continue;
    if ((DobrushinDomain::boundary_sign(v) > 0) != seed_upper) continue;
    seen[i] = 1;
    queue.push_back(i);
  }
  static const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
  static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1}, dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int deg = diagonal ? 8 : 4;
  const int* dx = diagonal ? dx8 : dx4;
  const int* dy = diagonal ? dy8 : dy4;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const int x = i % w, y = i / w;
    for (int k = 0; k < deg; ++k) {
      const int x2 = x + dx[k], y2 = y + dy[k];
      if (x2 < 0 || y2 < 0 || x2 >= w || y2 >= h) continue;
      const int j = y2 * w + x2;
      if (seen[j]) continue;
      // Ring sites carry the exterior values and were seeded already.
      if (d.on_primal_ring(d.primal_vertex(j))) continue;
      if (!allowed(colour[j])) continue;
      seen[j] = 1;
      queue.push_back(j);
    }
  }
  ColumnRange r;
  r.lo.assign(2 * n + 1, std::numeric_limits<int>::max());
  r.hi.assign(2 * n + 1, std::numeric_limits<int>::min());
  for (int i = 0; i < d.num_primal(); ++i) {
    if (!seen[i]) continue;
    const Vertex v = d.primal_vertex(i);
    const int k = v.x / 2;
    if (k < -n || k > n) continue;
    r.lo[k + n] = std::min(r.lo[k + n], v.y / 2);
    r.hi[k + n] = std::max(r.hi[k + n], v.y / 2);
  }
  return r;
}

Envelope make_env(const std::string& label, int n) {
  Envelope e;
  e.label = label;
  e.n = n;
  e.y.assign(2 * n + 1, 0);
  return e;
}

int lattice_dist(Vertex a, Vertex b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

bool edge_open(const DobrushinDomain& d, const BondConfig& w, Vertex a, Vertex b, bool dual) {
  const int e = d.tile_at(Vertex{(a.x + b.x) / 2, (a.y + b.y) / 2});
  if (e < 0) return false;
  return dual ? w[e] == 0 : w[e] != 0;
}

// BFS cluster of s over open edges (primal) or open dual edges.
PointSet cluster_of(const DobrushinDomain& d, const BondConfig& w, Vertex s, bool dual) {
  PointSet out;
  const int nv = dual ? d.num_dual() : d.num_primal();
  auto index = [&](Vertex v) { return dual ? d.dual_index(v) : d.primal_index(v); };
  std::vector<std::uint8_t> seen(nv, 0);
  std::deque<Vertex> queue{s};
  seen[index(s)] = 1;
  static const Vertex dirs[] = {{2, 0}, {-2, 0}, {0, 2}, {0, -2}};
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    out.vertices.push_back(v);
    for (Vertex dir : dirs) {
      const Vertex u = v + dir;
      if (!edge_open(d, w, v, u, dual)) continue;
      if (v < u) out.edges.push_back(make_segment(v, u));
      const int j = index(u);
      if (j < 0 || seen[j]) continue;
      seen[j] = 1;
      queue.push_back(u);
    }
  }
  return out;
}

}  // namespace

EnvelopeSet potts_envelopes(const DobrushinDomain& d, const std::vector<int>& colour) {
  if (static_cast<int>(colour.size()) != d.num_primal()) throw IndexError("potts_envelopes: colour length");
  const int n = d.n();
  EnvelopeSet e{make_env("Potts 1+", n), make_env("Potts 1-", n), make_env("Potts 2+", n), make_env("Potts 2-", n)};
  const ColumnRange not1_low = flood(d, colour, false, [](int c) { return c != 1; }, false);
  const ColumnRange is1_up = flood(d, colour, true, [](int c) { return c == 1; }, true);
  const ColumnRange is2_low = flood(d, colour, false, [](int c) { return c == 2; }, false);
  const ColumnRange not2_up = flood(d, colour, true, [](int c) { return c != 2; }, true);
  for (int k = 0; k <= 2 * n; ++k) {
    e[0].y[k] = not1_low.hi[k] + 1;
    e[1].y[k] = is1_up.lo[k] - 1;
    e[2].y[k] = is2_low.hi[k] + 1;
    e[3].y[k] = not2_up.lo[k] - 1;
  }
  return e;
}

EnvelopeSet fk_envelopes(const DobrushinDomain& d, const BondConfig& w) {
  if (static_cast<int>(w.size()) != d.num_edges()) throw IndexError("fk_envelopes: config length");
  const int n = d.n(), m = d.m();
  const GraphView& k = d.view(View::K);
  UnionFind uf(k.num_vertices);
  for (int e = 0; e < d.num_edges(); ++e)
    if (w[e]) uf.unite(k.ends[e][0], k.ends[e][1]);
  const int up = uf.find(d.primal_index(d.vR()));
  const int low = uf.find(d.primal_index(Vertex::primal(n + 1, -1)));
  if (up == low) throw EventViolation("fk_envelopes: upper and lower boundaries are connected");

  const GraphView& dk = d.view(View::DualK);
  UnionFind duf(dk.num_vertices);
  for (int e = 0; e < d.num_edges(); ++e)
    if (!w[e]) duf.unite(dk.ends[e][0], dk.ends[e][1]);
  const int droot = duf.find(d.view_vertex(View::DualK, d.vLd()));

  EnvelopeSet env{make_env("FK 1+", n), make_env("FK 1-", n), make_env("FK 2+", n), make_env("FK 2-", n)};
  for (int c = -n; c <= n; ++c) {
    int lo_up = std::numeric_limits<int>::max(), hi_low = std::numeric_limits<int>::min();
    for (int y = -m - 1; y <= m + 1; ++y) {
      const int r = uf.find(d.primal_index(Vertex::primal(c, y)));
      if (r == up) lo_up = std::min(lo_up, y);
      if (r == low) hi_low = std::max(hi_low, y);
    }
    // Dual cluster of v'_L in the columns c -+ 1/2 (doubled: 2c -+ 1).
    int dmax = std::numeric_limits<int>::min(), dmin = std::numeric_limits<int>::max();
    for (int sx : {2 * c - 1, 2 * c + 1})
      for (int Y = -2 * m - 3; Y <= 2 * m + 3; Y += 2) {
        const int id = d.view_vertex(View::DualK, Vertex{sx, Y});
        if (id < 0 || duf.find(id) != droot) continue;
        dmax = std::max(dmax, Y);
        dmin = std::min(dmin, Y);
      }
    if (dmin > dmax) throw std::logic_error("fk_envelopes: dual crossing misses a column");
    env[0].y[c + n] = (dmax + 1) / 2;
    env[1].y[c + n] = lo_up - 1;
    env[2].y[c + n] = hi_low + 1;
    env[3].y[c + n] = (dmin - 1) / 2;
  }
  return env;
}

int layer_gap(const EnvelopeSet& e, int k) { return (e[1].at(k) + 1) - (e[2].at(k) - 1); }

int envelope_width(const EnvelopeSet& e) {
  int w = std::numeric_limits<int>::min();
  for (int s = 0; s < 2; ++s)
    for (std::size_t k = 0; k < e[2 * s].y.size(); ++k) w = std::max(w, e[2 * s].y[k] - e[2 * s + 1].y[k]);
  return w - 1;
}

double RescaledPath::operator()(double t) const {
  if (t < 0 || t > 1) throw std::out_of_range("RescaledPath: t outside [0,1]");
  const double s = 2.0 * t * n - n;
  const double fl = std::floor(s);
  const double frac = s - fl;
  const int lo = static_cast<int>(fl) + n;
  const int hi = std::min(lo + 1, 2 * n);
  return (1 - frac) * knots[lo] + frac * knots[hi];
}

RescaledPath rescale(const Envelope& env) {
  RescaledPath p;
  p.n = env.n;
  const double s = 1.0 / std::sqrt(static_cast<double>(env.n));
  for (int v : env.y) p.knots.push_back(v * s);
  return p;
}

std::vector<Vertex> extreme_path(const DobrushinDomain& d, const BondConfig& w, Vertex s, Vertex t, bool top,
                                 bool dual) {
  const PointSet cl = cluster_of(d, w, s, dual);
  if (std::find(cl.vertices.begin(), cl.vertices.end(), t) == cl.vertices.end()) return {};
  // Boundary walk of the face on the top (left-hand rule) or bottom side,
  // entering s from the horizontal ray on its left.
  std::vector<Vertex> walk{s};
  Vertex v = s, h{2, 0};
  const long limit = 8L * d.num_edges() + 16;
  for (long step = 0; v != t; ++step) {
    if (step > limit) throw std::logic_error("extreme_path: boundary walk did not reach the target");
    const Vertex turn = top ? rot90(h) : Vertex{0, 0} - rot90(h);
    const Vertex tries[] = {turn, h, Vertex{0, 0} - turn, Vertex{0, 0} - h};
    for (Vertex dir : tries) {
      if (!edge_open(d, w, v, v + dir, dual)) continue;
      v = v + dir;
      h = dir;
      break;
    }
    walk.push_back(v);
  }
  // Chronological loop erasure.
  std::vector<Vertex> path;
  std::map<std::pair<int, int>, std::size_t> pos;
  for (Vertex x : walk) {
    const auto key = std::make_pair(x.x, x.y);
    auto it = pos.find(key);
    if (it != pos.end()) {
      for (std::size_t k = it->second + 1; k < path.size(); ++k) pos.erase({path[k].x, path[k].y});
      path.resize(it->second + 1);
    } else {
      pos[key] = path.size();
      path.push_back(x);
    }
  }
  return path;
}

CrossingClusters atrc_clusters(const DobrushinDomain& d, const AtrcConfig& x) {
  CrossingClusters c;
  c.primal = cluster_of(d, x.tau, d.vL(), false);
  c.dual = cluster_of(d, x.tautau, d.vLd(), true);
  c.primal_crossing = std::find(c.primal.vertices.begin(), c.primal.vertices.end(), d.vR()) != c.primal.vertices.end();
  c.dual_crossing = std::find(c.dual.vertices.begin(), c.dual.vertices.end(), d.vRd()) != c.dual.vertices.end();
  if (c.primal_crossing) c.top_path = extreme_path(d, x.tau, d.vL(), d.vR(), true, false);
  if (c.dual_crossing) c.bottom_path = extreme_path(d, x.tautau, d.vLd(), d.vRd(), false, true);
  return c;
}

double hausdorff_one_sided(const std::vector<Vertex>& R, const std::vector<Vertex>& S) {
  if (R.empty() || S.empty()) throw EmptySetError("hausdorff_one_sided: empty set");
  int worst = 0;
  for (Vertex r : R) {
    int best = std::numeric_limits<int>::max();
    for (Vertex s : S) {
      best = std::min(best, lattice_dist(r, s));
      if (best <= worst) break;
    }
    worst = std::max(worst, best);
  }
  return worst / 2.0;
}

double set_distance(const std::vector<Vertex>& R, const std::vector<Vertex>& S) {
  if (R.empty() || S.empty()) return std::numeric_limits<double>::infinity();
  int best = std::numeric_limits<int>::max();
  for (Vertex r : R)
    for (Vertex s : S) best = std::min(best, lattice_dist(r, s));
  return best / 2.0;
}

std::vector<Vertex> slab(const std::vector<Vertex>& V, double a, double b) {
  std::vector<Vertex> out;
  for (Vertex v : V)
    if (v.rx() >= a && v.rx() <= b) out.push_back(v);
  return out;
}

ConeDecomposition cone_points(const std::vector<Vertex>& V) {
  ConeDecomposition out;
  if (V.empty()) return out;
  std::map<int, std::pair<int, int>> col;  // x -> (min y, max y)
  std::map<int, int> count;
  for (Vertex v : V) {
    auto [it, fresh] = col.try_emplace(v.x, v.y, v.y);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v.y);
      it->second.second = std::max(it->second.second, v.y);
    }
    ++count[v.x];
  }
  for (const auto& [x, range] : col) {
    // A second point in the same column is outside both cones.
    if (count[x] != 1) continue;
    const int y = range.first;
    bool ok = true;
    for (const auto& [x2, r2] : col) {
      const int dx = std::abs(x2 - x);
      if (std::abs(r2.first - y) > dx || std::abs(r2.second - y) > dx) {
        ok = false;
        break;
      }
    }
    if (ok) out.points.push_back({x, y});
  }
  return out;
}

std::vector<Vertex> ConeDecomposition::in_slab(double a, double b) const { return slab(points, a, b); }

bool ConeDecomposition::in_envelope(Vertex p) const {
  for (std::size_t k = 1; k < points.size(); ++k)
    if (in_diamond(points[k - 1], points[k], p)) return true;
  return false;
}

bool ConeDecomposition::in_end_cones(Vertex p) const {
  if (points.empty()) return false;
  return in_forward_cone(p, points.front()) || in_forward_cone(points.back(), p);
}

double ConeDecomposition::upper(double x) const {
  if (points.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (x <= points.front().x) return points.front().y + (points.front().x - x);
  if (x >= points.back().x) return points.back().y + (x - points.back().x);
  auto it = std::upper_bound(points.begin(), points.end(), x, [](double v, Vertex p) { return v < p.x; });
  const Vertex v = *it, u = *(it - 1);
  return std::min(u.y + (x - u.x), v.y + (v.x - x));
}

double ConeDecomposition::lower(double x) const {
  if (points.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (x <= points.front().x) return points.front().y - (points.front().x - x);
  if (x >= points.back().x) return points.back().y - (x - points.back().x);
  auto it = std::upper_bound(points.begin(), points.end(), x, [](double v, Vertex p) { return v < p.x; });
  const Vertex v = *it, u = *(it - 1);
  return std::max(u.y - (x - u.x), v.y - (v.x - x));
}

namespace {

// Raster of C (plus its horizontal rays) and a flood from the top or bottom.
bool side_test(const PointSet& R, const PointSet& C, bool weak, bool from_top) {
  if (C.empty()) throw EmptySetError("is_above: empty reference set");
  int x0 = std::numeric_limits<int>::max(), x1 = std::numeric_limits<int>::min();
  int y0 = x0, y1 = x1;
  auto grow = [&](Vertex v) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  };
  for (Vertex v : C.vertices) grow(v);
  for (Vertex v : R.vertices) grow(v);
  x0 -= 2;
  x1 += 2;
  y0 -= 2;
  y1 += 2;
  const int w = x1 - x0 + 1, h = y1 - y0 + 1;
  std::vector<std::uint8_t> wall(static_cast<std::size_t>(w) * h, 0), seen(wall.size(), 0);
  auto at = [&](int x, int y) { return static_cast<std::size_t>(y - y0) * w + (x - x0); };
  int cmin = std::numeric_limits<int>::max(), cmax = std::numeric_limits<int>::min();
  for (Vertex v : C.vertices) {
    wall[at(v.x, v.y)] = 1;
    cmin = std::min(cmin, v.x);
    cmax = std::max(cmax, v.x);
  }
  for (const Segment& s : C.edges) {
    wall[at(s.a.x, s.a.y)] = wall[at(s.b.x, s.b.y)] = 1;
    wall[at(s.mid().x, s.mid().y)] = 1;
  }
  for (Vertex v : C.vertices) {
    if (v.x == cmin)
      for (int x = x0; x < v.x; ++x) wall[at(x, v.y)] = 1;
    if (v.x == cmax)
      for (int x = v.x + 1; x <= x1; ++x) wall[at(x, v.y)] = 1;
  }
  std::deque<std::pair<int, int>> queue;
  const int ys = from_top ? y1 : y0;
  for (int x = x0; x <= x1; ++x) {
    seen[at(x, ys)] = 1;
    queue.emplace_back(x, ys);
  }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    const int nx[] = {x + 1, x - 1, x, x}, ny[] = {y, y, y + 1, y - 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < x0 || nx[k] > x1 || ny[k] < y0 || ny[k] > y1) continue;
      const std::size_t j = at(nx[k], ny[k]);
      if (seen[j] || wall[j]) continue;
      seen[j] = 1;
      queue.emplace_back(nx[k], ny[k]);
    }
  }
  auto touches = [&](int x, int y) {
    const int nx[] = {x + 1, x - 1, x, x}, ny[] = {y, y, y + 1, y - 1};
    for (int k = 0; k < 4; ++k)
      if (nx[k] >= x0 && nx[k] <= x1 && ny[k] >= y0 && ny[k] <= y1 && seen[at(nx[k], ny[k])]) return true;
    return false;
  };
  auto ok = [&](int x, int y) {
    const std::size_t j = at(x, y);
    if (seen[j]) return true;
    return weak && wall[j] && touches(x, y);
  };
  for (Vertex v : R.vertices)
    if (!ok(v.x, v.y)) return false;
  for (const Segment& s : R.edges)
    if (!ok(s.mid().x, s.mid().y)) return false;
  return true;
}

}  // namespace

bool is_above(const PointSet& R, const PointSet& C, bool weak) { return side_test(R, C, weak, true); }
bool is_below(const PointSet& R, const PointSet& C, bool weak) { return side_test(R, C, weak, false); }

double mdist(const CrossingClusters& c, int n, double slab_exponent) {
  const double sc = scale_sc(n);
  const double cut = std::pow(sc, slab_exponent);
  const double a = cut - n, b = n - cut;
  if (a > b) return std::numeric_limits<double>::infinity();
  return set_distance(slab(c.primal.vertices, a, b), slab(c.dual.vertices, a, b));
}

bool good_clusters(const CrossingClusters& c, int n, const StatsConfig& cfg, int* min_slab) {
  const int sc = scale_sc(n);
  const ConeDecomposition cp = cone_points(c.primal.vertices);
  const ConeDecomposition cd = cone_points(c.dual.vertices);
  int least = std::numeric_limits<int>::max();
  for (int i = sc - n; i <= n - 2 * sc; ++i) {
    const int a = static_cast<int>(cp.in_slab(i, i + sc).size());
    const int b = static_cast<int>(cd.in_slab(i, i + sc).size());
    least = std::min({least, a, b});
  }
  if (least == std::numeric_limits<int>::max()) least = 0;
  if (min_slab) *min_slab = least;
  if (!c.primal_crossing || !c.dual_crossing) return false;
  const bool dense = least >= cfg.rho * sc;
  const bool apart = mdist(c, n, cfg.slab_exponent) >= static_cast<double>(sc) * sc;
  bool inside = true;
  for (Vertex v : c.primal.vertices) inside = inside && std::abs(v.y) <= 2 * n;
  for (Vertex v : c.dual.vertices) inside = inside && std::abs(v.y) <= 2 * n;
  return dense && apart && inside;
}

std::vector<Vertex> interface_points(const LoopConfig& l, bool upper) {
  const int id = upper ? l.upper : l.lower;
  std::vector<Vertex> out;
  if (id < 0) return out;
  for (int arc : l.loops[id].arcs) out.push_back(l.domain->tile(arc / 2).center);
  return out;
}

SampleStats sample_stats(const DobrushinDomain& d, const BondConfig& w, const std::vector<int>& potts,
                         const ChainSample& chain, const StatsConfig& cfg) {
  SampleStats s;
  const EnvelopeSet fk = fk_envelopes(d, w);
  s.gap = layer_gap(fk);
  s.width = envelope_width(fk);
  if (!potts.empty()) {
    const EnvelopeSet pe = potts_envelopes(d, potts);
    s.potts_gap = layer_gap(pe);
    s.potts_width = envelope_width(pe);
  }
  const CrossingClusters c = atrc_clusters(d, chain.atrc);
  s.crossings = c.primal_crossing && c.dual_crossing;
  s.mdist = mdist(c, d.n(), cfg.slab_exponent);
  s.mdist_diag = mdist(c, d.n(), cfg.diag_exponent);
  s.gcl = good_clusters(c, d.n(), cfg, &s.min_slab_cpts);
  s.dh_upper = hausdorff_one_sided(interface_points(chain.loops, true), c.primal.vertices);
  s.dh_lower = hausdorff_one_sided(interface_points(chain.loops, false), c.dual.vertices);
  return s;
}

Estimate batch_means(const std::vector<double>& xs, int batches) {
  Estimate e;
  e.count = static_cast<int>(xs.size());
  if (xs.empty()) return e;
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const int b = std::min<int>(batches, static_cast<int>(xs.size()));
  if (b < 2) return e;
  const std::size_t len = xs.size() / b;
  std::vector<double> means;
  for (int k = 0; k < b; ++k)
    means.push_back(std::accumulate(xs.begin() + k * len, xs.begin() + (k + 1) * len, 0.0) / len);
  const double mm = std::accumulate(means.begin(), means.end(), 0.0) / b;
  double var = 0;
  for (double m : means) var += (m - mm) * (m - mm);
  var /= (b - 1);
  const boost::math::students_t t(b - 1);
  e.half_width = boost::math::quantile(boost::math::complement(t, 0.025)) * std::sqrt(var / b);
  return e;
}

double integrated_autocorrelation(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 4) return 1.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  auto gamma = [&](std::size_t k) {
    double s = 0;
    for (std::size_t i = 0; i + k < n; ++i) s += (xs[i] - mean) * (xs[i + k] - mean);
    return s / n;
  };
  const double g0 = gamma(0);
  if (g0 <= 0) return 1.0;
  double tau = -1.0;
  for (std::size_t k = 0; k + 1 < n / 2; k += 2) {
    const double pair = (gamma(k) + gamma(k + 1)) / g0;
    if (pair <= 0) break;
    tau += 2 * pair;
  }
  return std::max(tau, 1.0);
}

}  // namespace wetting
