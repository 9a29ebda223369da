#include "wetting/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

namespace wetting {

std::vector<int> MeasureSpec::free_edges() const {
  std::vector<int> f;
  for (int e = 0; e < num_edges(); ++e)
    if (free_edge.empty() || free_edge[e]) f.push_back(e);
  return f;
}

MeasureSpec fk_dobrushin(const DobrushinDomain& d, double p, double q, bool separated) {
  MeasureSpec s;
  s.kind = MeasureKind::FK;
  s.boundary = "xi11";
  s.p = p;
  s.q = q;
  s.graph = d.view(View::K1);
  s.free_edge.assign(d.num_edges(), 0);
  for (int e = 0; e < d.num_interior(); ++e) s.free_edge[e] = 1;
  s.fixed = d.xi();
  s.s = d.view_vertex(View::K1, d.vR());
  s.t = d.view_vertex(View::K1, Vertex::primal(d.n() + 1, -1));
  if (separated) s.cond = Conditioning::Separated;
  return s;
}

MeasureSpec fk_dobrushin(const DobrushinDomain& d, double q, bool separated) {
  const double sq = std::sqrt(q);
  return fk_dobrushin(d, sq / (1 + sq), q, separated);
}

MeasureSpec fk_graph(const GraphView& g, double p, double q) {
  MeasureSpec s;
  s.kind = MeasureKind::FK;
  s.p = p;
  s.q = q;
  s.graph = g;
  s.fixed.assign(g.ends.size(), 0);
  return s;
}

MeasureSpec qfk_graph(const GraphView& g, double p, double q, std::vector<std::uint8_t> b1,
                      std::vector<std::uint8_t> b2, double q1, double q2) {
  MeasureSpec s = fk_graph(g, p, q);
  s.kind = MeasureKind::qFK;
  s.boundary = "qfk";
  b1.resize(g.num_vertices, 0);
  b2.resize(g.num_vertices, 0);
  s.b1 = std::move(b1);
  s.b2 = std::move(b2);
  s.q1 = q1;
  s.q2 = q2;
  return s;
}

MeasureSpec atrc_graph(const GraphView& g, std::vector<std::uint8_t> interior, double J, double U) {
  MeasureSpec s;
  s.kind = MeasureKind::ATRC;
  s.graph = g;
  s.interior = interior;
  s.free_edge = std::move(interior);
  s.fixed.assign(g.ends.size(), 0);
  s.w_tau = std::exp(2 * U) * (std::exp(2 * J) - std::exp(-2 * J));
  s.w_tautau = std::exp(2 * (U - J)) - 1;
  return s;
}

MeasureSpec matrc_graph(const GraphView& k, const GraphView& k1, std::vector<std::uint8_t> interior,
                        double c, double c_b) {
  MeasureSpec s;
  s.kind = MeasureKind::mATRC;
  s.graph = k;
  s.graph1 = k1;
  s.interior = std::move(interior);
  s.fixed.assign(k.ends.size(), 0);
  s.c = c;
  s.c_b = c_b;
  return s;
}

MeasureSpec matrc_domain(const DobrushinDomain& d, const CriticalParams& cp, bool crossings) {
  std::vector<std::uint8_t> interior(d.num_edges(), 0);
  for (int e = 0; e < d.num_interior(); ++e) interior[e] = 1;
  MeasureSpec s = matrc_graph(d.view(View::K), d.view(View::K1), std::move(interior), cp.c, cp.c_b);
  s.boundary = "dobrushin";
  s.dual_graph = d.view(View::DualK);
  s.s = d.view_vertex(View::K, d.vL());
  s.t = d.view_vertex(View::K, d.vR());
  s.ds = d.view_vertex(View::DualK, d.vLd());
  s.dt = d.view_vertex(View::DualK, d.vRd());
  if (crossings) s.cond = Conditioning::Crossings;
  return s;
}

namespace {

bool frozen_ok(const BondConfig& w, const MeasureSpec& spec) {
  if (spec.free_edge.empty()) return true;
  for (int e = 0; e < spec.num_edges(); ++e)
    if (!spec.free_edge[e] && w[e] != spec.fixed[e]) return false;
  return true;
}

struct Clusters {
  UnionFind uf;
  Clusters(const BondConfig& w, const GraphView& g) : uf(g.num_vertices) {
    for (std::size_t e = 0; e < w.size(); ++e)
      if (w[e]) uf.unite(g.ends[e][0], g.ends[e][1]);
  }
};

double qfk_cluster_log_weight(const BondConfig& w, const MeasureSpec& spec) {
  Clusters cl(w, spec.graph);
  const int nv = spec.graph.num_vertices;
  std::vector<std::uint8_t> f1(nv, 0), f2(nv, 0), root(nv, 0);
  for (int v = 0; v < nv; ++v) {
    const int r = cl.uf.find(v);
    root[r] = 1;
    if (spec.b1[v]) f1[r] = 1;
    if (spec.b2[v]) f2[r] = 1;
  }
  int ki = 0, k1 = 0, k2 = 0;
  for (int v = 0; v < nv; ++v) {
    if (!root[v]) continue;
    if (f1[v]) ++k1;
    else if (f2[v]) ++k2;
    else ++ki;
  }
  return ki * std::log(spec.q) + k1 * std::log(spec.q1) + k2 * std::log(spec.q2);
}

}  // namespace

bool satisfies_condition(const BondConfig& w, const MeasureSpec& spec) {
  if (spec.cond == Conditioning::None) return true;
  if (spec.cond == Conditioning::Separated) return !connected(w, spec.graph, spec.s, spec.t);
  return false;
}

bool satisfies_condition(const AtrcConfig& x, const MeasureSpec& spec) {
  if (spec.cond == Conditioning::None) return true;
  if (spec.cond != Conditioning::Crossings) return false;
  return connected(x.tau, spec.graph, spec.s, spec.t) &&
         connected(complement(x.tautau), spec.dual_graph, spec.ds, spec.dt);
}

double log_weight(const BondConfig& w, const MeasureSpec& spec) {
  if (static_cast<int>(w.size()) != spec.num_edges()) throw IndexError("log_weight: config length");
  if (!frozen_ok(w, spec)) return kNegInf;
  if (!satisfies_condition(w, spec)) return kNegInf;
  int open = 0, closed = 0;
  for (int e : spec.free_edges()) (w[e] ? open : closed)++;
  double lw = open * std::log(spec.p) + closed * std::log1p(-spec.p);
  switch (spec.kind) {
    case MeasureKind::FK:
      return lw + cluster_count(w, spec.graph) * std::log(spec.q);
    case MeasureKind::qFK:
      return lw + qfk_cluster_log_weight(w, spec);
    default:
      throw std::invalid_argument("log_weight: single-configuration kind expected");
  }
}

double log_weight(const AtrcConfig& x, const MeasureSpec& spec) {
  const int ne = spec.num_edges();
  if (static_cast<int>(x.tau.size()) != ne || static_cast<int>(x.tautau.size()) != ne)
    throw IndexError("log_weight: config length");
  int tauE = 0, tauB = 0, diffE = 0;
  for (int e = 0; e < ne; ++e) {
    if (x.tau[e] && !x.tautau[e]) return kNegInf;
    const bool inner = spec.interior[e] != 0;
    if (x.tau[e]) (inner ? tauE : tauB)++;
    if (x.tautau[e] && !x.tau[e]) {
      if (!inner && spec.kind == MeasureKind::mATRC) return kNegInf;
      if (inner) ++diffE;
    }
  }
  if (spec.kind == MeasureKind::ATRC) {
    if (!frozen_ok(x.tau, spec) || !frozen_ok(x.tautau, spec)) return kNegInf;
    return tauE * std::log(spec.w_tau) + diffE * std::log(spec.w_tautau) +
           (cluster_count(x.tau, spec.graph) + cluster_count(x.tautau, spec.graph)) * std::log(2.0);
  }
  if (spec.kind != MeasureKind::mATRC) throw std::invalid_argument("log_weight: ATRC kind expected");
  if (!satisfies_condition(x, spec)) return kNegInf;
  return tauE * std::log(2.0) + tauB * std::log(2.0 / (spec.c_b - 1)) + diffE * std::log(spec.c - 2) +
         (cluster_count(x.tau, spec.graph) + cluster_count(x.tautau, spec.graph1)) * std::log(2.0);
}

namespace {

bool pair_kind(const MeasureSpec& s) { return s.kind == MeasureKind::ATRC || s.kind == MeasureKind::mATRC; }

void normalize_log(std::vector<double>& lw) {
  double mx = kNegInf;
  for (double v : lw) mx = std::max(mx, v);
  if (mx == kNegInf) throw std::runtime_error("enumerate_measure: empty support");
  double z = 0;
  for (double v : lw) z += v == kNegInf ? 0.0 : std::exp(v - mx);
  for (double& v : lw) v = v == kNegInf ? 0.0 : std::exp(v - mx) / z;
}

}  // namespace

BondConfig law_config(const ExactLaw& law, const MeasureSpec& spec, std::uint64_t key) {
  BondConfig w = spec.fixed;
  w.resize(spec.num_edges(), 0);
  for (std::size_t i = 0; i < law.free_edges.size(); ++i) w[law.free_edges[i]] = (key >> i) & 1u;
  return w;
}

AtrcConfig law_atrc_config(const ExactLaw& law, const MeasureSpec& spec, std::uint64_t key) {
  const int k = static_cast<int>(law.free_edges.size());
  AtrcConfig x{law_config(law, spec, key & ((std::uint64_t{1} << k) - 1)),
               law_config(law, spec, key >> k)};
  return x;
}

std::uint64_t law_key(const ExactLaw& law, const BondConfig& w) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < law.free_edges.size(); ++i)
    if (w[law.free_edges[i]]) key |= std::uint64_t{1} << i;
  return key;
}

ExactLaw enumerate_measure(const MeasureSpec& spec) {
  ExactLaw law;
  law.free_edges = spec.free_edges();
  const int k = static_cast<int>(law.free_edges.size());
  law.bits = pair_kind(spec) ? 2 * k : k;
  if (law.bits > kMaxEnumerationBits) throw CapacityError("enumerate_measure: too many configurations");
  const std::uint64_t size = std::uint64_t{1} << law.bits;
  std::vector<double> lw(size, kNegInf);
  if (!pair_kind(spec)) {
    for (std::uint64_t key = 0; key < size; ++key) lw[key] = log_weight(law_config(law, spec, key), spec);
  } else {
    const std::uint64_t all = (std::uint64_t{1} << k) - 1;
    std::uint64_t inner = 0;
    for (int i = 0; i < k; ++i)
      if (spec.interior[law.free_edges[i]]) inner |= std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a <= all; ++a) {
      const std::uint64_t room = spec.kind == MeasureKind::mATRC ? (~a & inner) : (~a & all);
      // Iterate over all submasks of room, including the empty one.
      for (std::uint64_t sub = room;; sub = (sub - 1) & room) {
        const std::uint64_t key = a | ((a | sub) << k);
        lw[key] = log_weight(law_atrc_config(law, spec, key), spec);
        if (sub == 0) break;
      }
    }
  }
  normalize_log(lw);
  law.prob = std::move(lw);
  return law;
}

double heatbath_conditional(const BondConfig& w, int e, const MeasureSpec& spec) {
  BondConfig a = w, b = w;
  a[e] = 1;
  b[e] = 0;
  const double lo = log_weight(a, spec), lc = log_weight(b, spec);
  if (lo == kNegInf && lc == kNegInf) return std::numeric_limits<double>::quiet_NaN();
  if (lo == kNegInf) return 0.0;
  if (lc == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(lc - lo));
}

std::array<double, 3> atrc_local_law(const AtrcConfig& x, int e, const MeasureSpec& spec) {
  static constexpr int kStates[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  std::array<double, 3> lw{};
  AtrcConfig y = x;
  for (int s = 0; s < 3; ++s) {
    y.tau[e] = kStates[s][0];
    y.tautau[e] = kStates[s][1];
    lw[s] = log_weight(y, spec);
  }
  const double mx = std::max({lw[0], lw[1], lw[2]});
  if (mx == kNegInf) return {std::nan(""), std::nan(""), std::nan("")};
  double z = 0;
  for (double& v : lw) {
    v = v == kNegInf ? 0.0 : std::exp(v - mx);
    z += v;
  }
  for (double& v : lw) v /= z;
  return lw;
}

// ---------------------------------------------------------------------------

HeatBathSampler::HeatBathSampler(const MeasureSpec& spec, std::uint64_t seed, std::uint32_t replica,
                                 ConstraintMode mode, BondConfig init)
    : spec_(spec), mode_(mode), rng_(seed, replica) {
  if (spec_.kind != MeasureKind::FK && spec_.kind != MeasureKind::qFK)
    throw std::invalid_argument("HeatBathSampler: FK or qFK expected");
  if (init.empty()) {
    // All free edges closed: lies in every decreasing event.
    init = spec_.fixed;
    init.resize(spec_.num_edges(), 0);
    for (int e : spec_.free_edges()) init[e] = 0;
  }
  w_ = std::move(init);
  if (!frozen_ok(w_, spec_)) throw std::invalid_argument("HeatBathSampler: initial state breaks the boundary condition");
  if (mode_ == ConstraintMode::RejectViolating && !satisfies_condition(w_, spec_))
    throw EventViolation("HeatBathSampler: initial state violates the conditioning event");
  free_ = spec_.free_edges();
  const int nv = spec_.graph.num_vertices;
  adj_.assign(nv, {});
  for (int e = 0; e < spec_.num_edges(); ++e) {
    const auto [a, b] = spec_.graph.ends[e];
    adj_[a].push_back({b, e});
    if (a != b) adj_[b].push_back({a, e});
  }
  mark_.assign(nv, 0);
}

bool HeatBathSampler::linked(int a, int b, int skip) {
  if (a == b) return true;
  if (stamp_ > (1 << 30)) {
    std::fill(mark_.begin(), mark_.end(), 0);
    stamp_ = 0;
  }
  // Interleaved breadth-first search from both ends; stops as soon as one
  // side is exhausted or the two searches meet.
  stamp_ += 2;
  const int sa = stamp_, sb = stamp_ + 1;
  qa_.assign(1, a);
  qb_.assign(1, b);
  mark_[a] = sa;
  mark_[b] = sb;
  std::size_t ia = 0, ib = 0;
  while (ia < qa_.size() && ib < qb_.size()) {
    for (int side = 0; side < 2; ++side) {
      auto& q = side ? qb_ : qa_;
      auto& i = side ? ib : ia;
      const int mine = side ? sb : sa, other = side ? sa : sb;
      if (i >= q.size()) return false;
      const int v = q[i++];
      for (auto [u, e] : adj_[v]) {
        if (e == skip || !w_[e]) continue;
        if (mark_[u] == other) return true;
        if (mark_[u] != mine) {
          mark_[u] = mine;
          q.push_back(u);
        }
      }
    }
  }
  return false;
}

int HeatBathSampler::cluster_class(int v, int skip) {
  if (spec_.kind != MeasureKind::qFK) return 0;
  if (stamp_ > (1 << 30)) {
    std::fill(mark_.begin(), mark_.end(), 0);
    stamp_ = 0;
  }
  stamp_ += 2;
  qa_.assign(1, v);
  mark_[v] = stamp_;
  bool t2 = false;
  for (std::size_t i = 0; i < qa_.size(); ++i) {
    const int x = qa_[i];
    if (spec_.b1[x]) return 1;
    if (spec_.b2[x]) t2 = true;
    for (auto [u, e] : adj_[x]) {
      if (e == skip || !w_[e] || mark_[u] == stamp_) continue;
      mark_[u] = stamp_;
      qa_.push_back(u);
    }
  }
  return t2 ? 2 : 0;
}

double HeatBathSampler::conditional(int e) {
  const auto [x, y] = spec_.graph.ends[e];
  const double p = spec_.p;
  if (linked(x, y, e)) return p;
  if (mode_ == ConstraintMode::RejectViolating && spec_.cond == Conditioning::Separated) {
    const int s = spec_.s, t = spec_.t;
    if ((linked(x, s, e) && linked(y, t, e)) || (linked(x, t, e) && linked(y, s, e))) return 0.0;
  }
  double ratio = spec_.q;
  if (spec_.kind == MeasureKind::qFK) {
    const double qs[3] = {spec_.q, spec_.q1, spec_.q2};
    const int cx = cluster_class(x, e), cy = cluster_class(y, e);
    const int merged = (cx == 1 || cy == 1) ? 1 : ((cx == 2 || cy == 2) ? 2 : 0);
    ratio = qs[cx] * qs[cy] / qs[merged];
  }
  return 1.0 / (1.0 + (1.0 - p) / p * ratio);
}

void HeatBathSampler::sweep() {
  rng_.seek(sweeps_);
  for (int e : free_) {
    const double po = conditional(e);
    w_[e] = rng_.uniform() < po ? 1 : 0;
  }
  ++sweeps_;
}

// ---------------------------------------------------------------------------

std::vector<int> potts_from_fk(const DobrushinDomain& d, const BondConfig& w, int q, Rng& rng) {
  const GraphView& g = d.view(View::K1);
  UnionFind uf(g.num_vertices);
  for (int e = 0; e < d.num_edges(); ++e)
    if (w[e]) uf.unite(g.ends[e][0], g.ends[e][1]);
  const int up = uf.find(d.view_vertex(View::K1, d.vR()));
  const int low = uf.find(d.view_vertex(View::K1, Vertex::primal(d.n() + 1, -1)));
  if (up == low) throw EventViolation("potts_from_fk: upper and lower boundaries are connected");
  std::vector<int> colour_of_root(g.num_vertices, 0);
  colour_of_root[up] = 1;
  colour_of_root[low] = 2;
  std::vector<int> out(d.num_primal());
  for (int i = 0; i < d.num_primal(); ++i) {
    const int r = uf.find(d.view_vertex(View::K1, d.primal_vertex(i)));
    if (colour_of_root[r] == 0) colour_of_root[r] = 1 + static_cast<int>(rng.below(q));
    out[i] = colour_of_root[r];
  }
  return out;
}

SwendsenWang::SwendsenWang(const DobrushinDomain& d, double p, int q, std::uint64_t seed, std::uint32_t replica)
    : d_(d), p_(p), q_(q), rng_(seed, replica), w_(d.xi()) {
  if (q < 2) throw std::invalid_argument("SwendsenWang: integer q >= 2 expected");
}

void SwendsenWang::set_state(const BondConfig& w) {
  if (w.size() != w_.size()) throw IndexError("set_state: config length");
  const BondConfig& xi = d_.xi();
  for (std::size_t e = d_.num_interior(); e < w.size(); ++e)
    if (w[e] != xi[e]) throw std::invalid_argument("set_state: boundary edges differ from xi");
  w_ = w;
}

void SwendsenWang::sweep() {
  rng_.seek(sweeps_);
  const std::vector<int> colour = potts_from_fk(d_, w_, q_, rng_);
  for (int e = 0; e < d_.num_interior(); ++e) {
    const Tile& t = d_.tile(e);
    const bool same = colour[d_.primal_index(t.primal.a)] == colour[d_.primal_index(t.primal.b)];
    w_[e] = (same && rng_.uniform() < p_) ? 1 : 0;
  }
  ++sweeps_;
}

// ---------------------------------------------------------------------------

FkgReport check_fkg_lattice(const ExactLaw& law, double tol) {
  if (law.bits > 12) throw CapacityError("check_fkg_lattice: lattice too large for the pair check");
  FkgReport r;
  r.min_slack = std::numeric_limits<double>::infinity();
  const std::uint64_t size = std::uint64_t{1} << law.bits;
  for (std::uint64_t x = 0; x < size; ++x)
    for (std::uint64_t y = x; y < size; ++y) {
      const double slack = law.prob[x | y] * law.prob[x & y] - law.prob[x] * law.prob[y];
      r.min_slack = std::min(r.min_slack, slack);
      ++r.pairs;
    }
  r.holds = r.min_slack >= -tol;
  return r;
}

FkgReport check_fkg_lattice(const MeasureSpec& spec, double tol) {
  return check_fkg_lattice(enumerate_measure(spec), tol);
}

double domination_deficit(const std::vector<double>& mu, const std::vector<double>& nu,
                          const std::vector<std::vector<int>>& covers) {
  using namespace boost;
  using Traits = adjacency_list_traits<vecS, vecS, directedS>;
  using Graph = adjacency_list<
      vecS, vecS, directedS, property<vertex_name_t, int>,
      property<edge_capacity_t, std::int64_t,
               property<edge_residual_capacity_t, std::int64_t, property<edge_reverse_t, Traits::edge_descriptor>>>>;
  const int n = static_cast<int>(mu.size());
  if (nu.size() != mu.size() || covers.size() != mu.size())
    throw std::invalid_argument("domination_deficit: support mismatch");
  Graph g(n + 2);
  auto cap = get(edge_capacity, g);
  auto rev = get(edge_reverse, g);
  // Integer capacities: push-relabel on doubles can cycle on rounding noise.
  const double unit = std::ldexp(1.0, 50);
  auto add = [&](int a, int b, std::int64_t c) {
    auto e1 = add_edge(a, b, g).first;
    auto e2 = add_edge(b, a, g).first;
    cap[e1] = c;
    cap[e2] = 0;
    rev[e1] = e2;
    rev[e2] = e1;
  };
  const int src = n, snk = n + 1;
  constexpr std::int64_t kInf = std::int64_t{1} << 60;
  std::int64_t total = 0;
  for (int x = 0; x < n; ++x) {
    const auto a = std::llround(mu[x] * unit), b = std::llround(nu[x] * unit);
    total += a;
    if (a > 0) add(src, x, a);
    if (b > 0) add(x, snk, b);
    for (int y : covers[x]) add(x, y, kInf);
  }
  const std::int64_t flow = push_relabel_max_flow(g, src, snk);
  return static_cast<double>(total - flow) / unit;
}

std::vector<std::vector<int>> boolean_covers(int k) {
  std::vector<std::vector<int>> c(std::size_t{1} << k);
  for (std::size_t x = 0; x < c.size(); ++x)
    for (int i = 0; i < k; ++i)
      if (!((x >> i) & 1u)) c[x].push_back(static_cast<int>(x | (std::size_t{1} << i)));
  return c;
}

namespace {

// Up-sets of {0,1}^k as bitmasks over the 2^k points: f is monotone iff
// f = f0 + f1 (last coordinate 0 / 1) with f0, f1 monotone and f0 <= f1.
std::vector<std::uint32_t> upsets(int k) {
  if (k == 0) return {0u, 1u};
  const auto lower = upsets(k - 1);
  const int half = 1 << (k - 1);
  std::vector<std::uint32_t> out;
  for (auto f0 : lower)
    for (auto f1 : lower)
      if ((f0 & ~f1) == 0) out.push_back(f0 | (f1 << half));
  return out;
}

}  // namespace

std::uint64_t count_upsets(int k) {
  if (k > 5) throw CapacityError("count_upsets: k <= 5");
  return upsets(k).size();
}

double domination_deficit_upsets(const std::vector<double>& mu, const std::vector<double>& nu, int k) {
  if (k > 5) throw CapacityError("domination_deficit_upsets: k <= 5");
  if (mu.size() != (std::size_t{1} << k) || nu.size() != mu.size())
    throw std::invalid_argument("domination_deficit_upsets: support mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint32_t u : upsets(k)) {
    double d = 0;
    for (int x = 0; x < (1 << k); ++x)
      if ((u >> x) & 1u) d += mu[x] - nu[x];
    worst = std::max(worst, d);
  }
  return worst;
}

DominationReport check_stoch_dom(const MeasureSpec& a, const MeasureSpec& b, double tol) {
  const ExactLaw la = enumerate_measure(a), lb = enumerate_measure(b);
  if (la.bits != lb.bits || la.free_edges != lb.free_edges)
    throw std::invalid_argument("check_stoch_dom: measures live on different spaces");
  DominationReport r;
  if (la.bits <= 5)
    r.deficit = domination_deficit_upsets(la.prob, lb.prob, la.bits);
  else
    r.deficit = domination_deficit(la.prob, lb.prob, boolean_covers(la.bits));
  r.holds = r.deficit <= tol;
  return r;
}

}  // namespace wetting
