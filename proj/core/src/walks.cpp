#include "wetting/walks.hpp"

#include "wetting/interfaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wetting {

namespace {

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// C(n, k) / 2^n for k = 0..n.
std::vector<double> half_binomials(int n) {
  std::vector<double> w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = std::exp(log_binom(n, k) - n * std::log(2.0));
  return w;
}

// m steps of +-2 from a to b.
double free_pm2(int m, long a, long b) {
  const long d = b - a;
  if (d % 2 != 0) return 0;
  const long h = d / 2;
  if (std::abs(h) > m || (m + h) % 2 != 0) return 0;
  return std::exp(log_binom(m, static_cast<int>((m + h) / 2)) - m * std::log(2.0));
}

// +-2 walk on D > 0 started at d0, killed on D <= 0. Calls visit(k, row) for
// k = 0..kmax, row[d] = P(D_k = d, alive); d up to d0 + 2 kmax (or cap).
template <class Visit>
void killed_pm2(int d0, int kmax, int cap, Visit visit) {
  const int top = cap > 0 ? std::min(cap, d0 + 2 * kmax) : d0 + 2 * kmax;
  std::vector<double> cur(top + 3, 0.0), nxt(top + 3, 0.0);
  if (d0 > 0 && d0 <= top) cur[d0] = 1;
  const int par = d0 & 1;
  for (int k = 0;; ++k) {
    visit(k, cur);
    if (k == kmax) break;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int d = (par == 0 ? 2 : 1); d <= top; d += 2) {
      const double m = cur[d];
      if (m == 0) continue;
      if (d + 2 <= top) nxt[d + 2] += 0.5 * m;
      if (d - 2 > 0) nxt[d - 2] += 0.5 * m;
    }
    std::swap(cur, nxt);
  }
}

struct Rect {
  long u0, u1, v0, v1;
};

Rect diamond(Point p, Point q) { return {p.x + p.y, q.x + q.y, p.x - p.y, q.x - q.y}; }

bool meets(const Rect& a, const Rect& b) {
  return a.u0 <= b.u1 && b.u0 <= a.u1 && a.v0 <= b.v1 && b.v0 <= a.v1;
}

const Step& pick(const std::vector<Step>& steps, const std::vector<double>& w, double total, Rng& rng) {
  double u = rng.uniform() * total;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    if (u < w[s]) return steps[s];
    u -= w[s];
  }
  for (std::size_t s = steps.size(); s-- > 0;)
    if (w[s] > 0) return steps[s];
  return steps.back();
}

Walk rejection_bridge(const IncrementDist& dist, Point start, Point end, Rng& rng, long budget, long* tries) {
  std::vector<double> w(dist.steps.size());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = dist.steps[s].p;
  for (long t = 0; t < budget; ++t) {
    if (tries) ++*tries;
    Walk path{start};
    Point p = start;
    while (p.x < end.x) {
      const Step& st = pick(dist.steps, w, 1.0, rng);
      p.x += st.dx;
      p.y += st.dy;
      path.push_back(p);
    }
    if (p == end) return path;
  }
  throw RetryExhausted("bridge rejection budget exhausted", 0.0);
}

bool reachable(const IncrementDist& dist, Point start, Point end) {
  if (end.x < start.x) return false;
  const long n = end.x - start.x;
  const long M = dist.max_abs_dy();
  const long W = 2 * n * M + 1;
  std::vector<std::vector<std::uint8_t>> r(n + 1, std::vector<std::uint8_t>(W, 0));
  r[0][n * M] = 1;
  for (long x = 0; x < n; ++x)
    for (long y = 0; y < W; ++y) {
      if (!r[x][y]) continue;
      for (const Step& s : dist.steps) {
        const long nx = x + s.dx, ny = y + s.dy;
        if (nx <= n && ny >= 0 && ny < W) r[nx][ny] = 1;
      }
    }
  const long ey = end.y - start.y + n * M;
  return ey >= 0 && ey < W && r[n][ey];
}

}  // namespace

// ---------------------------------------------------------------- increments

IncrementDist IncrementDist::from_steps(std::vector<Step> steps, double truncation) {
  std::sort(steps.begin(), steps.end(),
            [](const Step& a, const Step& b) { return a.dx != b.dx ? a.dx < b.dx : a.dy < b.dy; });
  IncrementDist d;
  for (const Step& s : steps) {
    if (!d.steps.empty() && d.steps.back().dx == s.dx && d.steps.back().dy == s.dy)
      d.steps.back().p += s.p;
    else
      d.steps.push_back(s);
  }
  d.truncation = truncation;
  d.symmetric = true;
  for (const Step& s : d.steps) {
    bool found = false;
    for (const Step& t : d.steps)
      if (t.dx == s.dx && t.dy == -s.dy && std::abs(t.p - s.p) <= 1e-15) found = true;
    if (!found) d.symmetric = false;
  }
  d.validate();
  return d;
}

IncrementDist IncrementDist::simple() { return from_steps({{1, -1, 0.5}, {1, 1, 0.5}}); }

IncrementDist IncrementDist::lazy(double p0) {
  if (!(p0 >= 0 && p0 < 1)) throw InvalidDistribution("lazy weight outside [0, 1)");
  std::vector<Step> s{{1, -1, (1 - p0) / 2}, {1, 1, (1 - p0) / 2}};
  if (p0 > 0) s.push_back({1, 0, p0});
  return from_steps(s);
}

void IncrementDist::validate() const {
  if (steps.empty()) throw InvalidDistribution("empty support");
  double total = 0;
  for (const Step& s : steps) {
    if (s.dx < 1) throw InvalidDistribution("dx must be >= 1");
    if (std::abs(s.dy) > s.dx) throw InvalidDistribution("step outside the forward cone");
    if (!(s.p > 0)) throw InvalidDistribution("non-positive probability");
    total += s.p;
  }
  if (std::abs(total - 1) > 1e-14) throw InvalidDistribution("probabilities do not sum to 1");
  if (symmetric)
    for (const Step& s : steps) {
      double mirror = 0;
      for (const Step& t : steps)
        if (t.dx == s.dx && t.dy == -s.dy) mirror = t.p;
      if (std::abs(mirror - s.p) > 1e-15) throw InvalidDistribution("symmetry flag set on an asymmetric law");
    }
}

bool IncrementDist::unit_step() const {
  return std::all_of(steps.begin(), steps.end(), [](const Step& s) { return s.dx == 1; });
}

int IncrementDist::max_dx() const {
  int m = 0;
  for (const Step& s : steps) m = std::max(m, s.dx);
  return m;
}

int IncrementDist::max_abs_dy() const {
  int m = 0;
  for (const Step& s : steps) m = std::max(m, std::abs(s.dy));
  return m;
}

double IncrementDist::mean_dx() const {
  double m = 0;
  for (const Step& s : steps) m += s.p * s.dx;
  return m;
}

double IncrementDist::var_dy() const {
  double m = 0, m2 = 0;
  for (const Step& s : steps) {
    m += s.p * s.dy;
    m2 += s.p * s.dy * s.dy;
  }
  return m2 - m * m;
}

IncrementDist IncrementDist::reversed() const {
  IncrementDist r = *this;
  for (Step& s : r.steps) s.dy = -s.dy;
  std::sort(r.steps.begin(), r.steps.end(),
            [](const Step& a, const Step& b) { return a.dx != b.dx ? a.dx < b.dx : a.dy < b.dy; });
  return r;
}

// ---------------------------------------------------------------- synchronization

Walk walk_from_steps(Point start, const std::vector<std::pair<int, int>>& steps) {
  Walk w{start};
  for (auto [dx, dy] : steps) {
    if (dx < 1) throw InvalidDistribution("dx must be >= 1");
    start.x += dx;
    start.y += dy;
    w.push_back(start);
  }
  return w;
}

std::vector<SyncTriple> synchronize(const Walk& a, const Walk& b) {
  std::vector<SyncTriple> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].x == b[j].x) {
      out.push_back({a[i].x, a[i].y, b[j].y});
      ++i;
      ++j;
    } else if (a[i].x < b[j].x) {
      ++i;
    } else {
      ++j;
    }
  }
  if (out.empty()) throw NoCommonAbscissa("walks share no abscissa");
  return out;
}

long first_crossing(const std::vector<SyncTriple>& sync) {
  for (std::size_t k = 0; k < sync.size(); ++k)
    if (sync[k].S <= sync[k].Sp) return static_cast<long>(k);
  return -1;
}

// ---------------------------------------------------------------- kernel DP

int default_window(int n) {
  return static_cast<int>(std::ceil(4 * std::sqrt(static_cast<double>(n)) * std::log(std::max(n, 2))));
}

SyncWalkKernels kernel_dp(const IncrementDist& dist, int i, int ip, int n_max, int lo, int hi,
                          const std::vector<int>& store) {
  dist.validate();
  if (lo > hi || i < lo || i > hi || ip < lo || ip > hi)
    throw WindowOverflow("starting heights outside the window");
  SyncWalkKernels K;
  K.i = i;
  K.ip = ip;
  K.lo = lo;
  K.hi = hi;
  K.n_max = n_max;
  K.qplus_total.assign(n_max + 1, 0.0);

  const int W = hi - lo + 1;
  const int R = dist.max_dx();  // pending distance r in [0, R-1]
  const std::size_t S = static_cast<std::size_t>(W) * R * W * R;
  auto idx = [&](int y1, int r1, int y2, int r2) {
    return ((static_cast<std::size_t>(y1) * R + r1) * W + y2) * R + r2;
  };
  std::vector<double> fr(S, 0.0), br(S, 0.0), tmp(S, 0.0);
  fr[idx(i - lo, 0, ip - lo, 0)] = 1;
  br[idx(i - lo, 0, ip - lo, 0)] = 1;

  std::vector<int> want(store);
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  std::size_t next_store = 0;

  // One walk moves: pending r > 0 counts down, r = 0 draws a step.
  auto advance = [&](std::vector<double>& v, bool first, double& lost) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int y1 = 0; y1 < W; ++y1)
      for (int r1 = 0; r1 < R; ++r1)
        for (int y2 = 0; y2 < W; ++y2)
          for (int r2 = 0; r2 < R; ++r2) {
            const double m = v[idx(y1, r1, y2, r2)];
            if (m == 0) continue;
            const int y = first ? y1 : y2;
            const int r = first ? r1 : r2;
            if (r > 0) {
              tmp[first ? idx(y1, r - 1, y2, r2) : idx(y1, r1, y2, r - 1)] += m;
              continue;
            }
            for (const Step& s : dist.steps) {
              const int ny = y + s.dy;
              if (ny < 0 || ny >= W) {
                lost += m * s.p;
                continue;
              }
              tmp[first ? idx(ny, s.dx - 1, y2, r2) : idx(y1, r1, ny, s.dx - 1)] += m * s.p;
            }
          }
    std::swap(v, tmp);
  };

  for (int x = 0; x <= n_max; ++x) {
    // barrier at synchronized states
    for (int y1 = 0; y1 < W; ++y1)
      for (int y2 = y1; y2 < W; ++y2) br[idx(y1, 0, y2, 0)] = 0;
    if (next_store < want.size() && want[next_store] == x) {
      std::vector<double> q(static_cast<std::size_t>(W) * W), qp(q.size());
      for (int y1 = 0; y1 < W; ++y1)
        for (int y2 = 0; y2 < W; ++y2) {
          q[static_cast<std::size_t>(y1) * W + y2] = fr[idx(y1, 0, y2, 0)];
          qp[static_cast<std::size_t>(y1) * W + y2] = br[idx(y1, 0, y2, 0)];
        }
      K.times.push_back(x);
      K.q.push_back(std::move(q));
      K.qplus.push_back(std::move(qp));
      ++next_store;
    }
    K.qplus_total[x] = std::accumulate(br.begin(), br.end(), 0.0);
    if (x == n_max) break;
    advance(fr, true, K.overflow);
    advance(fr, false, K.overflow);
    advance(br, true, K.overflow_plus);
    advance(br, false, K.overflow_plus);
  }
  return K;
}

// ---------------------------------------------------------------- +-1 split

std::vector<double> ordered_survival_pm1(int gap0, int n_max) {
  if (gap0 <= 0) return std::vector<double>(n_max + 1, 0.0);
  // lazy +-2 walk on the gap: stay 1/2, move 1/4 each way.
  const int top = gap0 + 2 * n_max;
  std::vector<double> cur(top + 3, 0.0), nxt(top + 3, 0.0), out(n_max + 1);
  cur[gap0] = 1;
  for (int k = 0; k <= n_max; ++k) {
    double s = 0;
    for (int d = 1; d <= top; ++d) s += cur[d];
    out[k] = s;
    if (k == n_max) break;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int d = 1; d <= top; ++d) {
      const double m = cur[d];
      if (m == 0) continue;
      nxt[d] += 0.5 * m;
      if (d + 2 <= top) nxt[d + 2] += 0.25 * m;
      if (d - 2 > 0) nxt[d - 2] += 0.25 * m;
    }
    std::swap(cur, nxt);
  }
  return out;
}

double pair_kernel_pm1(int i, int ip, int n, int j, int jp) {
  auto one = [n](int a, int b) {
    const int d = b - a;
    if (std::abs(d) > n || (n + d) % 2 != 0) return 0.0;
    return std::exp(log_binom(n, (n + d) / 2) - n * std::log(2.0));
  };
  return one(i, j) * one(ip, jp);
}

double ordered_pair_kernel_pm1(int i, int ip, int n, int j, int jp) {
  const int d0 = i - ip, d1 = j - jp;
  if (d0 <= 0 || d1 <= 0) return 0;
  if ((j - i + n) % 2 != 0 || (jp - ip + n) % 2 != 0) return 0;
  std::vector<double> pd(n + 1, 0.0);
  killed_pm2(d0, n, 0, [&](int k, const std::vector<double>& row) {
    if (d1 < static_cast<int>(row.size())) pd[k] = row[d1];
  });
  const std::vector<double> w = half_binomials(n);
  double s = 0;
  for (int k = 0; k <= n; ++k)
    if (pd[k] > 0) s += w[k] * pd[k] * free_pm2(n - k, i + ip, j + jp);
  return s;
}

MidpointLaw midpoint_law_pm1(int n, int gap0, int gap1, int window) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("midpoint law needs an even positive length");
  if (gap0 <= 0 || gap1 <= 0 || (gap0 - gap1) % 2 != 0)
    throw std::invalid_argument("gaps must be positive and of equal parity");
  if (window < 0 && n > 1024) window = default_window(n);
  const int h = n / 2;
  const int sigma = gap0 & 1;  // S + S' at both ends
  const int cap = window > 0 ? std::max(gap0, gap1) + window : 0;

  auto table = [&](int g) {
    std::vector<std::vector<double>> t;
    killed_pm2(g, h, cap, [&](int, const std::vector<double>& row) { t.push_back(row); });
    return t;
  };
  const auto A = table(gap0), B = table(gap1);
  const int top = static_cast<int>(A[0].size()) - 1;
  int sw = window > 0 ? std::min(window, 2 * h) : 2 * h;  // |s - sigma| <= sw
  sw -= sw & 1;  // s - sigma moves by 2
  const int ns = sw + 1;
  const std::vector<double> w = half_binomials(h);

  // F(g, s) = sum_k w_k A_k(g) P(h - k steps of +-2: sigma -> s), likewise G with B.
  std::vector<double> F(static_cast<std::size_t>(top + 1) * (2 * ns), 0.0), G(F.size(), 0.0);
  auto cell = [&](int g, int ds) { return static_cast<std::size_t>(g) * (2 * ns) + (ds + ns); };
  for (int k = 0; k <= h; ++k) {
    std::vector<double> ps(2 * ns, 0.0);
    for (int ds = -sw; ds <= sw; ds += 2) ps[ds + ns] = free_pm2(h - k, 0, ds);
    for (int g = 1; g <= top; ++g) {
      const double a = w[k] * A[k][g], b = w[k] * B[k][g];
      if (a == 0 && b == 0) continue;
      for (int ds = -sw; ds <= sw; ds += 2) {
        const double p = ps[ds + ns];
        if (p == 0) continue;
        F[cell(g, ds)] += a * p;
        G[cell(g, ds)] += b * p;
      }
    }
  }

  MidpointLaw L;
  L.n = n;
  L.gap0 = gap0;
  L.gap1 = gap1;
  double Z = 0;
  for (int g = 1; g <= top; ++g)
    for (int ds = -sw; ds <= sw; ds += 2) {
      const double m = F[cell(g, ds)] * G[cell(g, ds)];
      if (m == 0) continue;
      const int s = sigma + ds;
      if ((s + g) % 2 != 0) continue;
      Z += m;
      L.gap[g] += m;
      L.upper[(s + g) / 2] += m;
      L.lower[(s - g) / 2] += m;
    }
  if (Z <= 0) throw std::runtime_error("ordered bridge pair has zero weight");

  // full normalisation: P(ordered, ends) over n steps
  std::vector<double> pd(n + 1, 0.0);
  killed_pm2(gap0, n, 0, [&](int k, const std::vector<double>& row) {
    if (gap1 < static_cast<int>(row.size())) pd[k] = row[gap1];
  });
  const std::vector<double> wn = half_binomials(n);
  double total = 0;
  for (int k = 0; k <= n; ++k)
    if (pd[k] > 0) total += wn[k] * pd[k] * free_pm2(n - k, 0, 0);
  L.lost = std::max(0.0, 1 - Z / total);

  for (auto* m : {&L.gap, &L.upper, &L.lower})
    for (auto& [k, v] : *m) v /= Z;
  return L;
}

// ---------------------------------------------------------------- samplers

BridgeTable bridge_table(const IncrementDist& dist, Point start, Point end) {
  if (!dist.unit_step()) throw std::invalid_argument("bridge tables need a unit-step law");
  BridgeTable t;
  t.start = start;
  t.end = end;
  t.n = static_cast<int>(end.x - start.x);
  const long M = dist.max_abs_dy();
  t.lo = std::min(start.y, end.y) - static_cast<long>(t.n) * M;
  t.hi = std::max(start.y, end.y) + static_cast<long>(t.n) * M;
  const long W = t.hi - t.lo + 1;
  t.h.assign(t.n + 1, std::vector<double>(W, 0.0));
  t.h[t.n][end.y - t.lo] = 1;
  for (int k = t.n - 1; k >= 0; --k)
    for (long y = t.lo; y <= t.hi; ++y) {
      double s = 0;
      for (const Step& st : dist.steps) {
        const long z = y + st.dy;
        if (z >= t.lo && z <= t.hi) s += st.p * t.h[k + 1][z - t.lo];
      }
      t.h[k][y - t.lo] = s;
    }
  if (t.h[0][start.y - t.lo] <= 0) throw UnreachableEndpoint("endpoint not reachable");
  return t;
}

Walk sample_bridge(const IncrementDist& dist, const BridgeTable& t, Rng& rng) {
  Walk path{t.start};
  Point p = t.start;
  std::vector<double> w(dist.steps.size());
  for (int k = 0; k < t.n; ++k) {
    double total = 0;
    for (std::size_t s = 0; s < w.size(); ++s) {
      const long z = p.y + dist.steps[s].dy;
      w[s] = (z >= t.lo && z <= t.hi) ? dist.steps[s].p * t.h[k + 1][z - t.lo] : 0.0;
      total += w[s];
    }
    const Step& st = pick(dist.steps, w, total, rng);
    p.x += 1;
    p.y += st.dy;
    path.push_back(p);
  }
  return path;
}

Walk sample_bridge(const IncrementDist& dist, Point start, Point end, Rng& rng, long retry_budget) {
  dist.validate();
  if (!reachable(dist, start, end)) throw UnreachableEndpoint("endpoint not reachable");
  if (!dist.unit_step()) return rejection_bridge(dist, start, end, rng, retry_budget, nullptr);

  return sample_bridge(dist, bridge_table(dist, start, end), rng);
}

bool diamond_envelopes_disjoint(const Walk& a, const Walk& b) {
  std::size_t j0 = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const Rect ra = diamond(a[i], a[i + 1]);
    while (j0 + 1 < b.size() && b[j0 + 1].x < a[i].x) ++j0;
    for (std::size_t j = j0; j + 1 < b.size() && b[j].x <= a[i + 1].x; ++j)
      if (meets(ra, diamond(b[j], b[j + 1]))) return false;
  }
  return true;
}

bool ordered_at_sync_times(const Walk& upper, const Walk& lower) {
  return first_crossing(synchronize(upper, lower)) < 0;
}

PairSampler::PairSampler(const IncrementDist& dist, Point start_up, Point start_low, Point end_up, Point end_low,
                         PairConditioning mode, long retry_budget)
    : dist_(dist), su_(start_up), sl_(start_low), eu_(end_up), el_(end_low), mode_(mode), budget_(retry_budget) {
  dist_.validate();
  if (start_up.y <= start_low.y || end_up.y <= end_low.y)
    throw std::invalid_argument("start and end gaps must be positive");
  if (!reachable(dist_, su_, eu_) || !reachable(dist_, sl_, el_))
    throw UnreachableEndpoint("endpoint not reachable");
  if (!dist_.unit_step() || su_.x != sl_.x || eu_.x != el_.x) return;

  steps_ = static_cast<int>(eu_.x - su_.x);
  const long M = dist_.max_abs_dy();
  lo_ = std::min({su_.y, sl_.y, eu_.y, el_.y}) - steps_ * M;
  hi_ = std::max({su_.y, sl_.y, eu_.y, el_.y}) + steps_ * M;
  const long W = hi_ - lo_ + 1;
  if (static_cast<double>(W) * W * (steps_ + 1) > 2e7) {  // rejection instead
    single_.push_back(bridge_table(dist_, su_, eu_));
    single_.push_back(bridge_table(dist_, sl_, el_));
    return;
  }
  exact_ = true;

  auto run = [&](bool conditioned) {
    std::vector<std::vector<double>> h(steps_ + 1, std::vector<double>(W * W, 0.0));
    h[steps_][(eu_.y - lo_) * W + (el_.y - lo_)] = 1;
    for (int k = steps_ - 1; k >= 0; --k)
      for (long a = lo_; a <= hi_; ++a)
        for (long ap = lo_; ap <= hi_; ++ap) {
          double s = 0;
          for (const Step& x : dist_.steps)
            for (const Step& y : dist_.steps) {
              const long b = a + x.dy, bp = ap + y.dy;
              if (b < lo_ || b > hi_ || bp < lo_ || bp > hi_) continue;
              if (conditioned && !allowed(a, ap, b, bp)) continue;
              s += x.p * y.p * h[k + 1][(b - lo_) * W + (bp - lo_)];
            }
          h[k][(a - lo_) * W + (ap - lo_)] = s;
        }
    return h;
  };
  h_ = run(true);
  const double free = run(false)[0][(su_.y - lo_) * W + (sl_.y - lo_)];
  const double cond = h_[0][(su_.y - lo_) * W + (sl_.y - lo_)];
  if (cond <= 0) throw UnreachableEndpoint("conditioning event has probability zero");
  acceptance_ = cond / free;
}

bool PairSampler::allowed(long a, long ap, long b, long bp) const {
  switch (mode_) {
    case PairConditioning::None:
      return true;
    case PairConditioning::Ordered:
      return b > bp;
    case PairConditioning::DiamondDisjoint:
      return !meets(diamond({0, a}, {1, b}), diamond({0, ap}, {1, bp}));
  }
  return true;
}

BridgePair PairSampler::sample(Rng& rng) {
  BridgePair out;
  out.mode = mode_;
  if (exact_) {
    const long W = hi_ - lo_ + 1;
    Walk up{su_}, low{sl_};
    long a = su_.y, ap = sl_.y;
    for (int k = 0; k < steps_; ++k) {
      const double here = h_[k][(a - lo_) * W + (ap - lo_)];
      double u = rng.uniform() * here;
      long na = a, nap = ap;
      bool chosen = false;
      for (const Step& x : dist_.steps) {
        for (const Step& y : dist_.steps) {
          const long b = a + x.dy, bp = ap + y.dy;
          if (b < lo_ || b > hi_ || bp < lo_ || bp > hi_ || !allowed(a, ap, b, bp)) continue;
          const double m = x.p * y.p * h_[k + 1][(b - lo_) * W + (bp - lo_)];
          if (m <= 0) continue;
          na = b;
          nap = bp;
          if (u < m) {
            chosen = true;
            break;
          }
          u -= m;
        }
        if (chosen) break;
      }
      a = na;
      ap = nap;
      up.push_back({su_.x + k + 1, a});
      low.push_back({sl_.x + k + 1, ap});
    }
    out.upper = std::move(up);
    out.lower = std::move(low);
    out.attempts = 1;
    ++attempts_;
    ++accepted_;
    return out;
  }

  for (long t = 0; t < budget_; ++t) {
    ++attempts_;
    ++out.attempts;
    Walk up = single_.empty() ? sample_bridge(dist_, su_, eu_, rng, budget_) : sample_bridge(dist_, single_[0], rng);
    Walk low = single_.empty() ? sample_bridge(dist_, sl_, el_, rng, budget_) : sample_bridge(dist_, single_[1], rng);
    bool ok = true;
    if (mode_ == PairConditioning::Ordered) ok = ordered_at_sync_times(up, low);
    if (mode_ == PairConditioning::DiamondDisjoint) ok = diamond_envelopes_disjoint(up, low);
    if (ok) {
      ++accepted_;
      out.upper = std::move(up);
      out.lower = std::move(low);
      return out;
    }
  }
  throw RetryExhausted("pair rejection budget exhausted",
                       attempts_ ? static_cast<double>(accepted_) / attempts_ : 0.0);
}

// ---------------------------------------------------------------- watermelon

namespace {

// Ordered +-1 bridge pair of length n from gap g0 to gap g1 with S + S' = sigma
// at both ends: number of gap moves, the gap path and the sum path are drawn
// in turn.
class SplitPairSampler {
 public:
  SplitPairSampler(int n, int g0, int g1) : n_(n), g0_(g0), g1_(g1) {
    if (g0 <= 0 || g1 <= 0 || (g0 - g1) % 2 != 0)
      throw std::invalid_argument("gaps must be positive and of equal parity");
    killed_pm2(g1, n, 0, [&](int, const std::vector<double>& row) { back_.push_back(row); });
    const std::vector<double> w = half_binomials(n);
    post_.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k)
      post_[k] = g0 < static_cast<int>(back_[k].size()) ? w[k] * back_[k][g0] * free_pm2(n - k, 0, 0) : 0.0;
    total_ = std::accumulate(post_.begin(), post_.end(), 0.0);
    if (total_ <= 0) throw UnreachableEndpoint("ordered pair unreachable");
  }

  BridgePair sample(Rng& rng) const {
    double u = rng.uniform() * total_;
    int k = 0;
    while (k < n_ && u >= post_[k]) u -= post_[k++];
    while (post_[k] == 0) --k;

    // gap path: killed +-2 bridge of k steps, Doob transform with back_
    std::vector<int> dmoves;
    int d = g0_;
    for (int t = 0; t < k; ++t) {
      const int rem = k - t - 1;
      const double up = d + 2 < static_cast<int>(back_[rem].size()) ? back_[rem][d + 2] : 0.0;
      const double dn = d - 2 > 0 ? back_[rem][d - 2] : 0.0;
      const int step = rng.uniform() * (up + dn) < up ? 2 : -2;
      dmoves.push_back(step);
      d += step;
    }
    // sum path: n - k moves of +-2 with zero net displacement
    const int m = n_ - k;
    std::vector<int> smoves(m, -2);
    std::fill(smoves.begin(), smoves.begin() + m / 2, 2);
    for (int t = m - 1; t > 0; --t) std::swap(smoves[t], smoves[rng.below(t + 1)]);
    // which steps move the gap
    std::vector<std::uint8_t> is_gap(n_, 0);
    std::fill(is_gap.begin(), is_gap.begin() + k, 1);
    for (int t = n_ - 1; t > 0; --t) std::swap(is_gap[t], is_gap[rng.below(t + 1)]);

    const int sigma = g0_ & 1;
    long D = g0_, S = sigma;
    BridgePair out;
    out.mode = PairConditioning::Ordered;
    out.attempts = 1;
    out.upper.push_back({0, (S + D) / 2});
    out.lower.push_back({0, (S - D) / 2});
    std::size_t di = 0, si = 0;
    for (int t = 0; t < n_; ++t) {
      if (is_gap[t])
        D += dmoves[di++];
      else
        S += smoves[si++];
      out.upper.push_back({t + 1, (S + D) / 2});
      out.lower.push_back({t + 1, (S - D) / 2});
    }
    return out;
  }

 private:
  int n_, g0_, g1_;
  std::vector<std::vector<double>> back_;
  std::vector<double> post_;
  double total_ = 0;
};

}  // namespace

BridgePair sample_ordered_pair_pm1(int n, int gap0, int gap1, Rng& rng) {
  return SplitPairSampler(n, gap0, gap1).sample(rng);
}

WatermelonTable watermelon_reference(int K, int gap, int max_gap_samples, std::uint64_t seed) {
  if (K < 256) throw std::invalid_argument("resolution must be at least 256");
  if (K > 4096) throw std::length_error("resolution above capacity (4096)");
  const int g = gap > 0 ? gap : scale_sc(K);
  const int n = K % 2 == 0 ? K : K + 1;
  const MidpointLaw L = midpoint_law_pm1(n, g, g);
  WatermelonTable t;
  t.K = K;
  t.end_gap = g;
  const double s = std::sqrt(static_cast<double>(K));
  const double centre = (g & 1) / 2.0;
  for (auto [v, p] : L.gap) {
    t.gap.emplace_back(v / s, p);
    t.mean_gap += v * p;
  }
  for (auto [v, p] : L.upper) t.upper.emplace_back((v - centre) / s, p);
  for (auto [v, p] : L.lower) t.lower.emplace_back((v - centre) / s, p);
  if (max_gap_samples > 0) {
    SplitPairSampler sampler(n, g, g);
    Rng rng(seed);
    for (int r = 0; r < max_gap_samples; ++r) {
      const BridgePair bp = sampler.sample(rng);
      long m = 0;
      for (std::size_t k = 0; k < bp.upper.size(); ++k) m = std::max(m, bp.upper[k].y - bp.lower[k].y);
      t.max_gap_samples.push_back(m / s);
    }
  }
  return t;
}

double ks_distance(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double fa = 0, fb = 0, best = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i].first <= b[j].first))
      x = a[i].first;
    else
      x = b[j].first;
    while (i < a.size() && a[i].first == x) fa += a[i++].second;
    while (j < b.size() && b[j].first == x) fb += b[j++].second;
    best = std::max(best, std::abs(fa - fb));
  }
  return best;
}

// ---------------------------------------------------------------- local limit

std::vector<double> convolve_power(const std::vector<std::pair<int, double>>& dist, int n, long* offset) {
  int lo = dist.front().first, hi = lo;
  for (auto [v, p] : dist) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const long span = static_cast<long>(hi - lo) * n;
  std::vector<double> cur(span + 1, 0.0), nxt(span + 1, 0.0);
  cur[0] = 1;
  for (int k = 0; k < n; ++k) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    const long reach = static_cast<long>(hi - lo) * k;
    for (long x = 0; x <= reach; ++x) {
      if (cur[x] == 0) continue;
      for (auto [v, p] : dist) nxt[x + v - lo] += cur[x] * p;
    }
    std::swap(cur, nxt);
  }
  if (offset) *offset = static_cast<long>(lo) * n;
  return cur;
}

LltReport llt_check(const std::vector<std::pair<int, double>>& dist, int n, double exponent) {
  if (dist.empty()) throw std::invalid_argument("empty distribution");
  if (n > 2000) throw std::length_error("exact convolution limited to n <= 2000");
  int g = 0;
  const int v0 = dist.front().first;
  double mu = 0, m2 = 0;
  for (auto [v, p] : dist) {
    if (p > 0) g = std::gcd(g, std::abs(v - v0));
    mu += p * v;
    m2 += p * v * v;
  }
  if (g != 1) throw PeriodicityError("distribution is not aperiodic");
  const double var = m2 - mu * mu;

  long off = 0;
  const std::vector<double> law = convolve_power(dist, n, &off);
  LltReport r;
  r.n = n;
  r.radius = std::pow(n, exponent);
  const double centre = mu * n;
  auto gauss = [&](double x) {
    return std::exp(-(x - centre) * (x - centre) / (2 * n * var)) / std::sqrt(2 * M_PI * n * var);
  };
  for (long x = static_cast<long>(std::ceil(centre - r.radius)); x <= centre + r.radius; ++x) {
    const long i = x - off;
    const double exact = (i >= 0 && i < static_cast<long>(law.size())) ? law[i] : 0.0;
    const double e = std::abs(exact - gauss(x)) / gauss(x);
    if (e > r.sup_rel_error) {
      r.sup_rel_error = e;
      r.argmax = x;
    }
  }
  const long xm = std::lround(centre);
  r.exact_at_mean = law[xm - off];
  r.gauss_at_mean = gauss(xm);
  return r;
}

std::vector<double> renewal_hit_law(const IncrementDist& dist, int n, long* offset) {
  const long M = dist.max_abs_dy();
  const long W = 2 * M * n + 1;
  std::vector<std::vector<double>> h(n + 1, std::vector<double>(W, 0.0));
  h[0][M * n] = 1;
  for (int t = 1; t <= n; ++t)
    for (const Step& s : dist.steps) {
      if (s.dx > t) continue;
      const auto& from = h[t - s.dx];
      auto& to = h[t];
      for (long x = 0; x < W; ++x) {
        const long y = x + s.dy;
        if (from[x] != 0 && y >= 0 && y < W) to[y] += s.p * from[x];
      }
    }
  if (offset) *offset = -M * n;
  return h[n];
}

RenewalReport renewal_hit_check(const IncrementDist& dist, int n, double radius) {
  dist.validate();
  bool has_one = false;
  for (const Step& s : dist.steps) has_one = has_one || s.dx == 1;
  if (!has_one) throw HypothesisError("P(T = 1) must be positive");
  for (int t = 1; t <= dist.max_dx(); ++t) {
    double m = 0;
    for (const Step& s : dist.steps)
      if (s.dx == t) m += s.p * s.dy;
    if (std::abs(m) > 1e-12) throw HypothesisError("increments are not centred given T");
  }
  // index of the lattice spanned by the support
  long index = 0;
  for (const Step& a : dist.steps)
    for (const Step& b : dist.steps) index = std::gcd(index, std::abs(static_cast<long>(a.dx) * b.dy - static_cast<long>(a.dy) * b.dx));
  RenewalReport r;
  r.n = n;
  r.mu = dist.mean_dx();
  r.sigma2 = dist.var_dy();
  if (index == 0 || r.sigma2 <= 0) throw HypothesisError("degenerate increment law");

  long off = 0;
  const std::vector<double> law = renewal_hit_law(dist, n, &off);
  for (long i = 0; i < static_cast<long>(law.size()); ++i)
    if (law[i] > 0) r.exact.emplace_back(i + off, law[i]);

  // Density on the reachable sublattice is `index` times the Gaussian.
  auto formula = [&](double x, double var) {
    return index / r.mu * std::exp(-x * x / (2 * n * var)) / std::sqrt(2 * M_PI * n * var);
  };
  const double rad = radius * std::sqrt(static_cast<double>(n));
  for (auto [x, p] : r.exact) {
    if (std::abs(x) > rad) continue;
    r.sup_rel_error = std::max(r.sup_rel_error, std::abs(p - formula(x, r.sigma2 / r.mu)) / formula(x, r.sigma2 / r.mu));
    r.sup_rel_error_literal =
        std::max(r.sup_rel_error_literal, std::abs(p - formula(x, r.sigma2)) / formula(x, r.sigma2));
  }
  return r;
}

// ---------------------------------------------------------------- total variation

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw SupportMismatch("distributions on different supports");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2;
}

std::vector<double> product_law(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> out;
  out.reserve(p.size() * q.size());
  for (double a : p)
    for (double b : q) out.push_back(a * b);
  return out;
}

double product_tv_bound(double e1, double e2) { return e1 + e2; }

std::vector<double> condition_on(const std::vector<double>& p, const std::vector<std::uint8_t>& event) {
  if (p.size() != event.size()) throw SupportMismatch("event and law on different supports");
  double z = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (event[i]) z += p[i];
  if (z <= 0) throw std::domain_error("conditioning on a null event");
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (event[i]) out[i] = p[i] / z;
  return out;
}

double conditional_tv_bound(double eps, double delta) {
  if (!(delta > 0)) throw std::domain_error("delta must be positive");
  return eps * (1 / delta + 1 / (delta * delta));
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit needs two or more points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      ssr += e * e;
    }
    f.slope_se = std::sqrt(ssr / (n - 2) / sxx);
  }
  return f;
}

LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::domain_error("log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

}  // namespace wetting
