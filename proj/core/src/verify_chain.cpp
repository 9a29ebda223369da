#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>
#include <cmath>
#include <numeric>

#include "wetting/bkw.hpp"

namespace wetting {

namespace {

double tv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

void normalize_log(std::vector<double>& lw) {
  const double mx = *std::max_element(lw.begin(), lw.end());
  double z = 0;
  for (double v : lw) z += v == kNegInf ? 0.0 : std::exp(v - mx);
  for (double& v : lw) v = v == kNegInf ? 0.0 : std::exp(v - mx) / z;
}

struct SmallUF {
  int p[96];
  int comps = 0;
  void init(int n) {
    for (int i = 0; i < n; ++i) p[i] = i;
    comps = n;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      p[b] = a;
      --comps;
    }
  }
};

// A spin site: either a fixed boundary value or a bit of the spin key.
struct Site {
  int fixed = 0;
  int bit = -1;
  int value(std::uint64_t key) const { return fixed ? fixed : (((key >> bit) & 1u) ? 1 : -1); }
};

// Exact comparison of the Spin -> mATRC push-forward with
// mATRC(. | vL <-> vR in omega_tau, vL' <-> vR' in the dual of omega_tautau).
// The target support is enumerated; for each pair the push-forward mass is
// summed over the spin pairs compatible with it.
struct MatrcComparison {
  const DobrushinDomain& d;
  const CriticalParams& cp;
  const CouplingThresholds& th;
  const std::vector<double>& spin_law;

  int ne = 0, np = 0, nd = 0;
  std::vector<std::array<int, 2>> kends, dends;
  std::vector<Site> psite, dsite;  // by primal index / DualK id
  std::vector<std::array<Site, 4>> tsite;  // i, j, u, v per tile
  std::uint64_t inner = 0;
  int sL = 0, sR = 0, dL = 0, dR = 0;

  MatrcComparison(const DobrushinDomain& dom, const CriticalParams& c, const CouplingThresholds& t,
                  const std::vector<double>& law)
      : d(dom), cp(c), th(t), spin_law(law) {
    ne = d.num_edges();
    np = d.num_primal();
    nd = d.view(View::DualK).num_vertices;
    if (ne > 26 || np > 96 || nd > 96) throw CapacityError("verify_chain: domain too large for enumeration");
    kends = d.view(View::K).ends;
    dends = d.view(View::DualK).ends;
    int bit = 0;
    psite.resize(np);
    for (int i = 0; i < np; ++i) {
      const Vertex v = d.primal_vertex(i);
      if (d.in_B(v)) psite[i].bit = bit++;
      else psite[i].fixed = DobrushinDomain::boundary_sign(v);
    }
    std::vector<int> dual_id_of(d.num_dual(), -1);
    dsite.resize(nd);
    for (int i = 0; i < d.num_dual(); ++i) {
      const Vertex v = d.dual_vertex(i);
      const int id = d.view_vertex(View::DualK, v);
      dual_id_of[i] = id;
      if (id < 0) continue;
      if (d.in_Bdual(v)) dsite[id].bit = bit++;
      else dsite[id].fixed = DobrushinDomain::boundary_sign(v);
    }
    for (const Tile& t : d.tiles()) {
      const Vertex c = t.center, e = t.primal.b - c;
      tsite.push_back({psite[d.primal_index(t.primal.a)], psite[d.primal_index(t.primal.b)],
                       dsite[dual_id_of[d.dual_index(c + rot90(e))]], dsite[dual_id_of[d.dual_index(c - rot90(e))]]});
    }
    for (int e = 0; e < d.num_interior(); ++e) inner |= std::uint64_t{1} << e;
    sL = d.primal_index(d.vL());
    sR = d.primal_index(d.vR());
    dL = d.view_vertex(View::DualK, d.vLd());
    dR = d.view_vertex(View::DualK, d.vRd());
  }

  template <class Visit>
  void for_each_pair(Visit&& visit) const {
    const std::uint64_t all = (std::uint64_t{1} << ne) - 1;
    SmallUF uk, ud, ud2, uk2;
    for (std::uint64_t tau = 0; tau <= all; ++tau) {
      uk.init(np);
      for (int e = 0; e < ne; ++e)
        if ((tau >> e) & 1u) uk.unite(kends[e][0], kends[e][1]);
      if (uk.find(sL) != uk.find(sR)) continue;
      ud.init(nd);
      for (int e = 0; e < ne; ++e)
        if (!((tau >> e) & 1u)) ud.unite(dends[e][0], dends[e][1]);
      if (ud.find(dL) != ud.find(dR)) continue;
      const std::uint64_t room = ~tau & inner;
      for (std::uint64_t sub = room;; sub = (sub - 1) & room) {
        const std::uint64_t tt = tau | sub;
        ud2.init(nd);
        for (int e = 0; e < ne; ++e)
          if (!((tt >> e) & 1u)) ud2.unite(dends[e][0], dends[e][1]);
        if (ud2.find(dL) == ud2.find(dR)) {
          uk2.init(np);
          for (int e = 0; e < ne; ++e)
            if ((tt >> e) & 1u) uk2.unite(kends[e][0], kends[e][1]);
          visit(tau, tt, uk, uk2, ud);
        }
        if (sub == 0) break;
      }
    }
  }

  // log of the mATRC weight; uk holds omega_tau clusters on K, uk2 the
  // omega_tautau clusters on K.
  double log_q(std::uint64_t tau, std::uint64_t tt, SmallUF& uk, SmallUF& uk2) const {
    const int tauE = std::popcount(tau & inner), tauB = std::popcount(tau & ~inner);
    const int diff = std::popcount(tt & ~tau);
    // K^1 glues each half of the ring; a cluster meeting both halves merges them.
    int free_clusters = 0;
    bool both = false;
    std::array<int, 96> sign{};
    for (int v = 0; v < np; ++v) {
      const int r = uk2.find(v);
      if (psite[v].fixed) sign[r] |= psite[v].fixed > 0 ? 1 : 2;
    }
    for (int v = 0; v < np; ++v)
      if (uk2.find(v) == v) {
        if (sign[v] == 0) ++free_clusters;
        if (sign[v] == 3) both = true;
      }
    const int k1 = free_clusters + (both ? 1 : 2);
    return tauE * std::log(2.0) + tauB * std::log(2.0 / (cp.c_b - 1)) + diff * std::log(cp.c - 2) +
           (uk.comps + k1) * std::log(2.0);
  }

  // Push-forward mass of (tau, tt).
  double push_forward(std::uint64_t tau, std::uint64_t tt, SmallUF& uk2, SmallUF& ud) const {
    std::array<int, 96> psign{}, dsign{};
    std::array<std::uint64_t, 96> pmask{}, dmask{};
    std::uint64_t base = 0;
    for (int v = 0; v < np; ++v) {
      const int r = uk2.find(v);
      if (psite[v].fixed) psign[r] |= psite[v].fixed > 0 ? 1 : 2;
      else pmask[r] |= std::uint64_t{1} << psite[v].bit;
    }
    for (int v = 0; v < nd; ++v) {
      const int r = ud.find(v);
      if (dsite[v].fixed) dsign[r] |= dsite[v].fixed > 0 ? 1 : 2;
      else dmask[r] |= std::uint64_t{1} << dsite[v].bit;
    }
    std::vector<std::uint64_t> choices;
    for (int v = 0; v < np; ++v) {
      if (uk2.find(v) != v) continue;
      if (psign[v] == 3) return 0.0;
      if (psign[v] == 1) base |= pmask[v];
      else if (psign[v] == 0 && pmask[v]) choices.push_back(pmask[v]);
    }
    for (int v = 0; v < nd; ++v) {
      if (ud.find(v) != v) continue;
      if (dsign[v] == 3) return 0.0;
      if (dsign[v] == 1) base |= dmask[v];
      else if (dsign[v] == 0 && dmask[v]) choices.push_back(dmask[v]);
    }
    const double p11 = th.p11(), p00 = th.p00(), p01 = th.p01(), pb11 = th.pb11();
    double total = 0;
    const std::uint64_t nchoice = std::uint64_t{1} << choices.size();
    for (std::uint64_t c = 0; c < nchoice; ++c) {
      std::uint64_t key = base;
      for (std::size_t k = 0; k < choices.size(); ++k)
        if ((c >> k) & 1u) key |= choices[k];
      const double ps = spin_law[key];
      if (ps == 0) continue;
      double prod = ps;
      for (int e = 0; e < ne && prod > 0; ++e) {
        const auto& s = tsite[e];
        const bool a = (tau >> e) & 1u, b = (tt >> e) & 1u;
        const bool interior = (inner >> e) & 1u;
        const bool pagree = s[0].value(key) == s[1].value(key);
        const bool dagree = s[2].value(key) == s[3].value(key);
        if (a && b) {
          if (!pagree) prod = 0;
          else if (dagree) prod *= interior ? p11 : pb11;
        } else if (!a && !b) {
          if (!dagree) prod = 0;
          else if (pagree) prod *= interior ? p00 : 1.0 - pb11;
        } else {
          if (!(pagree && dagree) || !interior) prod = 0;
          else prod *= p01;
        }
      }
      total += prod;
    }
    return total;
  }

  double run(std::uint64_t& support) const {
    double lmax = kNegInf;
    for_each_pair([&](std::uint64_t tau, std::uint64_t tt, SmallUF& uk, SmallUF& uk2, SmallUF&) {
      lmax = std::max(lmax, log_q(tau, tt, uk, uk2));
    });
    double z = 0;
    for_each_pair([&](std::uint64_t tau, std::uint64_t tt, SmallUF& uk, SmallUF& uk2, SmallUF&) {
      z += std::exp(log_q(tau, tt, uk, uk2) - lmax);
    });
    double diff = 0, mass = 0;
    support = 0;
    for_each_pair([&](std::uint64_t tau, std::uint64_t tt, SmallUF& uk, SmallUF& uk2, SmallUF& ud) {
      const double q = std::exp(log_q(tau, tt, uk, uk2) - lmax) / z;
      const double p = push_forward(tau, tt, uk2, ud);
      diff += std::abs(p - q);
      mass += p;
      ++support;
    });
    return 0.5 * (diff + std::max(0.0, 1.0 - mass));
  }
};

}  // namespace

std::vector<double> spin_target_law(const DobrushinDomain& d, const CriticalParams& cp) {
  const int bits = spin_bits(d);
  if (bits > 24) throw CapacityError("spin_target_law: too many spins");
  std::vector<double> lw(std::size_t{1} << bits, kNegInf);
  for (std::uint64_t key = 0; key < lw.size(); ++key) {
    const SpinPair s = spin_from_key(d, key);
    if (!satisfies_ice_rule(d, s)) continue;
    const std::vector<int> types = tile_types(d, s);
    lw[key] = count_t56(d, types, false) * std::log(cp.c) + count_t56(d, types, true) * std::log(cp.c_b);
  }
  normalize_log(lw);
  return lw;
}

double ChainReport::max_tv() const { return std::max({tv_fk_to_spin, tv_spin_to_fk, tv_spin_to_matrc}); }

ChainReport verify_chain(int n, int m, const CriticalParams& cp, const CouplingThresholds& th) {
  const DobrushinDomain d(n, m);
  ChainReport rep;
  rep.n = n;
  rep.m = m;
  rep.q = cp.q;
  rep.thresholds = th;

  const MeasureSpec fk = fk_dobrushin(d, cp.p, cp.q, true);
  const ExactLaw fk_law = enumerate_measure(fk);
  const int bits = spin_bits(d);
  if (bits > 24) throw CapacityError("verify_chain: too many spins");

  // FK -> oriented loops -> spins.
  std::vector<double> spin_chain(std::size_t{1} << bits, 0.0);
  const double pcw = th.p_clockwise();
  for (std::uint64_t key = 0; key < fk_law.prob.size(); ++key) {
    const double pw = fk_law.prob[key];
    if (pw == 0) continue;
    const LoopConfig loops = loops_from_bonds(d, law_config(fk_law, fk, key));
    const int L = loops.num_free();
    std::vector<std::uint8_t> cw(L);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << L); ++mask) {
      double pr = pw;
      for (int l = 0; l < L; ++l) {
        cw[l] = (mask >> l) & 1u;
        pr *= cw[l] ? pcw : 1.0 - pcw;
      }
      if (pr == 0) continue;
      const SpinPair s = spins_from_orientations(d, orient_loops_bits(loops, cw));
      if (!has_dobrushin_boundary(d, s)) throw std::logic_error("verify_chain: chain spins miss the boundary values");
      spin_chain[spin_key(d, s)] += pr;
    }
  }
  rep.tv_fk_to_spin = tv(spin_chain, spin_target_law(d, cp));

  // Spins -> FK.
  std::vector<double> fk_chain(fk_law.prob.size(), 0.0);
  const double psplit = th.p_split();
  for (std::uint64_t key = 0; key < spin_chain.size(); ++key) {
    const double ps = spin_chain[key];
    if (ps == 0) continue;
    const SpinPair s = spin_from_key(d, key);
    const std::vector<int> types = tile_types(d, s);
    std::vector<int> split;
    for (int e = 0; e < d.num_interior(); ++e)
      if (types[e] >= 5) split.push_back(e);
    std::vector<std::uint8_t> right(d.num_edges(), 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << split.size()); ++mask) {
      double pr = ps;
      for (std::size_t k = 0; k < split.size(); ++k) {
        right[split[k]] = (mask >> k) & 1u;
        pr *= right[split[k]] ? psplit : 1.0 - psplit;
      }
      if (pr == 0) continue;
      fk_chain[law_key(fk_law, fk_from_spins_choice(d, s, types, right))] += pr;
    }
  }
  rep.tv_spin_to_fk = tv(fk_chain, fk_law.prob);

  // Spins -> mATRC.
  const MatrcComparison cmp(d, cp, th, spin_chain);
  rep.tv_spin_to_matrc = cmp.run(rep.matrc_support);
  return rep;
}

}  // namespace wetting
