#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wetting/bkw.hpp"
#include "wetting/gibbs.hpp"
#include "wetting/lattice.hpp"

namespace wetting {

// k -> y(k) on {-n, ..., n}.
struct Envelope {
  std::string label;
  int n = 0;
  std::vector<int> y;

  int at(int k) const { return y.at(static_cast<std::size_t>(k + n)); }
};

// Order: 1+, 1-, 2+, 2-.
using EnvelopeSet = std::array<Envelope, 4>;

// Potts colours on V̄ (primal_index order), extended outside the box by the
// Dobrushin values 1 (y >= 0) and 2 (y < 0).
EnvelopeSet potts_envelopes(const DobrushinDomain& d, const std::vector<int>& colour);
// FK^{1/1} configuration with ∂⁺ ↮ ∂⁻. Both + envelopes follow the dual
// cluster of v'_L from above and below; the - envelopes follow the two wired
// clusters.
EnvelopeSet fk_envelopes(const DobrushinDomain& d, const BondConfig& w);

// Distance between the two ordered phases at column k: the lowest row of the
// upper one minus the highest row of the lower one.
int layer_gap(const EnvelopeSet& e, int k = 0);
// max_k (Γ^{s+}(k) - Γ^{s-}(k)) - 1 over both interfaces; 0 for flat ones.
int envelope_width(const EnvelopeSet& e);

struct RescaledPath {
  int n = 0;
  std::vector<double> knots;  // Γ(k)/√n for k = -n..n

  double operator()(double t) const;
};
RescaledPath rescale(const Envelope& env);

// Real points in doubled coordinates.
struct PointSet {
  std::vector<Vertex> vertices;
  std::vector<Segment> edges;
  bool empty() const { return vertices.empty(); }
};

struct CrossingClusters {
  PointSet primal;  // cluster of v_L in omega_tau (on K)
  PointSet dual;    // cluster of v'_L in the dual of omega_tautau (on K')
  bool primal_crossing = false;  // v_R in it
  bool dual_crossing = false;    // v'_R in it
  std::vector<Vertex> top_path;     // topmost v_L -> v_R path, empty if none
  std::vector<Vertex> bottom_path;  // bottom-most v'_L -> v'_R dual path
};

CrossingClusters atrc_clusters(const DobrushinDomain& d, const AtrcConfig& x);

// Topmost simple path from s to t in the open subgraph of K (primal) or K'
// (dual = true, open dual edges are the closed primal ones), by a
// left-hand boundary walk and loop erasure. Empty if s and t are not linked.
std::vector<Vertex> extreme_path(const DobrushinDomain& d, const BondConfig& w, Vertex s, Vertex t, bool top,
                                 bool dual);

struct EmptySetError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// sup_{r in R} min_{s in S} |r - s|_inf, in lattice units.
double hausdorff_one_sided(const std::vector<Vertex>& R, const std::vector<Vertex>& S);
// min over pairs; +inf if either set is empty.
double set_distance(const std::vector<Vertex>& R, const std::vector<Vertex>& S);

// Points of the sets with real first coordinate in [a, b].
std::vector<Vertex> slab(const std::vector<Vertex>& V, double a, double b);

// w - v in the forward cone {x1 >= |x2|}.
inline bool in_forward_cone(Vertex v, Vertex w) { return w.x - v.x >= std::abs(w.y - v.y); }
inline bool in_diamond(Vertex u, Vertex v, Vertex p) { return in_forward_cone(u, p) && in_forward_cone(p, v); }

struct ConeDecomposition {
  std::vector<Vertex> points;  // cone points, left to right

  // Slab restriction, real coordinates.
  std::vector<Vertex> in_slab(double a, double b) const;
  bool in_envelope(Vertex p) const;
  bool in_end_cones(Vertex p) const;
  // Boundaries of the diamond envelope over x (doubled units) between the
  // first and last cone point.
  double upper(double x) const;
  double lower(double x) const;
};

ConeDecomposition cone_points(const std::vector<Vertex>& V);

// R is (weakly) above / below the connected set C in the sense of the
// horizontal-ray extension. Both are rasterised on the doubled grid.
bool is_above(const PointSet& R, const PointSet& C, bool weak = true);
bool is_below(const PointSet& R, const PointSet& C, bool weak = true);

struct StatsConfig {
  double slab_exponent = 50;  // S_in = [sc^e - n, n - sc^e]
  double rho = 0.1;           // cone-point density for GCl
  double diag_exponent = 1;   // second Mdist slab, reported alongside
};

inline int scale_sc(int n) { return static_cast<int>(std::ceil(std::log(n) * std::log(n))); }

struct SampleStats {
  int gap = 0;           // FK layer gap at column 0
  int width = 0;         // FK envelope width
  int potts_gap = 0;
  int potts_width = 0;
  double mdist = std::numeric_limits<double>::infinity();
  double mdist_diag = std::numeric_limits<double>::infinity();
  int min_slab_cpts = 0;  // min over slabs of min(|CPts(C)|, |CPts(C')|)
  bool gcl = false;
  bool crossings = false;
  double dh_upper = 0;  // d_H(Γ_FK^1, C)
  double dh_lower = 0;  // d_H(Γ_FK^2, C')
};

// Mdist_n with a configurable slab exponent.
double mdist(const CrossingClusters& c, int n, double slab_exponent);
// GCl_n conditions on a pair of clusters.
bool good_clusters(const CrossingClusters& c, int n, const StatsConfig& cfg, int* min_slab = nullptr);

// Points along the FK interface paths (tile centres of their arcs inside A).
std::vector<Vertex> interface_points(const LoopConfig& l, bool upper);

SampleStats sample_stats(const DobrushinDomain& d, const BondConfig& w, const std::vector<int>& potts,
                         const ChainSample& chain, const StatsConfig& cfg);

struct Estimate {
  double mean = 0;
  double half_width = 0;  // 95% interval from batch means
  int count = 0;
};
Estimate batch_means(const std::vector<double>& xs, int batches = 20);

// Integrated autocorrelation time (initial positive sequence).
double integrated_autocorrelation(const std::vector<double>& xs);

}  // namespace wetting
