#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wetting/lattice.hpp"
#include "wetting/params.hpp"
#include "wetting/rng.hpp"

namespace wetting {

enum class MeasureKind { FK, qFK, ATRC, mATRC, Potts };

// Conditioning events supported by enumeration and the constrained sampler.
//  Separated: the glued vertices s and t are not connected (∂⁺ ↮ ∂⁻).
//  Crossings: s <-> t in omega_tau and ds <-> dt in the dual of omega_tautau.
enum class Conditioning { None, Separated, Crossings };

enum class ConstraintMode { Free, RejectViolating };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::FK;
  std::string boundary = "free";  // free | wired | xi11 | qfk

  double p = 0.5;
  double q = 2.0;

  // Cluster graph (with any boundary identifications already applied).
  GraphView graph;
  // Edges that are random; the others are frozen at `fixed`.
  std::vector<std::uint8_t> free_edge;
  BondConfig fixed;

  // qFK boundary sets (vertex masks on `graph`) and their cluster weights.
  std::vector<std::uint8_t> b1, b2;
  double q1 = 1.0, q2 = 1.0;

  // ATRC / mATRC.
  std::vector<std::uint8_t> interior;  // membership in E
  GraphView graph1;                    // K^1 for the omega_tautau cluster count
  GraphView dual_graph;                // K' for the dual crossing
  double w_tau = 0, w_tautau = 0;      // ATRC
  double c = 0, c_b = 0;               // mATRC

  Conditioning cond = Conditioning::None;
  int s = -1, t = -1;    // vertices of `graph` (or of graph1 for Separated)
  int ds = -1, dt = -1;  // vertices of dual_graph

  int num_edges() const { return static_cast<int>(graph.ends.size()); }
  std::vector<int> free_edges() const;
};

struct AtrcConfig {
  BondConfig tau;
  BondConfig tautau;
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// FK with xi_{1/1} on the domain's E; clusters counted on K^1 which is the
// glued graph G.
MeasureSpec fk_dobrushin(const DobrushinDomain& d, double q, bool separated);
MeasureSpec fk_dobrushin(const DobrushinDomain& d, double p, double q, bool separated);
MeasureSpec fk_graph(const GraphView& g, double p, double q);
MeasureSpec qfk_graph(const GraphView& g, double p, double q, std::vector<std::uint8_t> b1,
                      std::vector<std::uint8_t> b2, double q1, double q2);
MeasureSpec atrc_graph(const GraphView& g, std::vector<std::uint8_t> interior, double J, double U);
MeasureSpec matrc_graph(const GraphView& k, const GraphView& k1, std::vector<std::uint8_t> interior,
                        double c, double c_b);
MeasureSpec matrc_domain(const DobrushinDomain& d, const CriticalParams& cp, bool crossings);

double log_weight(const BondConfig& w, const MeasureSpec& spec);
double log_weight(const AtrcConfig& x, const MeasureSpec& spec);
bool satisfies_condition(const BondConfig& w, const MeasureSpec& spec);
bool satisfies_condition(const AtrcConfig& x, const MeasureSpec& spec);

// Exact law over the free edges. For single-config kinds, key bit i is
// free edge i; for ATRC kinds, the low half is omega_tau and the high half
// omega_tautau.
struct ExactLaw {
  int bits = 0;
  std::vector<double> prob;  // dense over 2^bits
  std::vector<int> free_edges;
};

constexpr int kMaxEnumerationBits = 26;

ExactLaw enumerate_measure(const MeasureSpec& spec);
BondConfig law_config(const ExactLaw& law, const MeasureSpec& spec, std::uint64_t key);
AtrcConfig law_atrc_config(const ExactLaw& law, const MeasureSpec& spec, std::uint64_t key);
std::uint64_t law_key(const ExactLaw& law, const BondConfig& w);

// Exact conditional probability that edge e is open given the rest.
double heatbath_conditional(const BondConfig& w, int e, const MeasureSpec& spec);
// Paired update for ATRC kinds: probabilities of (0,0), (0,1), (1,1).
std::array<double, 3> atrc_local_law(const AtrcConfig& x, int e, const MeasureSpec& spec);

// Single-edge heat-bath for FK and qFK with on-line connectivity queries.
class HeatBathSampler {
 public:
  HeatBathSampler(const MeasureSpec& spec, std::uint64_t seed, std::uint32_t replica,
                  ConstraintMode mode, BondConfig init = {});

  // One pass over the free edges in canonical order.
  void sweep();
  const BondConfig& state() const { return w_; }
  std::uint64_t sweeps_done() const { return sweeps_; }
  // Open-probability at e given the current state (the value used by sweep).
  double conditional(int e);

 private:
  bool linked(int a, int b, int skip);
  int cluster_class(int v, int skip);  // 0 interior, 1 touches b1, 2 touches b2 only

  MeasureSpec spec_;
  ConstraintMode mode_;
  Rng rng_;
  BondConfig w_;
  std::vector<int> free_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // (neighbour, edge)
  int ghost1_ = -1, ghost2_ = -1;
  std::vector<int> mark_;
  int stamp_ = 0;
  std::vector<int> qa_, qb_;
  std::uint64_t sweeps_ = 0;
};

// Edwards–Sokal colouring of an FK^{1/1} configuration on a Dobrushin
// domain: colour 1 above, 2 below, interior clusters uniform in 1..q.
// Returns colours on the primal vertices of V̄ (index via primal_index).
struct EventViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::vector<int> potts_from_fk(const DobrushinDomain& d, const BondConfig& w, int q, Rng& rng);

// Swendsen–Wang for FK^{1/1}(.|∂⁺↮∂⁻) at integer q through the Potts^{1/2}
// colouring; one call = one colouring plus one bond refresh.
class SwendsenWang {
 public:
  SwendsenWang(const DobrushinDomain& d, double p, int q, std::uint64_t seed, std::uint32_t replica);
  void sweep();
  const BondConfig& state() const { return w_; }
  // Replaces the interior edges; boundary edges must match xi.
  void set_state(const BondConfig& w);
  std::uint64_t sweeps_done() const { return sweeps_; }

 private:
  const DobrushinDomain& d_;
  double p_;
  int q_;
  Rng rng_;
  BondConfig w_;
  std::uint64_t sweeps_ = 0;
};

struct FkgReport {
  bool holds = true;
  double min_slack = 0;  // min of mu(x v y) mu(x ^ y) - mu(x) mu(y)
  std::uint64_t pairs = 0;
};
// Lattice condition over all pairs of keys of an exact law. For ATRC kinds
// the order is the componentwise order on (omega_tau, omega_tautau).
FkgReport check_fkg_lattice(const MeasureSpec& spec, double tol = 1e-12);
FkgReport check_fkg_lattice(const ExactLaw& law, double tol = 1e-12);

// Stochastic domination mu <= nu on a finite poset given by its cover
// relation (x -> y means x < y). Returns max over up-sets of mu(U) - nu(U)
// (nonpositive iff mu <= nu) computed by a max-flow/min-cut argument.
double domination_deficit(const std::vector<double>& mu, const std::vector<double>& nu,
                          const std::vector<std::vector<int>>& covers);
// Same quantity by listing every up-set of the Boolean lattice {0,1}^k, k <= 5.
double domination_deficit_upsets(const std::vector<double>& mu, const std::vector<double>& nu, int k);
std::vector<std::vector<int>> boolean_covers(int k);
// Number of up-sets of {0,1}^k.
std::uint64_t count_upsets(int k);

struct DominationReport {
  bool holds = true;
  double deficit = 0;
};
DominationReport check_stoch_dom(const MeasureSpec& a, const MeasureSpec& b, double tol = 1e-12);

}  // namespace wetting
