#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wetting/gibbs.hpp"
#include "wetting/lattice.hpp"
#include "wetting/params.hpp"

namespace wetting {

// Arcs: every tile t in A carries two arcs, arc 2t+k. With the primal edge
// e_t = ij (i < j) and its dual uv, where u = centre + rot90(j - centre):
//   open tile   -> arc 0 turns around u, arc 1 around v
//   closed tile -> arc 0 turns around i, arc 1 around j
// Senses are +1 for counter-clockwise (pivot on the left), -1 clockwise.
enum class LoopKind { Free, Exterior, UpperPath, LowerPath };

struct Loop {
  LoopKind kind = LoopKind::Free;
  std::vector<int> arcs;            // arcs inside A, in traversal order
  std::vector<std::int8_t> sense;   // traced sense of each arc
  int winding = 0;                  // sum of senses over the whole loop (+-4 if closed)
};

struct LoopConfig {
  const DobrushinDomain* domain = nullptr;
  std::vector<std::uint8_t> open;  // per tile of A
  std::vector<Loop> loops;
  std::vector<int> arc_loop;       // loop index per arc
  std::vector<int> free_loops;     // loops inside G, ordered by their minimal arc
  int upper = -1, lower = -1;      // the two clipped interface paths

  int num_free() const { return static_cast<int>(free_loops.size()); }
};

// Pivot of arc k on tile t for a given pattern.
Vertex arc_pivot(const Tile& t, bool open, int k);

LoopConfig loops_from_bonds(const DobrushinDomain& d, const BondConfig& w);
BondConfig bonds_from_loops(const LoopConfig& l);

enum class TileType : std::uint8_t { T1, T2, T3, T4, T5A, T5B, T6A, T6B };
std::string to_string(TileType t);
// 1..6 ignoring the A/B split.
int type_number(TileType t);

struct OrientedLoops {
  std::vector<std::uint8_t> open;      // arc pattern per tile, as in LoopConfig
  std::vector<std::int8_t> arc_sense;  // final sense per arc
  std::vector<std::uint8_t> loop_cw;   // per loop
  std::vector<TileType> types;         // per tile
};

// Probabilities and decision rules attached to the uniforms of the coupling.
struct CouplingThresholds {
  double clockwise = 0;    // free loop clockwise iff U < clockwise
  double split = 0;        // interior type 5/6 split into right arcs iff U' < split
  double one_over_c = 0;   // interior type 5/6: (1,1) iff U' < one_over_c
  double two_over_c = 0;   //                    (0,0) iff U' < two_over_c, else (0,1)
  double one_over_cb = 0;  // boundary type 5/6: (1,1) iff U' < one_over_cb, else (0,0)

  static CouplingThresholds from(const CriticalParams& cp);

  double p_clockwise() const;
  double p_split() const;
  double p11() const;
  double p00() const;
  double p01() const;
  double pb11() const;
};

// Free loop l (index into free_loops) clockwise iff U[l] < threshold.
OrientedLoops orient_loops(const LoopConfig& l, const std::vector<double>& U, const CouplingThresholds& th);
// Same with the orientation bits given directly (bit l set = clockwise).
OrientedLoops orient_loops_bits(const LoopConfig& l, const std::vector<std::uint8_t>& clockwise);

struct SpinPair {
  std::vector<std::int8_t> primal;  // over V̄, DobrushinDomain::primal_index
  std::vector<std::int8_t> dual;    // over the dual box, DobrushinDomain::dual_index (corners 0)
};

struct SpinInconsistency : std::logic_error {
  using std::logic_error::logic_error;
};
struct IceRuleViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SpinPair spins_from_orientations(const DobrushinDomain& d, const OrientedLoops& o, int root = 1);
bool has_dobrushin_boundary(const DobrushinDomain& d, const SpinPair& s);
bool satisfies_ice_rule(const DobrushinDomain& d, const SpinPair& s);

// Per-tile type numbers 1..6.
std::vector<int> tile_types(const DobrushinDomain& d, const SpinPair& s);
int count_t56(const DobrushinDomain& d, const std::vector<int>& types, bool boundary);

// Encoding of spin pairs with Dobrushin boundary values: bits over B (in
// primal index order) then B' (in dual index order).
int spin_bits(const DobrushinDomain& d);
std::uint64_t spin_key(const DobrushinDomain& d, const SpinPair& s);
SpinPair spin_from_key(const DobrushinDomain& d, std::uint64_t key);

// Deterministic parts of the backward maps. `right` holds one bit per tile
// (used only on interior type 5/6 tiles); `state` one of 0 = (0,0),
// 1 = (0,1), 2 = (1,1) per tile (used only on type 5/6 tiles).
BondConfig fk_from_spins_choice(const DobrushinDomain& d, const SpinPair& s, const std::vector<int>& types,
                                const std::vector<std::uint8_t>& right);
AtrcConfig matrc_from_spins_choice(const DobrushinDomain& d, const SpinPair& s, const std::vector<int>& types,
                                   const std::vector<std::uint8_t>& state);

BondConfig fk_from_spins(const DobrushinDomain& d, const SpinPair& s, const std::vector<double>& Uprime,
                         const CouplingThresholds& th);
AtrcConfig matrc_from_spins(const DobrushinDomain& d, const SpinPair& s, const std::vector<double>& Uprime,
                            const CouplingThresholds& th);

// One draw of the whole chain from an FK^{1/1} configuration.
struct ChainSample {
  BondConfig omega;
  LoopConfig loops;
  OrientedLoops oriented;
  SpinPair spins;
  AtrcConfig atrc;
};
ChainSample run_chain(const DobrushinDomain& d, const BondConfig& w, const CouplingThresholds& th, Rng& rng);

struct ChainReport {
  int n = 0, m = 0;
  double q = 0;
  CouplingThresholds thresholds;
  double tv_fk_to_spin = 0;
  double tv_spin_to_fk = 0;
  double tv_spin_to_matrc = 0;
  std::uint64_t matrc_support = 0;
  double max_tv() const;
};

// Exact push-forwards of the chain against the three target measures.
// Randomness is integrated analytically.
ChainReport verify_chain(int n, int m, const CriticalParams& cp, const CouplingThresholds& th);

// Exact law of the six-vertex spin measure Spin^{+-,+-} indexed by spin_key.
std::vector<double> spin_target_law(const DobrushinDomain& d, const CriticalParams& cp);

}  // namespace wetting
