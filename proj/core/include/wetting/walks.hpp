#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wetting/rng.hpp"

namespace wetting {

struct Step {
  int dx = 1;  // >= 1
  int dy = 0;
  double p = 0;
};

struct InvalidDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Law of one increment (T, X) of a directed walk; support in {x1 >= |x2|}.
struct IncrementDist {
  std::vector<Step> steps;
  bool symmetric = false;
  double truncation = 0;  // tail mass dropped when built from an unbounded family

  static IncrementDist from_steps(std::vector<Step> steps, double truncation = 0);
  // dx = 1, dy = +-1.
  static IncrementDist simple();
  // dx = 1, dy = 0 with probability p0, +-1 otherwise.
  static IncrementDist lazy(double p0);

  void validate() const;
  bool unit_step() const;
  int max_dx() const;
  int max_abs_dy() const;
  double mean_dx() const;
  double var_dy() const;
  // Time reversal: dy -> -dy.
  IncrementDist reversed() const;
};

struct Point {
  long x = 0;
  long y = 0;
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};
using Walk = std::vector<Point>;  // positions, start included

Walk walk_from_steps(Point start, const std::vector<std::pair<int, int>>& steps);

struct SyncTriple {
  long T = 0, S = 0, Sp = 0;
  friend bool operator==(const SyncTriple& a, const SyncTriple& b) {
    return a.T == b.T && a.S == b.S && a.Sp == b.Sp;
  }
};

struct NoCommonAbscissa : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The two walks seen at their common abscissas.
std::vector<SyncTriple> synchronize(const Walk& a, const Walk& b);
// First k with S_k <= S'_k, or -1.
long first_crossing(const std::vector<SyncTriple>& sync);

// Kernel tables over a height window [lo, hi] for both walks.
struct SyncWalkKernels {
  int i = 0, ip = 0;  // start heights at abscissa 0
  int lo = 0, hi = 0;
  int n_max = 0;
  std::vector<int> times;                  // abscissas with stored tables
  std::vector<std::vector<double>> q;      // P(sync at n with heights (j, j'))
  std::vector<std::vector<double>> qplus;  // same, ordered at every earlier sync time
  std::vector<double> qplus_total;         // P(ordered at all sync times <= n), n = 0..n_max
  double overflow = 0;                     // mass that left the window
  double overflow_plus = 0;

  int width() const { return hi - lo + 1; }
  double q_at(std::size_t t, int j, int jp) const { return q[t][(j - lo) * width() + (jp - lo)]; }
  double qplus_at(std::size_t t, int j, int jp) const { return qplus[t][(j - lo) * width() + (jp - lo)]; }
};

struct WindowOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Forward DP over (abscissa, heights, pending landings) for two independent
// walks. Tables are stored at the abscissas in `store`.
SyncWalkKernels kernel_dp(const IncrementDist& dist, int i, int ip, int n_max, int lo, int hi,
                          const std::vector<int>& store);
// Height window ceil(4 sqrt(n) ln n) around the starting heights.
int default_window(int n);

// Two independent +-1 walks: the pair moves either the gap D = S - S' or
// the sum S + S' by +-2 at each step, each with probability 1/2. Exact
// quantities built on that split.
//
// P(S_k > S'_k for k = 1..n) for a start gap g0, n = 0..n_max.
std::vector<double> ordered_survival_pm1(int gap0, int n_max);
// q⁺_{i,i'}(n, j, j') and q_{i,i'}(n, j, j').
double ordered_pair_kernel_pm1(int i, int ip, int n, int j, int jp);
double pair_kernel_pm1(int i, int ip, int n, int j, int jp);

// Joint law at the midpoint of an ordered bridge pair from gap g0 to gap g1
// over n steps (n even), with S + S' equal at both ends.
struct MidpointLaw {
  int n = 0, gap0 = 0, gap1 = 0;
  std::map<int, double> gap;    // D_{n/2}
  std::map<int, double> upper;  // S_{n/2} (relative to the common centre)
  std::map<int, double> lower;  // S'_{n/2}
  double lost = 0;              // mass outside the window
};
MidpointLaw midpoint_law_pm1(int n, int gap0, int gap1, int window = -1);

// Exact bridge samplers.
struct UnreachableEndpoint : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct RetryExhausted : std::runtime_error {
  RetryExhausted(const std::string& what, double rate) : std::runtime_error(what), acceptance(rate) {}
  double acceptance;
};

// Unit-step mode: backward DP and forward Doob sampling. General mode:
// rejection on the exact hit of `end`.
Walk sample_bridge(const IncrementDist& dist, Point start, Point end, Rng& rng, long retry_budget = 1000000);

// h[k][y - lo] = P(S_n = end | S_k = y) for a unit-step law.
struct BridgeTable {
  Point start, end;
  long lo = 0, hi = 0;
  int n = 0;
  std::vector<std::vector<double>> h;
};
BridgeTable bridge_table(const IncrementDist& dist, Point start, Point end);
Walk sample_bridge(const IncrementDist& dist, const BridgeTable& t, Rng& rng);

enum class PairConditioning { None, Ordered, DiamondDisjoint };

struct BridgePair {
  Walk upper, lower;
  PairConditioning mode = PairConditioning::None;
  long attempts = 0;
};

// Diamonds of consecutive points are closed rectangles in the coordinates
// (x + y, x - y); the envelopes are disjoint iff no two rectangles meet.
bool diamond_envelopes_disjoint(const Walk& a, const Walk& b);
bool ordered_at_sync_times(const Walk& upper, const Walk& lower);

// Exact conditioned pair sampler for unit-step laws (joint backward DP over
// height pairs); rejection from independent bridges otherwise.
class PairSampler {
 public:
  PairSampler(const IncrementDist& dist, Point start_up, Point start_low, Point end_up, Point end_low,
              PairConditioning mode, long retry_budget = 1000000);
  BridgePair sample(Rng& rng);
  // Probability that independent bridges satisfy the conditioning (unit-step).
  double acceptance_probability() const { return acceptance_; }
  long attempts() const { return attempts_; }
  long accepted() const { return accepted_; }

 private:
  bool allowed(long a, long ap, long b, long bp) const;

  IncrementDist dist_;
  Point su_, sl_, eu_, el_;
  PairConditioning mode_;
  long budget_;
  bool exact_ = false;
  long lo_ = 0, hi_ = 0;
  int steps_ = 0;
  std::vector<std::vector<double>> h_;  // h_[k][(a-lo)*W + (b-lo)]
  std::vector<BridgeTable> single_;     // rejection mode, unit-step laws
  double acceptance_ = 0;
  long attempts_ = 0, accepted_ = 0;
};

// Two-bridge watermelon proxy at resolution K: ordered +-1 bridge pairs
// with end gaps `gap` (0: ceil(ln^2 K)). Midpoint laws are exact, the
// maximum gap is sampled.
struct WatermelonTable {
  int K = 0;
  int end_gap = 0;
  std::vector<std::pair<double, double>> gap;    // (value / sqrt K, prob)
  std::vector<std::pair<double, double>> upper;  // midpoint heights
  std::vector<std::pair<double, double>> lower;
  std::vector<double> max_gap_samples;           // / sqrt K
  double mean_gap = 0;                           // in lattice units
};
WatermelonTable watermelon_reference(int K, int gap = 0, int max_gap_samples = 0, std::uint64_t seed = 1);
// Sampled ordered +-1 bridge pair with the D/S split (exact).
BridgePair sample_ordered_pair_pm1(int n, int gap0, int gap1, Rng& rng);

// Kolmogorov–Smirnov distance between two discrete laws on the line.
double ks_distance(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b);

struct PeriodicityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct HypothesisError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LltReport {
  int n = 0;
  double radius = 0;
  double sup_rel_error = 0;
  long argmax = 0;
  double exact_at_mean = 0;
  double gauss_at_mean = 0;
};
// Exact law of S_n by convolution against the Gaussian local formula over
// |x - mu n| <= n^exponent.
LltReport llt_check(const std::vector<std::pair<int, double>>& dist, int n, double exponent = 7.0 / 12.0);
std::vector<double> convolve_power(const std::vector<std::pair<int, double>>& dist, int n, long* offset);

struct RenewalReport {
  int n = 0;
  double mu = 0;
  double sigma2 = 0;       // Var(X_1)
  double sup_rel_error = 0;          // against (1/mu) N(0, n sigma2 / mu)
  double sup_rel_error_literal = 0;  // against (1/mu) N(0, n sigma2)
  std::vector<std::pair<long, double>> exact;  // x -> P(exists k: T_k = n, S_k = x)
};
// `radius` in units of sqrt(n).
RenewalReport renewal_hit_check(const IncrementDist& dist, int n, double radius = 1.0);
// P(exists k: T_k = n, S_k = x) for all x, by DP over abscissas.
std::vector<double> renewal_hit_law(const IncrementDist& dist, int n, long* offset);

struct SupportMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);
std::vector<double> product_law(const std::vector<double>& p, const std::vector<double>& q);
// d(p1 x p2, q1 x q2) <= d(p1, q1) + d(p2, q2).
double product_tv_bound(double e1, double e2);
// Law conditioned on a set of indices.
std::vector<double> condition_on(const std::vector<double>& p, const std::vector<std::uint8_t>& event);
// If d(p, q) <= eps and p(A), q(A) >= delta then d(p(.|A), q(.|A)) <= eps (1/delta + 1/delta^2).
double conditional_tv_bound(double eps, double delta);

struct LinearFit {
  double slope = 0, intercept = 0, slope_se = 0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wetting
