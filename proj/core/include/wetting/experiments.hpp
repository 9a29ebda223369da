#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wetting/bkw.hpp"
#include "wetting/interfaces.hpp"
#include "wetting/params.hpp"

namespace wetting {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string name = "wetting";
  double q = 25;
  std::vector<int> sizes{16, 32, 64, 128};
  double c0 = 1;           // m = ceil(c0 n)
  int replicas = 1;
  long sweeps = 4000;      // recorded sweeps per replica
  std::vector<long> sweeps_per_size;  // optional, overrides sweeps size by size
  long thin = 1;           // full statistics every thin sweeps
  long burn_in = -1;       // -1: 20 x tau_int of a pilot run
  std::uint64_t seed = 0;
  bool has_seed = false;
  StatsConfig stats;
  std::string out = "out";
  double budget_seconds = 0;  // total wall-clock budget, 0: none
  double ess_target = 0;      // stop a size once its gap ESS reaches this, 0: run all sweeps

  void validate() const;
  int m_of(int n) const;
  long sweeps_for(std::size_t size_index) const;
  std::string to_json() const;
  // Throws ConfigError on missing seed or bad fields.
  static ExperimentConfig from_json(const std::string& text);
};

struct Check {
  int criterion = 0;       // 0: not tied to a numbered criterion
  std::string name;
  bool pass = false;
  bool gating = true;      // diagnostic lines do not decide the exit code
  double value = 0;
  std::string band;
  std::string note;
};

struct Report {
  std::string experiment;
  std::string config;                         // ExperimentConfig JSON
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;          // one per (size, replica)
  std::vector<std::string> sample_columns;    // optional per-sample table
  std::vector<std::vector<double>> sample_rows;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<Check> checks;
  std::map<std::string, std::string> provenance;
  std::vector<std::string> warnings;

  void set(const std::string& key, double v);
  double get(const std::string& key) const;
  bool has(const std::string& key) const;
  bool passed() const;
};

std::string report_json(const Report& r);
std::string report_csv(const Report& r);
// Structural validation of a serialized report.
bool validate_report_json(const std::string& text, std::string* why = nullptr);
Report report_from_json(const std::string& text);
// format: json, csv or both. Returns the written paths.
std::vector<std::string> export_report(const Report& r, const std::string& dir, const std::string& format);

// Euler relation between primal clusters on K and dual clusters on (K')^1.
struct EulerReport {
  std::vector<int> values;         // distinct values over all configurations
  std::vector<int> values_linked;  // restricted to v_L <-> v_R
  std::uint64_t configs = 0;
  bool constant() const { return values.size() == 1; }
  bool constant_linked() const { return values_linked.size() == 1; }
};
EulerReport euler_check(const DobrushinDomain& d);

// mATRC below a fixed open path: domination by the law given only the path
// open, and independence of the configuration above it.
struct RepulsivenessReport {
  int path_edges = 0, below_edges = 0, above_edges = 0;
  std::uint64_t conditionings = 0;
  std::uint64_t distinct_laws = 0;
  double max_deficit = 0;   // worst domination deficit
  double max_tv_above = 0;  // law below given the path open, with vs without the top fixed
};
RepulsivenessReport repulsiveness_check(const DobrushinDomain& d, const CriticalParams& cp);

// Small graphs used by the exact checks.
GraphView cycle_graph(int k);
GraphView grid_graph(int w, int h);

// Criteria 1-5 and 12 at enumeration scale.
Report run_verify_small(const ExperimentConfig& cfg);
// Same chain check with one threshold shifted; index 0..4 in the order
// clockwise, split, 1/c, 2/c, 1/c_b.
CouplingThresholds corrupt_threshold(const CouplingThresholds& th, int which, double delta);
extern const char* const kThresholdNames[5];

struct SizeSummary {
  int n = 0, m = 0;
  long samples = 0;       // recorded sweeps
  long burn_in = 0;
  double tau_gap = 0;  // integrated autocorrelation of the gap, in samples
  double ess = 0;
  Estimate gap, width, potts_gap, potts_width;
  double max_width = 0;
  double p_mdist_small = 0;  // P(Mdist <= sc^2)
  double p_mdist_diag = 0;   // P(Mdist <= 1) at the diagnostic slab exponent
  double mean_mdist_diag = 0;
  double p_gcl = 0;
  double p_crossings = 0;
  double seconds = 0;
};

// FK^{1/1}(.|separated) by Swendsen–Wang (integer q) or heat bath, chain
// coupled statistics per recorded sweep.
Report run_wetting(const ExperimentConfig& cfg, std::vector<SizeSummary>* sizes = nullptr);

Report run_walk_suite(const ExperimentConfig& cfg);
Report run_boundary_crossing(const ExperimentConfig& cfg);

}  // namespace wetting
