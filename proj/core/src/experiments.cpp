#include "wetting/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wetting/gibbs.hpp"
#include "wetting/walks.hpp"

namespace wetting {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// FNV-1a, 64 bit.
std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

void add_provenance(Report& r, const ExperimentConfig& cfg, double wall) {
  r.provenance["config_hash"] = fnv_hex(r.config);
  r.provenance["seed"] = std::to_string(cfg.seed);
  r.provenance["version"] = "0.1.0";
  r.provenance["schema"] = "1";
#if defined(__clang__)
  r.provenance["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  r.provenance["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << wall;
  r.provenance["wall_clock_s"] = o.str();
}

Check make_check(int criterion, std::string name, bool pass, double value, std::string band,
                 std::string note = {}, bool gating = true) {
  Check c;
  c.criterion = criterion;
  c.name = std::move(name);
  c.pass = pass;
  c.value = value;
  c.band = std::move(band);
  c.note = std::move(note);
  c.gating = gating;
  return c;
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(6) << v;
  return o.str();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (!has_seed) throw ConfigError("seed is required");
  if (!(q > 4)) throw ConfigError("q must exceed 4");
  if (sizes.empty()) throw ConfigError("no sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 0) throw ConfigError("negative size");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw ConfigError("sizes must be strictly increasing");
  }
  if (c0 < 1) throw ConfigError("c0 must be at least 1");
  if (replicas < 1) throw ConfigError("replicas must be positive");
  if (sweeps < 1 || thin < 1) throw ConfigError("sweeps and thin must be positive");
  if (!sweeps_per_size.empty() && sweeps_per_size.size() != sizes.size())
    throw ConfigError("sweeps_per_size must match sizes");
  for (long s : sweeps_per_size)
    if (s < 1) throw ConfigError("sweeps must be positive");
  if (!(stats.rho > 0)) throw ConfigError("rho must be positive");
  if (budget_seconds < 0 || ess_target < 0) throw ConfigError("budget and ESS target must be nonnegative");
}

long ExperimentConfig::sweeps_for(std::size_t i) const {
  return sweeps_per_size.empty() ? sweeps : sweeps_per_size.at(i);
}

int ExperimentConfig::m_of(int n) const { return static_cast<int>(std::ceil(c0 * n)); }

std::string ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["q"] = q;
  j["sizes"] = sizes;
  j["c0"] = c0;
  j["replicas"] = replicas;
  j["sweeps"] = sweeps;
  if (!sweeps_per_size.empty()) j["sweeps_per_size"] = sweeps_per_size;
  j["burn_in"] = burn_in;
  j["thin"] = thin;
  j["seed"] = seed;
  j["slab_exponent"] = stats.slab_exponent;
  j["diag_exponent"] = stats.diag_exponent;
  j["rho"] = stats.rho;
  j["out"] = out;
  j["budget_seconds"] = budget_seconds;
  j["ess_target"] = ess_target;
  return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (!j.contains("seed")) throw ConfigError("seed is required");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.has_seed = true;
    c.name = j.value("name", c.name);
    c.q = j.value("q", c.q);
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<int>>();
    c.c0 = j.value("c0", c.c0);
    c.replicas = j.value("replicas", c.replicas);
    c.sweeps = j.value("sweeps", c.sweeps);
    if (j.contains("sweeps_per_size")) c.sweeps_per_size = j.at("sweeps_per_size").get<std::vector<long>>();
    c.burn_in = j.value("burn_in", c.burn_in);
    c.thin = j.value("thin", c.thin);
    c.stats.slab_exponent = j.value("slab_exponent", c.stats.slab_exponent);
    c.stats.diag_exponent = j.value("diag_exponent", c.stats.diag_exponent);
    c.stats.rho = j.value("rho", c.stats.rho);
    c.out = j.value("out", c.out);
    c.budget_seconds = j.value("budget_seconds", c.budget_seconds);
    c.ess_target = j.value("ess_target", c.ess_target);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------- report

void Report::set(const std::string& key, double v) {
  for (auto& kv : summary)
    if (kv.first == key) {
      kv.second = v;
      return;
    }
  summary.emplace_back(key, v);
}

double Report::get(const std::string& key) const {
  for (const auto& kv : summary)
    if (kv.first == key) return kv.second;
  throw std::out_of_range("no summary entry " + key);
}

bool Report::has(const std::string& key) const {
  return std::any_of(summary.begin(), summary.end(), [&](const auto& kv) { return kv.first == key; });
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.gating || c.pass; });
}

std::string report_json(const Report& r) {
  json j;
  j["schema"] = 1;
  j["experiment"] = r.experiment;
  j["config"] = r.config.empty() ? json::object() : json::parse(r.config);
  j["columns"] = r.columns;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json a = json::array();
    for (double v : row) a.push_back(number_or_null(v));
    rows.push_back(std::move(a));
  }
  j["rows"] = std::move(rows);
  json summary = json::array();
  for (const auto& [k, v] : r.summary) summary.push_back({{"key", k}, {"value", number_or_null(v)}});
  j["summary"] = std::move(summary);
  json checks = json::array();
  for (const Check& c : r.checks)
    checks.push_back({{"criterion", c.criterion},
                      {"name", c.name},
                      {"pass", c.pass},
                      {"gating", c.gating},
                      {"value", number_or_null(c.value)},
                      {"band", c.band},
                      {"note", c.note}});
  j["checks"] = std::move(checks);
  j["provenance"] = r.provenance;
  j["warnings"] = r.warnings;
  j["passed"] = r.passed();
  return j.dump(2);
}

namespace {

void write_csv(std::ostream& o, const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < columns.size(); ++i) o << (i ? "," : "") << columns[i];
  o << "\n";
  o << std::setprecision(10);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) o << ",";
      if (std::isfinite(row[i]))
        o << row[i];
      else
        o << (row[i] > 0 ? "inf" : "nan");
    }
    o << "\n";
  }
}

}  // namespace

std::string report_csv(const Report& r) {
  std::ostringstream o;
  write_csv(o, r.columns, r.rows);
  return o.str();
}

bool validate_report_json(const std::string& text, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    return fail(e.what());
  }
  if (!j.is_object()) return fail("not an object");
  for (const char* k : {"schema", "experiment", "config", "columns", "rows", "summary", "checks", "provenance", "passed"})
    if (!j.contains(k)) return fail(std::string("missing ") + k);
  if (j["schema"] != 1) return fail("unknown schema");
  if (!j["experiment"].is_string() || !j["columns"].is_array() || !j["rows"].is_array()) return fail("bad types");
  const std::size_t width = j["columns"].size();
  for (const auto& row : j["rows"])
    if (!row.is_array() || row.size() != width) return fail("row width differs from columns");
  for (const auto& c : j["checks"])
    for (const char* k : {"criterion", "name", "pass", "gating", "value", "band"})
      if (!c.contains(k)) return fail(std::string("check without ") + k);
  if (!j["provenance"].contains("seed")) return fail("provenance without seed");
  return true;
}

Report report_from_json(const std::string& text) {
  std::string why;
  if (!validate_report_json(text, &why)) throw std::invalid_argument("invalid report: " + why);
  const json j = json::parse(text);
  auto num = [](const json& v) { return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>(); };
  Report r;
  r.experiment = j["experiment"];
  r.config = j["config"].dump();
  r.columns = j["columns"].get<std::vector<std::string>>();
  for (const auto& row : j["rows"]) {
    std::vector<double> v;
    for (const auto& x : row) v.push_back(num(x));
    r.rows.push_back(std::move(v));
  }
  for (const auto& s : j["summary"]) r.summary.emplace_back(s["key"].get<std::string>(), num(s["value"]));
  for (const auto& c : j["checks"]) {
    Check k;
    k.criterion = c["criterion"];
    k.name = c["name"];
    k.pass = c["pass"];
    k.gating = c["gating"];
    k.value = num(c["value"]);
    k.band = c["band"];
    k.note = c.value("note", "");
    r.checks.push_back(std::move(k));
  }
  r.provenance = j["provenance"].get<std::map<std::string, std::string>>();
  if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
  return r;
}

std::vector<std::string> export_report(const Report& r, const std::string& dir, const std::string& format) {
  if (format != "json" && format != "csv" && format != "both") throw std::invalid_argument("format: json, csv or both");
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> out;
  auto put = [&](const std::string& name, const std::string& body) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << body;
    if (!f) throw std::runtime_error("write failed: " + p.string());
    out.push_back(p.string());
  };
  if (format != "csv") put(r.experiment + ".json", report_json(r));
  if (format != "json") {
    put(r.experiment + ".csv", report_csv(r));
    if (!r.sample_rows.empty()) {
      std::ostringstream o;
      write_csv(o, r.sample_columns, r.sample_rows);
      put(r.experiment + "_samples.csv", o.str());
    }
  }
  return out;
}

// ---------------------------------------------------------------- exact checks

GraphView cycle_graph(int k) {
  GraphView g;
  g.num_vertices = k;
  for (int i = 0; i < k; ++i) g.ends.push_back({i, (i + 1) % k});
  return g;
}

GraphView grid_graph(int w, int h) {
  GraphView g;
  g.num_vertices = w * h;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) g.ends.push_back({y * w + x, y * w + x + 1});
      if (y + 1 < h) g.ends.push_back({y * w + x, (y + 1) * w + x});
    }
  return g;
}

EulerReport euler_check(const DobrushinDomain& d) {
  const int ne = d.num_edges();
  if (ne > 22) throw CapacityError("euler_check: domain too large to enumerate");
  const GraphView& K = d.view(View::K);
  const GraphView& D1 = d.view(View::DualK1);
  const int s = d.view_vertex(View::K, d.vL()), t = d.view_vertex(View::K, d.vR());
  std::set<int> all, linked;
  BondConfig w(ne), ws(ne);
  EulerReport r;
  for (std::uint64_t key = 0; key < (std::uint64_t{1} << ne); ++key) {
    for (int e = 0; e < ne; ++e) {
      w[e] = (key >> e) & 1u;
      ws[e] = 1 - w[e];
    }
    const int v = cluster_count(ws, D1) - cluster_count(w, K) - std::popcount(key);
    all.insert(v);
    if (connected(w, K, s, t)) linked.insert(v);
    ++r.configs;
  }
  r.values.assign(all.begin(), all.end());
  r.values_linked.assign(linked.begin(), linked.end());
  return r;
}

RepulsivenessReport repulsiveness_check(const DobrushinDomain& d, const CriticalParams& cp) {
  const MeasureSpec spec = matrc_domain(d, cp, false);
  const int ne = d.num_edges();
  std::vector<int> path, below, above;
  for (int e = 0; e < ne; ++e) {
    const Segment& s = d.tile(e).primal;
    if (s.a.y == 0 && s.b.y == 0)
      path.push_back(e);
    else if (s.a.y + s.b.y < 0)
      below.push_back(e);
    else
      above.push_back(e);
  }
  RepulsivenessReport rep;
  rep.path_edges = static_cast<int>(path.size());
  rep.below_edges = static_cast<int>(below.size());
  rep.above_edges = static_cast<int>(above.size());

  // Local states per edge: 0 = (0,0), 1 = (1,1), 2 = (0,1) on interior edges.
  auto states = [&](int e) { return spec.interior[e] ? 3 : 2; };
  // Below lives in the pair lattice: tau bits, then tautau bits of interior edges.
  std::vector<int> tt_bit(below.size(), -1);
  int bits = rep.below_edges;
  for (std::size_t i = 0; i < below.size(); ++i)
    if (spec.interior[below[i]]) tt_bit[i] = bits++;
  if (bits > 20 || path.size() + above.size() > 24)
    throw CapacityError("repulsiveness_check: domain too large to enumerate");
  const std::size_t L = std::size_t{1} << bits;

  std::vector<int> st(ne, 0);
  AtrcConfig x{BondConfig(ne, 0), BondConfig(ne, 0)};
  const double ref = log_weight(x, spec);
  auto apply = [&](int e) {
    x.tau[e] = st[e] == 1;
    x.tautau[e] = st[e] != 0;
  };
  // Odometer over a list of edges; false once it wraps.
  auto next = [&](const std::vector<int>& edges) {
    for (int e : edges) {
      if (++st[e] < states(e)) {
        apply(e);
        return true;
      }
      st[e] = 0;
      apply(e);
    }
    return false;
  };
  // Unnormalised law below for the current outer configuration.
  auto law_below = [&](std::vector<double>& m) {
    do {
      const double lw = log_weight(x, spec);
      if (lw == kNegInf) continue;
      std::size_t bc = 0;
      for (std::size_t i = 0; i < below.size(); ++i) {
        const int s = st[below[i]];
        if (s == 1) bc |= std::size_t{1} << i;
        if (s != 0 && tt_bit[i] >= 0) bc |= std::size_t{1} << tt_bit[i];
      }
      m[bc] = std::exp(lw - ref);
    } while (next(below));
  };

  // Cluster counts change with the edges below only through merges among
  // their endpoints, so the law below depends on the outer configuration
  // only through the partition it induces on those endpoints (in K for tau,
  // in K^1 for tautau).
  std::vector<int> ends_k, ends_k1;
  for (int e : below) {
    for (int v : spec.graph.ends[e]) ends_k.push_back(v);
    for (int v : spec.graph1.ends[e]) ends_k1.push_back(v);
  }
  UnionFind uf, uf1;
  auto signature = [&] {
    uf.reset(spec.graph.num_vertices);
    uf1.reset(spec.graph1.num_vertices);
    for (int e = 0; e < ne; ++e) {
      if (st[e] == 0 || std::find(below.begin(), below.end(), e) != below.end()) continue;
      if (st[e] == 1) uf.unite(spec.graph.ends[e][0], spec.graph.ends[e][1]);
      uf1.unite(spec.graph1.ends[e][0], spec.graph1.ends[e][1]);
    }
    std::vector<int> key;
    for (auto [f, ends] : {std::pair{&uf, &ends_k}, std::pair{&uf1, &ends_k1}})
      for (std::size_t i = 0; i < ends->size(); ++i) {
        std::size_t j = 0;
        while (f->find((*ends)[j]) != f->find((*ends)[i])) ++j;
        key.push_back(static_cast<int>(j));
      }
    return key;
  };

  // Per signature: law below relative to the all-closed state below.
  std::map<std::vector<int>, std::vector<double>> shapes;
  std::vector<int> outer = path;
  outer.insert(outer.end(), above.begin(), above.end());
  struct Outer {
    const std::vector<double>* shape;
    double weight;  // weight with everything below closed
    bool open_path;
  };
  std::vector<Outer> configs;
  do {
    const double w0 = log_weight(x, spec);  // st is 0 on every edge below here
    if (w0 == kNegInf) continue;
    auto key = signature();
    auto it = shapes.find(key);
    if (it == shapes.end()) {
      std::vector<double> m(L, 0.0);
      law_below(m);
      const double m0 = m[0];
      for (double& v : m) v /= m0;
      it = shapes.emplace(std::move(key), std::move(m)).first;
    }
    const bool open_path = std::all_of(path.begin(), path.end(), [&](int e) { return st[e] == 1; });
    configs.push_back({&it->second, std::exp(w0 - ref), open_path});
  } while (next(outer));

  auto normalised = [](std::vector<double> v) {
    const double z = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& a : v) a /= z;
    return v;
  };
  // nu: law below given only tau = 1 on the path.
  std::vector<double> nu(L, 0.0);
  for (const Outer& o : configs)
    if (o.open_path)
      for (std::size_t i = 0; i < L; ++i) nu[i] += o.weight * (*o.shape)[i];
  nu = normalised(nu);

  const auto covers = boolean_covers(bits);
  std::map<const std::vector<double>*, double> deficit;
  for (const auto& [key, shape] : shapes) deficit[&shape] = domination_deficit(normalised(shape), nu, covers);
  for (const Outer& o : configs) {
    ++rep.conditionings;
    rep.max_deficit = std::max(rep.max_deficit, deficit[o.shape]);
    if (o.open_path) rep.max_tv_above = std::max(rep.max_tv_above, tv_distance(normalised(*o.shape), nu));
  }
  rep.distinct_laws = shapes.size();
  return rep;
}

const char* const kThresholdNames[5] = {"clockwise", "split", "one_over_c", "two_over_c", "one_over_cb"};

CouplingThresholds corrupt_threshold(const CouplingThresholds& th, int which, double delta) {
  CouplingThresholds t = th;
  double* f[5] = {&t.clockwise, &t.split, &t.one_over_c, &t.two_over_c, &t.one_over_cb};
  if (which < 0 || which > 4) throw std::out_of_range("threshold index");
  *f[which] += delta;
  return t;
}

Report run_verify_small(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  cfg.validate();
  Report r;
  r.experiment = "verify_small";
  r.config = cfg.to_json();
  r.columns = {"n", "m", "q", "tv_fk_to_spin", "tv_spin_to_fk", "tv_spin_to_matrc", "matrc_support", "seconds"};
  const CriticalParams cp = params_from_q(cfg.q);
  const CouplingThresholds th = CouplingThresholds::from(cp);
  const std::string qs = fmt(cfg.q);

  for (auto [n, m] : {std::pair{0, 0}, std::pair{1, 0}}) {
    const auto t1 = Clock::now();
    const ChainReport c = verify_chain(n, m, cp, th);
    const double secs = seconds_since(t1);
    r.rows.push_back({double(n), double(m), cfg.q, c.tv_fk_to_spin, c.tv_spin_to_fk, c.tv_spin_to_matrc,
                      double(c.matrc_support), secs});
    const std::string dom = "K_{" + std::to_string(n) + "," + std::to_string(m) + "}";
    r.checks.push_back(make_check(1, "coupling exactness " + dom + " q=" + qs, c.max_tv() <= 1e-10 && secs <= 300,
                                  c.max_tv(), "max TV <= 1e-10, <= 300 s",
                                  "fk->spin " + fmt(c.tv_fk_to_spin) + ", spin->fk " + fmt(c.tv_spin_to_fk) +
                                      ", spin->matrc " + fmt(c.tv_spin_to_matrc) + ", " + fmt(secs) + " s"));
  }

  {  // FKG lattice for mATRC on a 4-cycle, ring vertices 0 and 2 identified in K^1
    const GraphView k = cycle_graph(4);
    GraphView k1;
    k1.num_vertices = 3;
    k1.ends = {{0, 1}, {1, 0}, {0, 2}, {2, 0}};
    const MeasureSpec spec = matrc_graph(k, k1, {1, 1, 0, 0}, cp.c, cp.c_b);
    const FkgReport f = check_fkg_lattice(spec, 1e-12);
    r.checks.push_back(make_check(2, "FKG lattice, mATRC on a 4-edge graph", f.holds, f.min_slack,
                                  "min slack >= -1e-12", std::to_string(f.pairs) + " pairs"));
    const MeasureSpec qs4 = qfk_graph(k, cp.p, cfg.q, {1, 1, 0, 0}, {0, 0, 1, 0}, cp.qb_wired, cp.qb_wired);
    const FkgReport g = check_fkg_lattice(qs4, 1e-12);
    r.checks.push_back(make_check(0, "FKG lattice, quasi-FK on a 4-cycle", g.holds, g.min_slack,
                                  "min slack >= -1e-12", "", false));
  }

  {  // quasi-FK domination on a 5-edge graph: 4-cycle plus a chord
    GraphView g = cycle_graph(4);
    g.ends.push_back({0, 2});
    const std::vector<std::uint8_t> b1{1, 1, 0, 0}, b2{0, 0, 1, 1};
    const double qb = cp.qb_wired;
    const MeasureSpec upper = qfk_graph(g, cp.p, cfg.q, b1, b2, 1.0, qb);
    const MeasureSpec lower = qfk_graph(g, cp.p, cfg.q, b1, b2, qb, qb);
    const DominationReport dom = check_stoch_dom(lower, upper, 1e-12);
    r.checks.push_back(make_check(3, "quasi-FK domination on a 5-edge graph", dom.holds, dom.deficit,
                                  "max over up-sets of mu(U) - nu(U) <= 1e-12",
                                  "q_b = " + fmt(qb) + ", all " + std::to_string(count_upsets(5)) + " up-sets"));
    const DominationReport rev = check_stoch_dom(upper, lower, 1e-12);
    r.checks.push_back(make_check(0, "reverse domination is detected as false", !rev.holds, rev.deficit,
                                  "deficit > 1e-12", "", false));
    const auto t1 = Clock::now();
    const RepulsivenessReport rp = repulsiveness_check(DobrushinDomain(1, 0), cp);
    r.checks.push_back(make_check(
        3, "mATRC below an open path, K_{1,0}", rp.max_deficit <= 1e-12 && rp.max_tv_above <= 1e-12, rp.max_deficit,
        "deficit <= 1e-12 and TV(top fixed, free) <= 1e-12",
        std::to_string(rp.conditionings) + " conditionings, " + std::to_string(rp.below_edges) +
            " edges below, TV " + fmt(rp.max_tv_above) + ", " + fmt(seconds_since(t1)) + " s"));
  }

  {  // Euler relation on K_{0,0}
    const EulerReport e = euler_check(DobrushinDomain(0, 0));
    std::string vals, lvals;
    for (int v : e.values) vals += (vals.empty() ? "" : " ") + std::to_string(v);
    for (int v : e.values_linked) lvals += (lvals.empty() ? "" : " ") + std::to_string(v);
    r.checks.push_back(make_check(4, "Euler constant over all configurations of K_{0,0}", e.constant(),
                                  static_cast<double>(e.values.size()), "one distinct value",
                                  "values {" + vals + "} over " + std::to_string(e.configs) + " configurations"));
    r.checks.push_back(make_check(4, "Euler constant given v_L <-> v_R", e.constant_linked(),
                                  static_cast<double>(e.values_linked.size()), "one distinct value",
                                  "values {" + lvals + "}", false));
  }

  {  // heat bath on a 4-cycle against enumeration
    const MeasureSpec spec = fk_graph(cycle_graph(4), cp.p, cfg.q);
    const ExactLaw law = enumerate_measure(spec);
    const long sweeps = 1000000;
    const auto t1 = Clock::now();
    HeatBathSampler hb(spec, cfg.seed, 0, ConstraintMode::Free);
    std::vector<double> freq(law.prob.size(), 0.0);
    for (long s = 0; s < sweeps; ++s) {
      hb.sweep();
      freq[law_key(law, hb.state())] += 1.0 / sweeps;
    }
    const double tv = tv_distance(freq, law.prob);
    HeatBathSampler a(spec, cfg.seed, 0, ConstraintMode::Free), b(spec, cfg.seed, 0, ConstraintMode::Free);
    bool same = true;
    for (int s = 0; s < 10000 && same; ++s) {
      a.sweep();
      b.sweep();
      same = a.state() == b.state();
    }
    const double secs = seconds_since(t1);
    r.checks.push_back(make_check(5, "heat bath vs enumeration, 4-cycle, 1e6 sweeps", tv <= 0.01 && same && secs <= 120,
                                  tv, "TV <= 0.01, reproducible, <= 120 s",
                                  std::string(same ? "identical" : "different") + " replays, " + fmt(secs) + " s"));
  }

  {  // negative controls on K_{1,0}
    for (int k = 0; k < 5; ++k) {
      const ChainReport c = verify_chain(1, 0, cp, corrupt_threshold(th, k, 0.1));
      r.checks.push_back(make_check(12, std::string("threshold ") + kThresholdNames[k] + " + 0.1 detected",
                                    c.max_tv() > 0.01, c.max_tv(), "max TV > 0.01"));
    }
  }
  add_provenance(r, cfg, seconds_since(t0));
  return r;
}

// ---------------------------------------------------------------- wetting

namespace {

bool integer_q(double q) { return std::abs(q - std::round(q)) < 1e-12 && q >= 2; }

// Both arcs' ordered phases touching along y = -1/2: every interior edge
// open except the vertical ones crossing that line.
BondConfig ordered_start(const DobrushinDomain& d) {
  BondConfig w = d.xi();
  for (int e = 0; e < d.num_interior(); ++e) {
    const Segment& s = d.tile(e).primal;
    const bool crossing = s.a.x == s.b.x && std::min(s.a.y, s.b.y) < 0 && std::max(s.a.y, s.b.y) >= 0;
    w[e] = !crossing;
  }
  return w;
}

class FkChain {
 public:
  FkChain(const DobrushinDomain& d, const CriticalParams& cp, std::uint64_t seed, std::uint32_t replica) {
    if (integer_q(cp.q)) {
      sw_ = std::make_unique<SwendsenWang>(d, cp.p, static_cast<int>(std::lround(cp.q)), seed, replica);
      sw_->set_state(ordered_start(d));
    } else {
      hb_ = std::make_unique<HeatBathSampler>(fk_dobrushin(d, cp.p, cp.q, true), seed, replica,
                                              ConstraintMode::RejectViolating, ordered_start(d));
    }
  }
  void sweep() { sw_ ? sw_->sweep() : hb_->sweep(); }
  const BondConfig& state() const { return sw_ ? sw_->state() : hb_->state(); }

 private:
  std::unique_ptr<SwendsenWang> sw_;
  std::unique_ptr<HeatBathSampler> hb_;
};

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return v.size() >= 2;
}

}  // namespace

Report run_wetting(const ExperimentConfig& cfg, std::vector<SizeSummary>* sizes_out) {
  const auto t0 = Clock::now();
  cfg.validate();
  const CriticalParams cp = params_from_q(cfg.q);
  const CouplingThresholds th = CouplingThresholds::from(cp);
  const bool potts = integer_q(cfg.q);
  Report r;
  r.experiment = cfg.name.empty() ? "wetting" : cfg.name;
  r.config = cfg.to_json();
  r.columns = {"n",         "m",           "replica",   "burn_in",   "sweeps",      "tau_gap",
               "ess",       "mean_gap",    "mean_width", "max_width", "stat_samples", "potts_gap",
               "potts_width", "p_mdist",   "p_mdist_diag", "mean_mdist_diag", "p_gcl", "p_crossings",
               "seconds"};
  r.sample_columns = {"n",      "replica",    "sweep",         "gap", "width",     "potts_gap", "potts_width",
                      "mdist",  "mdist_diag", "min_slab_cpts", "gcl", "crossings", "dh_upper",  "dh_lower"};

  // Wall-clock budget shared across sizes with weights n^1.5; time a size
  // leaves unused carries over to the larger ones.
  double weight_left = 0;
  for (int n : cfg.sizes) weight_left += std::pow(n, 1.5);

  std::vector<SizeSummary> out;
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const int n = cfg.sizes[si];
    const long sweeps = cfg.sweeps_for(si);
    const auto ts = Clock::now();
    const int m = cfg.m_of(n);
    const DobrushinDomain d(n, m);
    const int sc = scale_sc(std::max(n, 2));
    double size_budget = 0;
    if (cfg.budget_seconds > 0) {
      size_budget = (cfg.budget_seconds - seconds_since(t0)) * std::pow(n, 1.5) / weight_left;
      size_budget = std::max(size_budget, 1.0);
    }
    weight_left -= std::pow(n, 1.5);
    SizeSummary S;
    S.n = n;
    S.m = m;
    std::vector<double> gaps, widths, pgaps, pwidths;
    double tau_sum = 0;
    long small = 0, small_diag = 0, gcl = 0, cross = 0, stat_total = 0;
    double mdist_diag_sum = 0;
    long mdist_diag_count = 0;
    for (int rep = 0; rep < cfg.replicas; ++rep) {
      const auto tr = Clock::now();
      const double rep_budget = size_budget / cfg.replicas;
      auto out_of_time = [&] { return rep_budget > 0 && seconds_since(tr) > rep_budget; };
      const std::string where = "n=" + std::to_string(n) + " replica " + std::to_string(rep) + ": ";
      FkChain chain(d, cp, cfg.seed, static_cast<std::uint32_t>(rep));
      auto gap_now = [&] { return double(layer_gap(fk_envelopes(d, chain.state()))); };

      long burn = cfg.burn_in, done = 0;
      if (burn < 0) {
        // pilot, then 20 tau of the pilot's gap series, at most a quarter of the budget
        std::vector<double> pilot;
        const long len = std::max<long>(200, std::min<long>(2000, sweeps / 5));
        for (; done < len && !out_of_time(); ++done) {
          chain.sweep();
          pilot.push_back(gap_now());
        }
        burn = std::max<long>(done, std::lround(20 * integrated_autocorrelation(pilot)));
      }
      for (; done < burn; ++done) {
        if (rep_budget > 0 && seconds_since(tr) > rep_budget / 4) {
          r.warnings.push_back(where + "burn-in capped at " + std::to_string(done) + " of " + std::to_string(burn) +
                               " sweeps by the budget");
          break;
        }
        chain.sweep();
      }
      burn = done;
      S.burn_in = std::max(S.burn_in, burn);

      std::vector<double> g, wd, pg, pw;
      long rs = 0, rd = 0, rg = 0, rc = 0, stats = 0;
      double maxw = 0;
      double tau = 1;
      std::size_t next_check = 1000;
      for (long s = 0; s < sweeps; ++s) {
        chain.sweep();
        const BondConfig& w = chain.state();
        const EnvelopeSet env = fk_envelopes(d, w);
        g.push_back(layer_gap(env));
        wd.push_back(envelope_width(env));
        maxw = std::max(maxw, wd.back());
        if (s % cfg.thin == 0) {
          const long sweep_index = burn + s;
          Rng rng(cfg.seed ^ 0x5bd1e995ull, static_cast<std::uint32_t>(rep), static_cast<std::uint64_t>(sweep_index));
          const std::vector<int> colours =
              potts ? potts_from_fk(d, w, static_cast<int>(std::lround(cfg.q)), rng) : std::vector<int>{};
          const ChainSample cs = run_chain(d, w, th, rng);
          const SampleStats st = sample_stats(d, w, colours, cs, cfg.stats);
          if (potts) {
            pg.push_back(st.potts_gap);
            pw.push_back(st.potts_width);
          }
          ++stats;
          rs += st.mdist <= double(sc) * sc;
          rd += st.mdist_diag <= 1;
          if (std::isfinite(st.mdist_diag)) {
            mdist_diag_sum += st.mdist_diag;
            ++mdist_diag_count;
          }
          rg += st.gcl;
          rc += st.crossings;
          r.sample_rows.push_back({double(n), double(rep), double(sweep_index), double(st.gap), double(st.width),
                                   double(st.potts_gap), double(st.potts_width), st.mdist, st.mdist_diag,
                                   double(st.min_slab_cpts), double(st.gcl), double(st.crossings), st.dh_upper,
                                   st.dh_lower});
        }
        if (g.size() >= next_check && cfg.ess_target > 0) {
          next_check *= 2;
          tau = integrated_autocorrelation(g);
          if (g.size() / tau >= cfg.ess_target / cfg.replicas) break;
        }
        if (out_of_time()) {
          r.warnings.push_back(where + "wall-clock budget reached after " + std::to_string(g.size()) + " sweeps");
          break;
        }
      }
      tau = integrated_autocorrelation(g);
      const double cnt = static_cast<double>(g.size());
      tau_sum += tau;
      S.ess += cnt / tau;
      if (burn < 20 * tau)
        r.warnings.push_back(where + "burn-in " + std::to_string(burn) + " sweeps is shorter than 20 tau = " +
                             fmt(20 * tau));
      if (tau * 50 > cnt) r.warnings.push_back(where + "run shorter than 50 autocorrelation times");
      auto mean = [](const std::vector<double>& v) {
        return v.empty() ? NAN : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      };
      const double ns = stats ? double(stats) : NAN;
      r.rows.push_back({double(n), double(m), double(rep), double(burn), cnt, tau, cnt / tau, mean(g), mean(wd), maxw,
                        double(stats), mean(pg), mean(pw), rs / ns, rd / ns,
                        mdist_diag_count ? mdist_diag_sum / mdist_diag_count : NAN, rg / ns, rc / ns,
                        seconds_since(tr)});
      gaps.insert(gaps.end(), g.begin(), g.end());
      widths.insert(widths.end(), wd.begin(), wd.end());
      pgaps.insert(pgaps.end(), pg.begin(), pg.end());
      pwidths.insert(pwidths.end(), pw.begin(), pw.end());
      S.max_width = std::max(S.max_width, maxw);
      small += rs;
      small_diag += rd;
      gcl += rg;
      cross += rc;
      stat_total += stats;
      S.samples += static_cast<long>(cnt);
    }
    S.tau_gap = tau_sum / cfg.replicas;
    S.gap = batch_means(gaps);
    S.width = batch_means(widths);
    S.potts_gap = batch_means(pgaps);
    S.potts_width = batch_means(pwidths);
    const double nst = stat_total ? double(stat_total) : NAN;
    S.p_mdist_small = small / nst;
    S.p_mdist_diag = small_diag / nst;
    S.mean_mdist_diag = mdist_diag_count ? mdist_diag_sum / mdist_diag_count : NAN;
    S.p_gcl = gcl / nst;
    S.p_crossings = cross / nst;
    S.seconds = seconds_since(ts);
    const std::string tag = "n" + std::to_string(n) + ".";
    r.set(tag + "mean_gap", S.gap.mean);
    r.set(tag + "gap_ci", S.gap.half_width);
    r.set(tag + "mean_width", S.width.mean);
    r.set(tag + "width_ci", S.width.half_width);
    r.set(tag + "potts_gap", S.potts_gap.mean);
    r.set(tag + "potts_width", S.potts_width.mean);
    r.set(tag + "max_width", S.max_width);
    r.set(tag + "tau_gap", S.tau_gap);
    r.set(tag + "ess", S.ess);
    r.set(tag + "p_mdist", S.p_mdist_small);
    r.set(tag + "p_mdist_diag", S.p_mdist_diag);
    r.set(tag + "mean_mdist_diag", S.mean_mdist_diag);
    r.set(tag + "p_gcl", S.p_gcl);
    r.set(tag + "p_crossings", S.p_crossings);
    r.set(tag + "seconds", S.seconds);
    out.push_back(S);
  }

  // fits and checks
  std::vector<double> ns, gap, width, pgap;
  for (const SizeSummary& S : out) {
    ns.push_back(S.n);
    gap.push_back(S.gap.mean);
    width.push_back(S.width.mean + 1);
    pgap.push_back(S.potts_gap.mean);
  }
  if (out.size() >= 2) {
    const LinearFit fg = loglog_fit(ns, gap);
    const LinearFit fw = loglog_fit(ns, width);
    r.set("gap_exponent", fg.slope);
    r.set("gap_exponent_se", fg.slope_se);
    r.set("width_exponent", fw.slope);
    r.set("width_exponent_se", fw.slope_se);
    double min_ess = std::numeric_limits<double>::infinity();
    for (const SizeSummary& S : out) min_ess = std::min(min_ess, S.ess);
    r.checks.push_back(make_check(6, "gap exponent", fg.slope >= 0.35 && fg.slope <= 0.65, fg.slope, "[0.35, 0.65]",
                                  "se " + fmt(fg.slope_se)));
    r.checks.push_back(make_check(6, "envelope width exponent", fw.slope <= 0.25, fw.slope, "<= 0.25",
                                  "fit of 1 + mean width, se " + fmt(fw.slope_se)));
    r.checks.push_back(make_check(6, "effective samples per size", min_ess >= 200, min_ess, ">= 200"));
    if (potts && std::all_of(pgap.begin(), pgap.end(), [](double v) { return v > 0; })) {
      const LinearFit fp = loglog_fit(ns, pgap);
      r.set("potts_gap_exponent", fp.slope);
      r.checks.push_back(make_check(6, "Potts gap exponent", fp.slope >= 0.35 && fp.slope <= 0.65, fp.slope,
                                    "[0.35, 0.65]", "", false));
    }
    std::vector<double> p7, p7d, md;
    std::string row7, row7d, rowmd;
    for (const SizeSummary& S : out)
      if (S.n >= 32 && S.n <= 128) {
        p7.push_back(S.p_mdist_small);
        p7d.push_back(S.p_mdist_diag);
        md.push_back(S.mean_mdist_diag);
        row7 += (row7.empty() ? "" : ", ") + fmt(S.p_mdist_small);
        row7d += (row7d.empty() ? "" : ", ") + fmt(S.p_mdist_diag);
        rowmd += (rowmd.empty() ? "" : ", ") + fmt(S.mean_mdist_diag);
      }
    if (p7.size() >= 2) {
      r.checks.push_back(make_check(7, "P(Mdist <= sc^2) strictly decreasing", strictly_decreasing(p7),
                                    p7.back(), "strictly decreasing over n = 32, 64, 128",
                                    "values " + row7 + "; slab exponent " + fmt(cfg.stats.slab_exponent)));
      r.checks.push_back(make_check(7, "P(Mdist <= 1) strictly decreasing, slab exponent " +
                                           fmt(cfg.stats.diag_exponent),
                                    strictly_decreasing(p7d), p7d.back(), "strictly decreasing",
                                    "values " + row7d, false));
      bool up = true;
      for (std::size_t i = 1; i < md.size(); ++i) up = up && md[i] > md[i - 1];
      r.checks.push_back(make_check(7, "mean Mdist increasing, slab exponent " + fmt(cfg.stats.diag_exponent), up,
                                    md.back(), "strictly increasing", "values " + rowmd, false));
    }
    bool gcl_up = true;
    for (std::size_t i = 1; i < out.size(); ++i) gcl_up = gcl_up && out[i].p_gcl >= out[i - 1].p_gcl;
    r.checks.push_back(make_check(0, "P(GCl) nondecreasing", gcl_up, out.back().p_gcl, "nondecreasing", "", false));
  }
  if (sizes_out) *sizes_out = out;
  add_provenance(r, cfg, seconds_since(t0));
  return r;
}

// ---------------------------------------------------------------- walks

namespace {

// All walks from `start` to `end` with their probabilities.
void enumerate_bridges(const IncrementDist& dist, Point start, Point end, std::vector<Walk>& walks,
                       std::vector<double>& probs) {
  std::vector<std::pair<Walk, double>> stack{{{start}, 1.0}};
  while (!stack.empty()) {
    auto [w, p] = std::move(stack.back());
    stack.pop_back();
    const Point at = w.back();
    if (at.x == end.x) {
      if (at.y == end.y) {
        walks.push_back(w);
        probs.push_back(p);
      }
      continue;
    }
    for (const Step& s : dist.steps) {
      if (at.x + s.dx > end.x) continue;
      Walk v = w;
      v.push_back({at.x + s.dx, at.y + s.dy});
      stack.emplace_back(std::move(v), p * s.p);
    }
  }
}

struct PairLawCheck {
  double chi2 = 0;
  int df = 0;
  double sd = 0;     // exact standard deviation of Pearson's statistic under the law
  double max_z = 0;
  long outside = 0;  // samples in cells of probability zero
  double tv = 0;
  double acceptance = 0;
  double bound() const { return df + 3 * sd; }
  bool pass() const { return outside == 0 && chi2 <= bound(); }
};

PairLawCheck pair_law_check(const IncrementDist& dist, Point su, Point sl, Point eu, Point el, PairConditioning mode,
                            long draws, std::uint64_t seed) {
  std::vector<Walk> up, low;
  std::vector<double> pu, pl;
  enumerate_bridges(dist, su, eu, up, pu);
  enumerate_bridges(dist, sl, el, low, pl);
  std::map<std::vector<long>, std::size_t> index;
  auto key = [](const Walk& a, const Walk& b) {
    std::vector<long> k;
    for (const Walk* w : {&a, &b})
      for (Point p : *w) {
        k.push_back(p.x);
        k.push_back(p.y);
      }
    k.push_back(static_cast<long>(a.size()));
    return k;
  };
  std::vector<double> law;
  for (std::size_t i = 0; i < up.size(); ++i)
    for (std::size_t j = 0; j < low.size(); ++j) {
      bool ok = true;
      if (mode == PairConditioning::Ordered) ok = ordered_at_sync_times(up[i], low[j]);
      if (mode == PairConditioning::DiamondDisjoint) ok = diamond_envelopes_disjoint(up[i], low[j]);
      index[key(up[i], low[j])] = law.size();
      law.push_back(ok ? pu[i] * pl[j] : 0.0);
    }
  const double z = std::accumulate(law.begin(), law.end(), 0.0);
  for (double& v : law) v /= z;

  PairSampler sampler(dist, su, sl, eu, el, mode);
  Rng rng(seed);
  std::vector<double> counts(law.size(), 0.0);
  PairLawCheck c;
  for (long t = 0; t < draws; ++t) {
    const BridgePair bp = sampler.sample(rng);
    const auto it = index.find(key(bp.upper, bp.lower));
    if (it == index.end() || law[it->second] == 0) {
      ++c.outside;
      continue;
    }
    counts[it->second] += 1;
  }
  std::vector<double> freq(law.size());
  double inv = 0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    freq[i] = counts[i] / draws;
    if (law[i] <= 0) continue;
    const double e = draws * law[i];
    c.chi2 += (counts[i] - e) * (counts[i] - e) / e;
    c.max_z = std::max(c.max_z, std::abs(counts[i] - e) / std::sqrt(e * (1 - law[i])));
    inv += 1 / law[i];
    ++c.df;
  }
  // Var X^2 = 2(k-1) + (sum 1/p - k^2 - 2k + 2) / N for k cells and N draws
  const double k = c.df;
  c.sd = std::sqrt(2 * (k - 1) + (inv - k * k - 2 * k + 2) / draws);
  c.df -= 1;
  c.tv = tv_distance(freq, law);
  c.acceptance = static_cast<double>(sampler.accepted()) / sampler.attempts();
  return c;
}

std::vector<std::pair<double, double>> rescaled_gap(const MidpointLaw& L) {
  std::vector<std::pair<double, double>> v;
  const double s = std::sqrt(static_cast<double>(L.n));
  for (auto [g, p] : L.gap) v.emplace_back(g / s, p);
  return v;
}

double mean_gap(const MidpointLaw& L) {
  double m = 0;
  for (auto [g, p] : L.gap) m += g * p;
  return m;
}

}  // namespace

Report run_walk_suite(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  if (!cfg.has_seed) throw ConfigError("seed is required");
  Report r;
  r.experiment = "walks";
  r.config = cfg.to_json();
  r.columns = {"n", "q_plus_1_0", "sup_bridge_ratio"};

  {  // criterion 8
    const auto t1 = Clock::now();
    const std::vector<double> sv = ordered_survival_pm1(1, 4096);
    std::vector<double> xs, ys;
    for (int n = 64; n <= 4096; n *= 2) {
      xs.push_back(n);
      ys.push_back(sv[n]);
    }
    const LinearFit f = loglog_fit(xs, ys);
    r.set("q_plus_slope", f.slope);
    r.set("q_plus_slope_se", f.slope_se);
    std::vector<double> sups;
    for (int n : {256, 1024, 4096}) {
      double best = 0;
      for (int jp = -4; jp <= 4; jp += 2)
        for (int g = 1; g <= 9; g += 2)
          best = std::max(best, ordered_pair_kernel_pm1(1, 0, n, jp + g, jp) * n * double(n) / g);
      sups.push_back(best);
      r.rows.push_back({double(n), sv[n], best});
      r.set("sup_ratio_n" + std::to_string(n), best);
    }
    const double spread = *std::max_element(sups.begin(), sups.end()) / *std::min_element(sups.begin(), sups.end());
    const double secs = seconds_since(t1);
    r.checks.push_back(make_check(8, "log-log slope of q+_{1,0}(n), n in [64, 4096]",
                                  f.slope >= -0.6 && f.slope <= -0.4 && secs <= 600, f.slope, "[-0.6, -0.4]",
                                  "se " + fmt(f.slope_se)));
    r.checks.push_back(make_check(8, "sup q+(n,j,j') n^2 / (gap gap') across n = 256, 1024, 4096",
                                  spread <= 3 && secs <= 600, spread, "max / min <= 3",
                                  "values " + fmt(sups[0]) + ", " + fmt(sups[1]) + ", " + fmt(sups[2])));
    // exact split against the generic DP
    const SyncWalkKernels K = kernel_dp(IncrementDist::simple(), 1, 0, 64, -70, 70, {64});
    double worst = std::abs(K.qplus_total[64] - sv[64]);
    for (int j = -9; j <= 11; j += 2)
      for (int jp = -10; jp <= 10; jp += 2)
        worst = std::max(worst, std::abs(K.qplus_at(0, j, jp) - ordered_pair_kernel_pm1(1, 0, 64, j, jp)));
    r.checks.push_back(make_check(0, "gap/sum split agrees with the generic DP at n = 64", worst <= 1e-12, worst,
                                  "<= 1e-12", "", false));
  }

  {  // criterion 9
    const auto t1 = Clock::now();
    const IncrementDist pm = IncrementDist::simple();
    const PairLawCheck a =
        pair_law_check(pm, {0, 2}, {0, 0}, {6, 2}, {6, 0}, PairConditioning::Ordered, 100000, cfg.seed);
    r.checks.push_back(make_check(9, "ordered pair sampler vs conditioned law, 6 steps", a.pass(), a.chi2,
                                  "chi2 <= df + 3 sd",
                                  "df " + std::to_string(a.df) + ", sd " + fmt(a.sd) + ", max |z| " + fmt(a.max_z) + ", TV " + fmt(a.tv)));
    const IncrementDist lazy = IncrementDist::lazy(1.0 / 3);
    const PairLawCheck b =
        pair_law_check(lazy, {0, 2}, {0, 0}, {6, 2}, {6, 0}, PairConditioning::DiamondDisjoint, 100000, cfg.seed + 1);
    r.checks.push_back(make_check(9, "diamond-disjoint lazy pair sampler, 6 steps", b.pass(), b.chi2,
                                  "chi2 <= df + 3 sd",
                                  "df " + std::to_string(b.df) + ", sd " + fmt(b.sd) + ", max |z| " + fmt(b.max_z)));
    const IncrementDist gen = IncrementDist::from_steps({{1, -1, 0.3}, {1, 1, 0.3}, {2, 0, 0.4}});
    const PairLawCheck c =
        pair_law_check(gen, {0, 1}, {0, 0}, {6, 1}, {6, 0}, PairConditioning::Ordered, 100000, cfg.seed + 2);
    r.checks.push_back(make_check(9, "rejection pair sampler, steps of length 1 and 2", c.pass(), c.chi2,
                                  "chi2 <= df + 3 sd",
                                  "df " + std::to_string(c.df) + ", sd " + fmt(c.sd) + ", acceptance " + fmt(c.acceptance) + ", " +
                                      fmt(seconds_since(t1)) + " s"));

    // acceptance at n = 1024 with gaps ceil(ln^2 n) against q+/q
    const int n = 1024, g = scale_sc(n);
    const int i = (g + 1) / 2, ip = i - g;
    PairSampler ps(pm, {0, i}, {0, ip}, {n, i}, {n, ip}, PairConditioning::Ordered);
    Rng rng(cfg.seed + 3);
    for (int t = 0; t < 300; ++t) ps.sample(rng);
    const double measured = double(ps.accepted()) / ps.attempts();
    const double predicted = ordered_pair_kernel_pm1(i, ip, n, i, ip) / pair_kernel_pm1(i, ip, n, i, ip);
    const double ratio = measured / predicted;
    r.set("acceptance_measured", measured);
    r.set("acceptance_predicted", predicted);
    r.checks.push_back(make_check(0, "rejection acceptance at n = 1024 vs q+ kernels", ratio >= 0.1 && ratio <= 10,
                                  ratio, "within a factor 10",
                                  "measured " + fmt(measured) + ", predicted " + fmt(predicted), false));
  }

  {  // criterion 10
    const auto t1 = Clock::now();
    const int g256 = scale_sc(256), g1024 = scale_sc(1024);
    const MidpointLaw a = midpoint_law_pm1(256, g256, g256), b = midpoint_law_pm1(1024, g1024, g1024);
    const double ks = ks_distance(rescaled_gap(a), rescaled_gap(b));
    const double ratio = mean_gap(b) / mean_gap(a);
    const double secs = seconds_since(t1);
    r.set("ks_midpoint_gap", ks);
    r.set("mean_gap_ratio", ratio);
    r.checks.push_back(make_check(10, "KS of rescaled midpoint gap, n = 256 vs 1024, end gaps ceil(ln^2 n)",
                                  ks <= 0.05 && secs <= 900, ks, "<= 0.05",
                                  "end gaps " + std::to_string(g256) + " and " + std::to_string(g1024)));
    r.checks.push_back(make_check(10, "mean midpoint gap ratio 1024 / 256", std::abs(ratio / 2 - 1) <= 0.1, ratio,
                                  "2 within 10%", "means " + fmt(mean_gap(a)) + ", " + fmt(mean_gap(b))));
    const MidpointLaw c = midpoint_law_pm1(256, 2, 2), e = midpoint_law_pm1(1024, 2, 2);
    const double ks2 = ks_distance(rescaled_gap(c), rescaled_gap(e));
    const double ratio2 = mean_gap(e) / mean_gap(c);
    r.checks.push_back(make_check(10, "same with end gaps 2", ks2 <= 0.05, ks2, "<= 0.05", "", false));
    r.checks.push_back(make_check(10, "mean gap ratio with end gaps 2", std::abs(ratio2 / 2 - 1) <= 0.1, ratio2,
                                  "2 within 10%", "", false));
    double asym = 0;
    const int sigma = g256 & 1;
    for (auto [v, p] : a.upper) {
      const auto it = a.lower.find(sigma - v);
      asym = std::max(asym, std::abs(p - (it == a.lower.end() ? 0.0 : it->second)));
    }
    r.checks.push_back(make_check(0, "upper/lower midpoint marginals mirror each other", asym <= 1e-12, asym,
                                  "<= 1e-12", "", false));
  }

  {  // criterion 11
    const auto t1 = Clock::now();
    const LltReport l = llt_check({{-1, 0.25}, {0, 0.5}, {1, 0.25}}, 400);
    r.set("llt_sup_rel_error", l.sup_rel_error);
    const IncrementDist d = IncrementDist::from_steps({{1, -1, 0.25}, {1, 1, 0.25}, {2, 0, 0.5}});
    const RenewalReport rr = renewal_hit_check(d, 400);
    r.set("renewal_sup_rel_error", rr.sup_rel_error);
    r.set("renewal_sup_rel_error_literal", rr.sup_rel_error_literal);
    const double secs = seconds_since(t1);
    r.checks.push_back(make_check(11, "local limit, lazy walk, n = 400, |x| <= n^{7/12}",
                                  l.sup_rel_error <= 0.02 && secs <= 120, l.sup_rel_error, "<= 0.02",
                                  "P(S_n = 0) " + fmt(l.exact_at_mean) + " vs " + fmt(l.gauss_at_mean)));
    r.checks.push_back(make_check(11, "renewal hitting, mean length 1.5, n = 400", rr.sup_rel_error <= 0.05,
                                  rr.sup_rel_error, "<= 0.05", "variance Var(X)/mu per unit length"));
    r.checks.push_back(make_check(11, "renewal hitting with variance Var(X) per unit length",
                                  rr.sup_rel_error_literal <= 0.05, rr.sup_rel_error_literal, "<= 0.05", "", false));
  }
  add_provenance(r, cfg, seconds_since(t0));
  return r;
}

// ---------------------------------------------------------------- boundary crossing

namespace {

// Largest l_inf distance (in faces) from the centre face reached by its dual
// cluster; -1 if it reaches the outer face.
int dual_arm(const GraphView& g, int w, int h, const BondConfig& omega) {
  // faces (x, y) for x < w - 1, y < h - 1; face id y * (w - 1) + x
  const int fw = w - 1, fh = h - 1;
  const int cx = fw / 2, cy = fh / 2;
  std::vector<std::uint8_t> seen(fw * fh, 0);
  std::vector<int> queue{cy * fw + cx};
  seen[queue[0]] = 1;
  auto edge_open = [&](int a, int b) {
    // primal edge between vertices a and b
    for (std::size_t e = 0; e < g.ends.size(); ++e)
      if ((g.ends[e][0] == a && g.ends[e][1] == b) || (g.ends[e][0] == b && g.ends[e][1] == a)) return omega[e] != 0;
    return false;
  };
  int reach = 0;
  for (std::size_t k = 0; k < queue.size(); ++k) {
    const int f = queue[k];
    const int x = f % fw, y = f / fw;
    reach = std::max({reach, std::abs(x - cx), std::abs(y - cy)});
    // crossing to the right: primal edge (x+1, y)-(x+1, y+1)
    const int v00 = y * w + x, v10 = y * w + x + 1, v01 = (y + 1) * w + x, v11 = (y + 1) * w + x + 1;
    const std::array<std::tuple<int, int, int, int>, 4> nb{
        {{x + 1, y, v10, v11}, {x - 1, y, v00, v01}, {x, y + 1, v01, v11}, {x, y - 1, v00, v10}}};
    for (auto [nx, ny, a, b] : nb) {
      if (edge_open(a, b)) continue;
      if (nx < 0 || ny < 0 || nx >= fw || ny >= fh) return -1;
      const int id = ny * fw + nx;
      if (!seen[id]) {
        seen[id] = 1;
        queue.push_back(id);
      }
    }
  }
  return reach;
}

// Left-right crossing of the strip of rows [0, rows] by open edges inside it.
bool strip_crossing(const GraphView& g, int w, int rows, const BondConfig& omega) {
  UnionFind uf(g.num_vertices);
  for (std::size_t e = 0; e < g.ends.size(); ++e) {
    if (!omega[e]) continue;
    const int a = g.ends[e][0], b = g.ends[e][1];
    if (a / w <= rows && b / w <= rows) uf.unite(a, b);
  }
  for (int y = 0; y <= rows; ++y)
    for (int z = 0; z <= rows; ++z)
      if (uf.find(y * w) == uf.find(z * w + w - 1)) return true;
  return false;
}

}  // namespace

Report run_boundary_crossing(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  cfg.validate();
  const CriticalParams cp = params_from_q(cfg.q);
  Report r;
  r.experiment = cfg.name.empty() ? "boundary_crossing" : cfg.name;
  r.config = cfg.to_json();
  r.columns = {"k", "replica", "samples", "p_cross_quasi", "p_cross_wired", "p_arm_2", "p_arm_4", "p_arm_8"};
  const double eps = 0.25;
  std::vector<double> cross_q, cross_w;
  std::vector<double> arm_all(3, 0.0);
  double arm_total = 0;
  for (int k : cfg.sizes) {
    const int w = k + 1, h = k / 2 + 1, rows = std::max(1, static_cast<int>(eps * k));
    const GraphView g = grid_graph(w, h);
    std::vector<std::uint8_t> b1(g.num_vertices, 0);
    for (int x = 0; x < w; ++x) b1[x] = 1;
    double cq = 0, cw = 0, samples = 0;
    for (int rep = 0; rep < cfg.replicas; ++rep) {
      const MeasureSpec quasi = qfk_graph(g, cp.p, cfg.q, b1, {}, cp.qb_wired, 1.0);
      const MeasureSpec wired = qfk_graph(g, cp.p, cfg.q, b1, {}, 1.0, 1.0);
      HeatBathSampler a(quasi, cfg.seed, static_cast<std::uint32_t>(rep), ConstraintMode::Free);
      HeatBathSampler b(wired, cfg.seed, static_cast<std::uint32_t>(rep), ConstraintMode::Free);
      const long burn = cfg.burn_in >= 0 ? cfg.burn_in : cfg.sweeps / 5;
      for (long s = 0; s < burn; ++s) {
        a.sweep();
        b.sweep();
      }
      double rq = 0, rw = 0, n = 0;
      std::vector<double> arms(3, 0.0);
      for (long s = 0; s < cfg.sweeps; s += 1) {
        a.sweep();
        b.sweep();
        if (s % cfg.thin != 0) continue;
        rq += strip_crossing(g, w, rows, a.state());
        rw += strip_crossing(g, w, rows, b.state());
        const int reach = dual_arm(g, w, h, a.state());
        for (int i = 0; i < 3; ++i) arms[i] += (reach < 0 || reach >= (2 << i));
        n += 1;
      }
      r.rows.push_back({double(k), double(rep), n, rq / n, rw / n, arms[0] / n, arms[1] / n, arms[2] / n});
      cq += rq;
      cw += rw;
      samples += n;
      for (int i = 0; i < 3; ++i) arm_all[i] += arms[i];
      arm_total += n;
    }
    cross_q.push_back(cq / samples);
    cross_w.push_back(cw / samples);
    r.set("k" + std::to_string(k) + ".p_cross_quasi", cq / samples);
    r.set("k" + std::to_string(k) + ".p_cross_wired", cw / samples);
  }
  bool up = true, dominated = true;
  for (std::size_t i = 0; i < cross_q.size(); ++i) {
    if (i > 0) up = up && cross_q[i] >= cross_q[i - 1];
    dominated = dominated && cross_w[i] >= cross_q[i];
  }
  r.checks.push_back(make_check(0, "strip crossing nondecreasing in k", up, cross_q.back(), "nondecreasing", "", false));
  r.checks.push_back(
      make_check(0, "wired control crosses at least as often", dominated, cross_w.back(), ">= quasi-wired", "", false));
  const bool arm_down = arm_all[0] >= arm_all[1] && arm_all[1] >= arm_all[2];
  r.checks.push_back(make_check(0, "dual arm probability decreasing in r", arm_down, arm_all[2] / arm_total,
                                "nonincreasing over r = 2, 4, 8", "", false));
  add_provenance(r, cfg, seconds_since(t0));
  return r;
}

}  // namespace wetting
