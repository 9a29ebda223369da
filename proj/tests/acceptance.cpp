// One line per acceptance criterion. Criteria 1-5, 8-12 are recomputed;
// 6 and 7 come from the stored production wetting run.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wetting/experiments.hpp"

using namespace wetting;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Line {
  bool pass = true;
  bool seen = false;
  std::vector<std::string> detail;
  std::vector<std::string> diagnostics;
};

std::map<int, Line> lines;

std::string describe(const Check& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", c.value);
  std::string s = c.name + " = " + buf + " (" + c.band + ")";
  if (!c.note.empty()) s += " " + c.note;
  return s;
}

void absorb(const Report& r, const std::string& tag) {
  for (const Check& c : r.checks) {
    if (c.criterion <= 0) continue;
    Line& l = lines[c.criterion];
    const std::string text = "[" + tag + "] " + std::string(c.pass ? "ok   " : "FAIL ") + describe(c);
    if (c.gating) {
      l.seen = true;
      l.pass = l.pass && c.pass;
      l.detail.push_back(text);
    } else {
      l.diagnostics.push_back(text);
    }
  }
}

void fail_criterion(int k, const std::string& why) {
  Line& l = lines[k];
  l.seen = true;
  l.pass = false;
  l.detail.push_back(why);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void load_wetting(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail_criterion(6, "no production report at " + path);
    fail_criterion(7, "no production report at " + path);
    return;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::string why;
  if (!validate_report_json(ss.str(), &why)) {
    fail_criterion(6, "invalid report: " + why);
    fail_criterion(7, "invalid report: " + why);
    return;
  }
  const Report r = report_from_json(ss.str());
  const ExperimentConfig cfg = ExperimentConfig::from_json(r.config);
  if (cfg.q != 25 || cfg.sizes != std::vector<int>{16, 32, 64, 128}) {
    fail_criterion(6, "report is not the q=25, n in {16,32,64,128} run");
    fail_criterion(7, "report is not the q=25, n in {16,32,64,128} run");
    return;
  }
  absorb(r, "wetting " + path);
  if (!lines[6].seen) fail_criterion(6, "report has no criterion 6 checks");
  if (!lines[7].seen) fail_criterion(7, "report has no criterion 7 checks");
}

}  // namespace

int main() {
  ExperimentConfig base;
  base.seed = kSeed;
  base.has_seed = true;

  for (double q : {25.0, 6.0}) {
    ExperimentConfig c = base;
    c.q = q;
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = run_verify_small(c);
    const double s = elapsed(t0);
    char tag[64];
    std::snprintf(tag, sizeof tag, "q=%g, %.1f s", q, s);
    absorb(r, tag);
    if (s > 300) fail_criterion(1, std::string("exact suite took over 5 min at ") + tag);
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = run_walk_suite(base);
    char tag[64];
    std::snprintf(tag, sizeof tag, "walks, %.1f s", elapsed(t0));
    absorb(r, tag);
  }
  load_wetting(WETTING_RESULTS_JSON);

  int failed = 0;
  std::printf("acceptance, seed %llu\n", static_cast<unsigned long long>(kSeed));
  for (int k = 1; k <= 12; ++k) {
    Line& l = lines[k];
    if (!l.seen) fail_criterion(k, "no gating check reported");
    std::printf("criterion %2d: %s\n", k, l.pass ? "PASS" : "FAIL");
    for (const auto& d : l.detail) std::printf("      %s\n", d.c_str());
    for (const auto& d : l.diagnostics) std::printf("      diagnostic %s\n", d.c_str());
    failed += !l.pass;
  }
  std::printf("%d of 12 criteria pass\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
