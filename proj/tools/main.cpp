#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wetting/experiments.hpp"

using namespace wetting;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream o;
  o << f.rdbuf();
  return o.str();
}

void print_checks(const Report& r) {
  for (const Check& c : r.checks) {
    std::printf("[%s] %-4s %s = %.6g  (%s)", c.pass ? "PASS" : "FAIL",
                c.criterion ? ("#" + std::to_string(c.criterion)).c_str() : "-", c.name.c_str(), c.value,
                c.band.c_str());
    if (!c.gating) std::printf(" [diagnostic]");
    if (!c.note.empty()) std::printf("  %s", c.note.c_str());
    std::printf("\n");
  }
  for (const std::string& w : r.warnings) std::printf("warning: %s\n", w.c_str());
}

struct Flags {
  std::string config;
  double q = 25;
  std::vector<int> sizes;
  int replicas = 1;
  long sweeps = -1, burn_in = -2, thin = -1;
  std::uint64_t seed = 0;
  std::string out = "out";
  double budget = -1, ess_target = -1;
  double slab_exponent = -1;
};

void add_flags(CLI::App* cmd, Flags& f, bool sizes) {
  cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--q", f.q, "cluster weight, > 4");
  if (sizes) {
    cmd->add_option("--sizes", f.sizes, "strictly increasing n values")->delimiter(',');
    cmd->add_option("--replicas", f.replicas, "replicas per size");
    cmd->add_option("--sweeps", f.sweeps, "recorded sweeps per replica");
    cmd->add_option("--burn-in", f.burn_in, "burn-in sweeps (-1: from a pilot run)");
    cmd->add_option("--thin", f.thin, "full statistics every k sweeps");
    cmd->add_option("--budget", f.budget, "total wall-clock budget in seconds");
    cmd->add_option("--ess-target", f.ess_target, "stop a size at this many effective samples");
    cmd->add_option("--slab-exponent", f.slab_exponent, "Mdist slab exponent");
  }
  cmd->add_option("--seed", f.seed, "seed");
  cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig make_config(const CLI::App* cmd, const Flags& f, const std::string& name) {
  ExperimentConfig c;
  if (!f.config.empty()) c = ExperimentConfig::from_json(slurp(f.config));
  c.name = name;
  auto given = [&](const char* flag) { return cmd->get_option_no_throw(flag) && cmd->count(flag) > 0; };
  if (given("--q")) c.q = f.q;
  if (given("--sizes")) c.sizes = f.sizes;
  if (given("--replicas")) c.replicas = f.replicas;
  if (given("--sweeps")) c.sweeps = f.sweeps;
  if (given("--burn-in")) c.burn_in = f.burn_in;
  if (given("--thin")) c.thin = f.thin;
  if (given("--budget")) c.budget_seconds = f.budget;
  if (given("--ess-target")) c.ess_target = f.ess_target;
  if (given("--slab-exponent")) c.stats.slab_exponent = f.slab_exponent;
  if (given("--seed")) {
    c.seed = f.seed;
    c.has_seed = true;
  }
  if (given("--out") || f.config.empty()) c.out = f.out;
  c.validate();
  return c;
}

int finish(const Report& r, const std::string& out) {
  print_checks(r);
  for (const std::string& p : export_report(r, out, "both")) std::printf("wrote %s\n", p.c_str());
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interfacial wetting experiments for the critical FK / Potts model at q > 4"};
  app.require_subcommand(1);

  Flags fv, fw, fk, fb;
  auto* verify = app.add_subcommand("verify-small", "exact coupling, FKG, domination and MCMC checks");
  add_flags(verify, fv, false);
  auto* wet = app.add_subcommand("wetting", "Monte Carlo scaling of the disordered layer");
  add_flags(wet, fw, true);
  auto* walks = app.add_subcommand("walks", "kernel, bridge, watermelon and local limit checks");
  add_flags(walks, fk, false);
  auto* bc = app.add_subcommand("boundary-crossing", "strip crossings under quasi-wired boundary conditions");
  add_flags(bc, fb, true);

  std::string report_in, export_dir = "out", format = "both";
  auto* exp = app.add_subcommand("export", "validate a JSON report and rewrite it as json and/or csv");
  exp->add_option("report", report_in, "report JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", export_dir, "output directory");
  exp->add_option("--format", format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const ExperimentConfig c = make_config(verify, fv, "verify_small");
      return finish(run_verify_small(c), c.out);
    }
    if (*wet) {
      const ExperimentConfig c = make_config(wet, fw, "wetting");
      return finish(run_wetting(c), c.out);
    }
    if (*walks) {
      const ExperimentConfig c = make_config(walks, fk, "walks");
      return finish(run_walk_suite(c), c.out);
    }
    if (*bc) {
      const ExperimentConfig c = make_config(bc, fb, "boundary_crossing");
      return finish(run_boundary_crossing(c), c.out);
    }
    if (*exp) {
      const Report r = report_from_json(slurp(report_in));
      for (const std::string& p : export_report(r, export_dir, format)) std::printf("wrote %s\n", p.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
