// leveralign command-line driver. Talks to the library only through the C API.
//
//   leveralign run            --config exp.cfg --mode eq9 --run-index 3
//   leveralign montecarlo     --config exp.cfg --runs 100 --threads 8
//   leveralign remarks        --out diag
//   leveralign export-streams --seed 7
//
// Exit codes: 0 success, 2 config error, 3 degenerate geometry, 1 otherwise.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "leveralign/leveralign.h"

namespace {

struct ConfigDeleter {
  void operator()(la_config* c) const { la_config_free(c); }
};
using ConfigHandle = std::unique_ptr<la_config, ConfigDeleter>;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> runs;
  std::optional<unsigned> threads;
  std::uint64_t run_index = 0;
};

int exit_code(la_status status) {
  switch (status) {
    case LA_OK: return 0;
    case LA_ERR_CONFIG: return 2;
    case LA_ERR_DEGENERATE: return 3;
    default: return 1;
  }
}

int report(la_status status, const char* context) {
  if (status != LA_OK) {
    std::fprintf(stderr, "leveralign: %s: %s: %s\n", context, la_status_string(status), la_last_error());
  }
  return exit_code(status);
}

// Loads the config file (or defaults) and applies command-line overrides.
la_status make_config(const Overrides& o, ConfigHandle& out) {
  la_config* raw = nullptr;
  la_status st = o.config_path.empty() ? la_config_default(&raw) : la_config_load(o.config_path.c_str(), &raw);
  out.reset(raw);
  if (st != LA_OK) return st;

  std::vector<std::pair<const char*, std::string>> sets;
  if (o.seed) sets.emplace_back("base_seed", std::to_string(*o.seed));
  if (o.out) sets.emplace_back("output_dir", *o.out);
  if (o.mode) sets.emplace_back("mode", *o.mode);
  if (o.runs) sets.emplace_back("run_count", std::to_string(*o.runs));
  if (o.threads) sets.emplace_back("threads", std::to_string(*o.threads));
  for (const auto& [key, value] : sets) {
    st = la_config_set(out.get(), key, value.c_str());
    if (st != LA_OK) return st;
  }
  return LA_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lever-arm compensated in-motion coarse alignment experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "experiment config file (key = value)");
  app.add_option("--seed", o.seed, "base noise seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--mode", o.mode, "compensation mode")->check(CLI::IsMember({"none", "eq9", "exact"}));
  app.add_option("--runs", o.runs, "Monte Carlo run count");
  app.add_option("--threads", o.threads, "Monte Carlo worker threads");

  CLI::App* run = app.add_subcommand("run", "single run: per-epoch attitude errors and observation pairs");
  run->add_option("--run-index", o.run_index, "noise stream index");
  CLI::App* mc = app.add_subcommand("montecarlo", "mean error curves: compensated, uncompensated, zero lever arm");
  CLI::App* remarks = app.add_subcommand("remarks", "noise-free approximation and growth diagnostics");
  CLI::App* streams = app.add_subcommand("export-streams", "truth, IMU and GNSS streams of one run");
  streams->add_option("--run-index", o.run_index, "noise stream index");

  CLI11_PARSE(app, argc, argv);

  ConfigHandle config;
  if (la_status st = make_config(o, config); st != LA_OK) return report(st, "config");

  la_status st = LA_OK;
  const char* what = "";
  if (run->parsed()) {
    what = "run";
    st = la_run_single(config.get(), o.run_index);
  } else if (mc->parsed()) {
    what = "montecarlo";
    st = la_run_monte_carlo(config.get());
  } else if (remarks->parsed()) {
    what = "remarks";
    st = la_report_remarks(config.get());
  } else if (streams->parsed()) {
    what = "export-streams";
    st = la_export_streams(config.get(), o.run_index);
  }
  return report(st, what);
}
