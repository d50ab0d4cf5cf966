#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chainlab/harness/experiment.hpp"

namespace fs = std::filesystem;
using namespace chainlab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string mode = "adaptive";
  std::string out_dir = "out";
  uint64_t seed = 1;
  bool seed_set = false;
  int64_t duration_ms = 30000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "Workload preset A..E")
      ->check(CLI::IsMember({"A", "B", "C", "D", "E"}));
  cmd->add_option("--mode", o.mode, "adaptive or fixed:<action-id>");
  cmd->add_option("--seed", o.seed, "Run seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--duration-ms", o.duration_ms,
                  "Workload duration when using --preset");
}

harness::ExperimentConfig build_config(const CommonOpts& o) {
  harness::ExperimentConfig c;
  if (!o.config_path.empty())
    c = harness::ExperimentConfig::from_json_file(o.config_path);
  if (!o.preset.empty()) {
    c.schedule.segments.clear();
    c.schedule.segments.push_back(
        {workload::preset(o.preset[0]), o.duration_ms * kMillisecond});
  }
  if (c.schedule.segments.empty())
    c.schedule.segments.push_back(
        {workload::preset('B'), o.duration_ms * kMillisecond});
  if (o.seed_set || o.config_path.empty()) c.seed = o.seed;
  if (o.mode == "adaptive") {
    c.mode.kind = peer::ModeSpec::Kind::Adaptive;
  } else if (o.mode.rfind("fixed:", 0) == 0) {
    c.mode.kind = peer::ModeSpec::Kind::Fixed;
    c.mode.fixed_action = std::stoi(o.mode.substr(6));
    if (c.mode.fixed_action < 0 ||
        c.mode.fixed_action >= static_cast<int>(exec::enumerate_actions().size()))
      throw CLI::ValidationError("--mode", "action id out of range");
  } else {
    throw CLI::ValidationError("--mode", "expected adaptive or fixed:<id>");
  }
  return c;
}

void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary);
  out << contents;
}

void write_outputs(const fs::path& dir, const harness::RunResult& r) {
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "metrics.csv", std::ios::binary);
    harness::write_metrics_csv(f, r);
  }
  {
    std::ofstream f(dir / "cumulative.csv", std::ios::binary);
    harness::write_cumulative_csv(f, r);
  }
  {
    std::ofstream f(dir / "overhead.csv", std::ios::binary);
    harness::write_overhead_csv(f, r);
  }
  {
    std::ofstream f(dir / "overhead_summary.csv", std::ios::binary);
    harness::write_overhead_summary_csv(f, r);
  }
  for (const auto& p : r.peers)
    write_file(dir / ("ledger_peer" + std::to_string(p.id) + ".ndjson"),
               p.ledger_export);
}

// Returns true when every structural invariant holds on honest peers.
bool report_invariants(const harness::RunResult& r, std::ostream& os) {
  bool ok = true;
  for (const auto& p : r.peers) {
    if (p.byz != peer::ByzKind::None) continue;
    if (!p.chain_ok) {
      os << "peer " << p.id << ": hash chain broken\n";
      ok = false;
    }
    if (!p.serial_ok) {
      os << "peer " << p.id << ": serial replay mismatch\n";
      ok = false;
    }
  }
  std::string detail;
  if (!harness::honest_prefixes_agree(r, &detail)) {
    os << "chain divergence: " << detail << "\n";
    ok = false;
  }
  if (!harness::conservation_holds(r, &detail)) {
    os << "conservation violation: " << detail << "\n";
    ok = false;
  }
  return ok;
}

int cmd_run(const CommonOpts& o) {
  auto config = build_config(o);
  auto r = harness::run_experiment(config);
  write_outputs(o.out_dir, r);
  const auto& eps = r.reference().episodes;
  uint64_t valid = 0;
  for (const auto& e : eps) valid += e.valid;
  std::cout << "episodes=" << eps.size() << " committed=" << valid
            << " height=" << r.reference().height << " outputs in "
            << o.out_dir << "\n";
  return report_invariants(r, std::cerr) ? 0 : 1;
}

int cmd_grid(const CommonOpts& o, unsigned jobs) {
  auto config = build_config(o);
  auto grid = harness::grid_search(config, jobs);
  fs::create_directories(o.out_dir);
  std::ofstream f(fs::path(o.out_dir) / "grid.csv", std::ios::binary);
  harness::write_grid_csv(f, grid);
  auto best = std::max_element(grid.begin(), grid.end(),
                               [](const auto& a, const auto& b) {
                                 return a.mean_throughput < b.mean_throughput;
                               });
  std::cout << "grid of " << grid.size() << " actions, best action "
            << best->action << " (" << best->config.name() << " bs="
            << best->config.block_size << ") at "
            << best->mean_throughput << " txn/s\n";
  return 0;
}

int cmd_check(const CommonOpts& o) {
  auto config = build_config(o);
  auto r1 = harness::run_experiment(config);
  auto r2 = harness::run_experiment(config);
  bool ok = report_invariants(r1, std::cerr);

  bool det = harness::metrics_csv(r1) == harness::metrics_csv(r2) &&
             harness::cumulative_csv(r1) == harness::cumulative_csv(r2);
  for (size_t i = 0; det && i < r1.peers.size(); i++)
    det = r1.peers[i].ledger_export == r2.peers[i].ledger_export;
  std::cout << (ok ? "invariants: pass\n" : "invariants: FAIL\n");
  std::cout << (det ? "determinism: pass\n" : "determinism: FAIL\n");
  return ok && det ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-architecture blockchain laboratory"};
  app.require_subcommand(1);

  CommonOpts run_opts, grid_opts, check_opts;
  unsigned jobs = 0;

  auto* run = app.add_subcommand("run", "Run one experiment");
  add_common(run, run_opts);
  auto* grid = app.add_subcommand(
      "grid-search", "Run every action in fixed mode, write grid.csv");
  add_common(grid, grid_opts);
  grid->add_option("--jobs", jobs, "Parallel cells (0 = hardware)");
  auto* check = app.add_subcommand(
      "check", "Run twice, verify invariants and determinism");
  add_common(check, check_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (grid->parsed()) return cmd_grid(grid_opts, jobs);
    if (check->parsed()) return cmd_check(check_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
