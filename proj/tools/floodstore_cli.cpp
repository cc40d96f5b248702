// floodstore: run a decoding-ratio sweep of the flooding storage protocol
// and write the per-eta success table as CSV.
//
//   floodstore --n 100 --area 2 --variant dsa1 --trials 100 --seed 7 --out r.csv
//
// Exit status: 0 on success, 2 on a configuration error, 1 on a runtime error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "floodstore/harness.hpp"
#include "floodstore/topology.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 1;

}  // namespace

int main(int argc, char** argv) {
  using namespace floodstore;

  CLI::App app{"Flooding-based distributed storage simulator"};
  app.option_defaults()->always_capture_default();

  ExperimentConfig config;
  std::string radius_text = "auto";
  std::size_t slots = 0;
  std::string variant_text = "dsa1";
  std::string relay_text = "single";
  double eta_min = 0.1, eta_max = 1.0, eta_step = 0.1;
  std::string out_path;
  std::string topology_dump;
  std::string query_text = "uniform";

  app.add_option("--n", config.n, "number of sensor nodes")->check(CLI::Range(2, 1 << 20));
  app.add_option("--area", config.side, "side length L of the square field")
      ->check(CLI::PositiveNumber);
  app.add_option("--radius", radius_text, "connectivity radius r, or 'auto'");
  app.add_option("--slots", slots, "buffer slots m per node (default: max(1, n/10))")
      ->check(CLI::Range(1, 1 << 20));
  app.add_option("--symbol-bytes", config.symbol_bytes, "slot size c in bytes")
      ->check(CLI::Range(1, 1 << 16));
  app.add_option("--variant", variant_text, "protocol variant")
      ->check(CLI::IsMember({"dsa1", "dsa2"}));
  app.add_option("--cu", config.c_u, "DSA-II counter scale c_u")->check(CLI::PositiveNumber);
  app.add_option("--relay", relay_text, "relay policy")
      ->check(CLI::IsMember({"single", "all-unseen"}));
  app.add_option("--eta-min", eta_min, "smallest decoding ratio")->check(CLI::Range(0.0, 1.0));
  app.add_option("--eta-max", eta_max, "largest decoding ratio")->check(CLI::Range(0.0, 1.0));
  app.add_option("--eta-step", eta_step, "decoding ratio increment")
      ->check(CLI::PositiveNumber);
  app.add_option("--trials", config.trials, "trials per decoding ratio")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 32));
  app.add_option("--seed", config.seed, "master seed");
  app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
  app.add_option("--topology-dump", topology_dump, "write the first trial's topology here");
  app.add_flag("--fixed-topology", config.fixed_topology, "reuse one topology for all trials");
  app.add_option("--query", query_text, "node selection: uniform | region:X,Y,R");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (radius_text != "auto") {
      std::size_t used = 0;
      double r = 0.0;
      try {
        r = std::stod(radius_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != radius_text.size() || !(r > 0.0)) {
        throw ConfigError("--radius must be a positive number or 'auto'");
      }
      config.radius = r;
    }
    if (slots != 0) config.slots = slots;
    config.variant = variant_text == "dsa2" ? VariantKind::dsa2 : VariantKind::dsa1;
    config.relay = relay_text == "all-unseen" ? RelayMode::all_unseen : RelayMode::single;
    config.eta_grid = make_eta_grid(eta_min, eta_max, eta_step);
    config.query = QueryMode::parse(query_text);
    config.threads = worker_threads_from_env();
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }

  try {
    if (!topology_dump.empty()) save_topology(topology_dump, *trial_topology(config, 0, 0));
    const ExperimentResult result = run_experiment(config);
    if (out_path.empty()) {
      write_csv(std::cout, result);
    } else {
      emit_csv(result, out_path);
    }
    std::cerr << format_summary(result);
  } catch (const TopologyError& e) {
    std::cerr << "error: " << e.what() << " (offending seed " << e.seed() << ")\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
