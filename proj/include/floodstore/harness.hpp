#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "floodstore/protocol.hpp"
#include "floodstore/topology.hpp"

namespace floodstore {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class VariantKind { dsa1, dsa2 };

struct QueryMode {
  enum class Kind { uniform, region } kind = Kind::uniform;
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;

  /// "uniform" or "region:X,Y,R".
  static QueryMode parse(const std::string& text);
};

struct ExperimentConfig {
  std::size_t n = 100;
  double side = 2.0;
  std::optional<double> radius;  // nullopt: default_radius(n, side)
  std::optional<std::size_t> slots;  // nullopt: max(1, floor(n / 10))
  std::size_t symbol_bytes = 8;
  VariantKind variant = VariantKind::dsa1;
  double c_u = 2.0;
  RelayMode relay = RelayMode::single;
  std::vector<double> eta_grid;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  bool fixed_topology = false;
  QueryMode query;
  std::size_t threads = 1;

  double effective_radius() const;
  std::size_t effective_slots() const;
  AlgorithmVariant algorithm() const;
  EngineOptions engine_options() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// min, min+step, ..., up to max inclusive (with a small tolerance so that
/// 0.1..1.0 step 0.1 yields ten points).
std::vector<double> make_eta_grid(double min, double max, double step);

struct TrialRecord {
  double eta = 0.0;
  std::size_t eta_index = 0;
  std::size_t trial_index = 0;
  bool success = false;
  std::size_t rank = 0;
  std::size_t recovered = 0;
  std::size_t queried = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t rounds = 0;
  std::uint64_t seed_used = 0;
  std::size_t audit_violations = 0;
  double mean_degree = 0.0;
  double mean_branch_length = 0.0;
};

struct ExperimentRow {
  double eta = 0.0;
  double rho = 0.0;
  double ci95 = 0.0;  // normal-approximation half-width
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_transmissions = 0.0;
  double mean_rounds = 0.0;
  double mean_recovered = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;
  std::vector<TrialRecord> records;  // ordered by (eta_index, trial_index)
};

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t eta_index,
                         std::size_t trial_index);

/// Topology used by one trial (the shared one under fixed_topology).
std::shared_ptr<const GeometricGraph> trial_topology(const ExperimentConfig& config,
                                                     std::size_t eta_index,
                                                     std::size_t trial_index);

/// One fresh dissemination plus one decode. Throws if the engine hits its
/// round cap or the conservation audit finds a corrupted slot.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t eta_index,
                      std::size_t trial_index,
                      std::shared_ptr<const GeometricGraph> topology = nullptr);

ExperimentResult run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& out, const ExperimentResult& result);
void emit_csv(const ExperimentResult& result, const std::string& path);

/// Smallest eta whose rho reaches `threshold`, if any.
std::optional<double> smallest_eta_reaching(const ExperimentResult& result, double threshold);

std::string format_summary(const ExperimentResult& result);

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
};

/// Least-squares line through (log x, log y).
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

struct ScalingSample {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double mean_degree = 0.0;
  double per_source_transmissions = 0.0;
  double total_transmissions = 0.0;
  double mean_branch_length = 0.0;
};

struct ScalingReport {
  std::vector<ScalingSample> samples;
  PowerLawFit per_source;
  PowerLawFit total;
};

/// Full DSA-I disseminations at a fixed node density (nodes per unit area,
/// side = sqrt(n / density), radius auto) for each n and seed.
ScalingReport measure_transmission_scaling(const std::vector<std::size_t>& sizes, double density,
                                           std::size_t seeds, std::uint64_t master_seed,
                                           VariantKind variant = VariantKind::dsa1,
                                           double c_u = 2.0);

/// Worker count from FLOODSTORE_THREADS, else hardware concurrency.
std::size_t worker_threads_from_env();

const char* to_string(VariantKind kind);
const char* to_string(RelayMode mode);

}  // namespace floodstore
