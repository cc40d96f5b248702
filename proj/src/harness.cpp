#include "floodstore/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "floodstore/coding.hpp"
#include "floodstore/decoder.hpp"
#include "floodstore/random.hpp"

namespace floodstore {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("--query: malformed " + what + " '" + text + "'");
  }
  return v;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<Symbol> make_readings(std::uint64_t seed, std::size_t n, std::size_t length) {
  std::vector<Symbol> readings;
  readings.reserve(n);
  for (NodeId u = 0; u < n; ++u) readings.push_back(make_reading(seed, u, length));
  return readings;
}

}  // namespace

QueryMode QueryMode::parse(const std::string& text) {
  if (text == "uniform") return {};
  const std::string prefix = "region:";
  if (text.rfind(prefix, 0) != 0) {
    throw ConfigError("--query: expected 'uniform' or 'region:X,Y,R', got '" + text + "'");
  }
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(prefix.size()));
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  if (parts.size() != 3) throw ConfigError("--query: region needs exactly X,Y,R");
  QueryMode mode;
  mode.kind = Kind::region;
  mode.x = parse_number(parts[0], "X");
  mode.y = parse_number(parts[1], "Y");
  mode.radius = parse_number(parts[2], "R");
  if (mode.radius < 0.0) throw ConfigError("--query: region radius must be non-negative");
  return mode;
}

double ExperimentConfig::effective_radius() const {
  return radius ? *radius : default_radius(n, side);
}

std::size_t ExperimentConfig::effective_slots() const {
  return slots ? *slots : std::max<std::size_t>(1, n / 10);
}

AlgorithmVariant ExperimentConfig::algorithm() const {
  if (variant == VariantKind::dsa2) return Dsa2{c_u};
  return Dsa1{n};
}

EngineOptions ExperimentConfig::engine_options() const {
  EngineOptions options;
  options.variant = algorithm();
  options.slots = effective_slots();
  options.relay = relay;
  return options;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("--n must be at least 2");
  if (!(side > 0.0) || !std::isfinite(side)) throw ConfigError("--area must be positive");
  if (radius && (!(*radius > 0.0) || !std::isfinite(*radius))) {
    throw ConfigError("--radius must be positive or 'auto'");
  }
  if (slots && *slots < 1) throw ConfigError("--slots must be at least 1");
  if (symbol_bytes < 1) throw ConfigError("--symbol-bytes must be at least 1");
  if (variant == VariantKind::dsa2 && (!(c_u > 0.0) || !std::isfinite(c_u))) {
    throw ConfigError("--cu must be positive");
  }
  for (double eta : eta_grid) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta grid values must lie in (0, 1]");
  }
  if (trials < 1) throw ConfigError("--trials must be at least 1");
  if (threads < 1) throw ConfigError("thread count must be at least 1");
}

std::vector<double> make_eta_grid(double min, double max, double step) {
  if (!(step > 0.0)) throw ConfigError("--eta-step must be positive");
  if (!(min > 0.0) || !(max <= 1.0) || min > max + 1e-12) {
    throw ConfigError("eta range must satisfy 0 < eta-min <= eta-max <= 1");
  }
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double eta = std::round((min + static_cast<double>(i) * step) * 1e9) / 1e9;
    grid.push_back(std::min(eta, 1.0));
  }
  return grid;
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t eta_index,
                         std::size_t trial_index) {
  return derive_seed(config.seed, "trial", config.n, eta_index, trial_index);
}

std::shared_ptr<const GeometricGraph> trial_topology(const ExperimentConfig& config,
                                                     std::size_t eta_index,
                                                     std::size_t trial_index) {
  const std::uint64_t seed = config.fixed_topology
                                 ? derive_seed(config.seed, "fixed-topology", config.n)
                                 : derive_seed(trial_seed(config, eta_index, trial_index),
                                               "topology");
  return std::make_shared<const GeometricGraph>(
      generate_topology(config.n, config.side, config.effective_radius(), seed));
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t eta_index,
                      std::size_t trial_index, std::shared_ptr<const GeometricGraph> topology) {
  const std::uint64_t seed = trial_seed(config, eta_index, trial_index);
  if (!topology) topology = trial_topology(config, eta_index, trial_index);

  Engine engine(topology,
                make_readings(derive_seed(seed, "payload"), config.n, config.symbol_bytes),
                config.engine_options(), derive_seed(seed, "protocol"));
  const DisseminationStats stats = engine.disseminate();
  if (stats.cap_hit) {
    throw std::runtime_error("dissemination hit the round cap (trial seed " +
                             std::to_string(seed) + ")");
  }

  TrialRecord record;
  record.eta = config.eta_grid.at(eta_index);
  record.eta_index = eta_index;
  record.trial_index = trial_index;
  record.seed_used = seed;
  record.transmissions = stats.transmissions;
  record.rounds = stats.rounds;
  record.mean_degree = mean_degree(*topology);
  record.mean_branch_length = stats.mean_branch_length();
  record.audit_violations = engine.audit();
  if (record.audit_violations != 0) {
    throw CorruptionError("conservation audit failed (trial seed " + std::to_string(seed) + ")");
  }

  Rng query_rng(derive_seed(seed, "query"));
  DecodeOutcome outcome;
  if (config.query.kind == QueryMode::Kind::region) {
    const auto ids = choose_region(*topology, config.query.x, config.query.y, config.query.radius);
    const auto equations = collect_equations(engine, ids);
    outcome = gf2_solve(equations, config.n);
    outcome.queried = ids.size();
  } else {
    outcome = decode_trial(engine, record.eta, query_rng);
  }
  record.success = outcome.success;
  record.rank = outcome.rank;
  record.recovered = outcome.recovered_count;
  record.queried = outcome.queried;
  return record;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;

  std::shared_ptr<const GeometricGraph> shared;
  if (config.fixed_topology) shared = trial_topology(config, 0, 0);

  const std::size_t etas = config.eta_grid.size();
  const std::size_t tasks = etas * config.trials;
  result.records.resize(tasks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      try {
        result.records[task] =
            run_trial(config, task / config.trials, task % config.trials, shared);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  const std::size_t workers = std::min(config.threads, std::max<std::size_t>(tasks, 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const auto trials = static_cast<double>(config.trials);
  for (std::size_t e = 0; e < etas; ++e) {
    ExperimentRow row;
    row.eta = config.eta_grid[e];
    std::size_t successes = 0;
    double tx = 0.0, rounds = 0.0, recovered = 0.0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const TrialRecord& r = result.records[e * config.trials + t];
      successes += r.success ? 1 : 0;
      tx += static_cast<double>(r.transmissions);
      rounds += static_cast<double>(r.rounds);
      recovered += static_cast<double>(r.recovered);
    }
    row.rho = static_cast<double>(successes) / trials;
    row.ci95 = 1.96 * std::sqrt(row.rho * (1.0 - row.rho) / trials);
    row.ci_low = std::clamp(row.rho - row.ci95, 0.0, 1.0);
    row.ci_high = std::clamp(row.rho + row.ci95, 0.0, 1.0);
    row.mean_transmissions = tx / trials;
    row.mean_rounds = rounds / trials;
    row.mean_recovered = recovered / trials;
    result.rows.push_back(row);
  }
  return result;
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
  out << "eta,rho,ci95,mean_transmissions,mean_rounds,n,variant,seed\n";
  for (const ExperimentRow& row : result.rows) {
    out << format("%.4f", row.eta) << ',' << format("%.4f", row.rho) << ','
        << format("%.4f", row.ci95) << ',' << format("%.2f", row.mean_transmissions) << ','
        << format("%.2f", row.mean_rounds) << ',' << result.config.n << ','
        << to_string(result.config.variant) << ',' << result.config.seed << '\n';
  }
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, result);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::optional<double> smallest_eta_reaching(const ExperimentResult& result, double threshold) {
  for (const ExperimentRow& row : result.rows) {
    if (row.rho >= threshold) return row.eta;
  }
  return std::nullopt;
}

std::string format_summary(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  std::ostringstream out;
  out << "floodstore " << to_string(c.variant) << ": n=" << c.n << " L=" << c.side
      << " r=" << format("%.4f", c.effective_radius()) << (c.radius ? "" : " (auto)")
      << " m=" << c.effective_slots() << " c=" << c.symbol_bytes << " relay=" << to_string(c.relay)
      << " trials=" << c.trials << " seed=" << c.seed;
  if (c.variant == VariantKind::dsa2) out << " c_u=" << c.c_u;
  if (c.fixed_topology) out << " fixed-topology";
  out << '\n';
  if (c.query.kind == QueryMode::Kind::region) {
    out << "query: region center=(" << c.query.x << "," << c.query.y << ") radius=" << c.query.radius
        << '\n';
  }

  out << "  eta     rho     ci95    mean_tx     mean_rounds  mean_recovered\n";
  for (const ExperimentRow& row : result.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %.4f  %.4f  %.4f  %10.2f  %11.2f  %14.2f\n", row.eta,
                  row.rho, row.ci95, row.mean_transmissions, row.mean_rounds, row.mean_recovered);
    out << line;
  }

  const auto eta99 = smallest_eta_reaching(result, 0.99);
  out << "smallest eta with rho >= 0.99: " << (eta99 ? format("%.4f", *eta99) : "none") << '\n';

  if (!result.records.empty()) {
    double mu = 0.0, branch = 0.0, tx = 0.0;
    for (const TrialRecord& r : result.records) {
      mu += r.mean_degree;
      branch += r.mean_branch_length;
      tx += static_cast<double>(r.transmissions);
    }
    const auto count = static_cast<double>(result.records.size());
    mu /= count;
    branch /= count;
    tx /= count;
    const auto n = static_cast<double>(c.n);
    out << "mean degree mu: " << format("%.3f", mu) << '\n';
    out << "mean relay-chain length: " << format("%.3f", branch)
        << " hops (n/mu = " << format("%.3f", n / mu) << ")\n";
    out << "transmissions per source: " << format("%.2f", tx / n)
        << " (per source / n = " << format("%.4f", tx / (n * n)) << ")\n";
    out << "total transmissions: " << format("%.2f", tx) << '\n';
    if (c.variant == VariantKind::dsa2) {
      out << "per source / mu^2: " << format("%.4f", tx / n / (mu * mu)) << '\n';
    }
  }
  return out.str();
}

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("power-law fit needs at least two paired samples");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive data");
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const auto k = static_cast<double>(xs.size());
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("power-law fit needs distinct x values");
  PowerLawFit fit;
  fit.exponent = (k * sxy - sx * sy) / denom;
  fit.log_prefactor = (sy - fit.exponent * sx) / k;
  return fit;
}

ScalingReport measure_transmission_scaling(const std::vector<std::size_t>& sizes, double density,
                                           std::size_t seeds, std::uint64_t master_seed,
                                           VariantKind variant, double c_u) {
  ScalingReport report;
  std::vector<double> xs, per_source, total;
  for (std::size_t n : sizes) {
    const double side = std::sqrt(static_cast<double>(n) / density);
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::uint64_t seed = derive_seed(master_seed, "scaling", n, s);
      auto graph = std::make_shared<const GeometricGraph>(
          generate_topology(n, side, default_radius(n, side), derive_seed(seed, "topology")));
      EngineOptions options;
      options.variant = variant == VariantKind::dsa2 ? AlgorithmVariant{Dsa2{c_u}}
                                                     : AlgorithmVariant{Dsa1{n}};
      options.slots = std::max<std::size_t>(1, n / 10);
      Engine engine(graph, make_readings(derive_seed(seed, "payload"), n, 8), options,
                    derive_seed(seed, "protocol"));
      const DisseminationStats stats = engine.disseminate();
      if (stats.cap_hit) throw std::runtime_error("scaling run hit the round cap");

      ScalingSample sample;
      sample.n = n;
      sample.seed = seed;
      sample.mean_degree = mean_degree(*graph);
      sample.total_transmissions = static_cast<double>(stats.transmissions);
      sample.per_source_transmissions = sample.total_transmissions / static_cast<double>(n);
      sample.mean_branch_length = stats.mean_branch_length();
      report.samples.push_back(sample);
      xs.push_back(static_cast<double>(n));
      per_source.push_back(sample.per_source_transmissions);
      total.push_back(sample.total_transmissions);
    }
  }
  report.per_source = fit_power_law(xs, per_source);
  report.total = fit_power_law(xs, total);
  return report;
}

std::size_t worker_threads_from_env() {
  if (const char* env = std::getenv("FLOODSTORE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

const char* to_string(VariantKind kind) { return kind == VariantKind::dsa2 ? "dsa2" : "dsa1"; }

const char* to_string(RelayMode mode) {
  return mode == RelayMode::all_unseen ? "all-unseen" : "single";
}

}  // namespace floodstore
