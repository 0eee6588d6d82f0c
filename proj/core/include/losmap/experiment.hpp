#pragma once

#include "losmap/channel.hpp"
#include "losmap/los_map.hpp"
#include "losmap/prediction.hpp"
#include "losmap/relay.hpp"
#include "losmap/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace losmap::experiment {

enum class SolverKind { es, hg, fcfs, admm, lower_bound, upper_bound };

std::string_view to_string(SolverKind s);

/// Accepts the names used in result files: ES, HG, FCFS, ADMM, lower_bound,
/// upper_bound (case-insensitive). Throws InvalidArgument otherwise.
SolverKind parse_solver(std::string_view name);

enum class OutputFormat { csv, jsonl };

struct ExperimentSpec
{
  scenario::ScenarioConfig scenario = scenario::ScenarioConfig::defaults_for(scenario::ScenarioKind::highway);
  channel::ChannelParams channel;
  prediction::PredictionParams prediction;
  los_map::SensingParams sensing;

  std::vector<double> gamma_th_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<double> cav_fractions{1.0};
  std::vector<double> densities{50.0};
  std::vector<SolverKind> solvers{
    SolverKind::lower_bound, SolverKind::es, SolverKind::hg,
    SolverKind::fcfs, SolverKind::admm, SolverKind::upper_bound};

  unsigned repetitions = 1;
  std::uint64_t base_seed = 1;
  unsigned cav_capacity = 2;
  unsigned rsu_capacity = 2;
  relay::AdmmParams admm;
  relay::ExhaustiveOptions exhaustive{1e300, true};

  /// Prediction windows per run; later windows start where the previous
  /// one ended and their results are averaged into one row.
  unsigned windows = 1;
  unsigned threads = 1;
  /// Off by default so that output bytes depend on the spec alone.
  bool record_timing = false;

  std::filesystem::path output_dir = ".";
  OutputFormat format = OutputFormat::csv;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ResultRow
{
  std::string scenario;
  double density = 0.0;
  double cav_fraction = 0.0;
  double gamma_th_db = 0.0;
  std::string solver;
  std::uint64_t seed = 0;
  double lambda2 = 0.0;
  double objective = 0.0;
  std::uint64_t messages = 0;
  double wall_time_ms = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Every sweep point and seed: generate the world, build the window's
/// LoS-map, average it, and report the bounds and each solver's relayed
/// connectivity. Row order: density, CAV fraction, seed, threshold, then the
/// spec's solver order.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Intermediate products of one world, for inspection and tests.
struct PointResult
{
  scenario::WorldSnapshot world;
  los_map::PredictedLosMap los_map;
  relay::AssignmentProblem problem;
};

/// Runs a single (density, CAV fraction, seed) point and returns the rows
/// for every threshold and solver.
std::vector<ResultRow> run_point(
  const ExperimentSpec& spec, double density, double cav_fraction, std::uint64_t seed,
  PointResult* inspect = nullptr);

/// Relay candidates of a snapshot: every CAV and RSU with its capacity.
std::vector<relay::RelayNode> relay_candidates(
  const scenario::WorldSnapshot& world, unsigned cav_capacity, unsigned rsu_capacity);

/// Reads a JSON experiment spec. Missing keys keep their defaults; unknown
/// keys and invalid values throw ConfigError naming the field.
ExperimentSpec parse_spec(std::string_view json_text);
ExperimentSpec load_spec(const std::filesystem::path& path);

inline constexpr std::string_view csv_header =
  "scenario,density,cav_fraction,gamma_th_db,solver,seed,lambda2,objective,messages,wall_time_ms";

/// Floating-point fields carry 9 significant digits.
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_jsonl(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);
std::vector<ResultRow> read_jsonl(std::istream& is);

/// Writes `results.csv` or `results.jsonl` into `dir`, creating it. Returns
/// the file path; throws Error on I/O failure.
std::filesystem::path emit(
  const std::vector<ResultRow>& rows, OutputFormat format, const std::filesystem::path& dir);

} // namespace losmap::experiment
