// losmap: run relay-selection experiments and dump pipeline intermediates.

#include <losmap/losmap.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level()
{
  const char* env = std::getenv("LOSMAP_LOG");
  const std::string v = env ? env : "warn";
  if (v == "error") return LogLevel::error;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

void log(LogLevel level, const std::string& message)
{
  static const LogLevel threshold = log_level();
  if (level > threshold)
    return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "losmap [" << names[static_cast<int>(level)] << "] " << message << '\n';
}

std::vector<losmap::experiment::SolverKind> parse_solver_list(const std::string& list)
{
  std::vector<losmap::experiment::SolverKind> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ','))
  {
    if (!name.empty())
      out.push_back(losmap::experiment::parse_solver(name));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw losmap::Error("cannot write " + path.string());
}

} // namespace

int main(int argc, char** argv)
{
  namespace ex = losmap::experiment;

  CLI::App app{"Predicted LoS-map relay selection experiments"};
  app.require_subcommand(1);

  std::string spec_file;
  std::string out_dir;
  unsigned seeds = 0;
  std::string solvers;
  std::string format;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run the sweep of a spec file and write results");
  run->add_option("spec-file", spec_file, "JSON experiment spec")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the spec)");
  run->add_option("--seeds", seeds, "Repetitions per sweep point (overrides the spec)");
  run->add_option("--solvers", solvers, "Comma-separated subset of ES,HG,FCFS,ADMM,lower_bound,upper_bound");
  run->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string inspect_spec;
  std::string inspect_out = "inspect";
  std::uint64_t inspect_seed = 1;
  double inspect_gamma = 10.0;
  auto* inspect = app.add_subcommand(
    "inspect", "Dump the world trace, averaged matrices and assignments of one run");
  inspect->add_option("spec-file", inspect_spec, "JSON experiment spec")->required()->check(CLI::ExistingFile);
  inspect->add_option("--out", inspect_out, "Output directory");
  inspect->add_option("--seed", inspect_seed, "World seed");
  inspect->add_option("--gamma", inspect_gamma, "SNR threshold [dB]");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*run)
    {
      ex::ExperimentSpec spec = ex::load_spec(spec_file);
      if (!out_dir.empty())
        spec.output_dir = out_dir;
      if (seeds > 0)
        spec.repetitions = seeds;
      if (!solvers.empty())
        spec.solvers = parse_solver_list(solvers);
      if (!format.empty())
        spec.format = format == "jsonl" ? ex::OutputFormat::jsonl : ex::OutputFormat::csv;
      if (threads > 0)
        spec.threads = threads;
      spec.validate();

      log(LogLevel::info, "running " + std::to_string(spec.densities.size() * spec.cav_fractions.size() *
                                                      spec.repetitions) + " worlds");
      const auto rows = ex::run_experiment(spec);
      const auto path = ex::emit(rows, spec.format, spec.output_dir);
      log(LogLevel::info, "wrote " + std::to_string(rows.size()) + " rows to " + path.string());
      return 0;
    }

    ex::ExperimentSpec spec = ex::load_spec(inspect_spec);
    spec.gamma_th_db = {inspect_gamma};
    ex::PointResult point;
    ex::run_point(spec, spec.densities.front(), spec.cav_fractions.front(), inspect_seed, &point);

    const std::filesystem::path dir = inspect_out;
    std::filesystem::create_directories(dir);

    std::ostringstream trace;
    losmap::scenario::write_trace(trace, point.world);
    write_file(dir / "trace.csv", trace.str());

    const auto a_bar = point.los_map.average(inspect_gamma);
    std::ostringstream first;
    losmap::network::write_csv(first, a_bar);
    write_file(dir / "a_bar.csv", first.str());

    std::ostringstream second;
    losmap::network::write_csv(second, losmap::network::second_order(a_bar));
    write_file(dir / "a_bar_second_order.csv", second.str());

    for (auto kind : {ex::SolverKind::hg, ex::SolverKind::fcfs, ex::SolverKind::admm})
    {
      losmap::relay::Assignment x;
      if (kind == ex::SolverKind::hg)
        x = losmap::relay::hungarian(point.problem);
      else if (kind == ex::SolverKind::fcfs)
        x = losmap::relay::fcfs(point.problem);
      else
        x = losmap::relay::admm(point.problem, spec.admm);
      std::ostringstream csv;
      losmap::relay::write_assignment_csv(csv, point.problem, x);
      write_file(dir / ("assignment_" + std::string(ex::to_string(kind)) + ".csv"), csv.str());
    }
    log(LogLevel::info, "wrote inspection files to " + dir.string());
    return 0;
  }
  catch (const losmap::ConfigError& e)
  {
    log(LogLevel::error, std::string("invalid configuration: ") + e.what());
    return 2;
  }
  catch (const std::exception& e)
  {
    log(LogLevel::error, e.what());
    return 1;
  }
}
