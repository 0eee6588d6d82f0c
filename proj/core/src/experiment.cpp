#include "losmap/experiment.hpp"

#include "losmap/errors.hpp"
#include "losmap/network.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <cmath>
#include <thread>

namespace losmap::experiment {

std::string_view to_string(SolverKind s)
{
  switch (s)
  {
    case SolverKind::es: return "ES";
    case SolverKind::hg: return "HG";
    case SolverKind::fcfs: return "FCFS";
    case SolverKind::admm: return "ADMM";
    case SolverKind::lower_bound: return "lower_bound";
    case SolverKind::upper_bound: return "upper_bound";
  }
  return "?";
}

SolverKind parse_solver(std::string_view name)
{
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "es") return SolverKind::es;
  if (lower == "hg") return SolverKind::hg;
  if (lower == "fcfs") return SolverKind::fcfs;
  if (lower == "admm") return SolverKind::admm;
  if (lower == "lower_bound") return SolverKind::lower_bound;
  if (lower == "upper_bound") return SolverKind::upper_bound;
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const
{
  scenario.validate();
  try
  {
    channel.validate();
  }
  catch (const InvalidArgument& e)
  {
    throw ConfigError("channel", e.what());
  }
  try
  {
    prediction.validate();
    prediction.sample_count();
  }
  catch (const InvalidArgument& e)
  {
    throw ConfigError("prediction", e.what());
  }
  try
  {
    sensing.validate();
  }
  catch (const InvalidArgument& e)
  {
    throw ConfigError("sensing", e.what());
  }
  try
  {
    admm.validate();
  }
  catch (const InvalidArgument& e)
  {
    throw ConfigError("admm", e.what());
  }

  if (gamma_th_db.empty())
    throw ConfigError("sweep.gamma_th_db", "must not be empty");
  if (cav_fractions.empty())
    throw ConfigError("sweep.cav_fraction", "must not be empty");
  if (densities.empty())
    throw ConfigError("sweep.density", "must not be empty");
  for (double g : gamma_th_db)
  {
    if (!std::isfinite(g))
      throw ConfigError("sweep.gamma_th_db", "must be finite");
  }
  for (double c : cav_fractions)
  {
    if (!(c >= 0.0 && c <= 1.0))
      throw ConfigError("sweep.cav_fraction", "must lie in [0, 1]");
  }
  for (double d : densities)
  {
    if (!(std::isfinite(d) && d > 0.0))
      throw ConfigError("sweep.density", "must be positive");
  }
  if (solvers.empty())
    throw ConfigError("solvers", "must not be empty");
  if (repetitions < 1)
    throw ConfigError("repetitions", "must be at least 1");
  if (windows < 1)
    throw ConfigError("windows", "must be at least 1");
  if (threads < 1)
    throw ConfigError("threads", "must be at least 1");
  if (!(exhaustive.max_arrangements > 0.0))
    throw ConfigError("exhaustive.max_arrangements", "must be positive");
}

std::vector<relay::RelayNode> relay_candidates(
  const scenario::WorldSnapshot& world, unsigned cav_capacity, unsigned rsu_capacity)
{
  std::vector<relay::RelayNode> out;
  for (const auto& v : world.vehicles)
  {
    if (v.is_cav)
      out.push_back({v.id, cav_capacity});
  }
  std::sort(out.begin(), out.end(),
            [](const relay::RelayNode& a, const relay::RelayNode& b) { return a.id < b.id; });
  for (const auto& r : world.rsus)
    out.push_back({r.id, rsu_capacity});
  return out;
}

namespace {

struct Accumulator
{
  double lambda2 = 0.0;
  double objective = 0.0;
  std::uint64_t messages = 0;
  double wall_time_ms = 0.0;
};

relay::Assignment solve(SolverKind kind, const relay::AssignmentProblem& p, const ExperimentSpec& spec)
{
  switch (kind)
  {
    case SolverKind::es: return relay::exhaustive_search(p, spec.exhaustive);
    case SolverKind::hg: return relay::hungarian(p);
    case SolverKind::fcfs: return relay::fcfs(p);
    case SolverKind::admm: return relay::admm(p, spec.admm);
    default: break;
  }
  throw InvalidArgument("bounds are not assignment solvers");
}

} // namespace

std::vector<ResultRow> run_point(
  const ExperimentSpec& spec, double density, double cav_fraction, std::uint64_t seed,
  PointResult* inspect)
{
  scenario::ScenarioConfig cfg = spec.scenario;
  cfg.density = density;
  cfg.cav_fraction = cav_fraction;
  cfg.seed = seed;

  const scenario::WorldSnapshot start = scenario::identify_roles(scenario::generate(cfg), cfg);

  const std::size_t n_gamma = spec.gamma_th_db.size();
  const std::size_t n_solver = spec.solvers.size();
  std::vector<Accumulator> acc(n_gamma * n_solver);

  for (unsigned w = 0; w < spec.windows; ++w)
  {
    const scenario::WorldSnapshot world = w == 0
      ? start
      : scenario::identify_roles(scenario::step(start, w * spec.prediction.horizon), cfg);
    // Sensing noise differs per window but stays a function of the seed.
    const std::uint64_t sensing_seed = (seed * 0x9E3779B97F4A7C15ULL) ^ (0xD1B54A32D192ED03ULL + w);
    const los_map::PredictedLosMap map =
      los_map::build(world, spec.prediction, spec.channel, spec.sensing, sensing_seed);

    std::vector<relay::RelayLink> links;
    links.reserve(world.requests.size());
    for (const auto& r : world.requests)
      links.push_back({r.rv, r.voi});
    const auto relays = relay_candidates(world, spec.cav_capacity, spec.rsu_capacity);
    const std::size_t n_cavs = world.cav_count();

    for (std::size_t g = 0; g < n_gamma; ++g)
    {
      const network::AvailabilityMatrix a_bar = map.average(spec.gamma_th_db[g]);
      const relay::AssignmentProblem problem = relay::build_problem(a_bar, links, relays);
      if (inspect && w == 0 && g == 0)
        *inspect = {world, map, problem};

      for (std::size_t s = 0; s < n_solver; ++s)
      {
        Accumulator& out = acc[g * n_solver + s];
        const SolverKind kind = spec.solvers[s];
        if (kind == SolverKind::lower_bound)
        {
          out.lambda2 += network::connectivity(a_bar).lambda2;
          continue;
        }
        if (kind == SolverKind::upper_bound)
        {
          out.lambda2 += network::connectivity(network::second_order(a_bar)).lambda2;
          continue;
        }

        const auto t0 = std::chrono::steady_clock::now();
        const relay::Assignment x = solve(kind, problem, spec);
        const auto t1 = std::chrono::steady_clock::now();
        if (spec.record_timing)
          out.wall_time_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();

        const auto scheme = kind == SolverKind::es || kind == SolverKind::hg
          ? relay::Scheme::centralized
          : relay::Scheme::distributed;
        out.messages += relay::protocol_message_count(scheme, n_cavs, links.size(), x.stats);
        out.objective += x.objective;
        out.lambda2 +=
          network::connectivity(relay::build_relayed_adjacency(a_bar, x, problem)).lambda2;
      }
    }
  }

  std::vector<ResultRow> rows;
  rows.reserve(acc.size());
  const double n_windows = spec.windows;
  for (std::size_t g = 0; g < n_gamma; ++g)
  {
    for (std::size_t s = 0; s < n_solver; ++s)
    {
      const Accumulator& a = acc[g * n_solver + s];
      ResultRow row;
      row.scenario = std::string(scenario::to_string(cfg.kind));
      row.density = density;
      row.cav_fraction = cav_fraction;
      row.gamma_th_db = spec.gamma_th_db[g];
      row.solver = std::string(to_string(spec.solvers[s]));
      row.seed = seed;
      row.lambda2 = spec.windows == 1 ? a.lambda2 : a.lambda2 / n_windows;
      row.objective = spec.windows == 1 ? a.objective : a.objective / n_windows;
      row.messages = a.messages;
      row.wall_time_ms = a.wall_time_ms;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec)
{
  spec.validate();

  struct Job
  {
    double density;
    double cav_fraction;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double d : spec.densities)
  {
    for (double c : spec.cav_fractions)
    {
      for (unsigned k = 0; k < spec.repetitions; ++k)
        jobs.push_back({d, c, spec.base_seed + k});
    }
  }

  std::vector<std::vector<ResultRow>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++)
    {
      try
      {
        results[j] = run_point(spec, jobs[j].density, jobs[j].cav_fraction, jobs[j].seed);
      }
      catch (...)
      {
        errors[j] = std::current_exception();
      }
    }
  };

  const unsigned n_threads =
    static_cast<unsigned>(std::min<std::size_t>(spec.threads, std::max<std::size_t>(jobs.size(), 1)));
  if (n_threads <= 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }

  for (const auto& e : errors)
  {
    if (e)
      std::rethrow_exception(e);
  }

  std::vector<ResultRow> rows;
  for (auto& r : results)
    rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  return rows;
}

} // namespace losmap::experiment
