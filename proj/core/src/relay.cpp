#include "losmap/relay.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace losmap::relay {

AssignmentProblem::AssignmentProblem(
  std::vector<RelayLink> links,
  std::vector<RelayNode> relays,
  std::vector<double> scores)
: _links(std::move(links)), _relays(std::move(relays)), _scores(std::move(scores))
{
  if (_scores.size() != _links.size() * _relays.size())
    throw InvalidArgument("score matrix must be links x relays");

  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const auto& l : _links)
  {
    if (l.rv == l.voi)
      throw InvalidArgument("link endpoints must differ");
    if (!pairs.insert(std::minmax(l.rv, l.voi)).second)
      throw InvalidArgument("duplicate link in assignment problem");
  }

  std::set<NodeId> relay_ids;
  for (const auto& r : _relays)
  {
    if (!relay_ids.insert(r.id).second)
      throw InvalidArgument("duplicate relay id in assignment problem");
  }

  _eligible.resize(_scores.size());
  for (std::size_t l = 0; l < _links.size(); ++l)
  {
    for (std::size_t r = 0; r < _relays.size(); ++r)
    {
      const double s = _scores[l * _relays.size() + r];
      if (!(s >= 0.0 && s <= 1.0))
        throw InvalidArgument("relayed availability scores must lie in [0, 1]");
      const NodeId id = _relays[r].id;
      _eligible[l * _relays.size() + r] =
        (id != _links[l].rv && id != _links[l].voi && _relays[r].capacity > 0) ? 1 : 0;
    }
  }
}

std::size_t AssignmentProblem::slot_count() const
{
  std::size_t s = 0;
  for (const auto& r : _relays)
    s += r.capacity;
  return s;
}

AssignmentProblem build_problem(
  const network::AvailabilityMatrix& a_bar,
  std::vector<RelayLink> links,
  std::vector<RelayNode> relays)
{
  std::vector<double> scores(links.size() * relays.size(), 0.0);
  for (std::size_t l = 0; l < links.size(); ++l)
  {
    const std::size_t i = a_bar.index_of(links[l].rv);
    const std::size_t j = a_bar.index_of(links[l].voi);
    for (std::size_t r = 0; r < relays.size(); ++r)
    {
      const std::size_t k = a_bar.index_of(relays[r].id);
      if (k == i || k == j)
        continue;
      scores[l * relays.size() + r] = std::clamp(a_bar(i, k) * a_bar(j, k), 0.0, 1.0);
    }
  }
  return AssignmentProblem(std::move(links), std::move(relays), std::move(scores));
}

double objective_of(
  const AssignmentProblem& p, std::span<const std::optional<std::size_t>> relay_of_link)
{
  double total = 0.0;
  for (std::size_t l = 0; l < relay_of_link.size(); ++l)
  {
    if (relay_of_link[l])
      total += p.score(l, *relay_of_link[l]);
  }
  return total;
}

bool is_feasible(const AssignmentProblem& p, const Assignment& a)
{
  if (a.relay_of_link.size() != p.link_count())
    return false;

  std::vector<std::size_t> load(p.relay_count(), 0);
  for (std::size_t l = 0; l < p.link_count(); ++l)
  {
    const auto& r = a.relay_of_link[l];
    if (!r)
      continue;
    if (*r >= p.relay_count() || !p.eligible(l, *r))
      return false;
    ++load[*r];
  }
  for (std::size_t r = 0; r < p.relay_count(); ++r)
  {
    if (load[r] > p.relays()[r].capacity)
      return false;
  }
  return true;
}

namespace {

// Zero-score choices never change the objective; drop them so every solver
// reports the same served links for a given value.
void finalize(const AssignmentProblem& p, Assignment& a)
{
  a.stats.granted = 0;
  for (std::size_t l = 0; l < p.link_count(); ++l)
  {
    auto& r = a.relay_of_link[l];
    if (r && (!p.eligible(l, *r) || p.score(l, *r) <= 0.0))
      r.reset();
    if (r)
      ++a.stats.granted;
  }
  a.objective = objective_of(p, a.relay_of_link);
}

struct ExhaustiveSearch
{
  const AssignmentProblem& p;
  bool prune;
  std::vector<double> best_tail;  // sum of per-link best scores from l on
  std::vector<unsigned> remaining;
  std::vector<std::optional<std::size_t>> current;
  std::vector<std::optional<std::size_t>> best;
  double best_value = -1.0;
  std::size_t visited = 0;

  void run(std::size_t l, double value)
  {
    ++visited;
    if (l == p.link_count())
    {
      if (value > best_value)
      {
        best_value = value;
        best = current;
      }
      return;
    }
    if (prune && value + best_tail[l] + 1e-9 <= best_value)
      return;

    // Lexicographic order of a selection row: all zeros first, then a one
    // in the last column, ..., a one in the first column.
    current[l].reset();
    run(l + 1, value);

    for (std::size_t r = p.relay_count(); r-- > 0;)
    {
      if (!p.eligible(l, r) || remaining[r] == 0)
        continue;
      --remaining[r];
      current[l] = r;
      run(l + 1, value + p.score(l, r));
      ++remaining[r];
    }
    current[l].reset();
  }
};

} // namespace

Assignment exhaustive_search(const AssignmentProblem& p, const ExhaustiveOptions& options)
{
  const double space = std::pow(
    static_cast<double>(p.relay_count() + 1), static_cast<double>(p.link_count()));
  if (space > options.max_arrangements)
    throw SearchSpaceExceeded(
      "exhaustive search space of " + std::to_string(space) +
      " arrangements exceeds the configured cap");

  ExhaustiveSearch es{p, options.prune, {}, {}, {}, {}, -1.0, 0};
  es.best_tail.assign(p.link_count() + 1, 0.0);
  for (std::size_t l = p.link_count(); l-- > 0;)
  {
    double m = 0.0;
    for (std::size_t r = 0; r < p.relay_count(); ++r)
    {
      if (p.eligible(l, r))
        m = std::max(m, p.score(l, r));
    }
    es.best_tail[l] = es.best_tail[l + 1] + m;
  }
  es.remaining.resize(p.relay_count());
  for (std::size_t r = 0; r < p.relay_count(); ++r)
    es.remaining[r] = p.relays()[r].capacity;
  es.current.assign(p.link_count(), std::nullopt);
  es.best = es.current;
  es.run(0, 0.0);

  Assignment a;
  a.relay_of_link = es.best;
  a.stats.iterations = es.visited;
  finalize(p, a);
  return a;
}

namespace {

// Minimum-cost assignment of every row of an n x m cost matrix (n <= m) to
// a distinct column, by successive shortest paths with potentials.
std::vector<std::size_t> solve_rectangular(
  std::size_t n, std::size_t m, const std::vector<double>& cost)
{
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i)
  {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do
    {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j)
      {
        if (used[j])
          continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j])
        {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta)
        {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j)
      {
        if (used[j])
        {
          u[match[j]] += delta;
          v[j] -= delta;
        }
        else
        {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);

    do
    {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> column_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
  {
    if (match[j] != 0)
      column_of_row[match[j] - 1] = j - 1;
  }
  return column_of_row;
}

} // namespace

Assignment hungarian(const AssignmentProblem& p)
{
  const std::size_t n = p.link_count();
  Assignment a;
  a.relay_of_link.assign(n, std::nullopt);
  if (n == 0)
    return a;

  std::vector<std::size_t> slot_relay;
  for (std::size_t r = 0; r < p.relay_count(); ++r)
    slot_relay.insert(slot_relay.end(), p.relays()[r].capacity, r);

  const std::size_t slots = slot_relay.size();
  const std::size_t m = slots + n;
  std::vector<double> cost(n * m, 0.0);
  for (std::size_t l = 0; l < n; ++l)
  {
    for (std::size_t s = 0; s < slots; ++s)
    {
      const std::size_t r = slot_relay[s];
      cost[l * m + s] = p.eligible(l, r) ? -p.score(l, r) : 0.0;
    }
  }

  const std::vector<std::size_t> column = solve_rectangular(n, m, cost);
  for (std::size_t l = 0; l < n; ++l)
  {
    if (column[l] < slots)
      a.relay_of_link[l] = slot_relay[column[l]];
  }
  a.stats.iterations = n;
  finalize(p, a);
  return a;
}

Assignment fcfs(const AssignmentProblem& p, std::span<const std::size_t> order)
{
  const std::size_t n = p.link_count();
  std::vector<bool> seen(n, false);
  if (order.size() != n)
    throw InvalidArgument("FCFS order must be a permutation of the links");
  for (std::size_t l : order)
  {
    if (l >= n || seen[l])
      throw InvalidArgument("FCFS order must be a permutation of the links");
    seen[l] = true;
  }

  Assignment a;
  a.relay_of_link.assign(n, std::nullopt);
  std::vector<unsigned> remaining(p.relay_count());
  for (std::size_t r = 0; r < p.relay_count(); ++r)
    remaining[r] = p.relays()[r].capacity;

  for (std::size_t l : order)
  {
    std::vector<std::size_t> ranked;
    for (std::size_t r = 0; r < p.relay_count(); ++r)
    {
      if (p.eligible(l, r) && p.score(l, r) > 0.0)
        ranked.push_back(r);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t x, std::size_t y) {
      return p.score(l, x) > p.score(l, y);
    });

    for (std::size_t r : ranked)
    {
      ++a.stats.iterations;
      a.stats.reservation_messages += 2;  // request + ACK/NACK
      if (remaining[r] > 0)
      {
        --remaining[r];
        a.relay_of_link[l] = r;
        break;
      }
    }
  }
  finalize(p, a);
  return a;
}

Assignment fcfs(const AssignmentProblem& p)
{
  std::vector<std::size_t> order(p.link_count());
  std::iota(order.begin(), order.end(), 0);
  return fcfs(p, order);
}

void AdmmParams::validate() const
{
  if (!(rho > 0.0))
    throw InvalidArgument("ADMM penalty rho must be positive");
  if (max_iterations < 1)
    throw InvalidArgument("ADMM needs at least one iteration");
  if (!(tolerance > 0.0))
    throw InvalidArgument("ADMM tolerance must be positive");
}

namespace {

// argmin over t in [0, 1] of
//   c t + rho/2 max(0, t + a)^2 + rho/2 max(0, t + b)^2.
double minimize_coordinate(double c, double a, double b, double rho)
{
  if (c >= 0.0)
    return 0.0;

  const double h = -c / rho;
  const double p1 = std::min(-a, -b);
  const double p2 = std::max(-a, -b);
  double t = p1 + h;
  if (t > p2)
    t = 0.5 * (h + p1 + p2);
  return std::clamp(t, 0.0, 1.0);
}

} // namespace

Assignment admm(const AssignmentProblem& p, const AdmmParams& params)
{
  params.validate();

  const std::size_t n = p.link_count();
  const std::size_t m = p.relay_count();
  const double rho = params.rho;

  Assignment a;
  a.relay_of_link.assign(n, std::nullopt);
  if (n == 0 || m == 0)
  {
    finalize(p, a);
    return a;
  }

  std::vector<double> x(n * m, 0.0);
  std::vector<double> x_prev(n * m, 0.0);
  std::vector<double> v_capacity(m, 0.0);  // one multiplier per relay
  std::vector<double> v_row(n, 0.0);       // one multiplier per link
  std::vector<double> column(m, 0.0);

  auto capacity = [&](std::size_t r) { return static_cast<double>(p.relays()[r].capacity); };

  std::size_t k = 0;
  bool converged = false;
  while (k < params.max_iterations)
  {
    ++k;
    x_prev = x;

    std::fill(column.begin(), column.end(), 0.0);
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t r = 0; r < m; ++r)
        column[r] += x[l * m + r];

    // Links update in turn, each seeing the latest rows of the others.
    for (std::size_t l = 0; l < n; ++l)
    {
      double* row = &x[l * m];
      double row_sum = std::accumulate(row, row + m, 0.0);

      for (int pass = 0; pass < 50; ++pass)
      {
        double change = 0.0;
        for (std::size_t r = 0; r < m; ++r)
        {
          if (!p.eligible(l, r))
            continue;
          const double old = row[r];
          const double others_col = column[r] - old;
          const double others_row = row_sum - old;
          const double t = minimize_coordinate(
            -p.score(l, r),
            others_col - capacity(r) + v_capacity[r] / rho,
            others_row - 1.0 + v_row[l] / rho,
            rho);
          row[r] = t;
          column[r] += t - old;
          row_sum += t - old;
          change = std::max(change, std::abs(t - old));
        }
        if (change < 1e-12)
          break;
      }
    }

    double primal = 0.0;
    for (std::size_t r = 0; r < m; ++r)
    {
      const double g = column[r] - capacity(r);
      v_capacity[r] = std::max(0.0, v_capacity[r] + rho * g);
      primal += std::max(0.0, g) * std::max(0.0, g);
    }
    for (std::size_t l = 0; l < n; ++l)
    {
      const double g = std::accumulate(&x[l * m], &x[l * m] + m, 0.0) - 1.0;
      v_row[l] = std::max(0.0, v_row[l] + rho * g);
      primal += std::max(0.0, g) * std::max(0.0, g);
    }

    double dual = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      dual += (x[i] - x_prev[i]) * (x[i] - x_prev[i]);

    if (std::sqrt(primal) < params.tolerance && rho * std::sqrt(dual) < params.tolerance)
    {
      converged = true;
      break;
    }
  }

  // Round: each link keeps its largest relaxed entry when it reaches 1/2.
  for (std::size_t l = 0; l < n; ++l)
  {
    std::optional<std::size_t> pick;
    double best = 0.5;
    for (std::size_t r = 0; r < m; ++r)
    {
      if (p.eligible(l, r) && p.score(l, r) > 0.0 && x[l * m + r] >= best &&
          (!pick || x[l * m + r] > x[l * m + *pick]))
      {
        pick = r;
        best = x[l * m + r];
      }
    }
    a.relay_of_link[l] = pick;
  }

  // Repair: revoke the lowest-score links on over-subscribed relays.
  for (std::size_t r = 0; r < m; ++r)
  {
    std::vector<std::size_t> users;
    for (std::size_t l = 0; l < n; ++l)
    {
      if (a.relay_of_link[l] == r)
        users.push_back(l);
    }
    if (users.size() <= p.relays()[r].capacity)
      continue;
    std::stable_sort(users.begin(), users.end(), [&](std::size_t x1, std::size_t x2) {
      return p.score(x1, r) > p.score(x2, r);
    });
    for (std::size_t u = p.relays()[r].capacity; u < users.size(); ++u)
      a.relay_of_link[users[u]].reset();
  }

  a.stats.iterations = k;
  a.stats.converged = converged;
  a.stats.exchange_messages = static_cast<std::uint64_t>(k) * (n * m + n + 1);
  finalize(p, a);
  a.stats.reservation_messages = 2 * a.stats.granted;
  return a;
}

network::AvailabilityMatrix build_relayed_adjacency(
  const network::AvailabilityMatrix& a_bar,
  const Assignment& x,
  const AssignmentProblem& p)
{
  if (x.relay_of_link.size() != p.link_count())
    throw InvalidArgument("assignment does not match the problem");

  auto out = network::AvailabilityMatrix::from_values(
    a_bar.ids(), a_bar.values(), network::MatrixOrder::second);

  for (std::size_t l = 0; l < p.link_count(); ++l)
  {
    if (!x.relay_of_link[l])
      continue;
    const std::size_t r = *x.relay_of_link[l];
    if (r >= p.relay_count())
      throw InvalidArgument("assignment references an unknown relay");

    const std::size_t i = a_bar.index_of(p.links()[l].rv);
    const std::size_t j = a_bar.index_of(p.links()[l].voi);
    const std::size_t k = a_bar.index_of(p.relays()[r].id);
    out.set(i, j, out(i, j) + a_bar(i, k) * a_bar(j, k));
  }
  return out;
}

std::uint64_t protocol_message_count(
  Scheme scheme, std::size_t n_cavs, std::size_t n_requests, const SolverStats& stats)
{
  if (scheme == Scheme::centralized)
    return n_cavs + 2 * static_cast<std::uint64_t>(n_requests) + 2 * stats.granted;
  return n_cavs + stats.exchange_messages + stats.reservation_messages;
}

void write_assignment_csv(std::ostream& os, const AssignmentProblem& p, const Assignment& a)
{
  os << "link_index,rv_id,voi_id,relay_id,score\n";
  char buf[32];
  for (std::size_t l = 0; l < p.link_count(); ++l)
  {
    if (!a.relay_of_link[l])
      continue;
    const std::size_t r = *a.relay_of_link[l];
    std::snprintf(buf, sizeof(buf), "%.17g", p.score(l, r));
    os << l << ',' << p.links()[l].rv << ',' << p.links()[l].voi << ','
       << p.relays()[r].id << ',' << buf << '\n';
  }
}

Assignment read_assignment_csv(std::istream& is, const AssignmentProblem& p)
{
  std::string line;
  if (!std::getline(is, line) || line != "link_index,rv_id,voi_id,relay_id,score")
    throw InvalidArgument("assignment CSV header mismatch");

  Assignment a;
  a.relay_of_link.assign(p.link_count(), std::nullopt);
  while (std::getline(is, line))
  {
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (cells.size() != 5)
      throw InvalidArgument("assignment CSV row is malformed: " + line);

    const std::size_t l = std::stoul(cells[0]);
    const auto relay_id = static_cast<NodeId>(std::stoul(cells[3]));
    if (l >= p.link_count())
      throw InvalidArgument("assignment CSV references an unknown link");
    std::optional<std::size_t> r;
    for (std::size_t k = 0; k < p.relay_count(); ++k)
    {
      if (p.relays()[k].id == relay_id)
        r = k;
    }
    if (!r)
      throw InvalidArgument("assignment CSV references an unknown relay");
    a.relay_of_link[l] = r;
  }
  finalize(p, a);
  return a;
}

} // namespace losmap::relay
