#pragma once

#include "losmap/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace losmap::relay {

/// A requested RV-VoI link.
struct RelayLink
{
  NodeId rv = 0;
  NodeId voi = 0;
};

/// A relay candidate and the number of links it can serve.
struct RelayNode
{
  NodeId id = 0;
  unsigned capacity = 0;
};

/// Capacity-constrained assignment of relays to links:
///   max sum_{l,r} score(l, r) x(l, r)
///   s.t. sum_l x(l, r) <= capacity(r),  sum_r x(l, r) <= 1.
/// A relay that is an endpoint of a link is never eligible for it.
class AssignmentProblem
{
public:
  AssignmentProblem() = default;

  /// `scores` is row-major, links x relays, each in [0, 1]. Throws
  /// InvalidArgument on a size mismatch, out-of-range score, duplicate link,
  /// or duplicate relay id.
  AssignmentProblem(
    std::vector<RelayLink> links,
    std::vector<RelayNode> relays,
    std::vector<double> scores);

  std::size_t link_count() const { return _links.size(); }
  std::size_t relay_count() const { return _relays.size(); }
  const std::vector<RelayLink>& links() const { return _links; }
  const std::vector<RelayNode>& relays() const { return _relays; }

  double score(std::size_t l, std::size_t r) const { return _scores[l * _relays.size() + r]; }
  bool eligible(std::size_t l, std::size_t r) const { return _eligible[l * _relays.size() + r] != 0; }

  /// Sum of relay capacities.
  std::size_t slot_count() const;

private:
  std::vector<RelayLink> _links;
  std::vector<RelayNode> _relays;
  std::vector<double> _scores;
  std::vector<std::uint8_t> _eligible;
};

/// Scores every (link, relay) pair with the relayed availability
/// A(rv, r) A(voi, r).
AssignmentProblem build_problem(
  const network::AvailabilityMatrix& a_bar,
  std::vector<RelayLink> links,
  std::vector<RelayNode> relays);

struct SolverStats
{
  std::size_t iterations = 0;
  /// Iterate exchanges between RVs (ADMM).
  std::uint64_t exchange_messages = 0;
  /// Reservation requests and their ACK/NACK replies.
  std::uint64_t reservation_messages = 0;
  std::size_t granted = 0;
  bool converged = true;

  std::uint64_t messages_fr1() const { return exchange_messages + reservation_messages; }
};

/// Binary selection matrix stored as the chosen relay per link.
struct Assignment
{
  std::vector<std::optional<std::size_t>> relay_of_link;
  double objective = 0.0;
  SolverStats stats;

  bool x(std::size_t l, std::size_t r) const
  {
    return relay_of_link[l].has_value() && *relay_of_link[l] == r;
  }
};

/// Sum of chosen scores, accumulated in link order.
double objective_of(
  const AssignmentProblem& p, std::span<const std::optional<std::size_t>> relay_of_link);

/// Row and column constraints and eligibility hold exactly.
bool is_feasible(const AssignmentProblem& p, const Assignment& a);

struct ExhaustiveOptions
{
  /// Upper bound on (M + 1)^N, the number of per-link choice combinations.
  double max_arrangements = 1e7;
  /// Skip subtrees whose optimistic bound cannot beat the incumbent. The
  /// result is unchanged; only the work differs.
  bool prune = false;
};

/// Global optimum by depth-first enumeration. Among equal objectives the
/// lexicographically smallest selection matrix (row-major) wins. Throws
/// SearchSpaceExceeded above the cap.
Assignment exhaustive_search(const AssignmentProblem& p, const ExhaustiveOptions& options = {});

/// Optimal assignment by the Hungarian method on the cost matrix -score,
/// with each relay expanded into `capacity` identical columns and one
/// zero-cost dummy column per link for "unassigned".
Assignment hungarian(const AssignmentProblem& p);

/// First-come-first-served reservations in `order` (a permutation of link
/// indices). Each RV asks its best remaining relay and falls back to the
/// next one on a NACK.
Assignment fcfs(const AssignmentProblem& p, std::span<const std::size_t> order);

/// FCFS in link index order.
Assignment fcfs(const AssignmentProblem& p);

struct AdmmParams
{
  double rho = 1.0;
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;

  void validate() const;
};

/// Distributed relaxation solved by per-link augmented Lagrangian updates
/// and multiplier ascent, then rounded (largest entry >= 0.5) and repaired
/// by revoking the lowest-score links on over-subscribed relays.
Assignment admm(const AssignmentProblem& p, const AdmmParams& params = {});

/// Relayed adjacency: A_R(i, j) = A(i, j) + A(i, r) A(j, r) for every link
/// (i, j) served by relay r. Flagged second order.
network::AvailabilityMatrix build_relayed_adjacency(
  const network::AvailabilityMatrix& a_bar,
  const Assignment& x,
  const AssignmentProblem& p);

enum class Scheme { centralized, distributed };

/// FR1 signalling cost of one selection round.
///  centralized: one sensing upload per CAV, a request and an ACK/NACK per
///               request, and two setup messages per granted link.
///  distributed: one sensing broadcast per CAV plus the solver's exchange
///               and reservation messages.
std::uint64_t protocol_message_count(
  Scheme scheme, std::size_t n_cavs, std::size_t n_requests, const SolverStats& stats);

/// CSV with header `link_index,rv_id,voi_id,relay_id,score`, one row per
/// served link.
void write_assignment_csv(std::ostream& os, const AssignmentProblem& p, const Assignment& a);
Assignment read_assignment_csv(std::istream& is, const AssignmentProblem& p);

} // namespace losmap::relay
