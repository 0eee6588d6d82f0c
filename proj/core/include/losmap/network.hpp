#pragma once

#include "losmap/geometry.hpp"
#include "losmap/linalg.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace losmap::network {

enum class MatrixOrder { first, second };

/// Symmetric matrix of link availabilities between network nodes (CAVs and
/// RSUs), with the node id of every row. First-order matrices hold
/// probabilities; second-order (two-hop augmented) entries may exceed one.
class AvailabilityMatrix
{
public:
  AvailabilityMatrix() = default;

  /// Zero matrix over `ids`. Throws InvalidArgument on duplicate ids.
  explicit AvailabilityMatrix(std::vector<NodeId> ids, MatrixOrder order = MatrixOrder::first);

  std::size_t size() const { return _ids.size(); }
  const std::vector<NodeId>& ids() const { return _ids; }
  MatrixOrder order() const { return _order; }

  double operator()(std::size_t i, std::size_t j) const { return _values(i, j); }

  /// Sets entries (i, j) and (j, i). Diagonal writes and, for first-order
  /// matrices, values outside [0, 1] throw InvalidArgument.
  void set(std::size_t i, std::size_t j, double value);

  /// Row index of `id`; throws InvalidArgument if absent.
  std::size_t index_of(NodeId id) const;

  const linalg::SquareMatrix& values() const { return _values; }

  /// Builds from a full matrix; checks symmetry (1e-12), zero diagonal and,
  /// for first order, the [0, 1] range.
  static AvailabilityMatrix from_values(
    std::vector<NodeId> ids, const linalg::SquareMatrix& values, MatrixOrder order);

private:
  std::vector<NodeId> _ids;
  MatrixOrder _order = MatrixOrder::first;
  linalg::SquareMatrix _values;
};

struct ConnectivityReport
{
  double lambda2 = 0.0;
  bool connected = false;
  double smallest_eigenvalue = 0.0;
};

/// Entrywise mean over the prediction window.
AvailabilityMatrix average_availability(std::span<const AvailabilityMatrix> per_epoch);

/// Weighted Laplacian D - A, D(i, i) = sum_{j != i} A(i, j).
linalg::SquareMatrix laplacian(const AvailabilityMatrix& a);

/// Algebraic connectivity: second-smallest Laplacian eigenvalue, clamped at
/// zero. Throws ConvergenceError if the smallest eigenvalue is not zero
/// within 1e-8 relative to the matrix scale.
ConnectivityReport connectivity(const AvailabilityMatrix& a);

/// Two-hop augmented matrix A^2 + A with a zeroed diagonal.
AvailabilityMatrix second_order(const AvailabilityMatrix& a);

/// Availability of the relayed link i - r - j: A(i, r) A(j, r).
double relayed_pair_availability(const AvailabilityMatrix& a, NodeId i, NodeId j, NodeId r);

/// Row-major CSV with a header row `id,<id_0>,...` and one row per node.
void write_csv(std::ostream& os, const AvailabilityMatrix& a);
AvailabilityMatrix read_csv(std::istream& is, MatrixOrder order);

} // namespace losmap::network
