#pragma once

#include <cstddef>
#include <vector>

namespace losmap::linalg {

/// Dense row-major square matrix of doubles.
class SquareMatrix
{
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : _n(n), _data(n * n, fill) {}

  std::size_t size() const { return _n; }

  double& operator()(std::size_t i, std::size_t j) { return _data[i * _n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return _data[i * _n + j]; }

  const std::vector<double>& data() const { return _data; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
  std::size_t _n = 0;
  std::vector<double> _data;
};

SquareMatrix multiply(const SquareMatrix& a, const SquareMatrix& b);

struct EigenResult
{
  std::vector<double> values;  ///< ascending
  std::size_t sweeps = 0;
  double off_diagonal_norm = 0.0;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Sweeps stop
/// once the off-diagonal Frobenius norm drops below `tolerance` times the
/// Frobenius norm of the input. Throws ConvergenceError after `max_sweeps`.
EigenResult symmetric_eigenvalues(
  SquareMatrix a, double tolerance = 1e-15, std::size_t max_sweeps = 100);

} // namespace losmap::linalg
