#include "losmap/network.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace losmap::network {

AvailabilityMatrix::AvailabilityMatrix(std::vector<NodeId> ids, MatrixOrder order)
: _ids(std::move(ids)), _order(order), _values(_ids.size())
{
  std::set<NodeId> unique(_ids.begin(), _ids.end());
  if (unique.size() != _ids.size())
    throw InvalidArgument("availability matrix node ids must be unique");
}

void AvailabilityMatrix::set(std::size_t i, std::size_t j, double value)
{
  if (i == j)
    throw InvalidArgument("availability matrix diagonal is fixed at zero");
  if (!std::isfinite(value) || value < 0.0 ||
      (_order == MatrixOrder::first && value > 1.0))
    throw InvalidArgument("availability entry out of range");
  _values(i, j) = value;
  _values(j, i) = value;
}

std::size_t AvailabilityMatrix::index_of(NodeId id) const
{
  const auto it = std::find(_ids.begin(), _ids.end(), id);
  if (it == _ids.end())
    throw InvalidArgument("unknown node id " + std::to_string(id));
  return static_cast<std::size_t>(it - _ids.begin());
}

AvailabilityMatrix AvailabilityMatrix::from_values(
  std::vector<NodeId> ids, const linalg::SquareMatrix& values, MatrixOrder order)
{
  if (ids.size() != values.size())
    throw InvalidArgument("id list and matrix dimension differ");

  AvailabilityMatrix out(std::move(ids), order);
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i)
  {
    if (values(i, i) != 0.0)
      throw InvalidArgument("availability matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j)
    {
      const double a = values(i, j);
      const double b = values(j, i);
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw InvalidArgument("availability matrix must be symmetric");
      out.set(i, j, 0.5 * (a + b));
    }
  }
  return out;
}

AvailabilityMatrix average_availability(std::span<const AvailabilityMatrix> per_epoch)
{
  if (per_epoch.empty())
    throw InvalidArgument("cannot average an empty list of matrices");

  const AvailabilityMatrix& first = per_epoch.front();
  const std::size_t n = first.size();
  for (const auto& m : per_epoch)
  {
    if (m.size() != n || m.ids() != first.ids() || m.order() != first.order())
      throw InvalidArgument("averaged matrices must share dimension and node ids");
  }

  AvailabilityMatrix out(first.ids(), first.order());
  const double scale = 1.0 / static_cast<double>(per_epoch.size());
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      double sum = 0.0;
      for (const auto& m : per_epoch)
        sum += m(i, j);
      out.set(i, j, first.order() == MatrixOrder::first
        ? std::min(1.0, sum * scale)
        : sum * scale);
    }
  }
  return out;
}

linalg::SquareMatrix laplacian(const AvailabilityMatrix& a)
{
  const std::size_t n = a.size();
  linalg::SquareMatrix l(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
      if (j == i)
        continue;
      degree += a(i, j);
      l(i, j) = -a(i, j);
    }
    l(i, i) = degree;
  }
  return l;
}

ConnectivityReport connectivity(const AvailabilityMatrix& a)
{
  ConnectivityReport report;
  const std::size_t n = a.size();
  if (n < 2)
    return report;

  const linalg::SquareMatrix l = laplacian(a);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max(scale, l(i, i));

  const linalg::EigenResult eig = linalg::symmetric_eigenvalues(l);
  report.smallest_eigenvalue = eig.values[0];
  if (std::abs(eig.values[0]) > 1e-8 * scale)
    throw ConvergenceError("Laplacian smallest eigenvalue is not zero");

  report.lambda2 = std::max(0.0, eig.values[1]);
  report.connected = report.lambda2 > 1e-9;
  return report;
}

AvailabilityMatrix second_order(const AvailabilityMatrix& a)
{
  const std::size_t n = a.size();
  linalg::SquareMatrix sq = linalg::multiply(a.values(), a.values());
  AvailabilityMatrix out(a.ids(), MatrixOrder::second);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      // Average the two triangle entries so the result is exactly symmetric.
      const double two_hop = 0.5 * (sq(i, j) + sq(j, i));
      out.set(i, j, two_hop + a(i, j));
    }
  }
  return out;
}

double relayed_pair_availability(const AvailabilityMatrix& a, NodeId i, NodeId j, NodeId r)
{
  if (i == j || i == r || j == r)
    throw InvalidArgument("relayed pair needs three distinct nodes");
  const std::size_t ii = a.index_of(i);
  const std::size_t jj = a.index_of(j);
  const std::size_t rr = a.index_of(r);
  return a(ii, rr) * a(jj, rr);
}

namespace {

std::string format_value(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  return out;
}

} // namespace

void write_csv(std::ostream& os, const AvailabilityMatrix& a)
{
  os << "id";
  for (NodeId id : a.ids())
    os << ',' << id;
  os << '\n';
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    os << a.ids()[i];
    for (std::size_t j = 0; j < a.size(); ++j)
      os << ',' << format_value(a(i, j));
    os << '\n';
  }
}

AvailabilityMatrix read_csv(std::istream& is, MatrixOrder order)
{
  std::string line;
  if (!std::getline(is, line))
    throw InvalidArgument("matrix CSV is empty");

  const auto header = split(line);
  if (header.empty() || header[0] != "id")
    throw InvalidArgument("matrix CSV header must start with 'id'");

  std::vector<NodeId> ids;
  for (std::size_t k = 1; k < header.size(); ++k)
    ids.push_back(static_cast<NodeId>(std::stoul(header[k])));

  linalg::SquareMatrix values(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
  {
    if (!std::getline(is, line))
      throw InvalidArgument("matrix CSV has too few rows");
    const auto cells = split(line);
    if (cells.size() != ids.size() + 1 || std::stoul(cells[0]) != ids[i])
      throw InvalidArgument("matrix CSV row " + std::to_string(i) + " is malformed");
    for (std::size_t j = 0; j < ids.size(); ++j)
      values(i, j) = std::stod(cells[j + 1]);
  }
  return AvailabilityMatrix::from_values(std::move(ids), values, order);
}

} // namespace losmap::network
