#include "losmap/linalg.hpp"

#include "losmap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace losmap::linalg {

SquareMatrix multiply(const SquareMatrix& a, const SquareMatrix& b)
{
  if (a.size() != b.size())
    throw InvalidArgument("matrix dimensions differ");

  const std::size_t n = a.size();
  SquareMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t k = 0; k < n; ++k)
    {
      const double aik = a(i, k);
      if (aik == 0.0)
        continue;
      for (std::size_t j = 0; j < n; ++j)
        c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

namespace {

double off_norm(const SquareMatrix& a)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Apply the rotation that annihilates a(p, q) to both sides.
void rotate(SquareMatrix& a, std::size_t p, std::size_t q)
{
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);

  const double theta = (aqq - app) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t r = 0; r < a.size(); ++r)
  {
    if (r == p || r == q)
      continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double new_rp = arp - s * (arq + tau * arp);
    const double new_rq = arq + s * (arp - tau * arq);
    a(r, p) = new_rp;
    a(p, r) = new_rp;
    a(r, q) = new_rq;
    a(q, r) = new_rq;
  }
}

} // namespace

EigenResult symmetric_eigenvalues(SquareMatrix a, double tolerance, std::size_t max_sweeps)
{
  const std::size_t n = a.size();
  EigenResult out;

  double frob = 0.0;
  for (double v : a.data())
    frob += v * v;
  frob = std::sqrt(frob);

  const double target = tolerance * frob;
  double off = off_norm(a);
  while (off > target)
  {
    if (out.sweeps == max_sweeps)
      throw ConvergenceError("Jacobi eigensolver did not converge");
    ++out.sweeps;

    for (std::size_t p = 0; p + 1 < n; ++p)
    {
      for (std::size_t q = p + 1; q < n; ++q)
      {
        if (a(p, q) != 0.0)
          rotate(a, p, q);
      }
    }

    const double next = off_norm(a);
    // Rounding floor: further sweeps cannot shrink the residual.
    if (next >= off && next <= 1e-12 * frob)
    {
      off = next;
      break;
    }
    off = next;
  }

  out.off_diagonal_norm = off;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = a(i, i);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

} // namespace losmap::linalg
