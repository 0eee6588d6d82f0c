#pragma once

// Reference implementations used only by tests. Each one reaches its answer
// by a different route than the library: quadrature instead of closed
// forms, sampling instead of integrals, enumeration instead of recurrences,
// LAPACK-style eigensolvers instead of Jacobi sweeps.

#include <losmap/linalg.hpp>
#include <losmap/relay.hpp>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

inline double upper_tail(double x)
{
  return boost::math::cdf(boost::math::complement(boost::math::normal(0.0, 1.0), x));
}

struct MixtureTerm
{
  double weight;
  double mean;
  double sigma;
};

/// Adaptive Gauss-Kronrod integral of a normal mixture density over the line.
inline double mixture_mass(const std::vector<MixtureTerm>& terms)
{
  auto pdf = [&](double x) {
    double out = 0.0;
    for (const auto& t : terms)
      out += t.weight * boost::math::pdf(boost::math::normal(t.mean, t.sigma), x);
    return out;
  };
  const double inf = std::numeric_limits<double>::infinity();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, -inf, inf, 15, 1e-12);
}

/// Adaptive integral of the mixture density above `threshold`.
inline double mixture_tail_mass(const std::vector<MixtureTerm>& terms, double threshold)
{
  auto pdf = [&](double x) {
    double out = 0.0;
    for (const auto& t : terms)
      out += t.weight * boost::math::pdf(boost::math::normal(t.mean, t.sigma), x);
    return out;
  };
  const double inf = std::numeric_limits<double>::infinity();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, threshold, inf, 15, 1e-12);
}

struct Estimate
{
  double value;
  double standard_error;
};

/// Fraction of samples of N(mean, sigma^2 I) that fall in the rectangle
/// [-w, d + w] x [-w, w] attached to the segment tx-rx.
inline Estimate sampled_blockage(
  double mx, double my, double sigma,
  double tx_x, double tx_y, double rx_x, double rx_y,
  double w, std::size_t samples, std::uint64_t seed)
{
  const double dx = rx_x - tx_x;
  const double dy = rx_y - tx_y;
  const double d = std::sqrt(dx * dx + dy * dy);
  const double ex = dx / d;
  const double ey = dy / d;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s)
  {
    const double px = mx + sigma * n(rng) - tx_x;
    const double py = my + sigma * n(rng) - tx_y;
    const double along = px * ex + py * ey;
    const double across = -px * ey + py * ex;
    if (along > -w && along < d + w && across > -w && across < w)
      ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(std::max(p * (1.0 - p), 1.0 / samples) / static_cast<double>(samples))};
}

/// Pr{exactly k blockers} for every k by walking all 2^N joint outcomes.
inline std::vector<double> enumerate_counts(const std::vector<double>& p)
{
  const std::size_t n = p.size();
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
  {
    double prob = 1.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
      if (mask & (std::size_t{1} << i))
      {
        prob *= p[i];
        ++k;
      }
      else
      {
        prob *= 1.0 - p[i];
      }
    }
    out[k] += prob;
  }
  return out;
}

inline Eigen::MatrixXd to_eigen(const losmap::linalg::SquareMatrix& m)
{
  Eigen::MatrixXd out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      out(i, j) = m(i, j);
  return out;
}

inline std::vector<double> eigenvalues(const losmap::linalg::SquareMatrix& m)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

/// Second-smallest eigenvalue of D - W for a symmetric weight matrix.
inline double fiedler_value(const losmap::linalg::SquareMatrix& w)
{
  Eigen::MatrixXd a = to_eigen(w);
  a.diagonal().setZero();
  Eigen::MatrixXd l = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    l(i, i) = a.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()[1]);
}

/// Best objective over every map link -> {none} U relays, counted as a
/// mixed-radix integer.
inline double best_objective(const losmap::relay::AssignmentProblem& p)
{
  const std::size_t n = p.link_count();
  const std::size_t m = p.relay_count();
  std::vector<std::size_t> digit(n, 0);  // 0 = none, r + 1 = relay r
  double best = 0.0;
  while (true)
  {
    std::vector<std::size_t> load(m, 0);
    bool ok = true;
    double value = 0.0;
    for (std::size_t l = 0; l < n && ok; ++l)
    {
      if (digit[l] == 0)
        continue;
      const std::size_t r = digit[l] - 1;
      if (!p.eligible(l, r) || ++load[r] > p.relays()[r].capacity)
        ok = false;
      else
        value += p.score(l, r);
    }
    if (ok)
      best = std::max(best, value);

    std::size_t pos = 0;
    while (pos < n && ++digit[pos] > m)
      digit[pos++] = 0;
    if (pos == n)
      break;
  }
  return best;
}

/// A random feasible assignment: links in random order grab a random
/// eligible relay with capacity left, or stay unassigned.
inline std::vector<std::optional<std::size_t>> random_feasible(
  const losmap::relay::AssignmentProblem& p, std::mt19937_64& rng)
{
  const std::size_t n = p.link_count();
  const std::size_t m = p.relay_count();
  std::vector<std::size_t> load(m, 0);
  std::vector<std::optional<std::size_t>> out(n);
  for (std::size_t l = 0; l < n; ++l)
  {
    std::uniform_int_distribution<std::size_t> pick(0, m);
    const std::size_t c = pick(rng);
    if (c == m)
      continue;
    if (p.eligible(l, c) && load[c] < p.relays()[c].capacity)
    {
      out[l] = c;
      ++load[c];
    }
  }
  return out;
}

} // namespace oracle
