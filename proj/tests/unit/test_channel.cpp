#include <doctest.h>

#include "oracles.hpp"

#include <losmap/channel.hpp>
#include <losmap/errors.hpp>

#include <limits>
#include <random>

using namespace losmap;
using namespace losmap::channel;
using geometry::Footprint;
using geometry::Point2;

namespace {

sensing::StateEstimate blocker_at(double x, double y, double sigma)
{
  sensing::StateEstimate e;
  e.mean = {x, y, 0.0, 0.0};
  e.covariance = sensing::StateCovariance::Identity();
  e.covariance(0, 0) = sigma * sigma;
  e.covariance(1, 1) = sigma * sigma;
  return e;
}

std::vector<oracle::MixtureTerm> terms_of(const GaussianMixtureDb& m)
{
  std::vector<oracle::MixtureTerm> out;
  for (const auto& c : m.components())
    out.push_back({c.weight, c.mean_db, std::sqrt(c.variance_db2)});
  return out;
}

} // namespace

TEST_CASE("Q function reference values")
{
  // mpmath at 50 digits.
  CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q_function(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-14));
  CHECK(q_function(-2.0) == doctest::Approx(0.97724986805182079).epsilon(1e-14));
  CHECK(q_function(8.0) == doctest::Approx(6.2209605742717841e-16).epsilon(1e-12));
  for (double x = -6.0; x <= 6.0; x += 0.37)
    CHECK(q_function(x) == doctest::Approx(oracle::upper_tail(x)).epsilon(1e-12));
}

TEST_CASE("interval probability")
{
  CHECK(interval_probability(-1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.6826894921370859));
  CHECK(interval_probability(1.0, -1.0, 0.0, 1.0) == 0.0);
  // Far tails keep relative accuracy.
  const double tail = interval_probability(10.0, 11.0, 0.0, 1.0);
  CHECK(tail == doctest::Approx(oracle::upper_tail(10.0) - oracle::upper_tail(11.0)).epsilon(1e-10));
  // Point mass.
  CHECK(interval_probability(0.0, 1.0, 0.5, 0.0) == 1.0);
  CHECK(interval_probability(0.0, 1.0, 1.0, 0.0) == 0.5);
  CHECK(interval_probability(0.0, 1.0, 2.0, 0.0) == 0.0);
}

TEST_CASE("link budget defaults")
{
  ChannelParams p;
  CHECK(p.beam_gain_dbi == doctest::Approx(18.061799739838872).epsilon(1e-15));
  CHECK(p.snr_reference_db() == doctest::Approx(131.62359947967774).epsilon(1e-14));
  CHECK(p.vehicle_loss_db(1) == 12.0);
  CHECK(p.vehicle_loss_db(2) == 18.0);
  CHECK(p.vehicle_loss_db(4) == 30.0);
  CHECK(p.vehicle_loss_db(9) == 30.0);
}

TEST_CASE("path loss table")
{
  ChannelParams urban;
  ChannelParams highway;
  highway.environment = Environment::highway;
  CHECK(path_loss_mean(LinkCondition::los, 100.0, urban) == doctest::Approx(98.508276170428391));
  CHECK(path_loss_mean(LinkCondition::los, 100.0, highway) == doctest::Approx(101.34316062684438));
  CHECK(path_loss_mean(LinkCondition::nlos_building, 100.0, urban) ==
        doctest::Approx(124.20128679236794));
  CHECK(path_loss_mean(LinkCondition::nlos_foliage, 100.0, urban) ==
        doctest::Approx(98.508276170428391 + 9.0));
  CHECK(path_loss_mean(LinkCondition::nlos_vehicle, 100.0, urban, 2) ==
        doctest::Approx(98.508276170428391 + 18.0));
  // At 1 m only the frequency term remains.
  CHECK(path_loss_mean(LinkCondition::los, 1.0, urban) ==
        doctest::Approx(38.77 + 18.2 * std::log10(28.0)));
  CHECK_THROWS_AS(path_loss_mean(LinkCondition::los, 0.0, urban), InvalidArgument);
}

TEST_CASE("static and dynamic classification")
{
  StaticMap map;
  map.obstacles.push_back({ObstacleKind::foliage, Footprint::make_disc({50, 0}, 3.0)});
  const std::vector<Footprint> cars{Footprint::make_rectangle({20, 0}, 2.25, 0.9)};

  CHECK(classify_static({0, 0}, {100, 0}, map) == LinkCondition::nlos_foliage);
  CHECK(classify_static({0, 10}, {100, 10}, map) == LinkCondition::los);
  CHECK(classify_link({0, 10}, {100, 10}, map, cars) == LinkCondition::los);
  CHECK(classify_link({0, 0}, {40, 0}, map, cars) == LinkCondition::nlos_vehicle);
  CHECK(classify_link({0, 0}, {100, 0}, map, cars) == LinkCondition::nlos_foliage);

  // A building anywhere on the path takes precedence.
  map.obstacles.push_back({ObstacleKind::building, Footprint::make_rectangle({70, 0}, 5, 5)});
  CHECK(classify_link({0, 0}, {100, 0}, map, cars) == LinkCondition::nlos_building);
  CHECK(count_vehicle_blockers({0, 0}, {100, 0}, cars) == 1);
  CHECK_THROWS_AS(classify_link({1, 1}, {1, 1}, map, cars), DegenerateLinkError);
}

TEST_CASE("single-blocker probability reference cases")
{
  // Centred on a 100 m link with sigma 1 and half width 1.
  CHECK(blockage_probability_single(blocker_at(50, 0, 1.0), {0, 0}, {100, 0}, 1.0) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-12));
  CHECK(blockage_probability_single(blocker_at(5, 0.5, 0.8), {0, 0}, {10, 0}, 0.9) ==
        doctest::Approx(0.65140330441008894).epsilon(1e-12));
  CHECK(blockage_probability_single(blocker_at(11, 0, 1.0), {0, 0}, {10, 0}, 0.9) ==
        doctest::Approx(0.29077347081921221).epsilon(1e-12));
  // The same geometry rotated and translated.
  CHECK(blockage_probability_single(blocker_at(3, 7 + 5, 0.8), {3, 7}, {3, 17}, 0.9) ==
        doctest::Approx(interval_probability(-0.9, 0.9, 0.0, 0.8) *
                        interval_probability(-0.9, 10.9, 5.0, 0.8)));
}

TEST_CASE("single-blocker probability rejects anisotropic covariances")
{
  auto b = blocker_at(5, 0, 1.0);
  b.covariance(1, 1) = 2.0;
  CHECK_THROWS_AS(blockage_probability_single(b, {0, 0}, {10, 0}, 0.9), AnisotropicCovarianceError);
  b = blocker_at(5, 0, 1.0);
  b.covariance(0, 1) = b.covariance(1, 0) = 0.2;
  CHECK_THROWS_AS(blockage_probability_single(b, {0, 0}, {10, 0}, 0.9), AnisotropicCovarianceError);
}

TEST_CASE("single-blocker probability matches sampling")
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> sig(0.3, 3.0);
  for (int k = 0; k < 20; ++k)
  {
    const Point2 tx{pos(rng), pos(rng)};
    const Point2 rx{pos(rng), pos(rng)};
    const Point2 mid = 0.5 * (tx + rx);
    const double s = sig(rng);
    const double mx = mid.x + 2.0 * (pos(rng) / 20.0);
    const double my = mid.y + 2.0 * (pos(rng) / 20.0);
    const double p = blockage_probability_single(blocker_at(mx, my, s), tx, rx, 0.9);
    const auto mc = oracle::sampled_blockage(mx, my, s, tx.x, tx.y, rx.x, rx.y, 0.9, 20000, 100 + k);
    CHECK(std::abs(p - mc.value) <= 4.0 * mc.standard_error);
  }
}

TEST_CASE("blocker count distribution equals enumeration")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 8; ++n)
  {
    std::vector<double> p(n);
    for (auto& x : p)
      x = u(rng);
    const auto dp = blocker_count_distribution(p);
    const auto brute = oracle::enumerate_counts(p);
    double total = 0.0;
    for (std::size_t k = 0; k <= n; ++k)
    {
      CHECK(dp[k] == doctest::Approx(brute[k]).epsilon(1e-12));
      total += dp[k];
      if (k >= 1)
        CHECK(blockage_probability_multi(p, static_cast<unsigned>(k)) ==
              doctest::Approx(brute[k]).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(blocker_count_distribution(std::vector<double>{}).size() == 1);
  CHECK_THROWS_AS(blockage_probability_multi(std::vector<double>{0.5}, 0), InvalidArgument);
  CHECK_THROWS_AS(blockage_probability_multi(std::vector<double>{0.5}, 2), InvalidArgument);
  CHECK_THROWS_AS(blocker_count_distribution(std::vector<double>{1.5}), InvalidArgument);
}

TEST_CASE("SNR law of an obstructed link is a single normal")
{
  ChannelParams p;
  const auto b = snr_distribution(100.0, LinkCondition::nlos_building, 0, {}, p);
  REQUIRE(b.size() == 1);
  CHECK(b.components()[0].mean_db == doctest::Approx(131.62359947967774 - 124.20128679236794));
  CHECK(b.components()[0].variance_db2 == doctest::Approx(9.0));

  const auto f = snr_distribution(100.0, LinkCondition::nlos_foliage, 0, {}, p);
  REQUIRE(f.size() == 1);
  CHECK(f.components()[0].variance_db2 == doctest::Approx(18.0));
}

TEST_CASE("SNR law over uncertain blockers")
{
  ChannelParams p;
  const std::vector<double> one{0.3};
  const auto m = snr_distribution(50.0, LinkCondition::los, 0, one, p);
  REQUIRE(m.size() == 2);
  CHECK(m.components()[0].weight == doctest::Approx(0.7));
  CHECK(m.components()[0].mean_db == doctest::Approx(38.142524236837839));
  CHECK(m.components()[1].mean_db == doctest::Approx(38.142524236837839 - 12.0));
  CHECK(m.components()[1].variance_db2 == doctest::Approx(4.5 * 4.5 + 9.0));
  CHECK(service_probability(m, 20.0) == doctest::Approx(0.96159101499599133).epsilon(1e-12));
  CHECK(service_probability(m, 20.0) ==
        doctest::Approx(oracle::mixture_tail_mass(terms_of(m), 20.0)).epsilon(1e-9));

  // Known blockers shift every component by at least one vehicle loss.
  const auto v = snr_distribution(50.0, LinkCondition::nlos_vehicle, 2, one, p);
  REQUIRE(v.size() == 2);
  CHECK(v.components()[0].mean_db == doctest::Approx(38.142524236837839 - 18.0));
  CHECK(v.components()[1].mean_db == doctest::Approx(38.142524236837839 - 24.0));

  CHECK_THROWS_AS(snr_distribution(50.0, LinkCondition::nlos_vehicle, 0, one, p), InvalidArgument);
  CHECK_THROWS_AS(snr_distribution(50.0, LinkCondition::los, 1, one, p), InvalidArgument);
  CHECK_THROWS_AS(snr_distribution(0.0, LinkCondition::los, 0, one, p), InvalidArgument);
}

TEST_CASE("components past the loss cap are merged and empty ones dropped")
{
  ChannelParams p;
  const std::vector<double> certain{1.0, 1.0, 1.0, 1.0, 1.0};
  const auto m = snr_distribution(80.0, LinkCondition::los, 0, certain, p);
  REQUIRE(m.size() == 1);
  CHECK(m.components()[0].weight == doctest::Approx(1.0));

  const std::vector<double> many{0.9, 0.9, 0.9, 0.9, 0.9, 0.9};
  const auto c = snr_distribution(80.0, LinkCondition::los, 0, many, p);
  // k = 0..3 distinct, k >= 4 share the capped law.
  CHECK(c.size() == 5);
}

TEST_CASE("mixtures integrate to one")
{
  ChannelParams p;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 30; ++k)
  {
    std::vector<double> probs(1 + k % 7);
    for (auto& x : probs)
      x = u(rng);
    const auto m = snr_distribution(5.0 + 300.0 * u(rng), LinkCondition::los, 0, probs, p);
    CHECK(oracle::mixture_mass(terms_of(m)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("service probability falls with the threshold")
{
  ChannelParams p;
  const std::vector<double> probs{0.2, 0.6};
  const auto m = snr_distribution(120.0, LinkCondition::los, 0, probs, p);
  double prev = 1.0;
  for (double g = -10.0; g <= 60.0; g += 2.5)
  {
    const double s = service_probability(m, g);
    CHECK(s <= prev);
    CHECK(s >= 0.0);
    prev = s;
  }
}

TEST_CASE("service probability of a two-component mixture matches sampling")
{
  const GaussianMixtureDb m({{0.7, 20.0, 9.0}, {0.3, 8.0, 25.0}});
  std::mt19937_64 rng(77);
  std::bernoulli_distribution pick(0.7);
  std::normal_distribution<double> a(20.0, 3.0);
  std::normal_distribution<double> b(8.0, 5.0);
  const int samples = 1000000;
  int above = 0;
  for (int k = 0; k < samples; ++k)
    if ((pick(rng) ? a(rng) : b(rng)) > 10.0)
      ++above;
  CHECK(service_probability(m, 10.0) == doctest::Approx(double(above) / samples).epsilon(0.002));
  CHECK(std::abs(service_probability(m, 10.0) - 0.8031) < 0.002);

  const double inf = std::numeric_limits<double>::infinity();
  CHECK(service_probability(m, -inf) == 1.0);
  CHECK(service_probability(m, inf) == 0.0);
  CHECK(service_probability(GaussianMixtureDb({{1.0, 12.0, 4.0}}), 12.0) == 0.5);
}

TEST_CASE("mixture invariants")
{
  CHECK_THROWS_AS(GaussianMixtureDb({{0.5, 0.0, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(GaussianMixtureDb({{1.0, 0.0, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(GaussianMixtureDb({{1.5, 0.0, 1.0}, {-0.5, 0.0, 1.0}}), InvalidArgument);
  const GaussianMixtureDb ok({{0.25, 0.0, 1.0}, {0.75, 5.0, 4.0}});
  CHECK(ok.pdf(0.0) > 0.0);
}
