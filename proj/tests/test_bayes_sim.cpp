#include <doctest.h>

#include <cmath>

#include "mmnn/bayes_sim.hpp"
#include "mmnn/error.hpp"
#include "mmnn/rng.hpp"

#include <algorithm>

using namespace mmnn;

namespace {

// eta_1(x) = x on the unit interval.
SyntheticDistribution ramp() {
  return SyntheticDistribution(Domain::Interval, 1, {{0.0, 1.0}, {1.0, 0.0}}, 1.0);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("domain helpers") {
  CHECK(parse_domain("square-l2") == Domain::SquareL2);
  CHECK(to_string(Domain::SquareLInf) == "square-linf");
  CHECK_THROWS_AS(parse_domain("disk"), ValidationError);
  CHECK(domain_dimension(Domain::Interval) == 1);
  CHECK(domain_dimension(Domain::SquareL2) == 2);
  CHECK(domain_side(Domain::SquareL2) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("bayes risk examples") {
  CHECK(bayes_risk(constant_distribution({0.8, 0.2})) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(bayes_risk(constant_distribution({1.0, 0.0})) == 0.0);
  CHECK(bayes_risk(constant_distribution({0.2, 0.3, 0.5})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bayes_risk(ramp()) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(constant_distribution({0.7, 0.7}), ValidationError);
  CHECK_THROWS_AS(SyntheticDistribution(Domain::Interval, 1, {{0.0, 1.0}, {1.0, 0.0}}, 0.5),
                  ValidationError);
}

TEST_CASE("quadrature agrees with a fine Riemann sum") {
  for (auto domain : {Domain::Interval, Domain::SquareLInf, Domain::SquareL2}) {
    DistributionSpec spec;
    spec.domain = domain;
    spec.k = 4;
    spec.L_post = 3.0;
    spec.seed = 77;
    spec.cells = 8;
    const auto dist = make_distribution(spec);
    const double side = domain_side(domain);
    double sum = 0;
    std::size_t count = 0;
    if (dist.dimension() == 1) {
      const int m = 1000000;
      for (int i = 0; i < m; ++i) {
        const double x = (i + 0.5) / m;
        const auto e = dist.posterior(&x);
        sum += 1.0 - *std::max_element(e.begin(), e.end());
        ++count;
      }
    } else {
      const int m = 1000;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const double x[2] = {side * (i + 0.5) / m, side * (j + 0.5) / m};
          const auto e = dist.posterior(x);
          sum += 1.0 - *std::max_element(e.begin(), e.end());
          ++count;
        }
    }
    CHECK(bayes_risk(dist) == doctest::Approx(sum / count).epsilon(1e-5));
  }
}

TEST_CASE("sampled posteriors live in the simplex and respect the Lipschitz budget") {
  for (auto domain : {Domain::Interval, Domain::SquareLInf, Domain::SquareL2})
    for (std::uint64_t seed : {1U, 2U, 3U}) {
      DistributionSpec spec;
      spec.domain = domain;
      spec.k = 5;
      spec.L_post = 2.0;
      spec.seed = seed;
      const auto dist = make_distribution(spec);
      CHECK(dist.certified_lipschitz() <= 2.0);
      CHECK(dist.k() == 5);
      const double side = domain_side(domain);
      StreamRng rng(seed, 99);
      for (int t = 0; t < 2000; ++t) {
        double a[2] = {side * rng.uniform(), side * rng.uniform()};
        double b[2] = {side * rng.uniform(), side * rng.uniform()};
        if (t % 2) {
          b[0] = std::min(side, a[0] + 1e-3 * rng.uniform());
          b[1] = std::min(side, a[1] + 1e-3 * rng.uniform());
        }
        const auto ea = dist.posterior(a);
        const auto eb = dist.posterior(b);
        double total = 0;
        for (double v : ea) {
          CHECK(v >= -1e-15);
          total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sup_diff(ea, eb) <= 2.0 * dist.distance(a, b) + 1e-12);
      }
    }
  DistributionSpec too_big;
  too_big.k = 1;
  CHECK_THROWS_AS(make_distribution(too_big), ValidationError);
}

TEST_CASE("nearest-neighbor risk on the ramp approaches 1/3") {
  // Asymptotic 1-NN risk is E[2 eta (1 - eta)] = 1/3 for eta_1(x) = x.
  const auto r = nn_risk_trials(ramp(), 10000, 8, 2000, 5);
  CHECK(r.bayes_risk == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(r.mean_nn_risk - 1.0 / 3.0) <= 0.02);
  CHECK(r.pass);
  CHECK(r.bound_rhs == doctest::Approx(0.5 + 4.0 / 100.0));
  CHECK(r.trials == 8);

  const auto zero = nn_risk_trials(constant_distribution({1.0, 0.0}), 50, 4, 100, 1);
  CHECK(zero.mean_nn_risk == 0.0);
  CHECK(zero.mc_stderr == 0.0);
}

TEST_CASE("simulation does not depend on the thread count") {
  DistributionSpec spec;
  spec.domain = Domain::SquareLInf;
  spec.k = 3;
  spec.seed = 12;
  const auto dist = make_distribution(spec);
  const auto a = nn_risk_trials(dist, 200, 12, 300, 9, 1);
  const auto b = nn_risk_trials(dist, 200, 12, 300, 9, 6);
  CHECK(a.mean_nn_risk == b.mean_nn_risk);
  CHECK(a.mc_stderr == b.mc_stderr);
  const auto c = nn_risk_trials(dist, 200, 12, 300, 10, 6);
  CHECK(c.mean_nn_risk != a.mean_nn_risk);
  CHECK_THROWS_AS(nn_risk_trials(dist, 0, 1, 1, 0), ValidationError);
}

TEST_CASE("constant posterior gives the classical 2p(1-p) limit") {
  const auto r = nn_risk_trials(constant_distribution({0.8, 0.2}), 10000, 8, 2000, 3);
  CHECK(r.bayes_risk == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::abs(r.mean_nn_risk - 0.32) <= 0.02);
  CHECK(r.mean_nn_risk <= 2 * r.bayes_risk);
}
