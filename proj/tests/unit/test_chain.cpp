#include <doctest.h>

#include <cmath>

#include <metrogap/chain.hpp>
#include <metrogap/error.hpp>

#include "helpers.hpp"

using namespace metrogap;

TEST_CASE("grid enumeration is a row-major bijection") {
  const Grid g({{-2, 1}, {3, 5}, {0, 1}});
  CHECK(g.size() == 24);
  CHECK(g.stride(0) == 6);
  CHECK(g.stride(1) == 2);
  CHECK(g.stride(2) == 1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.index(g.point(i)) == i);
  CHECK(g.point(0) == Point{-2, 3, 0, 0});
  CHECK(g.point(1) == Point{-2, 3, 1, 0});
  CHECK_FALSE(g.neighbor(0, 0, -1).has_value());
  CHECK(g.neighbor(0, 0, 1).value() == 6);
  CHECK(g.offset(7, 0) == 1);
}

TEST_CASE("two uniform states") {
  const auto c = build_metropolis(Grid::line(1, 2), std::vector<double>{1.0, 1.0});
  CHECK(c.transition(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.transition(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.edges()[0].conductance == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("two states with F = (1, 2) against the acceptance-ratio formula") {
  const std::vector<double> f{1.0, 2.0};
  const auto c = build_metropolis(Grid::line(1, 2), f);
  CHECK(c.transition(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.transition(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.transition(1, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(c.edges()[0].conductance == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      if (x == y) continue;
      CHECK(c.transition(x, y) == doctest::Approx(0.5 * std::min(1.0, f[y] / f[x])).epsilon(1e-15));
    }
  }
}

TEST_CASE("uniform 2x2 box: corners hold with probability 1/2") {
  const auto c = build_metropolis(Grid::cube(2, 1, 2), std::vector<double>(4, 1.0));
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(c.transition(x, x) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.incident(x).size() == 2);
    for (const auto& inc : c.incident(x)) CHECK(c.transition(x, inc.neighbor) == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("kernel identities hold on random chains") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Grid g = seed % 2 ? Grid::line(-7, 9) : Grid::cube(2, 1, 6);
    const auto c = testing::random_chain(g, seed, 20.0);
    const auto a = audit_chain(c);
    CHECK(a.ok(1e-12));
    double total = 0.0;
    for (double p : c.pi()) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("steep targets keep relative precision") {
  std::vector<double> lf(50);
  for (std::size_t i = 0; i < lf.size(); ++i) lf[i] = 12.0 * static_cast<double>(i);
  const auto c = build_metropolis_log(Grid::line(0, 49), lf);
  CHECK(c.target().min_probability() > 0.0);
  CHECK(audit_chain(c).ok(1e-12));
  CHECK(c.transition(49, 48) == doctest::Approx(0.5 * std::exp(-12.0)).epsilon(1e-13));
}

TEST_CASE("non-positive targets are rejected with the offending state") {
  try {
    build_metropolis(Grid::line(0, 3), std::vector<double>{1.0, 2.0, 0.0, 1.0});
    FAIL("expected NonPositiveTarget");
  } catch (const NonPositiveTarget& e) {
    CHECK(e.state() == 2);
  }
  CHECK_THROWS_AS(build_metropolis(Grid::line(0, 1), std::vector<double>{1.0, NAN}), NonPositiveTarget);
}

TEST_CASE("general conductances: rows may not exceed one") {
  const Grid g = Grid::line(0, 2);
  const auto t = TargetMeasure::from_weights(std::vector<double>{1.0, 1.0, 1.0});
  const auto c = GridChain::from_conductances(g, t, std::vector<double>{0.1, 0.0});
  CHECK(c.holding()[2] == doctest::Approx(1.0));
  CHECK(c.transition(0, 1) == doctest::Approx(0.3));
  CHECK_THROWS_AS(GridChain::from_conductances(g, t, std::vector<double>{0.5, 0.1}), InvalidArgument);
}

TEST_CASE("Dirichlet form") {
  const auto two = build_metropolis(Grid::line(1, 2), std::vector<double>{1.0, 1.0});
  const StateFunction u(std::vector<double>{0.0, 1.0});
  CHECK(dirichlet_form(two, u, u) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(dirichlet_form(two, StateFunction::constant(2, 3.0), StateFunction::constant(2, 3.0)) == 0.0);

  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Grid g = seed % 2 ? Grid::line(0, 12) : Grid::cube(2, 0, 4);
    const auto c = testing::random_chain(g, seed);
    const auto a = testing::random_values(c.size(), 100 + seed);
    const auto b = testing::random_values(c.size(), 200 + seed);
    const double e = dirichlet_form(c, StateFunction(a), StateFunction(b));
    CHECK(e == doctest::Approx(testing::brute_dirichlet(c, a, b)).epsilon(1e-12));
  }
}

TEST_CASE("variance") {
  const auto two = build_metropolis(Grid::line(1, 2), std::vector<double>{1.0, 1.0});
  CHECK(variance(two, StateFunction(std::vector<double>{0.0, 1.0})) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(variance(two, StateFunction::constant(2, -4.0)) == 0.0);

  const auto c = testing::random_chain(Grid::line(0, 20), 7);
  const auto u = testing::random_values(c.size(), 8);
  const StateFunction f(u);
  const double mean = expectation(c, f);
  const double var = variance(c, f);
  auto spread = [&](double xi) {
    double s = 0.0;
    for (std::size_t x = 0; x < u.size(); ++x) s += (u[x] - xi) * (u[x] - xi) * c.pi()[x];
    return s;
  };
  CHECK(var == doctest::Approx(spread(mean)).epsilon(1e-12));
  for (int i = -200; i <= 200; ++i) CHECK(spread(mean + i * 0.01) >= var * (1.0 - 1e-12));
}
