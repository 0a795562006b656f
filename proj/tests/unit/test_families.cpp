#include <doctest.h>

#include <cmath>

#include <metrogap/class_check.hpp>
#include <metrogap/error.hpp>
#include <metrogap/families.hpp>
#include <metrogap/spectral.hpp>

using namespace metrogap;

namespace {

std::vector<DensityFamily> catalog() {
  return {
      OneDAsym1{.a_minus = 0.5, .a_plus = 2.0, .N = 20},
      OneDAsym1{.a_minus = 1.0, .a_plus = 1.0, .N = 20},
      OneDAsym1{.a_minus = 2.0, .a_plus = 3.0, .N = 20},
      OneDAsym2{.a_minus = 3.0, .a_plus = 0.5, .N_minus = 7, .N_plus = 19},
      OneDAsym2{.a_minus = 1.0, .a_plus = 2.0, .N_minus = 12, .N_plus = 5},
      OneDAsym2{.a_minus = 1.0, .a_plus = 1.0, .N_minus = 9, .N_plus = 9},
      ExpLinear{.a = 8.0, .b = 8.0, .N = 8},
      ExpLinear{.a = -3.0, .b = 6.0, .N = 6},
      ExpFalloff{.shape = FalloffShape::Cone, .a = 24.0, .A = 24.0, .C = 1.0, .N = 12, .eps = 0.5, .z0 = {0.3, 0.6}},
      ExpFalloff{.shape = FalloffShape::Ramp, .a = 8.0, .A = 8.0, .C = 1.0, .N = 8, .eps = 0.5, .corner = 3},
      FlatClass{.shape = FlatShape::PowerRamp, .A = 8.0, .theta = 1.0, .n = 2, .N = 10},
      FlatClass{.shape = FlatShape::InversePoly, .A = 8.0, .theta = 0.25, .n = 2, .N = 10},
      FlatClass{.shape = FlatShape::PowerRamp, .A = 2.0, .theta = 0.5, .n = 3, .N = 4},
      Valley{.alpha = 2.0, .A = 6.0, .N = 6, .form = ValleyForm::Diagonal},
      Valley{.alpha = 1.0, .A = 6.0, .aL = 2.0 / std::sqrt(5.0), .bL = -1.0 / std::sqrt(5.0), .N = 6},
  };
}

}  // namespace

TEST_CASE("zero exponents give the uniform target") {
  const auto d = discretize(OneDAsym1{.a_minus = 0.0, .a_plus = 0.0, .N = 3});
  CHECK(d.grid.axes()[0] == AxisRange{-3, 3});
  for (double lf : d.log_f) CHECK(lf == 0.0);
}

TEST_CASE("one-dimensional profile matches the power law on each side") {
  const OneDAsym2 f{.a_minus = 1.5, .a_plus = 0.5, .N_minus = 4, .N_plus = 6};
  const auto d = discretize(f);
  CHECK(d.grid.size() == 11);
  for (int k = -4; k <= 6; ++k) {
    const double a = k <= 0 ? 1.5 : 0.5;
    CHECK(d.log_f[static_cast<std::size_t>(k + 4)] == doctest::Approx(a * std::log1p(std::abs(k))).epsilon(1e-15));
  }
}

TEST_CASE("exponential of a linear function: values and normalising constant") {
  const auto d = discretize(ExpLinear{.a = 4.0, .b = 4.0, .N = 4});
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    const Point p = d.grid.point(i);
    CHECK(d.log_f[i] == doctest::Approx(p[0] + p[1] - 1.0).epsilon(1e-15));
  }
  for (const auto& [a, b, N] : std::vector<std::tuple<double, double, int>>{{4, 4, 4}, {8, 3, 8}, {-5, 7, 12}, {32, 32, 32}}) {
    const auto c = build_chain(ExpLinear{.a = a, .b = b, .N = N});
    // sum F as a product of two geometric sums
    double log_sum = -(a + b) / (2.0 * N);
    for (double s : {a, b}) log_sum += std::log(std::expm1(s) / std::expm1(s / N)) + s / N;
    CHECK(c.target().log_normalizer() == doctest::Approx(log_sum).epsilon(1e-12));
  }
  for (int N : {4, 8, 16, 32, 64}) {
    const auto c = build_chain(ExpLinear{.a = double(N), .b = double(N), .N = N});
    const double top = c.pi()[c.target().argmax()];
    CHECK(top > 0.25);
    CHECK(top < 0.5);
  }
}

TEST_CASE("valley lattice form") {
  const Valley v{.alpha = 2.0, .A = 5.0, .N = 5, .form = ValleyForm::Diagonal};
  const auto d = discretize(v);
  CHECK(d.grid.axes()[0] == AxisRange{-4, 5});
  CHECK(std::exp(d.log_f[d.grid.index(Point{1, 0, 0, 0})]) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::exp(d.log_f[d.grid.index(Point{5, 5, 0, 0})]) == doctest::Approx(100.0).epsilon(1e-13));
  CHECK(valley_level(v, Point{5, 5, 0, 0}) == 9.0);
  CHECK(valley_level(v, Point{-4, 2, 0, 0}) == -3.0);
}

TEST_CASE("parameter violations name the invariant") {
  auto rejects = [](const DensityFamily& f, const char* what) {
    try {
      validate(f);
      FAIL("accepted invalid parameters");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  rejects(OneDAsym1{.a_minus = 2.0, .a_plus = 1.0, .N = 4}, "a_minus <= a_plus");
  rejects(OneDAsym1{.a_minus = -1.0, .a_plus = 1.0, .N = 4}, "a_minus >= 0");
  rejects(OneDAsym2{.N_minus = 0, .N_plus = 0}, "two states");
  rejects(ExpLinear{.a = 9.0, .b = 1.0, .N = 8}, "<= N");
  rejects(ExpFalloff{.a = 10.0, .A = 40.0, .C = 2.0, .N = 8}, "A/a <= C");
  rejects(FlatClass{.shape = FlatShape::InversePoly, .n = 3, .N = 4}, "n = 2");
  rejects(Valley{.alpha = 1.0, .A = 1.0, .aL = 0.6, .bL = 0.6, .N = 1}, "aL^2 + bL^2 = 1");
  CHECK_THROWS_AS(discretize(ExpLinear{.a = 0.0, .b = 0.0, .N = 4}), InvalidArgument);
}

TEST_CASE("textual parameters round-trip") {
  for (const auto& f : catalog()) {
    const auto g = make_family(family_tag(f), family_params(f));
    CHECK(family_params(g) == family_params(f));
  }
  CHECK_THROWS_AS(make_family("Valley", {{"alpah", "1"}}), InvalidArgument);
  CHECK_THROWS_AS(make_family("Nope", {}), InvalidArgument);
  CHECK_THROWS_AS(make_family("OneDAsym1", {{"N", "x"}}), InvalidArgument);
}

TEST_CASE("every catalog family discretises to a valid Metropolis chain") {
  for (const auto& f : catalog()) {
    CAPTURE(family_tag(f));
    const auto d = discretize(f);
    for (double lf : d.log_f) CHECK(std::isfinite(lf));
    const auto c = build_chain(f);
    CHECK(audit_chain(c).ok(1e-12));
    CHECK(c.target().min_probability() > 0.0);
  }
}

TEST_CASE("discretisation error") {
  CHECK(discretization_error(OneDAsym1{.a_minus = 0.0, .a_plus = 0.0, .N = 5}, 4) <= 1e-14);
  CHECK(discretization_error(Valley{.alpha = 0.0, .A = 4.0, .N = 4, .form = ValleyForm::Diagonal}, 3) <= 1e-14);
  CHECK_THROWS_AS(discretization_error(ExpLinear{.a = 2, .b = 2, .N = 4}, 1), InvalidArgument);

  // cell mean of exp(c t/N) over a unit cell is sinh(c/2N)/(c/2N) times the centre value
  for (const auto& [a, b, N] : std::vector<std::tuple<double, double, int>>{{4, 4, 4}, {8, 8, 8}, {16, -4, 16}}) {
    double ratio = 1.0;
    for (double s : {a, b}) ratio *= std::sinh(s / (2 * N)) / (s / (2 * N));
    const double err = discretization_error(ExpLinear{.a = a, .b = b, .N = N}, 8);
    CHECK(err == doctest::Approx(ratio - 1.0).epsilon(1e-9));
    CHECK(err <= (a * a + b * b) / (12.0 * N * N));
  }

  const double golden = discretization_error(Valley{.alpha = 1.0, .A = 16.0, .N = 16, .form = ValleyForm::Diagonal}, 8);
  CHECK(golden == doctest::Approx(0.32953610062235272).epsilon(1e-9));
}

TEST_CASE("test functions are centred and carry their balancing constants") {
  for (const auto& f : catalog()) {
    const auto c = build_chain(f);
    for (const auto& label : test_function_labels(f)) {
      CAPTURE(family_tag(f));
      CAPTURE(label);
      const auto t = test_function(f, label);
      CHECK(t.label == label);
      double m = 0.0;
      double s = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        m += c.pi()[i] * t.f[i];
        s += c.pi()[i] * t.f[i] * t.f[i];
      }
      CHECK(std::abs(m) <= 1e-12 * std::sqrt(s));
      CHECK(variance(c, t.f) > 0.0);
    }
  }
  CHECK_THROWS_AS(test_function(OneDAsym1{.a_minus = 2.0, .a_plus = 3.0, .N = 5}, "asym1:a<1"), InvalidArgument);
  CHECK_THROWS_AS(test_function(OneDAsym1{.a_minus = 2.0, .a_plus = 3.0, .N = 5}, "asym2:linear"), InvalidArgument);
  CHECK_THROWS_AS(test_function(ExpLinear{.a = 2, .b = 2, .N = 4}, "generic:axis2"), InvalidArgument);
  CHECK_THROWS_AS(test_function(ExpLinear{.a = 2, .b = 2, .N = 4}, "valley:antisym"), InvalidArgument);
}

TEST_CASE("step test function") {
  const OneDAsym1 f{.a_minus = 2.0, .a_plus = 3.0, .N = 10};
  const auto c = build_chain(f);
  const auto t = test_function(f, "asym1:step");
  double xi = 0.0;
  for (int k = -10; k <= 0; ++k) xi += c.pi()[static_cast<std::size_t>(k + 10)];
  REQUIRE(t.constants.size() == 1);
  CHECK(t.constants[0].first == "xi");
  CHECK(t.constants[0].second == doctest::Approx(xi).epsilon(1e-14));
  for (int k = -10; k <= 10; ++k) {
    CHECK(t.f[static_cast<std::size_t>(k + 10)] == doctest::Approx(k <= 0 ? 1.0 - xi : -xi).epsilon(1e-13));
  }
}

TEST_CASE("uniform step is the two-block cut") {
  for (int N : {1, 4, 25}) {
    const OneDAsym1 f{.a_minus = 0.0, .a_plus = 0.0, .N = N};
    const auto c = build_chain(f);
    const auto t = test_function(f, "asym1:step");
    const double xi = double(N + 1) / (2 * N + 1);
    CHECK(t.f[0] == doctest::Approx(1.0 - xi).epsilon(1e-14));
    CHECK(t.f[c.size() - 1] == doctest::Approx(-xi).epsilon(1e-14));
    const double cut = c.edges()[c.edge_between(std::size_t(N), std::size_t(N + 1))].conductance;
    CHECK(rayleigh_quotient(c, t.f) == doctest::Approx(cut / (xi * (1.0 - xi))).epsilon(1e-12));
    if (N == 25) CHECK(std::abs(t.f[0] - 0.5) < 0.01);
  }
}

TEST_CASE("valley antisymmetric test function") {
  for (int N : {3, 8}) {
    const Valley v{.alpha = 1.5, .A = double(N), .N = N, .form = ValleyForm::Diagonal};
    const auto d = discretize(v);
    const auto t = test_function(v, "valley:antisym");
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
      const Point p = d.grid.point(i);
      const std::size_t r = d.grid.index(Point{1 - p[1], 1 - p[0], 0, 0});
      CHECK(t.f[i] == doctest::Approx(-t.f[r]).epsilon(1e-12));
      if (p[0] + p[1] == 1) CHECK(std::abs(t.f[i]) <= 1e-14);
    }
  }
}

TEST_CASE("peak state") {
  const ExpLinear e{.a = 3.0, .b = -2.0, .N = 5};
  const auto g = discretize(e).grid;
  CHECK(g.point(peak_state(e, g)) == Point{5, 1, 0, 0});
  const ExpFalloff cone{.a = 16.0, .A = 16.0, .C = 1.0, .N = 8, .eps = 0.5, .z0 = {0.3, 1.0}};
  CHECK(g.point(0) == Point{1, 1, 0, 0});
  const auto gc = discretize(cone).grid;
  CHECK(gc.point(peak_state(cone, gc)) == Point{3, 8, 0, 0});
}

TEST_CASE("class membership checks") {
  const ExpFalloff cone{.a = 32.0, .A = 32.0, .C = 1.0, .N = 16, .eps = 0.5, .z0 = {0.5, 0.5}};
  const auto ok = check_class(cone);
  CHECK(ok.ok);
  CHECK(ok.violations.empty());
  CHECK(ok.lipschitz_estimate <= 32.0 * 1.05);
  CHECK(ok.growth_estimate >= 32.0 * 0.95);

  const ExpFalloff ramp{.shape = FalloffShape::Ramp, .a = 8.0, .A = 8.0, .C = 1.0, .N = 8, .eps = 0.5};
  const auto bad = check_class(ramp);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.violations.empty());

  for (const auto& f : {FlatClass{.shape = FlatShape::PowerRamp, .A = 8.0, .theta = 1.0, .n = 2, .N = 16},
                        FlatClass{.shape = FlatShape::InversePoly, .A = 8.0, .theta = 0.25, .n = 2, .N = 16}}) {
    const auto r = check_class(f);
    CHECK(r.ok);
    CHECK(r.mass_ratio >= f.eta);
  }
  auto greedy = FlatClass{.shape = FlatShape::PowerRamp, .A = 8.0, .theta = 1.0, .n = 2, .N = 16, .eta = 0.9};
  CHECK_FALSE(check_class(greedy).ok);
  auto steep = FlatClass{.shape = FlatShape::PowerRamp, .A = 8.0, .theta = 3.0, .n = 2, .N = 16};
  CHECK_FALSE(check_class(steep).ok);

  const auto a = check_class(cone, {.seed = 7});
  const auto b = check_class(cone, {.seed = 7});
  CHECK(a.lipschitz_estimate == b.lipschitz_estimate);
  CHECK(check_class(OneDAsym1{.a_minus = 1, .a_plus = 1, .N = 3}).ok);
}
