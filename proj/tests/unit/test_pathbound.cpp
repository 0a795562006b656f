#include <doctest.h>

#include <cmath>
#include <sstream>

#include <metrogap/error.hpp>
#include <metrogap/families.hpp>
#include <metrogap/pathbound.hpp>
#include <metrogap/recipe.hpp>
#include <metrogap/spectral.hpp>

#include "helpers.hpp"

using namespace metrogap;

TEST_CASE("w-length") {
  const auto c = build_metropolis(Grid::line(0, 5), std::vector<double>(6, 1.0));
  const auto unit = WeightFunction::unit().evaluate(c);
  CHECK(w_length(c, {0, 1, 2, 3}, unit) == 3.0);
  CHECK(w_length(c, {4}, unit) == 0.0);
  CHECK(w_length(c, {1, 2, 3, 4, 5}, std::vector<double>(5, 2.0)) == 1.0);
  CHECK_THROWS_AS(w_length(c, {0, 2}, unit), InvalidArgument);

  const OneDAsym1 f{.a_minus = 2.0, .a_plus = 2.0, .N = 16};
  const auto cf = build_chain(f);
  const auto r = recipe(f);
  const auto w = r.weight.evaluate(cf);
  double oracle = 0.0;
  for (int k = 0; k < 16; ++k) oracle += 1.0 / ((1.0 + k) * (1.0 + k));
  const double half = w_length(cf, r.paths.vertices(16, 32), w);
  CHECK(half == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(half == doctest::Approx(1.5843465334449871).epsilon(1e-14));
  const double full = w_length(cf, r.paths.vertices(0, 32), w);
  CHECK(full == doctest::Approx(2.1721532745024308).epsilon(1e-14));
  CHECK(full <= M_PI * M_PI / 6.0 + 1.0);
}

TEST_CASE("two uniform states: W = 2 and the bound is exact") {
  const auto c = build_metropolis(Grid::line(1, 2), std::vector<double>{1.0, 1.0});
  const auto r = compute_W(c, PathSystem::segment(c.grid()), WeightFunction::unit());
  CHECK(r.W == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.lower_bound == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.pairs == 1);
  // tied pairs enter the reduced sum in both orders
  const auto s = compute_W(c, PathSystem::segment(c.grid()), WeightFunction::unit(), {.symmetry_reduction = true});
  CHECK(s.W == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("uniform line of 17 states") {
  const OneDAsym1 f{.a_minus = 0.0, .a_plus = 0.0, .N = 8};
  const auto c = build_chain(f);
  const auto p = PathSystem::segment(c.grid());
  const auto r = compute_W(c, p, WeightFunction::unit());
  CHECK(r.W == doctest::Approx(testing::brute_W(c, p, WeightFunction::unit())).epsilon(1e-12));
  CHECK(r.W == doctest::Approx(144.0).epsilon(1e-12));
  const double lambda = spectral_gap(c).lambda;
  CHECK(r.lower_bound <= lambda);
  CHECK(lambda <= 2.0 * r.lower_bound);
  const int mid = c.grid().point(c.edges()[r.argmax_edge].lower)[0];
  CHECK((mid == -1 || mid == 0));
}

TEST_CASE("exponential of a linear function routed to the peak") {
  const ExpLinear f{.a = 8, .b = 8, .N = 8};
  const auto c = build_chain(f);
  const auto rc = recipe(f);
  const auto r = compute_W(c, rc.paths, rc.weight);
  CHECK(r.mode == TargetMode::ToPoint);
  CHECK(r.lower_bound == doctest::Approx(1.0 / r.W).epsilon(1e-15));
  CHECK(r.W == doctest::Approx(53.533299894421646).epsilon(1e-10));
  CHECK(r.W == doctest::Approx(testing::brute_W(c, rc.paths, rc.weight)).epsilon(1e-12));
  const double ratio = spectral_gap(c).lambda / r.lower_bound;
  CHECK(ratio >= 1.0);
  CHECK(ratio <= 50.0);
}

TEST_CASE("engines agree with walking every path") {
  struct Case {
    GridChain chain;
    PathSystem paths;
    WeightFunction weight;
    bool symmetric;
  };
  std::vector<Case> cases;
  {
    auto c = testing::random_chain(Grid::line(-9, 13), 21);
    auto w = WeightFunction::power_of_position({{-9, 13, 1.0, 1.0, 0.7}}, EdgeKey::Left);
    cases.push_back({c, PathSystem::segment(c.grid()), w, false});
    cases.push_back({c, PathSystem::segment(c.grid()), w, true});
    cases.push_back({c, PathSystem::segment(c.grid()), WeightFunction::power_of_position({{-13, 13, 2.0, 0.0, 0.5}}, EdgeKey::Far, true), false});
  }
  {
    auto c = testing::random_chain(Grid::cube(2, 1, 7), 22);
    cases.push_back({c, PathSystem::rectangle_sides(c.grid()), WeightFunction::unit(), false});
    cases.push_back({c, PathSystem::rectangle_sides(c.grid()), WeightFunction::power_of_q(0.3), true});
    cases.push_back({c, PathSystem::corner_monotone(c.grid(), 10), WeightFunction::power_of_q(0.25), false});
    cases.push_back({c, PathSystem::staircase(c.grid(), 30), WeightFunction::power_of_q(0.1), false});
  }
  {
    auto c = testing::random_chain(Grid::cube(3, 0, 3), 23);
    cases.push_back({c, PathSystem::rectangle_sides(c.grid()), WeightFunction::unit(), false});
  }
  for (const Valley& v : {Valley{.alpha = 2.0, .A = 6.0, .N = 6, .form = ValleyForm::Diagonal},
                          Valley{.alpha = 1.0, .A = 5.0, .aL = 2.0 / std::sqrt(5.0), .bL = 1.0 / std::sqrt(5.0), .N = 5}}) {
    const auto c = build_chain(v);
    const auto r = recipe(v);
    cases.push_back({c, r.paths, r.weight, false});
    cases.push_back({c, r.paths, r.weight, true});
  }
  for (const auto& k : cases) {
    const auto r = compute_W(k.chain, k.paths, k.weight, {.symmetry_reduction = k.symmetric});
    CAPTURE(to_string(k.paths.rule()));
    CAPTURE(k.symmetric);
    CHECK(r.W == doctest::Approx(testing::brute_W(k.chain, k.paths, k.weight, k.symmetric)).epsilon(1e-11));
    double top = 0.0;
    for (double we : r.edge_W) top = std::max(top, we);
    CHECK(top == r.W);
    CHECK(r.edge_W[r.argmax_edge] == r.W);
    CHECK(r.summary.max == r.W);
    if (!k.symmetric) continue;
    const auto full = compute_W(k.chain, k.paths, k.weight);
    CHECK(r.W >= full.W * (1.0 - 1e-12));
  }
}

TEST_CASE("results do not depend on the thread count") {
  const Valley v{.alpha = 1.0, .A = 10.0, .aL = 2.0 / std::sqrt(5.0), .bL = -1.0 / std::sqrt(5.0), .N = 10};
  const auto c = build_chain(v);
  const auto rc = recipe(v);
  const auto one = compute_W(c, rc.paths, rc.weight, {.symmetry_reduction = true, .threads = 1});
  for (unsigned t : {2u, 3u, 8u}) {
    const auto r = compute_W(c, rc.paths, rc.weight, {.symmetry_reduction = true, .threads = t});
    CHECK(r.W == one.W);
    CHECK(r.edge_W == one.edge_W);
  }
  const OneDAsym2 f{.a_minus = 1.0, .a_plus = 2.0, .N_minus = 60, .N_plus = 30};
  const auto cf = build_chain(f);
  const auto rf = recipe(f);
  const auto a = compute_W(cf, rf.paths, rf.weight, {.threads = 1});
  const auto b = compute_W(cf, rf.paths, rf.weight, {.threads = 5});
  CHECK(a.edge_W == b.edge_W);
}

TEST_CASE("refusals") {
  const auto c = build_chain(FlatClass{.A = 4.0, .N = 12});
  const auto p = PathSystem::rectangle_sides(c.grid());
  const auto full = compute_W(c, p, WeightFunction::unit());
  try {
    compute_W(c, p, WeightFunction::unit(), {.pair_cap = 1000});
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.partial() > 0.0);
    CHECK(e.partial() <= full.W);
  }

  const auto t = TargetMeasure::from_weights(std::vector<double>{1.0, 2.0, 1.0, 3.0});
  const auto cut = GridChain::from_conductances(Grid::line(0, 3), t, std::vector<double>{0.05, 0.0, 0.05});
  CHECK_THROWS_AS(compute_W(cut, PathSystem::segment(cut.grid()), WeightFunction::unit()), InvalidArgument);
  CHECK_THROWS_AS(compute_W(cut, PathSystem::staircase(Grid::cube(2, 0, 1), 0), WeightFunction::unit()), InvalidArgument);

  const auto e = build_chain(ExpLinear{.a = 3, .b = 3, .N = 4});
  CHECK_THROWS_AS(compute_W(e, PathSystem::corner_monotone(e.grid(), 15), WeightFunction::unit(), {.symmetry_reduction = true}),
                  InvalidArgument);
  CHECK_THROWS_AS(WeightFunction::power_of_q(0.5), InvalidArgument);
  CHECK_THROWS_AS(WeightFunction::power_of_position({{0, 1, 1.0, 1.0, 1.0}}, EdgeKey::Left).evaluate(cut), InvalidArgument);
}

TEST_CASE("weight functions") {
  const auto c = testing::random_chain(Grid::cube(2, 1, 4), 31);
  const auto q = WeightFunction::power_of_q(0.25).evaluate(c);
  for (std::size_t e = 0; e < q.size(); ++e) CHECK(q[e] == doctest::Approx(std::pow(c.edges()[e].conductance, 0.25)).epsilon(1e-14));
  for (double w : WeightFunction::unit().evaluate(c)) CHECK(w == 1.0);

  const Valley v{.alpha = 2.0, .A = 4.0, .N = 4, .form = ValleyForm::Diagonal};
  const auto cv = build_chain(v);
  const auto d = discretize(v);
  const auto wv = WeightFunction::valley_distance(2.0).evaluate(cv);
  for (std::size_t e = 0; e < wv.size(); ++e) {
    const auto& ed = cv.edges()[e];
    const double top = std::max(d.log_f[ed.lower], d.log_f[ed.upper]);
    CHECK(wv[e] == doctest::Approx(std::exp(0.5 * top)).epsilon(1e-14));
    const double far = std::max(std::abs(valley_level(v, cv.grid().point(ed.lower))), std::abs(valley_level(v, cv.grid().point(ed.upper))));
    CHECK(wv[e] == doctest::Approx(1.0 + far).epsilon(1e-14));
  }
}

TEST_CASE("recipes") {
  const OneDAsym1 a{.a_minus = 0.5, .a_plus = 2.0, .N = 6};
  const auto ca = build_chain(a);
  const auto ra = recipe(a);
  CHECK(ra.paths.rule() == PathRule::OneDSegment);
  CHECK(ra.paths.mode() == TargetMode::Pairs);
  const auto wa = ra.weight.evaluate(ca);
  for (const auto& e : ca.edges()) {
    const int j = ca.grid().point(e.lower)[0];
    CHECK(wa[ca.edge_between(e.lower, e.upper)] == doctest::Approx(std::pow(1.0 + std::abs(j), 0.25)).epsilon(1e-14));
  }

  const OneDAsym2 b{.a_minus = 1.0, .a_plus = 1.0, .N_minus = 5, .N_plus = 20};
  const auto cb = build_chain(b);
  const auto rb = recipe(b);
  CHECK(rb.label == "asym2:BothOne");
  const auto wb = rb.weight.evaluate(cb);
  for (std::size_t e = 0; e < wb.size(); ++e) {
    const int j = cb.grid().point(cb.edges()[e].lower)[0];
    const int k = j + 1 <= 0 ? j : j + 1;
    const double expect = std::abs(k) <= 5 ? std::sqrt(std::abs(k)) : std::sqrt(20.0 / std::log(5.0));
    CHECK(wb[e] == doctest::Approx(expect).epsilon(1e-14));
  }

  const Valley v{.alpha = 2.0, .A = 8.0, .N = 8};
  const auto rv = recipe(v);
  CHECK(rv.paths.rule() == PathRule::ValleyRule);
  CHECK(rv.weight.kind() == WeightKind::ValleyDistance);
  CHECK(rv.symmetry_reduction);
  CHECK(recipe(ExpLinear{.a = 2, .b = 2, .N = 4}).paths.rule() == PathRule::CornerMonotone);
  CHECK(recipe(ExpFalloff{.a = 8, .A = 8, .N = 8, .eps = 0.5}).paths.rule() == PathRule::StaircaseToPoint);
  CHECK(recipe(FlatClass{.A = 2, .N = 4}).paths.rule() == PathRule::RectangleSides);
}

TEST_CASE("second-family regime classifier") {
  auto cls = [](double am, double ap, int nm, int np) { return classify_asym2(OneDAsym2{am, ap, nm, np}); };
  CHECK(cls(0.5, 3.0, 10, 10).regime == Asym2Regime::MinBelowOne);
  CHECK(cls(1.0, 0.0, 10, 10).regime == Asym2Regime::MinBelowOne);
  CHECK(cls(2.0, 3.0, 10, 10).regime == Asym2Regime::BothAboveOne);
  CHECK_FALSE(cls(2.0, 3.0, 10, 10).reflected);
  CHECK(cls(3.0, 2.0, 10, 10).reflected);
  // equal powers are not reflected
  CHECK_FALSE(cls(2.0, 2.0, 8, 8).reflected);
  CHECK(cls(1.0, 1.0, 7, 7).regime == Asym2Regime::BothOne);
  CHECK_FALSE(cls(1.0, 1.0, 7, 7).reflected);
  CHECK(cls(1.0, 1.0, 8, 7).reflected);
  // N_far^{1+a_far} = N_one^2 falls in the large case
  CHECK(cls(1.0, 2.0, 8, 4).regime == Asym2Regime::OneAndLarge);
  CHECK(cls(1.0, 2.0, 9, 4).regime == Asym2Regime::OneAndSmall);
  CHECK(cls(2.0, 1.0, 4, 8).regime == Asym2Regime::OneAndLarge);
  CHECK(cls(2.0, 1.0, 4, 8).reflected);
  CHECK(cls(2.0, 1.0, 4, 9).regime == Asym2Regime::OneAndSmall);
  CHECK(to_string(Asym2Regime::OneAndSmall) == "OneAndSmall");

  const OneDAsym2 m{.a_minus = 0.5, .a_plus = 2.0, .N_minus = 30, .N_plus = 10};
  CHECK(asym2_predicted_order(m) == doctest::Approx(1.0 / 1600.0));
  const OneDAsym2 both{.a_minus = 1.0, .a_plus = 1.0, .N_minus = 16, .N_plus = 16};
  CHECK(asym2_predicted_order(both) == doctest::Approx(1.0 / (256.0 + 256.0 * std::log(16.0))));
}

TEST_CASE("lower bounds certify the gap across the catalog") {
  const std::vector<DensityFamily> fams{
      OneDAsym1{.a_minus = 0.5, .a_plus = 1.0, .N = 40},
      OneDAsym1{.a_minus = 1.0, .a_plus = 3.0, .N = 40},
      OneDAsym1{.a_minus = 3.0, .a_plus = 3.0, .N = 40},
      OneDAsym2{.a_minus = 0.5, .a_plus = 0.5, .N_minus = 10, .N_plus = 40},
      OneDAsym2{.a_minus = 3.0, .a_plus = 2.0, .N_minus = 20, .N_plus = 40},
      OneDAsym2{.a_minus = 1.0, .a_plus = 1.0, .N_minus = 40, .N_plus = 10},
      OneDAsym2{.a_minus = 3.0, .a_plus = 1.0, .N_minus = 20, .N_plus = 40},
      OneDAsym2{.a_minus = 1.0, .a_plus = 1.5, .N_minus = 80, .N_plus = 10},
      ExpLinear{.a = 12, .b = 12, .N = 12},
      ExpFalloff{.a = 24, .A = 24, .N = 12, .eps = 0.5, .z0 = {0.2, 0.7}},
      FlatClass{.shape = FlatShape::InversePoly, .A = 8, .theta = 0.25, .N = 12},
      Valley{.alpha = 2.0, .A = 8.0, .N = 8},
      Valley{.alpha = 0.5, .A = 8.0, .N = 8, .form = ValleyForm::Diagonal},
  };
  for (const auto& f : fams) {
    CAPTURE(family_tag(f));
    const auto c = build_chain(f);
    const auto r = recipe(f);
    CHECK(audit_paths(c, r.paths).invalid == 0);
    const auto b = compute_W(c, r.paths, r.weight, {.symmetry_reduction = r.symmetry_reduction});
    CHECK(b.lower_bound <= spectral_gap(c).lambda);
  }
}

TEST_CASE("edge CSV") {
  const auto c = build_chain(FlatClass{.A = 2, .N = 3});
  const auto r = compute_W(c, PathSystem::rectangle_sides(c.grid()), WeightFunction::unit());
  std::ostringstream os;
  write_edge_csv(os, c, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("edge,axis,", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == c.edges().size());
}
