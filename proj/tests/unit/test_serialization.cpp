#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include <metrogap/error.hpp>
#include <metrogap/families.hpp>
#include <metrogap/mixing.hpp>
#include <metrogap/pathbound.hpp>
#include <metrogap/recipe.hpp>
#include <metrogap/serialization.hpp>
#include <metrogap/spectral.hpp>

using namespace metrogap;
using nlohmann::json;

TEST_CASE("family JSON round trip") {
  const std::vector<DensityFamily> fams{
      OneDAsym2{.a_minus = 1.0, .a_plus = 2.5, .N_minus = 3, .N_plus = 9},
      ExpFalloff{.shape = FalloffShape::Ramp, .a = 8.0, .A = 8.0, .N = 8, .eps = 0.5, .corner = 2},
      Valley{.alpha = 0.5, .A = 6.0, .aL = 2.0 / std::sqrt(5.0), .bL = -1.0 / std::sqrt(5.0), .N = 6},
  };
  for (const auto& f : fams) {
    const auto g = family_from_json(family_to_json(f));
    CHECK(family_tag(g) == family_tag(f));
    CHECK(family_params(g) == family_params(f));
  }
  const auto h = family_from_json(R"({"family": "OneDAsym1", "params": {"a_minus": 2, "a_plus": "3", "N": 5}})");
  CHECK(std::get<OneDAsym1>(h).a_plus == 3.0);
  CHECK_THROWS_AS(family_from_json(R"({"family": "OneDAsym1", "parms": {}})"), InvalidArgument);
  CHECK_THROWS_AS(family_from_json("[1, 2]"), InvalidArgument);
  CHECK_THROWS_AS(family_from_json("{"), InvalidArgument);
}

TEST_CASE("report JSON") {
  const ExpLinear f{.a = 4, .b = 4, .N = 5};
  const auto c = build_chain(f);
  std::ostringstream os;
  write_chain_json(os, f, c);
  const auto j = json::parse(os.str());
  CHECK(j["states"] == 25);
  CHECK(j["edges"].size() == c.edges().size());
  CHECK(j["pi"].size() == 25);
  CHECK(j["family"] == "ExpLinear");

  const auto s = spectral_gap(c);
  std::ostringstream ss;
  write_spectral_json(ss, s);
  CHECK(json::parse(ss.str())["lambda"].get<double>() == s.lambda);

  const auto r = recipe(f);
  const auto b = compute_W(c, r.paths, r.weight);
  std::ostringstream bs;
  write_bound_json(bs, c, b);
  const auto jb = json::parse(bs.str());
  CHECK(jb["W"].get<double>() == b.W);
  CHECK(jb["mode"] == "to_point");

  const auto m = mixing_times(c, {.lambda = s.lambda});
  std::ostringstream ms;
  write_mixing_json(ms, m);
  const auto jm = json::parse(ms.str());
  CHECK(jm["T_TV"].get<double>() == m.T_TV);
  CHECK(jm["sandwich"] == true);
  CHECK(jm["curve"].size() == m.curve.size());
}
