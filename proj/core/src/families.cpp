#include "metrogap/families.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "metrogap/error.hpp"
#include "metrogap/quadrature.hpp"
#include "numeric.hpp"

namespace metrogap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}
std::string fmt(int v) { return std::to_string(v); }

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw InvalidArgument("parameter " + key + ": cannot parse '" + text + "' as a number");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw InvalidArgument("parameter " + key + ": '" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

class ParamReader {
 public:
  ParamReader(std::string_view tag, const std::vector<std::pair<std::string, std::string>>& kv) : tag_(tag) {
    for (const auto& [k, v] : kv) {
      if (!values_.emplace(k, v).second) throw InvalidArgument(tag_ + ": duplicate parameter " + k);
    }
  }
  bool has(const std::string& k) const { return values_.count(k) != 0; }
  void get(const std::string& k, double& out) {
    if (auto it = take(k)) out = parse_double(k, **it);
  }
  void get(const std::string& k, int& out) {
    if (auto it = take(k)) out = parse_int(k, **it);
  }
  std::optional<std::string> text(const std::string& k) {
    if (auto it = take(k)) return **it;
    return std::nullopt;
  }
  void finish() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) throw InvalidArgument(tag_ + ": unknown parameter " + k);
    }
  }

 private:
  std::optional<const std::string*> take(const std::string& k) {
    auto it = values_.find(k);
    if (it == values_.end()) return std::nullopt;
    used_[k] = true;
    return &it->second;
  }
  std::string tag_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> used_;
};

void require(bool ok, const std::string& tag, const std::string& what) {
  if (!ok) throw InvalidArgument(tag + ": invariant violated: " + what);
}

// continuous log-density in the family's own coordinates, and the cell map
struct CellModel {
  int dim = 1;
  std::function<double(const double*)> log_f;
  std::function<void(const Point&, double*)> center;
  double side = 1.0;
};

double falloff_g(const ExpFalloff& f, double u, double v) {
  if (f.shape == FalloffShape::Cone) {
    return f.a * std::hypot(u - f.z0[0], v - f.z0[1]);
  }
  const double up = (f.corner & 1) ? 1.0 - u : u;
  const double vp = (f.corner & 2) ? 1.0 - v : v;
  return f.A * std::min(up + vp, 1.0);
}

double flat_log_f(const FlatClass& f, const double* x) {
  if (f.shape == FlatShape::PowerRamp) {
    double s = 0.0;
    for (int i = 0; i < f.n; ++i) s += x[i];
    return f.theta * std::log1p(f.A * s);
  }
  const double ax = f.A * x[0];
  const double ay = f.A * x[1];
  return -f.theta * std::log1p(ax * ax + ay * ay * ay * ay);
}

double asym_log_f(double a_minus, double a_plus, double x) {
  // cells k <= 0 use a_minus; the breakpoint sits on the cell boundary 1/2
  return (x < 0.5 ? a_minus : a_plus) * std::log1p(std::abs(x));
}

CellModel cell_model(const DensityFamily& family) {
  return std::visit(
      overloaded{
          [](const OneDAsym1& f) {
            CellModel m;
            m.log_f = [f](const double* x) { return asym_log_f(f.a_minus, f.a_plus, x[0]); };
            m.center = [](const Point& p, double* c) { c[0] = p[0]; };
            return m;
          },
          [](const OneDAsym2& f) {
            CellModel m;
            m.log_f = [f](const double* x) { return asym_log_f(f.a_minus, f.a_plus, x[0]); };
            m.center = [](const Point& p, double* c) { c[0] = p[0]; };
            return m;
          },
          [](const ExpLinear& f) {
            CellModel m;
            m.dim = 2;
            m.side = 1.0 / f.N;
            m.log_f = [f](const double* z) { return f.a * z[0] + f.b * z[1]; };
            const int N = f.N;
            m.center = [N](const Point& p, double* c) {
              c[0] = (p[0] - 0.5) / N;
              c[1] = (p[1] - 0.5) / N;
            };
            return m;
          },
          [](const ExpFalloff& f) {
            CellModel m;
            m.dim = 2;
            m.side = 1.0 / f.N;
            m.log_f = [f](const double* z) { return -falloff_g(f, z[0], z[1]); };
            const int N = f.N;
            m.center = [N](const Point& p, double* c) {
              c[0] = (p[0] - 0.5) / N;
              c[1] = (p[1] - 0.5) / N;
            };
            return m;
          },
          [](const FlatClass& f) {
            CellModel m;
            m.dim = f.n;
            m.side = 1.0 / f.N;
            m.log_f = [f](const double* z) { return flat_log_f(f, z); };
            const int N = f.N;
            const int n = f.n;
            m.center = [N, n](const Point& p, double* c) {
              for (int i = 0; i < n; ++i) c[i] = (p[static_cast<std::size_t>(i)] - 0.5) / N;
            };
            return m;
          },
          [](const Valley& f) {
            CellModel m;
            m.dim = 2;
            m.side = 1.0 / f.N;
            if (f.form == ValleyForm::Diagonal) {
              m.log_f = [f](const double* z) { return f.alpha * std::log1p(f.A * std::abs(z[0] + z[1])); };
            } else {
              m.log_f = [f](const double* z) { return f.alpha * std::log1p(f.A * std::abs(f.aL * z[0] + f.bL * z[1])); };
            }
            const int N = f.N;
            m.center = [N](const Point& p, double* c) {
              c[0] = (p[0] - 0.5) / N;
              c[1] = (p[1] - 0.5) / N;
            };
            return m;
          },
      },
      family);
}

}  // namespace

std::string family_tag(const DensityFamily& family) {
  return std::visit(overloaded{
                        [](const OneDAsym1&) { return std::string("OneDAsym1"); },
                        [](const OneDAsym2&) { return std::string("OneDAsym2"); },
                        [](const ExpLinear&) { return std::string("ExpLinear"); },
                        [](const ExpFalloff&) { return std::string("ExpFalloff"); },
                        [](const FlatClass&) { return std::string("FlatClass"); },
                        [](const Valley&) { return std::string("Valley"); },
                    },
                    family);
}

std::vector<std::pair<std::string, std::string>> family_params(const DensityFamily& family) {
  using KV = std::vector<std::pair<std::string, std::string>>;
  return std::visit(
      overloaded{
          [](const OneDAsym1& f) { return KV{{"a_minus", fmt(f.a_minus)}, {"a_plus", fmt(f.a_plus)}, {"N", fmt(f.N)}}; },
          [](const OneDAsym2& f) {
            return KV{{"a_minus", fmt(f.a_minus)}, {"a_plus", fmt(f.a_plus)}, {"N_minus", fmt(f.N_minus)},
                      {"N_plus", fmt(f.N_plus)}};
          },
          [](const ExpLinear& f) { return KV{{"a", fmt(f.a)}, {"b", fmt(f.b)}, {"N", fmt(f.N)}}; },
          [](const ExpFalloff& f) {
            KV kv{{"shape", f.shape == FalloffShape::Cone ? "cone" : "ramp"},
                  {"a", fmt(f.a)},
                  {"A", fmt(f.A)},
                  {"C", fmt(f.C)},
                  {"N", fmt(f.N)},
                  {"eps", fmt(f.eps)}};
            if (f.shape == FalloffShape::Cone) {
              kv.emplace_back("x0", fmt(f.z0[0]));
              kv.emplace_back("y0", fmt(f.z0[1]));
            } else {
              kv.emplace_back("corner", fmt(f.corner));
            }
            return kv;
          },
          [](const FlatClass& f) {
            return KV{{"shape", f.shape == FlatShape::PowerRamp ? "power_ramp" : "inverse_poly"},
                      {"A", fmt(f.A)},
                      {"theta", fmt(f.theta)},
                      {"n", fmt(f.n)},
                      {"N", fmt(f.N)},
                      {"eps", fmt(f.eps)},
                      {"eta", fmt(f.eta)}};
          },
          [](const Valley& f) {
            return KV{{"form", f.form == ValleyForm::Diagonal ? "diagonal" : "distance"},
                      {"alpha", fmt(f.alpha)},
                      {"A", fmt(f.A)},
                      {"aL", fmt(f.aL)},
                      {"bL", fmt(f.bL)},
                      {"N", fmt(f.N)},
                      {"eps", fmt(f.eps)}};
          },
      },
      family);
}

DensityFamily make_family(std::string_view tag, const std::vector<std::pair<std::string, std::string>>& params) {
  ParamReader r(tag, params);
  DensityFamily out;
  if (tag == "OneDAsym1") {
    OneDAsym1 f;
    r.get("a_minus", f.a_minus);
    r.get("a_plus", f.a_plus);
    r.get("N", f.N);
    out = f;
  } else if (tag == "OneDAsym2") {
    OneDAsym2 f;
    r.get("a_minus", f.a_minus);
    r.get("a_plus", f.a_plus);
    r.get("N_minus", f.N_minus);
    r.get("N_plus", f.N_plus);
    out = f;
  } else if (tag == "ExpLinear") {
    ExpLinear f;
    r.get("a", f.a);
    r.get("b", f.b);
    r.get("N", f.N);
    out = f;
  } else if (tag == "ExpFalloff") {
    ExpFalloff f;
    if (auto s = r.text("shape")) {
      if (*s == "cone") {
        f.shape = FalloffShape::Cone;
      } else if (*s == "ramp") {
        f.shape = FalloffShape::Ramp;
      } else {
        throw InvalidArgument("ExpFalloff: shape must be cone or ramp");
      }
    }
    r.get("a", f.a);
    f.A = f.a;
    r.get("A", f.A);
    f.C = std::max(1.0, f.A / f.a);
    r.get("C", f.C);
    r.get("N", f.N);
    r.get("eps", f.eps);
    r.get("x0", f.z0[0]);
    r.get("y0", f.z0[1]);
    r.get("corner", f.corner);
    if (f.shape == FalloffShape::Ramp) f.z0 = {(f.corner & 1) ? 1.0 : 0.0, (f.corner & 2) ? 1.0 : 0.0};
    out = f;
  } else if (tag == "FlatClass") {
    FlatClass f;
    if (auto s = r.text("shape")) {
      if (*s == "power_ramp") {
        f.shape = FlatShape::PowerRamp;
      } else if (*s == "inverse_poly") {
        f.shape = FlatShape::InversePoly;
      } else {
        throw InvalidArgument("FlatClass: shape must be power_ramp or inverse_poly");
      }
    }
    r.get("A", f.A);
    r.get("theta", f.theta);
    r.get("n", f.n);
    r.get("N", f.N);
    r.get("eps", f.eps);
    r.get("eta", f.eta);
    out = f;
  } else if (tag == "Valley") {
    Valley f;
    if (auto s = r.text("form")) {
      if (*s == "diagonal") {
        f.form = ValleyForm::Diagonal;
      } else if (*s == "distance") {
        f.form = ValleyForm::Distance;
      } else {
        throw InvalidArgument("Valley: form must be diagonal or distance");
      }
    }
    r.get("alpha", f.alpha);
    r.get("A", f.A);
    r.get("N", f.N);
    r.get("eps", f.eps);
    if (r.has("slope")) {
      if (r.has("aL") || r.has("bL")) throw InvalidArgument("Valley: give either slope or aL/bL");
      double s = 0.0;
      r.get("slope", s);
      // line v = s u has normal (s, -1)
      f.aL = s;
      f.bL = -1.0;
    } else {
      r.get("aL", f.aL);
      r.get("bL", f.bL);
    }
    const double norm = std::hypot(f.aL, f.bL);
    if (!(norm > 0.0)) throw InvalidArgument("Valley: line normal must be nonzero");
    f.aL /= norm;
    f.bL /= norm;
    if (f.aL < 0.0 || (f.aL == 0.0 && f.bL < 0.0)) {
      f.aL = -f.aL;
      f.bL = -f.bL;
    }
    out = f;
  } else {
    throw InvalidArgument("unknown family tag '" + std::string(tag) + "'");
  }
  r.finish();
  validate(out);
  return out;
}

void validate(const DensityFamily& family) {
  std::visit(
      overloaded{
          [](const OneDAsym1& f) {
            const std::string t = "OneDAsym1";
            require(f.N >= 1, t, "N >= 1");
            require(f.a_minus >= 0.0, t, "a_minus >= 0");
            require(f.a_minus <= f.a_plus, t, "a_minus <= a_plus");
          },
          [](const OneDAsym2& f) {
            const std::string t = "OneDAsym2";
            require(f.N_minus >= 0 && f.N_plus >= 0, t, "N_minus, N_plus >= 0");
            require(f.N_minus + f.N_plus >= 1, t, "at least two states");
            require(f.a_minus >= 0.0 && f.a_plus >= 0.0, t, "a_minus, a_plus >= 0");
          },
          [](const ExpLinear& f) {
            const std::string t = "ExpLinear";
            require(f.N >= 2, t, "N >= 2");
            require(std::abs(f.a) + std::abs(f.b) > 0.0, t, "|a| + |b| > 0");
            require(std::max(std::abs(f.a), std::abs(f.b)) <= f.N, t, "max(|a|,|b|) <= N");
          },
          [](const ExpFalloff& f) {
            const std::string t = "ExpFalloff";
            require(f.N >= 2, t, "N >= 2");
            require(f.a > 0.0 && f.a <= f.A, t, "0 < a <= A");
            require(f.C >= 1.0 && f.A <= f.C * f.a, t, "A/a <= C with C >= 1");
            require(f.eps > 0.0 && f.eps <= 1.0, t, "0 < eps <= 1");
            require(f.eps * f.A <= f.N * (1 + 1e-12) && f.N <= f.a / f.eps * (1 + 1e-12), t, "eps A <= N <= a/eps");
            require(f.z0[0] >= 0.0 && f.z0[0] <= 1.0 && f.z0[1] >= 0.0 && f.z0[1] <= 1.0, t, "z0 in [0,1]^2");
            require(f.corner >= 0 && f.corner <= 3, t, "corner in 0..3");
          },
          [](const FlatClass& f) {
            const std::string t = "FlatClass";
            require(f.n >= 1 && f.n <= kMaxDimension, t, "1 <= n <= " + std::to_string(kMaxDimension));
            require(f.shape != FlatShape::InversePoly || f.n == 2, t, "inverse_poly needs n = 2");
            require(f.A >= 1.0, t, "A >= 1");
            require(f.theta > 0.0, t, "theta > 0");
            require(f.N >= 2 && f.N >= f.A, t, "N >= A and N >= 2");
            require(f.eps > 0.0 && f.eps <= 1.0, t, "0 < eps <= 1");
            require(f.eta > 0.0 && f.eta <= 1.0, t, "0 < eta <= 1");
          },
          [](const Valley& f) {
            const std::string t = "Valley";
            require(f.N >= 1, t, "N >= 1");
            require(f.alpha >= 0.0, t, "alpha >= 0");
            require(f.A > 0.0, t, "A > 0");
            require(std::abs(f.aL * f.aL + f.bL * f.bL - 1.0) <= 1e-9, t, "aL^2 + bL^2 = 1");
            require(f.aL >= std::abs(f.bL), t, "aL >= |bL|");
            require(f.eps > 0.0 && f.eps < 1.0, t, "0 < eps < 1");
            require(f.eps * f.A <= f.N * (1 + 1e-12) && f.N <= f.A / f.eps * (1 + 1e-12), t, "eps A <= N <= A/eps");
          },
      },
      family);
}

Discretization discretize(const DensityFamily& family) {
  validate(family);
  Discretization d;
  const CellModel m = cell_model(family);
  d.grid = std::visit(overloaded{
                          [](const OneDAsym1& f) { return Grid::line(-f.N, f.N); },
                          [](const OneDAsym2& f) { return Grid::line(-f.N_minus, f.N_plus); },
                          [](const ExpLinear& f) { return Grid::cube(2, 1, f.N); },
                          [](const ExpFalloff& f) { return Grid::cube(2, 1, f.N); },
                          [](const FlatClass& f) { return Grid::cube(f.n, 1, f.N); },
                          [](const Valley& f) { return Grid::cube(2, -f.N + 1, f.N); },
                      },
                      family);
  d.log_f.resize(d.grid.size());
  double c[kMaxDimension];
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    const Point p = d.grid.point(i);
    if (const auto* v = std::get_if<Valley>(&family); v && v->form == ValleyForm::Diagonal) {
      // lattice form, exact in the integer x1 + x2 - 1
      d.log_f[i] = v->alpha * std::log1p(v->A / v->N * std::abs(p[0] + p[1] - 1));
      continue;
    }
    if (const auto* e = std::get_if<ExpLinear>(&family)) {
      d.log_f[i] = (e->a * p[0] + e->b * p[1] - (e->a + e->b) / 2) / e->N;
      continue;
    }
    m.center(p, c);
    d.log_f[i] = m.log_f(c);
  }
  return d;
}

GridChain build_chain(const DensityFamily& family) {
  Discretization d = discretize(family);
  return build_metropolis_log(d.grid, std::move(d.log_f));
}

double discretization_error(const DensityFamily& family, int q) {
  if (q < 2) throw InvalidArgument("discretization_error needs at least 2 quadrature points per cell");
  const Discretization d = discretize(family);
  const CellModel m = cell_model(family);
  const GaussRule rule = gauss_legendre(q);
  const int dim = m.dim;
  std::size_t nodes = 1;
  for (int i = 0; i < dim; ++i) nodes *= static_cast<std::size_t>(q);
  double worst = 0.0;
  double c[kMaxDimension];
  double z[kMaxDimension];
  for (std::size_t s = 0; s < d.grid.size(); ++s) {
    m.center(d.grid.point(s), c);
    const double lf = d.log_f[s];
    detail::Accumulator acc;
    for (std::size_t j = 0; j < nodes; ++j) {
      std::size_t r = j;
      double w = 1.0;
      for (int i = 0; i < dim; ++i) {
        const std::size_t k = r % static_cast<std::size_t>(q);
        r /= static_cast<std::size_t>(q);
        z[i] = c[i] + 0.5 * m.side * rule.nodes[k];
        w *= 0.5 * rule.weights[k];
      }
      acc += w * std::exp(m.log_f(z) - lf);
    }
    worst = std::max(worst, std::abs(1.0 - acc.value()));
  }
  return worst;
}

double valley_level(const Valley& f, const Point& p) {
  if (f.form == ValleyForm::Diagonal) return static_cast<double>(p[0] + p[1] - 1);
  return (f.aL * (2 * p[0] - 1) + f.bL * (2 * p[1] - 1)) / (2.0 * f.N);
}

std::size_t peak_state(const DensityFamily& family, const Grid& grid) {
  if (const auto* e = std::get_if<ExpLinear>(&family)) {
    return grid.index(Point{e->a >= 0 ? e->N : 1, e->b >= 0 ? e->N : 1, 0, 0});
  }
  if (const auto* g = std::get_if<ExpFalloff>(&family)) {
    auto cell = [&](double z) { return std::clamp(static_cast<int>(std::floor(z * g->N)) + 1, 1, g->N); };
    return grid.index(Point{cell(g->z0[0]), cell(g->z0[1]), 0, 0});
  }
  const Discretization d = discretize(family);
  return static_cast<std::size_t>(std::max_element(d.log_f.begin(), d.log_f.end()) - d.log_f.begin());
}

// ---------------------------------------------------------------- test functions

namespace {

double harmonic(int m) {
  double h = 0.0;
  for (int j = m; j >= 1; --j) h += 1.0 / j;
  return h;
}

double pi_mean(const TargetMeasure& t, const std::vector<double>& g) {
  const auto pi = t.probabilities();
  detail::Accumulator acc;
  for (std::size_t i = 0; i < g.size(); ++i) acc += pi[i] * g[i];
  return acc.value();
}

// f = g0 + c g1 with c chosen so that pi(f) = 0
double balance(const TargetMeasure& t, std::vector<double>& g0, const std::vector<double>& g1) {
  const double m1 = pi_mean(t, g1);
  if (m1 == 0.0) throw InvalidArgument("balancing constant undefined: second part has zero mean");
  const double c = -pi_mean(t, g0) / m1;
  for (std::size_t i = 0; i < g0.size(); ++i) g0[i] += c * g1[i];
  return c;
}

TestFunction finish(std::string label, const TargetMeasure& t, std::vector<double> f,
                    std::vector<std::pair<std::string, double>> constants) {
  const double m = pi_mean(t, f);
  for (double& v : f) v -= m;
  return TestFunction{std::move(label), StateFunction(std::move(f)), std::move(constants)};
}

struct Interval {
  double a_minus, a_plus;
  int lo, hi;
};

Interval interval_of(const DensityFamily& family) {
  if (const auto* f = std::get_if<OneDAsym1>(&family)) return {f->a_minus, f->a_plus, -f->N, f->N};
  if (const auto* f = std::get_if<OneDAsym2>(&family)) return {f->a_minus, f->a_plus, -f->N_minus, f->N_plus};
  throw InvalidArgument("test function needs a one-dimensional family");
}

TestFunction step_function(const std::string& label, const Interval& iv, const TargetMeasure& t) {
  if (iv.hi < 1) throw InvalidArgument(label + ": needs states on both sides of 0");
  const auto pi = t.probabilities();
  detail::Accumulator xi_acc;
  for (int k = iv.lo; k <= 0; ++k) xi_acc += pi[static_cast<std::size_t>(k - iv.lo)];
  const double xi = xi_acc.value();
  std::vector<double> f;
  for (int k = iv.lo; k <= iv.hi; ++k) f.push_back(k <= 0 ? 1.0 - xi : -xi);
  return finish(label, t, std::move(f), {{"xi", xi}});
}

bool is_one(double a) { return a == 1.0; }

}  // namespace

std::vector<std::string> test_function_labels(const DensityFamily& family) {
  std::vector<std::string> out;
  if (const auto* f = std::get_if<OneDAsym1>(&family)) {
    out.push_back("asym1:step");
    if (f->a_minus > 0.0 && f->a_minus < 1.0) out.push_back("asym1:a<1");
    if (is_one(f->a_minus) && f->N >= 2) out.push_back("asym1:a=1");
    out.push_back("generic:axis0");
    return out;
  }
  if (const auto* f = std::get_if<OneDAsym2>(&family)) {
    if (f->N_plus >= 1) out.push_back("asym2:step");
    out.push_back("asym2:linear");
    if (f->N_minus >= 1 && f->N_plus >= 1) out.push_back("asym2:piecewise");
    if (std::min(f->a_minus, f->a_plus) == 1.0 && f->N_minus >= 2 && f->N_plus >= 2) out.push_back("asym2:loglog");
    return out;
  }
  const int dim = std::visit(overloaded{
                                 [](const FlatClass& f) { return f.n; },
                                 [](const auto&) { return 2; },
                             },
                             family);
  if (std::holds_alternative<Valley>(family)) out.push_back("valley:antisym");
  for (int a = 0; a < dim; ++a) out.push_back("generic:axis" + std::to_string(a));
  return out;
}

TestFunction test_function(const DensityFamily& family, std::string_view label) {
  const Discretization d = discretize(family);
  return test_function(family, label, TargetMeasure::from_log_weights(d.log_f));
}

TestFunction test_function(const DensityFamily& family, std::string_view label_view, const TargetMeasure& t) {
  const std::string label(label_view);
  const Discretization d = discretize(family);
  if (t.size() != d.grid.size()) throw InvalidArgument("target does not match the family's grid");

  if (label.rfind("generic:axis", 0) == 0) {
    int axis = -1;
    const std::string rest = label.substr(12);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), axis);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || axis < 0 || axis >= d.grid.dimension()) {
      throw InvalidArgument("unknown test function '" + label + "' for this grid");
    }
    std::vector<double> f(d.grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = d.grid.point(i)[static_cast<std::size_t>(axis)];
    return finish(label, t, std::move(f), {});
  }

  if (label == "valley:antisym") {
    const auto* v = std::get_if<Valley>(&family);
    if (!v) throw InvalidArgument(label + " applies to the Valley family only");
    std::vector<double> f(d.grid.size());
    if (v->form == ValleyForm::Diagonal) {
      // partial sums of m^{-alpha}, antisymmetric about x1 + x2 = 1
      const int jmax = 2 * v->N;
      std::vector<double> G(static_cast<std::size_t>(jmax) + 1, 0.0);
      for (int m = 1; m <= jmax; ++m) G[static_cast<std::size_t>(m)] = G[static_cast<std::size_t>(m) - 1] + std::pow(m, -v->alpha);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const Point p = d.grid.point(i);
        const int j = p[0] + p[1] - 1;
        f[i] = j == 0 ? 0.0 : (j > 0 ? 1.0 : -1.0) * G[static_cast<std::size_t>(std::abs(j))];
      }
    } else {
      // sgn(s) * int_0^{A|s|} (1+r)^{-alpha} dr
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double s = valley_level(*v, d.grid.point(i));
        const double r = v->A * std::abs(s);
        const double mag = std::abs(v->alpha - 1.0) < 1e-12 ? std::log1p(r)
                                                             : (std::pow(1.0 + r, 1.0 - v->alpha) - 1.0) / (1.0 - v->alpha);
        f[i] = s == 0.0 ? 0.0 : (s > 0 ? mag : -mag);
      }
    }
    return finish(label, t, std::move(f), {});
  }

  const Interval iv = interval_of(family);
  const bool first = std::holds_alternative<OneDAsym1>(family);
  auto states = [&](auto&& fn) {
    std::vector<double> g;
    for (int k = iv.lo; k <= iv.hi; ++k) g.push_back(fn(k));
    return g;
  };

  if (label == "asym1:step" || label == "asym2:step") {
    if (first != (label == "asym1:step")) throw InvalidArgument(label + " does not apply to " + family_tag(family));
    return step_function(label, iv, t);
  }
  if (label == "asym1:a<1") {
    if (!first) throw InvalidArgument(label + " applies to OneDAsym1 only");
    if (!(iv.a_minus > 0.0 && iv.a_minus < 1.0)) throw InvalidArgument(label + " requires 0 < a_minus < 1");
    std::vector<double> g0 = states([](int k) { return k <= 0 ? static_cast<double>(-k) : 0.0; });
    const double ex = 1.0 + iv.a_minus - iv.a_plus;
    const std::vector<double> g1 = states([ex](int k) { return k > 0 ? -std::pow(k, ex) : 0.0; });
    const double c = balance(t, g0, g1);
    return finish(label, t, std::move(g0), {{"c_minus", 1.0}, {"c_plus", c}});
  }
  if (label == "asym1:a=1") {
    if (!first) throw InvalidArgument(label + " applies to OneDAsym1 only");
    if (!is_one(iv.a_minus) || iv.hi < 2) throw InvalidArgument(label + " requires a_minus = 1 and N >= 2");
    std::vector<double> g0 = states([](int k) { return k <= 0 ? harmonic(-k) : 0.0; });
    const double ap = iv.a_plus;
    const std::vector<double> g1 = states([ap](int k) { return k > 0 ? -std::pow(k, 1.0 - ap) * std::log(k) : 0.0; });
    const double c = balance(t, g0, g1);
    return finish(label, t, std::move(g0), {{"c_minus", 1.0}, {"c_plus", c}});
  }
  if (label == "asym2:linear") {
    if (first) throw InvalidArgument(label + " applies to OneDAsym2 only");
    return finish(label, t, states([](int k) { return static_cast<double>(k); }), {});
  }
  if (label == "asym2:piecewise") {
    if (first) throw InvalidArgument(label + " applies to OneDAsym2 only");
    const int Nm = -iv.lo;
    const int Np = iv.hi;
    if (Nm < 1 || Np < 1) throw InvalidArgument(label + " needs N_minus, N_plus >= 1");
    const double sp = std::pow(Np, 1.0 + iv.a_plus);
    const double sm = std::pow(Nm, 1.0 + iv.a_minus);
    std::vector<double> g0 = states([sp](int k) { return k <= 0 ? -sp * k : 0.0; });
    const std::vector<double> g1 = states([sm](int k) { return k > 0 ? sm * k : 0.0; });
    const double c = balance(t, g0, g1);
    return finish(label, t, std::move(g0), {{"c", c}});
  }
  if (label == "asym2:loglog") {
    if (first) throw InvalidArgument(label + " applies to OneDAsym2 only");
    const int Nm = -iv.lo;
    const int Np = iv.hi;
    if (std::min(iv.a_minus, iv.a_plus) != 1.0 || Nm < 2 || Np < 2) {
      throw InvalidArgument(label + " requires min(a_minus, a_plus) = 1 and N_minus, N_plus >= 2");
    }
    // scale of the negative side and of the positive side
    double s_neg = 0.0;
    double s_pos = 0.0;
    if (is_one(iv.a_minus) && is_one(iv.a_plus)) {
      s_neg = -double(Np) * Np * std::log(Np);
      s_pos = double(Nm) * Nm * std::log(Nm);
    } else if (is_one(iv.a_minus)) {
      s_neg = -std::pow(Np, 1.0 + iv.a_plus);
      s_pos = double(Nm) * Nm;
    } else {
      s_neg = double(Np) * Np;
      s_pos = -std::pow(Nm, 1.0 + iv.a_minus);
    }
    const bool balance_pos = !(is_one(iv.a_plus) && !is_one(iv.a_minus));
    std::vector<double> neg = states([s_neg](int k) { return k < 0 ? s_neg * harmonic(-k) : 0.0; });
    std::vector<double> pos = states([s_pos](int k) { return k > 0 ? s_pos * harmonic(k) : 0.0; });
    double c = 0.0;
    if (balance_pos) {
      c = balance(t, neg, pos);
      return finish(label, t, std::move(neg), {{"c", c}});
    }
    c = balance(t, pos, neg);
    return finish(label, t, std::move(pos), {{"c", c}});
  }
  throw InvalidArgument("unknown test function '" + label + "' for " + family_tag(family));
}

}  // namespace metrogap
