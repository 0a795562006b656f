#include "metrogap/fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "metrogap/error.hpp"

namespace metrogap {

namespace {

struct Line {
  double slope = 0.0;
  double residual = 0.0;
};

// y = slope x + c, residual is the RMS deviation
Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - l.slope * (x[i] - mx);
    ss += e * e;
  }
  l.residual = std::sqrt(ss / n);
  return l;
}

double parse_number(std::string_view t) {
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InvalidArgument("bad number '" + std::string(t) + "' in scaling law");
  }
  return v;
}

}  // namespace

ScalingLaw parse_law(std::string_view text) {
  ScalingLaw law;
  if (text.starts_with("power:")) {
    law.s = parse_number(text.substr(6));
    return law;
  }
  if (text.starts_with("powerlog:")) {
    const auto rest = text.substr(9);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw InvalidArgument("powerlog law needs S:R");
    law.s = parse_number(rest.substr(0, colon));
    const double r = parse_number(rest.substr(colon + 1));
    if (r != -1.0 && r != 0.0 && r != 1.0) throw InvalidArgument("log power must be -1, 0 or 1");
    law.r = static_cast<int>(r);
    return law;
  }
  throw InvalidArgument("scaling law must be power:S or powerlog:S:R");
}

std::string to_string(const ScalingLaw& law) {
  std::string s = "N^" + std::to_string(law.s);
  if (law.r != 0) s += " (log N)^" + std::to_string(law.r);
  return s;
}

FitResult fit_exponent(const std::vector<double>& N, const std::vector<double>& lambda, const ScalingLaw& law,
                       const FitTolerance& tolerance) {
  if (N.size() != lambda.size()) throw InvalidArgument("fit needs one lambda per N");
  if (N.size() < 4) throw InvalidArgument("fit needs at least four points");
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(lambda[i] > 0.0)) throw InvalidArgument("fit needs positive lambda");
    if (!(N[i] >= 2.0)) throw InvalidArgument("fit needs N >= 2");
    if (i > 0 && !(N[i] > N[i - 1])) throw InvalidArgument("fit needs strictly increasing N");
  }
  std::vector<double> x(N.size());
  for (std::size_t i = 0; i < N.size(); ++i) x[i] = std::log(N[i]);
  auto fit_with = [&](int r) {
    std::vector<double> y(N.size());
    for (std::size_t i = 0; i < N.size(); ++i) y[i] = std::log(lambda[i]) - r * std::log(x[i]);
    return least_squares(x, y);
  };
  FitResult out;
  out.law = law;
  bool first = true;
  for (int r : {0, 1, -1}) {
    const Line l = fit_with(r);
    if (first || l.residual < out.model_residual) {
      out.model_r = r;
      out.model_s = l.slope;
      out.model_residual = l.residual;
      first = false;
    }
  }
  const Line fixed = fit_with(law.r);
  out.s = fixed.slope;
  out.residual = fixed.residual;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < N.size(); ++i) {
    const double c = lambda[i] * std::pow(N[i], -law.s) * std::pow(x[i], -law.r);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  out.ratio = hi / lo;
  out.pass = std::abs(out.s - law.s) <= tolerance.exponent && (law.r == 0 || out.ratio <= tolerance.ratio);
  return out;
}

}  // namespace metrogap
