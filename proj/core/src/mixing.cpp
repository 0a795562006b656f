#include "metrogap/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

#include "metrogap/error.hpp"
#include "metrogap/spectral.hpp"

namespace metrogap {

namespace {

constexpr double kTail = 1e-17;

// Poisson(t) weights up to the first index past t where the remaining tail,
// bounded by a geometric series, is below kTail.
std::vector<double> poisson_weights(double t) {
  std::vector<double> p;
  if (t == 0.0) return {1.0};
  const double lt = std::log(t);
  for (int m = 0;; ++m) {
    p.push_back(std::exp(-t + m * lt - std::lgamma(m + 1.0)));
    const double q = t / (m + 1.0);
    if (q < 1.0 && p.back() * q / (1.0 - q) < kTail) break;
  }
  return p;
}

// (v K)(y) = hold(y) v(y) + sum_{x ~ y} v(x) Q(x,y) / pi(x)
void apply_row(const GridChain& chain, const std::vector<double>& v, std::vector<double>& out) {
  const auto pi = chain.pi();
  const auto hold = chain.holding();
  const auto edges = chain.edges();
  for (std::size_t y = 0; y < v.size(); ++y) {
    double s = hold[y] * v[y];
    for (const auto& inc : chain.incident(y)) s += v[inc.neighbor] * (edges[inc.edge].conductance / pi[inc.neighbor]);
    out[y] = s;
  }
}

// Symmetrised kernel D^{1/2} H_tau D^{-1/2}; all terms are nonnegative.
Eigen::MatrixXd symmetric_base(const GridChain& chain, double tau) {
  const Eigen::SparseMatrix<double> S = symmetric_operator(chain);
  const auto n = static_cast<Eigen::Index>(chain.size());
  const auto p = poisson_weights(tau);
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd acc = p[0] * X;
  for (std::size_t m = 1; m < p.size(); ++m) {
    X = S * X;
    acc += p[m] * X;
  }
  return acc;
}

void symmetrize_from_lower(Eigen::MatrixXd& a) {
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
}

// Product of two commuting symmetric matrices; only one triangle is formed.
Eigen::MatrixXd sym_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c(a.rows(), a.cols());
  c.triangularView<Eigen::Lower>() = a * b;
  symmetrize_from_lower(c);
  return c;
}

// Square of a symmetrised kernel with its action on sqrt(pi) reset to the
// identity; that component never contracts, so its rounding error would double
// at every squaring.
Eigen::MatrixXd square_kernel(const Eigen::MatrixXd& k, const Eigen::VectorXd& root) {
  Eigen::MatrixXd c = sym_product(k, k);
  const Eigen::VectorXd d = c * root - root;
  const double a = root.dot(d);
  c.noalias() -= root * d.transpose();
  c.noalias() -= d * root.transpose();
  c.noalias() += a * root * root.transpose();
  return c;
}

Eigen::VectorXd sqrt_pi(const GridChain& chain) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(chain.size()));
  for (std::size_t x = 0; x < chain.size(); ++x) s(static_cast<Eigen::Index>(x)) = std::sqrt(chain.pi()[x]);
  return s;
}

// Subnormal results flush to zero while the guard lives.
class FlushSubnormals {
 public:
  explicit FlushSubnormals(bool enable) {
#if defined(__SSE2__)
    if (enable) {
      saved_ = _mm_getcsr();
      active_ = true;
      _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
      _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
    }
#else
    (void)enable;
#endif
  }
  ~FlushSubnormals() {
#if defined(__SSE2__)
    if (active_) _mm_setcsr(saved_);
#endif
  }
  FlushSubnormals(const FlushSubnormals&) = delete;
  FlushSubnormals& operator=(const FlushSubnormals&) = delete;

 private:
  unsigned saved_ = 0;
  bool active_ = false;
};

struct Distances {
  double tv = 0.0;
  double sup = 0.0;
  std::size_t tv_start = 0;
  std::size_t sup_start = 0;
};

Distances distances(const Eigen::MatrixXd& k, const std::vector<double>& pi, const std::vector<double>& r) {
  const std::size_t n = pi.size();
  Distances d;
  for (std::size_t x = 0; x < n; ++x) {
    long double tv = 0.0L;
    double sup = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double h = k(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) / (r[x] * r[y]);
      const double dev = std::abs(h - 1.0);
      tv += static_cast<long double>(pi[y]) * dev;
      sup = std::max(sup, dev);
    }
    if (static_cast<double>(tv) > d.tv) {
      d.tv = static_cast<double>(tv);
      d.tv_start = x;
    }
    if (sup > d.sup) {
      d.sup = sup;
      d.sup_start = x;
    }
  }
  return d;
}

}  // namespace

std::vector<double> heat_kernel_row(const GridChain& chain, std::size_t x, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
  if (x >= chain.size()) throw InvalidArgument("start state out of range");
  std::vector<double> v(chain.size(), 0.0), next(chain.size());
  v[x] = 1.0;
  std::vector<long double> acc(chain.size(), 0.0L);
  const auto p = poisson_weights(t);
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (m > 0) {
      apply_row(chain, v, next);
      v.swap(next);
    }
    for (std::size_t y = 0; y < v.size(); ++y) acc[y] += static_cast<long double>(p[m]) * v[y];
  }
  return {acc.begin(), acc.end()};
}

Eigen::MatrixXd heat_kernel(const GridChain& chain, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
  const int j = t > 1.0 ? static_cast<int>(std::ceil(std::log2(t))) : 0;
  Eigen::MatrixXd k = symmetric_base(chain, std::ldexp(t, -j));
  const Eigen::VectorXd s = sqrt_pi(chain);
  for (int i = 0; i < j; ++i) k = square_kernel(k, s);
  const auto pi = chain.pi();
  const auto n = static_cast<Eigen::Index>(chain.size());
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) k(x, y) *= std::sqrt(pi[static_cast<std::size_t>(y)] / pi[static_cast<std::size_t>(x)]);
  }
  return k;
}

bool MixingReport::sandwich_holds(double rel) const {
  return relaxation <= T_TV * (1.0 + rel) && T_TV <= T_inf * (1.0 + rel) && T_inf <= upper * (1.0 + rel);
}

MixingReport mixing_times(const GridChain& chain, const MixingOptions& options) {
  const std::size_t n = chain.size();
  if (n > options.dense_cap) {
    throw CapExceeded("mixing times need " + std::to_string(n) + " states, cap is " + std::to_string(options.dense_cap));
  }
  MixingReport r;
  if (options.lambda) {
    r.lambda = *options.lambda;
  } else {
    SpectralOptions so;
    so.mode = SolverMode::Dense;
    so.dense_cap = options.dense_cap;
    r.lambda = spectral_gap(chain, so).lambda;
  }
  if (!(r.lambda > 0.0)) throw InvalidArgument("mixing times need a positive spectral gap");
  const double pi_min = chain.target().min_probability();
  r.relaxation = 1.0 / r.lambda;
  r.upper = (1.0 + std::log(1.0 / pi_min)) / r.lambda;
  const double t_max = 4.0 * r.upper;
  const double threshold = std::exp(-1.0);

  const int levels = std::max({0, static_cast<int>(std::ceil(std::log2(t_max))),
                               static_cast<int>(std::ceil(std::log2(t_max * r.lambda / options.relative_resolution)))});
  const double tau = std::ldexp(t_max, -levels);
  r.resolution = tau;

  const std::vector<double> pi(chain.pi().begin(), chain.pi().end());
  std::vector<double> root(n);
  for (std::size_t x = 0; x < n; ++x) root[x] = std::sqrt(pi[x]);

  const FlushSubnormals flush(pi_min >= 1e-280);

  // ladder[j] = symmetrised H at time tau 2^j
  std::vector<Eigen::MatrixXd> ladder;
  ladder.reserve(static_cast<std::size_t>(levels) + 1);
  ladder.push_back(symmetric_base(chain, tau));
  const Eigen::VectorXd s = sqrt_pi(chain);
  for (int j = 1; j <= levels; ++j) ladder.push_back(square_kernel(ladder.back(), s));
  for (int j = 0; j <= levels; ++j) {
    const Distances d = distances(ladder[static_cast<std::size_t>(j)], pi, root);
    r.curve.push_back({std::ldexp(tau, j), d.tv, d.sup});
  }
  const DistancePoint& end = r.curve.back();
  if (end.tv_worst > threshold || end.sup_worst > threshold) {
    throw ConvergenceError("distance still above 1/e at the end of the bisection bracket", t_max,
                           std::max(end.tv_worst, end.sup_worst));
  }

  // largest m with distance(m tau) > 1/e: per-start values found bit by bit
  // from the top, dropping starts that can no longer reach the lead
  auto search = [&](bool use_sup, std::size_t& worst) {
    std::vector<std::size_t> rows(n);
    for (std::size_t x = 0; x < n; ++x) rows[x] = x;
    std::vector<std::uint64_t> m(n, 0);
    std::vector<double> dist(n, 0.0);
    std::vector<char> moved(n, 0);
    // rows of the symmetrised kernel at the accepted time; unit rows until a start moves
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (int j = levels - 1; j >= 0; --j) {
      const auto& step = ladder[static_cast<std::size_t>(j)];
      std::vector<Eigen::Index> mv;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (moved[rows[i]]) mv.push_back(static_cast<Eigen::Index>(i));
      }
      Eigen::MatrixXd gm(static_cast<Eigen::Index>(mv.size()), static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < mv.size(); ++k) gm.row(static_cast<Eigen::Index>(k)) = g.row(mv[k]);
      const Eigen::MatrixXd pm = gm * step;
      Eigen::MatrixXd cand(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0, k = 0; i < rows.size(); ++i) {
        if (k < mv.size() && mv[k] == static_cast<Eigen::Index>(i)) {
          cand.row(static_cast<Eigen::Index>(i)) = pm.row(static_cast<Eigen::Index>(k++));
        } else {
          cand.row(static_cast<Eigen::Index>(i)) = step.row(static_cast<Eigen::Index>(rows[i]));
        }
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t x = rows[i];
        const auto ri = static_cast<Eigen::Index>(i);
        long double tv = 0.0L;
        double sup = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
          const double dev = std::abs(cand(ri, static_cast<Eigen::Index>(y)) / (root[x] * root[y]) - 1.0);
          tv += static_cast<long double>(pi[y]) * dev;
          sup = std::max(sup, dev);
        }
        const double d = use_sup ? sup : static_cast<double>(tv);
        if (d > threshold) {
          m[x] += std::uint64_t{1} << j;
          dist[x] = d;
          moved[x] = 1;
        } else {
          cand.row(ri) = g.row(ri);
        }
      }
      std::uint64_t lead = 0;
      for (std::size_t x : rows) lead = std::max(lead, m[x]);
      const std::uint64_t reach = (std::uint64_t{1} << j) - 1;
      std::vector<Eigen::Index> keep;
      std::vector<std::size_t> kept;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (m[rows[i]] + reach >= lead) {
          keep.push_back(static_cast<Eigen::Index>(i));
          kept.push_back(rows[i]);
        }
      }
      g.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < keep.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = cand.row(keep[i]);
      rows = std::move(kept);
    }
    std::uint64_t best = 0;
    bool any = false;
    worst = 0;
    for (std::size_t x : rows) {
      if (!moved[x]) continue;
      if (!any || m[x] > best || (m[x] == best && dist[x] > dist[worst])) {
        best = m[x];
        worst = x;
        any = true;
      }
    }
    if (!any) {
      // already mixed after one step: worst start by the distance at t = 0
      for (std::size_t x = 0; x < n; ++x) {
        const double d0 = use_sup ? std::max(1.0 / pi[x] - 1.0, 1.0) : 2.0 * (1.0 - pi[x]);
        if (x == 0 || d0 > dist[worst]) {
          worst = x;
          dist[x] = d0;
        }
      }
    }
    return static_cast<double>(best + 1) * tau;
  };
  r.T_TV = search(false, r.worst_start_TV);
  r.T_inf = search(true, r.worst_start_inf);
  return r;
}

void write_distance_csv(std::ostream& out, const std::vector<DistancePoint>& curve) {
  out << "t,tv_worst,sup_worst\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", p.t, p.tv_worst, p.sup_worst);
    out << buf;
  }
}

}  // namespace metrogap
