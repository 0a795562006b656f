#include "metrogap/pathbound.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "metrogap/error.hpp"

namespace metrogap {

namespace {

constexpr int kChunks = 64;

using Load = std::vector<long double>;

std::size_t lower_end(const Grid& g, const Leg& l) {
  if (l.steps > 0) return l.start;
  return l.start - static_cast<std::size_t>(-l.steps) * g.stride(l.axis);
}

// Prefix sums of 1/w^2 along each line, per axis.
std::vector<Load> leg_length_tables(const GridChain& chain, const std::vector<double>& w) {
  const Grid& g = chain.grid();
  std::vector<Load> p(static_cast<std::size_t>(g.dimension()), Load(g.size(), 0.0L));
  for (int a = 0; a < g.dimension(); ++a) {
    auto& pa = p[static_cast<std::size_t>(a)];
    const std::size_t s = g.stride(a);
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (g.offset(x, a) == 0) continue;
      const std::size_t e = chain.edge_id(x - s, a);
      pa[x] = pa[x - s] + 1.0L / (static_cast<long double>(w[e]) * w[e]);
    }
  }
  return p;
}

void finish_report(const GridChain& chain, const std::vector<long double>& load, const std::vector<double>& w,
                   double factor, BoundReport& r) {
  const auto edges = chain.edges();
  r.edge_W.assign(edges.size(), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (load[e] == 0.0L) continue;
    if (!(edges[e].conductance > 0.0)) {
      throw InvalidArgument("path uses edge " + std::to_string(e) + " which has zero conductance");
    }
    const long double ww = static_cast<long double>(w[e]) * w[e];
    r.edge_W[e] = static_cast<double>(factor * ww * load[e] / edges[e].conductance);
  }
  r.argmax_edge = 0;
  r.W = 0.0;
  for (std::size_t e = 0; e < r.edge_W.size(); ++e) {
    if (r.edge_W[e] > r.W) {
      r.W = r.edge_W[e];
      r.argmax_edge = e;
    }
  }
  if (r.W > 0.0) r.lower_bound = (r.mode == TargetMode::Pairs ? 2.0 : 1.0) / r.W;

  auto& s = r.summary;
  if (r.edge_W.empty()) return;
  std::vector<double> sorted = r.edge_W;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = sorted[sorted.size() / 2];
  long double sum = 0.0L;
  for (double v : sorted) sum += v;
  s.mean = static_cast<double>(sum / sorted.size());
  s.decades.fill(0);
  for (double v : r.edge_W) {
    std::size_t k = s.decades.size() - 1;
    if (v > 0.0 && r.W > 0.0) {
      const double d = std::floor(-std::log10(v / r.W));
      if (d < static_cast<double>(k)) k = static_cast<std::size_t>(std::max(0.0, d));
    }
    ++s.decades[k];
  }
}

// 1D segment paths with all pairs: closed form in positive prefix/suffix sums.
std::vector<long double> segment_loads(const GridChain& chain, const std::vector<double>& w) {
  const std::size_t n = chain.size();
  const auto pi = chain.pi();
  std::vector<long double> left(n), right(n + 1, 0.0L);
  long double acc = 0.0L;
  for (std::size_t k = 0; k < n; ++k) left[k] = acc += pi[k];
  for (std::size_t k = n; k-- > 0;) right[k] = right[k + 1] + pi[k];
  const std::size_t m = n - 1;  // edge j joins j and j+1
  std::vector<long double> A(m), B(m + 1, 0.0L);
  acc = 0.0L;
  for (std::size_t j = 0; j < m; ++j) {
    acc += left[j] / (static_cast<long double>(w[j]) * w[j]);
    A[j] = acc;
  }
  for (std::size_t j = m; j-- > 0;) B[j] = B[j + 1] + right[j + 1] / (static_cast<long double>(w[j]) * w[j]);
  std::vector<long double> load(m);
  for (std::size_t b = 0; b < m; ++b) load[b] = 2.0L * (right[b + 1] * A[b] + left[b] * B[b + 1]);
  return load;
}

struct Chunk {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint64_t pairs = 0;
};

std::vector<Chunk> split_sources(std::size_t n) {
  const long double total = static_cast<long double>(n) * (n - 1) / 2.0L;
  std::vector<Chunk> chunks;
  std::size_t x = 0;
  long double done = 0.0L;
  for (int c = 1; c <= kChunks && x < n; ++c) {
    Chunk ch;
    ch.begin = x;
    const long double goal = total * c / kChunks;
    while (x < n && (done < goal || c == kChunks)) {
      done += static_cast<long double>(n - 1 - x);
      ch.pairs += n - 1 - x;
      ++x;
    }
    ch.end = x;
    if (ch.end > ch.begin) chunks.push_back(ch);
  }
  return chunks;
}

std::vector<long double> pair_loads(const GridChain& chain, const PathSystem& paths, const std::vector<double>& w,
                                    const BoundOptions& opt, BoundReport& r, std::size_t& chunks_done,
                                    std::size_t& chunk_count) {
  const Grid& g = chain.grid();
  const std::size_t n = g.size();
  const int dim = g.dimension();
  const auto pi = chain.pi();
  const auto lpi = chain.target().log_probabilities();
  const auto len_table = leg_length_tables(chain, w);

  auto chunks = split_sources(n);
  chunk_count = chunks.size();
  std::size_t usable = 0;
  std::uint64_t pairs = 0;
  while (usable < chunks.size() && pairs + chunks[usable].pairs <= opt.pair_cap) pairs += chunks[usable++].pairs;
  chunks_done = usable;
  r.pairs = pairs;

  // per chunk, per axis difference arrays indexed by lower endpoint
  std::vector<std::vector<Load>> diff(usable);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    Leg legs[kMaxDimension];
    for (std::size_t c; (c = next.fetch_add(1)) < usable;) {
      auto& d = diff[c];
      d.assign(static_cast<std::size_t>(dim), Load(n, 0.0L));
      for (std::size_t x = chunks[c].begin; x < chunks[c].end; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
          long double mult = 2.0L;
          if (opt.symmetry_reduction) mult = std::abs(lpi[x] - lpi[y]) <= 1e-12 * std::max(1.0, std::abs(lpi[x])) ? 2.0L : 1.0L;
          const int k = paths.canonical_legs(x, y, legs);
          long double len = 0.0L;
          for (int i = 0; i < k; ++i) {
            const auto& p = len_table[static_cast<std::size_t>(legs[i].axis)];
            const std::size_t lo = lower_end(g, legs[i]);
            const std::size_t hi = lo + static_cast<std::size_t>(std::abs(legs[i].steps)) * g.stride(legs[i].axis);
            len += p[hi] - p[lo];
          }
          const long double c_pair = mult * len * static_cast<long double>(pi[x]) * pi[y];
          for (int i = 0; i < k; ++i) {
            auto& da = d[static_cast<std::size_t>(legs[i].axis)];
            const std::size_t lo = lower_end(g, legs[i]);
            const std::size_t hi = lo + static_cast<std::size_t>(std::abs(legs[i].steps)) * g.stride(legs[i].axis);
            da[lo] += c_pair;
            da[hi] -= c_pair;
          }
        }
      }
    }
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(usable, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<Load> total(static_cast<std::size_t>(dim), Load(n, 0.0L));
  for (const auto& d : diff) {
    for (int a = 0; a < dim; ++a) {
      auto& ta = total[static_cast<std::size_t>(a)];
      const auto& da = d[static_cast<std::size_t>(a)];
      for (std::size_t x = 0; x < n; ++x) ta[x] += da[x];
    }
  }
  std::vector<long double> load(chain.edges().size(), 0.0L);
  for (int a = 0; a < dim; ++a) {
    auto& ta = total[static_cast<std::size_t>(a)];
    const std::size_t s = g.stride(a);
    for (std::size_t x = 0; x < n; ++x) {
      if (g.offset(x, a) > 0) ta[x] += ta[x - s];
      const std::size_t e = chain.edge_id(x, a);
      if (e != GridChain::npos) load[e] = std::max(0.0L, ta[x]);
    }
  }
  return load;
}

std::vector<long double> point_loads(const GridChain& chain, const PathSystem& paths, const std::vector<double>& w,
                                     BoundReport& r) {
  const Grid& g = chain.grid();
  const auto pi = chain.pi();
  std::vector<long double> load(chain.edges().size(), 0.0L);
  std::vector<Leg> legs;
  std::vector<std::size_t> path_edges;
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (x == paths.target()) continue;
    paths.legs(x, paths.target(), legs);
    path_edges.clear();
    long double len = 0.0L;
    for (const Leg& l : legs) {
      const std::size_t lo = lower_end(g, l);
      for (int i = 0; i < std::abs(l.steps); ++i) {
        const std::size_t e = chain.edge_id(lo + static_cast<std::size_t>(i) * g.stride(l.axis), l.axis);
        if (e == GridChain::npos) throw InvalidArgument("path from state " + std::to_string(x) + " leaves the grid");
        if (!(chain.edges()[e].conductance > 0.0)) {
          throw InvalidArgument("path from state " + std::to_string(x) + " uses an edge with zero conductance");
        }
        path_edges.push_back(e);
        len += 1.0L / (static_cast<long double>(w[e]) * w[e]);
      }
    }
    const long double c = len * static_cast<long double>(pi[x]);
    for (std::size_t e : path_edges) load[e] += c;
    ++r.pairs;
  }
  return load;
}

}  // namespace

BoundReport compute_W(const GridChain& chain, const PathSystem& paths, const WeightFunction& weight,
                      const BoundOptions& options) {
  if (!(paths.grid() == chain.grid())) throw InvalidArgument("path system and chain live on different grids");
  BoundReport r;
  r.mode = paths.mode();
  r.rule = paths.rule();
  r.weight = weight.describe();
  const auto w = weight.evaluate(chain);

  if (paths.mode() == TargetMode::ToPoint) {
    if (options.symmetry_reduction) throw InvalidArgument("symmetry reduction needs all pairs as targets");
    const auto load = point_loads(chain, paths, w, r);
    finish_report(chain, load, w, 1.0, r);
    return r;
  }

  r.symmetry_reduction = options.symmetry_reduction;
  const std::uint64_t n = chain.size();
  const std::uint64_t total = n * (n - 1) / 2;
  if (paths.rule() == PathRule::OneDSegment && !options.symmetry_reduction && total <= options.pair_cap) {
    r.pairs = total;
    finish_report(chain, segment_loads(chain, w), w, 1.0, r);
    return r;
  }
  std::size_t done = 0, count = 0;
  const auto load = pair_loads(chain, paths, w, options, r, done, count);
  finish_report(chain, load, w, 1.0, r);
  if (options.symmetry_reduction) {
    for (double& v : r.edge_W) v *= 2.0;
    r.W *= 2.0;
    r.lower_bound = r.W > 0.0 ? 2.0 / r.W : 0.0;
    r.summary.min *= 2.0;
    r.summary.median *= 2.0;
    r.summary.mean *= 2.0;
    r.summary.max *= 2.0;
  }
  if (done < count) {
    throw CapExceeded("pair enumeration needs " + std::to_string(total) + " pairs, cap is " +
                          std::to_string(options.pair_cap),
                      r.W);
  }
  return r;
}

void write_edge_csv(std::ostream& out, const GridChain& chain, const BoundReport& report) {
  const Grid& g = chain.grid();
  const int dim = g.dimension();
  out << "edge,axis";
  for (int a = 0; a < dim; ++a) out << ",lower" << a;
  for (int a = 0; a < dim; ++a) out << ",upper" << a;
  out << ",W_e\n";
  const auto edges = chain.edges();
  char buf[32];
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Point lo = g.point(edges[e].lower);
    const Point hi = g.point(edges[e].upper);
    out << e << ',' << edges[e].axis;
    for (int a = 0; a < dim; ++a) out << ',' << lo[static_cast<std::size_t>(a)];
    for (int a = 0; a < dim; ++a) out << ',' << hi[static_cast<std::size_t>(a)];
    std::snprintf(buf, sizeof buf, "%.12g", report.edge_W[e]);
    out << ',' << buf << '\n';
  }
}

}  // namespace metrogap
