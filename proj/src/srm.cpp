#include "mmnn/srm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "mmnn/error.hpp"
#include "mmnn/parallel.hpp"

namespace mmnn {

namespace {

bool pair_less(const CrossPair& a, const CrossPair& b) {
  if (a.d != b.d) return a.d < b.d;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

bool is_edge(double L, double d) { return L * d < 2.0; }

// Number of leading pairs that are edges at L.
std::size_t prefix_end(const std::vector<CrossPair>& pairs, double L) {
  auto it = std::partition_point(pairs.begin(), pairs.end(),
                                 [L](const CrossPair& p) { return is_edge(L, p.d); });
  return static_cast<std::size_t>(it - pairs.begin());
}

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

// For every vertex, the index of the pair whose greedy step covers it
// (kNever if none). The greedy cover of a prefix of length p is then
// {v : time[v] < p}.
std::vector<std::size_t> cover_times(const std::vector<CrossPair>& pairs, std::size_t n) {
  std::vector<std::size_t> time(n, kNever);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const auto& p = pairs[t];
    if (time[p.i] == kNever && time[p.j] == kNever) time[p.i] = time[p.j] = t;
  }
  return time;
}

}  // namespace

std::vector<CrossPair> sorted_cross_pairs(const Sample& sample, const MetricOracle& oracle,
                                          unsigned threads) {
  const std::size_t n = sample.size();
  if (n >= std::numeric_limits<std::uint32_t>::max()) throw ValidationError("sample too large");
  std::vector<std::vector<CrossPair>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sample.labels[i] == sample.labels[j]) continue;
      rows[i].push_back({oracle(sample.points[i], sample.points[j]), static_cast<std::uint32_t>(i),
                         static_cast<std::uint32_t>(j)});
    }
  });
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<CrossPair> pairs;
  pairs.reserve(total);
  for (auto& r : rows) {
    pairs.insert(pairs.end(), r.begin(), r.end());
    std::vector<CrossPair>().swap(r);
  }
  std::sort(pairs.begin(), pairs.end(), pair_less);
  return pairs;
}

ConflictGraph ConflictGraph::from_edges(
    std::vector<Label> labels, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  ConflictGraph g;
  g.vertex_count = labels.size();
  for (auto& [a, b] : edges) {
    if (a >= g.vertex_count || b >= g.vertex_count) throw ValidationError("edge endpoint out of range");
    if (a == b) throw ValidationError("self-loop in conflict graph");
    if (labels[a] == labels[b]) throw ValidationError("conflict edge joins two same-label vertices");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.labels = std::move(labels);
  g.edges = std::move(edges);
  return g;
}

ConflictGraph build_conflict_graph(const Sample& sample, const MetricOracle& oracle, double L,
                                   unsigned threads) {
  if (!(L > 0.0)) throw ValidationError("L must be positive");
  sample.validate();
  const auto pairs = sorted_cross_pairs(sample, oracle, threads);
  ConflictGraph g;
  g.vertex_count = sample.size();
  g.labels = sample.labels;
  g.L = L;
  const std::size_t m = prefix_end(pairs, L);
  g.edges.reserve(m);
  for (std::size_t t = 0; t < m; ++t) g.edges.emplace_back(pairs[t].i, pairs[t].j);
  return g;
}

CoverResult greedy_cover(const ConflictGraph& g) {
  std::vector<bool> in(g.vertex_count, false);
  CoverResult r;
  for (const auto& [a, b] : g.edges) {
    if (in[a] || in[b]) continue;
    in[a] = in[b] = true;
  }
  for (std::uint32_t v = 0; v < g.vertex_count; ++v)
    if (in[v]) r.cover.push_back(v);
  r.size = r.cover.size();
  r.method = CoverMethod::Greedy2Approx;
  return r;
}

namespace {

struct BranchAndBound {
  std::vector<std::uint64_t> adj;
  std::size_t best = 0;
  std::uint64_t best_set = 0;

  void run(std::uint64_t removed, std::size_t count, std::uint64_t chosen) {
    if (count >= best) return;
    int v = -1;
    int max_deg = 0;
    int edge_ends = 0;
    for (std::size_t u = 0; u < adj.size(); ++u) {
      if (removed >> u & 1U) continue;
      const int deg = std::popcount(adj[u] & ~removed);
      edge_ends += deg;
      if (deg > max_deg) {
        max_deg = deg;
        v = static_cast<int>(u);
      }
    }
    if (v < 0) {
      best = count;
      best_set = chosen;
      return;
    }
    // Each cover vertex removes at most max_deg of the remaining edges.
    const int edges = edge_ends / 2;
    const std::size_t lower = count + static_cast<std::size_t>((edges + max_deg - 1) / max_deg);
    if (lower >= best) return;
    const std::uint64_t bit = std::uint64_t{1} << v;
    run(removed | bit, count + 1, chosen | bit);
    const std::uint64_t nb = adj[static_cast<std::size_t>(v)] & ~removed;
    run(removed | bit | nb, count + static_cast<std::size_t>(std::popcount(nb)), chosen | nb);
  }
};

}  // namespace

CoverResult exact_cover(const ConflictGraph& g, std::size_t limit) {
  if (limit > 64) throw ValidationError("exact cover limit cannot exceed 64");
  std::vector<std::uint32_t> verts;
  for (const auto& [a, b] : g.edges) {
    verts.push_back(a);
    verts.push_back(b);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  if (verts.size() > limit)
    throw CoverLimitError(std::to_string(verts.size()) + " conflicted vertices exceed the exact " +
                          "cover limit of " + std::to_string(limit) + "; use the greedy cover");

  std::map<std::uint32_t, std::size_t> local;
  for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = i;
  BranchAndBound bb;
  bb.adj.assign(verts.size(), 0);
  for (const auto& [a, b] : g.edges) {
    const auto la = local[a], lb = local[b];
    bb.adj[la] |= std::uint64_t{1} << lb;
    bb.adj[lb] |= std::uint64_t{1} << la;
  }
  const auto greedy = greedy_cover(g);
  bb.best = greedy.size + 1;
  bb.run(0, 0, 0);

  CoverResult r;
  r.method = CoverMethod::Exact;
  for (std::size_t i = 0; i < verts.size(); ++i)
    if (bb.best_set >> i & 1U) r.cover.push_back(verts[i]);
  r.size = r.cover.size();
  return r;
}

double breakpoint_for(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("breakpoint needs a positive distance");
  double L = 2.0 / d;
  while (L * d < 2.0) L = std::nextafter(L, std::numeric_limits<double>::infinity());
  return L;
}

CandidateSet candidate_L_values(const std::vector<CrossPair>& sorted_pairs) {
  CandidateSet c;
  double last_d = -1.0;
  for (const auto& p : sorted_pairs) {
    if (p.d == 0.0) {
      c.zero_pairs.emplace_back(p.i, p.j);
      continue;
    }
    if (p.d == last_d) continue;
    last_d = p.d;
    c.breakpoints.push_back(breakpoint_for(p.d));
  }
  std::sort(c.breakpoints.begin(), c.breakpoints.end());
  c.breakpoints.erase(std::unique(c.breakpoints.begin(), c.breakpoints.end()), c.breakpoints.end());
  if (c.breakpoints.empty()) {
    c.values = {1.0, 2.0, 4.0};
  } else {
    c.values.reserve(c.breakpoints.size() + 2);
    c.values.push_back(c.breakpoints.front() / 2.0);
    c.values.insert(c.values.end(), c.breakpoints.begin(), c.breakpoints.end());
    c.values.push_back(c.breakpoints.back() * 2.0);
  }
  return c;
}

CandidateSet candidate_L_values(const Sample& sample, const MetricOracle& oracle,
                                unsigned threads) {
  sample.validate();
  return candidate_L_values(sorted_cross_pairs(sample, oracle, threads));
}

namespace {

// Prefix lengths for ascending candidates. Larger L keeps fewer pairs, so one
// pointer moving forward while L descends finds them all.
std::vector<std::size_t> prefix_ends(const std::vector<CrossPair>& pairs,
                                     const std::vector<double>& candidates) {
  std::vector<std::size_t> ends(candidates.size());
  std::size_t p = 0;
  for (std::size_t c = candidates.size(); c-- > 0;) {
    if (c + 1 < candidates.size() && candidates[c] > candidates[c + 1])
      throw ValidationError("candidates must be ascending");
    while (p < pairs.size() && is_edge(candidates[c], pairs[p].d)) ++p;
    ends[c] = p;
  }
  return ends;
}

std::vector<std::size_t> sizes_at(const std::vector<std::size_t>& time,
                                  const std::vector<std::size_t>& ends) {
  std::vector<std::size_t> sorted_times;
  for (auto t : time)
    if (t != kNever) sorted_times.push_back(t);
  std::sort(sorted_times.begin(), sorted_times.end());
  std::vector<std::size_t> out(ends.size());
  for (std::size_t c = 0; c < ends.size(); ++c)
    out[c] = static_cast<std::size_t>(
        std::lower_bound(sorted_times.begin(), sorted_times.end(), ends[c]) - sorted_times.begin());
  return out;
}

}  // namespace

std::vector<std::size_t> greedy_cover_profile(const std::vector<CrossPair>& sorted_pairs,
                                              std::size_t n, const std::vector<double>& candidates) {
  return sizes_at(cover_times(sorted_pairs, n), prefix_ends(sorted_pairs, candidates));
}

SrmResult srm_train(const Sample& sample, const MetricOracle& oracle, const SrmParams& params) {
  sample.validate();
  const std::size_t n = sample.size();
  if (n < 2) throw ValidationError("training needs at least two points");
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(params.eta >= 0.0)) throw ValidationError("eta must be >= 0");

  SrmResult res;
  res.ddim = params.ddim ? user_ddim(*params.ddim) : estimate_ddim(sample, oracle);

  const auto pairs = sorted_cross_pairs(sample, oracle, params.threads);
  const auto cands = candidate_L_values(pairs);
  res.zero_pairs = cands.zero_pairs;
  res.candidates_total = cands.values.size();
  const auto time = cover_times(pairs, n);
  const auto ends = prefix_ends(pairs, cands.values);
  const auto sizes = sizes_at(time, ends);

  BoundParams bp;
  bp.n = static_cast<double>(n);
  bp.D = res.ddim.ddim;
  bp.k = std::max(sample.k, 2);
  bp.delta = params.delta;
  bp.eta = params.eta;
  bp.fat = params.fat;

  auto row_at = [&](std::size_t c) {
    CandidateRow row;
    row.L = cands.values[c];
    row.cover_size = sizes[c] == n ? n - 1 : sizes[c];
    BoundParams p = bp;
    p.L = row.L;
    row.penalty = penalty(p, params.penalty);
    const double empirical =
        params.count_units ? static_cast<double>(row.cover_size) : row.cover_size / bp.n;
    row.q = empirical + row.penalty;
    return row;
  };

  std::size_t best = 0;
  double best_q = std::numeric_limits<double>::infinity();
  // When the matching covers every point, any one point can leave the cover
  // (all its neighbours stay in it). Point 0 survives, keeping m~ <= 2 m^.
  auto consider = [&](std::size_t c) {
    const auto row = row_at(c);
    res.candidates_examined.push_back(row);
    if (row.q < best_q || (row.q == best_q && c < best)) {
      best_q = row.q;
      best = c;
    }
  };

  const std::size_t m = cands.values.size();
  if (params.search == SearchMode::Sweep) {
    for (std::size_t c = 0; c < m; ++c)
      if (c == 0 || sizes[c] != sizes[c - 1]) consider(c);
  } else {
    // Golden-section search over candidate indices.
    std::map<std::size_t, double> memo;
    auto q_at = [&](std::size_t c) {
      if (auto it = memo.find(c); it != memo.end()) return it->second;
      consider(c);
      memo[c] = res.candidates_examined.back().q;
      return memo[c];
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    std::size_t lo = 0, hi = m - 1;
    while (hi - lo > 2) {
      const auto span = static_cast<double>(hi - lo);
      std::size_t a = lo + static_cast<std::size_t>(std::floor(span * (1.0 - inv_phi)));
      std::size_t b = lo + static_cast<std::size_t>(std::ceil(span * inv_phi));
      if (a == b) ++b;
      if (q_at(a) <= q_at(b)) hi = b;
      else lo = a;
    }
    for (std::size_t c = lo; c <= hi; ++c) q_at(c);
    std::sort(res.candidates_examined.begin(), res.candidates_examined.end(),
              [](const CandidateRow& x, const CandidateRow& y) { return x.L < y.L; });
  }

  const bool full = sizes[best] == n;
  res.L_star = cands.values[best];
  res.q_value = best_q;
  res.cover.method = CoverMethod::Greedy2Approx;
  std::vector<Point> s1_points;
  std::vector<Label> s1_labels;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (time[v] < ends[best] && !(full && v == 0)) {
      res.cover.cover.push_back(v);
    } else {
      res.s1.push_back(v);
      s1_points.push_back(sample.points[v]);
      s1_labels.push_back(sample.labels[v]);
    }
  }
  res.cover.size = res.cover.cover.size();
  bp.L = res.L_star;
  res.bound_params = bp;
  res.bound_report = delta_combined(bp);
  res.classifier.emplace(std::move(s1_points), std::move(s1_labels), sample.k, res.L_star, oracle,
                         params.eta, params.exact_nn);
  return res;
}

}  // namespace mmnn
