#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mmnn/bounds.hpp"
#include "mmnn/classifier.hpp"
#include "mmnn/metric.hpp"

namespace mmnn {

/// A cross-label sample pair and its distance.
struct CrossPair {
  double d = 0.0;
  std::uint32_t i = 0;  // i < j
  std::uint32_t j = 0;
};

/// All cross-label pairs sorted by (d, i, j). This is the greedy edge order.
std::vector<CrossPair> sorted_cross_pairs(const Sample& sample, const MetricOracle& oracle,
                                          unsigned threads = 0);

/// k-partite graph on sample indices: (i, j) is an edge iff Y_i != Y_j and
/// L d(X_i, X_j) < 2. Edges are kept in greedy order.
struct ConflictGraph {
  std::size_t vertex_count = 0;
  std::vector<Label> labels;
  double L = 0.0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  /// Hand-built graph; edges are put in lexicographic (min, max) order.
  /// Throws ValidationError for same-label or out-of-range edges.
  static ConflictGraph from_edges(std::vector<Label> labels,
                                  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);
};

ConflictGraph build_conflict_graph(const Sample& sample, const MetricOracle& oracle, double L,
                                   unsigned threads = 0);

enum class CoverMethod { Greedy2Approx, Exact };

struct CoverResult {
  std::vector<std::uint32_t> cover;  // ascending
  std::size_t size = 0;
  CoverMethod method = CoverMethod::Greedy2Approx;
};

/// Maximal-matching cover: scan edges in stored order and take both
/// endpoints of every edge with neither endpoint covered yet.
CoverResult greedy_cover(const ConflictGraph& g);

/// Minimum vertex cover by branch and bound. Throws CoverLimitError when more
/// than `limit` vertices touch an edge (limit at most 64).
CoverResult exact_cover(const ConflictGraph& g, std::size_t limit = 24);

struct CandidateSet {
  /// Ascending. Breakpoints plus one sentinel below and one above.
  std::vector<double> values;
  /// Ascending, deduplicated breakpoints 2/d over cross-label pairs with d > 0,
  /// each rounded up to the smallest double with L d >= 2.
  std::vector<double> breakpoints;
  /// Cross-label pairs at distance 0. They conflict at every L.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> zero_pairs;
};

CandidateSet candidate_L_values(const Sample& sample, const MetricOracle& oracle,
                                unsigned threads = 0);
CandidateSet candidate_L_values(const std::vector<CrossPair>& sorted_pairs);

/// Smallest double L with L * d >= 2.
double breakpoint_for(double d);

enum class SearchMode { Sweep, Binary };

struct SrmParams {
  double delta = 0.01;
  /// Doubling dimension for the bounds; estimated from the sample when empty.
  std::optional<double> ddim;
  double eta = 0.0;
  bool exact_nn = true;
  SearchMode search = SearchMode::Sweep;
  PenaltyKind penalty = PenaltyKind::Combined;
  FatConstant fat = FatConstant::Printed16;
  /// Q = m~ + Delta instead of m~/n + Delta.
  bool count_units = false;
  unsigned threads = 0;
};

struct CandidateRow {
  double L = 0.0;
  std::size_t cover_size = 0;
  double penalty = 0.0;
  double q = 0.0;
};

struct SrmResult {
  double L_star = 0.0;
  CoverResult cover;
  double q_value = 0.0;
  std::vector<std::uint32_t> s1;
  BoundValue bound_report;
  BoundParams bound_params;
  DoublingEstimate ddim;
  /// Candidates where Q was evaluated. In sweep mode only the smallest L of
  /// each run of equal cover size is listed; Q cannot be smaller elsewhere in
  /// the run because the penalty is nondecreasing in L.
  std::vector<CandidateRow> candidates_examined;
  std::size_t candidates_total = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> zero_pairs;
  std::optional<LipschitzClassifier> classifier;
};

/// Runs structural risk minimization over L and fits the classifier on the
/// surviving points. `oracle` should already be normalized to unit diameter.
SrmResult srm_train(const Sample& sample, const MetricOracle& oracle, const SrmParams& params);

/// Greedy cover sizes at every candidate of `candidates` (same order), using
/// the incremental sweep over sorted pairs.
std::vector<std::size_t> greedy_cover_profile(const std::vector<CrossPair>& sorted_pairs,
                                              std::size_t n, const std::vector<double>& candidates);

}  // namespace mmnn
