#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmnn/metric.hpp"

namespace mmnn {

/// Result of a nearest-neighbor query. `index` is the position in the
/// index's base points; `dist` is the true distance to that point.
struct NnAnswer {
  std::size_t index = 0;
  Label label = 0;
  double dist = 0.0;
};

/// Nearest base point carrying a given label.
struct LabelNeighbor {
  Label label = 0;
  double dist = 0.0;
  std::size_t index = 0;
};

/// Nested nets over a subset of points. Level l has radius
/// radius(l) = 2^(top_exponent - l); level 0 holds one root that covers every
/// point. Invariants, for every level l:
///   - nesting: each center of level l is its own first child at level l+1
///   - covering: d(center, child) <= radius(l)
///   - packing: centers of level l are pairwise > radius(l) apart
/// Points that coincide with a bottom-level center are kept as duplicates.
class NetHierarchy {
 public:
  NetHierarchy() = default;
  NetHierarchy(std::span<const Point> points, std::vector<std::uint32_t> ids,
               const MetricOracle& oracle);

  std::size_t levels() const { return levels_.size(); }
  double radius(std::size_t level) const;
  /// Point ids (positions in the base array) of the centers at `level`.
  std::span<const std::uint32_t> centers(std::size_t level) const { return levels_[level].centers; }
  /// Positions (into centers(level + 1)) of the children of center `pos`.
  std::span<const std::uint32_t> children(std::size_t level, std::size_t pos) const;
  /// Point ids equal to bottom-level center `pos` (excluding the center).
  std::span<const std::uint32_t> duplicates(std::size_t pos) const;
  std::size_t point_count() const { return point_count_; }

  struct Hit {
    std::uint32_t id;
    double dist;
  };
  /// Descend-and-prune search. A node is expanded unless none of its
  /// descendants can beat the current best by more than a (1 + eta) factor.
  /// Ties are resolved towards the lowest point id.
  Hit search(const Point& x, std::span<const Point> points, const MetricOracle& oracle,
             double eta) const;

 private:
  struct Level {
    std::vector<std::uint32_t> centers;
    std::vector<std::uint32_t> child_offsets;  // size centers + 1, into children
    std::vector<std::uint32_t> children;
  };
  std::vector<Level> levels_;
  std::vector<std::uint32_t> dup_offsets_;
  std::vector<std::uint32_t> dups_;
  int top_exponent_ = 0;
  std::size_t point_count_ = 0;
};

enum class NnMode { Exact, Approximate };

/// Nearest-neighbor oracle over a labeled point set. Exact mode is a linear
/// scan; approximate mode answers within a (1 + eta) factor through nested
/// nets, one hierarchy over all points and one per label. Immutable after
/// construction.
class NnIndex {
 public:
  /// Throws ValidationError on an empty set, mismatched sizes or eta < 0.
  NnIndex(std::vector<Point> points, std::vector<Label> labels, MetricOracle oracle, NnMode mode,
          double eta = 0.0);

  static NnIndex exact(std::vector<Point> points, std::vector<Label> labels, MetricOracle oracle) {
    return NnIndex(std::move(points), std::move(labels), oracle, NnMode::Exact);
  }
  static NnIndex approximate(std::vector<Point> points, std::vector<Label> labels,
                             MetricOracle oracle, double eta) {
    return NnIndex(std::move(points), std::move(labels), oracle, NnMode::Approximate, eta);
  }

  NnAnswer query(const Point& x) const;
  /// One entry per label present in the base set, ascending by label.
  std::vector<LabelNeighbor> query_per_label(const Point& x) const;

  NnMode mode() const { return mode_; }
  double eta() const { return eta_; }
  const MetricOracle& oracle() const { return oracle_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Label>& labels() const { return labels_; }
  std::size_t size() const { return points_.size(); }
  /// Labels present in the base set, ascending.
  const std::vector<Label>& present_labels() const { return present_; }
  /// Hierarchy over all base points; empty in exact mode.
  const NetHierarchy& hierarchy() const { return all_; }
  const NetHierarchy& label_hierarchy(Label y) const;

 private:
  std::vector<Point> points_;
  std::vector<Label> labels_;
  MetricOracle oracle_;
  NnMode mode_;
  double eta_;
  std::vector<Label> present_;
  NetHierarchy all_;
  std::vector<NetHierarchy> per_label_;  // parallel to present_
};

}  // namespace mmnn
