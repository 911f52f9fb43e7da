#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mmnn {

/// Dense class id in 1..k. Original label strings live in a LabelTable.
using Label = int;

/// An element of the instance space: a dense real vector or a byte string.
struct Point {
  std::variant<std::vector<double>, std::string> payload;

  Point() = default;
  Point(std::vector<double> v) : payload(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Point(std::string s) : payload(std::move(s)) {}          // NOLINT(google-explicit-constructor)
  Point(std::initializer_list<double> v) : payload(std::vector<double>(v)) {}

  bool is_vector() const { return std::holds_alternative<std::vector<double>>(payload); }
  bool is_string() const { return std::holds_alternative<std::string>(payload); }
  const std::vector<double>& vec() const { return std::get<std::vector<double>>(payload); }
  const std::string& str() const { return std::get<std::string>(payload); }

  bool operator==(const Point&) const = default;
};

enum class MetricKind { L1, L2, LInf, Levenshtein };

std::string_view to_string(MetricKind kind);
/// Accepts "l1", "l2", "linf", "levenshtein" (case-insensitive).
MetricKind parse_metric_kind(std::string_view name);
bool is_vector_metric(MetricKind kind);

/// A distance function: `scale` times the raw metric of `kind`.
/// Immutable after construction and safe to share between threads.
class MetricOracle {
 public:
  explicit MetricOracle(MetricKind kind, double scale = 1.0);

  MetricKind kind() const { return kind_; }
  double scale() const { return scale_; }

  /// Unscaled distance. Throws MetricMismatchError when the payload kinds do
  /// not match the metric or vector lengths differ.
  double raw(const Point& a, const Point& b) const;
  double operator()(const Point& a, const Point& b) const { return scale_ * raw(a, b); }

  MetricOracle rescaled(double scale) const { return MetricOracle(kind_, scale); }

  /// Throws MetricMismatchError if `p` cannot be measured by this oracle.
  void check_payload(const Point& p) const;

 private:
  MetricKind kind_;
  double scale_;
};

double distance(const MetricOracle& oracle, const Point& a, const Point& b);

/// Edit distance with unit insert/delete/substitute costs.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Training sample with labels already remapped to 1..k.
struct Sample {
  std::vector<Point> points;
  std::vector<Label> labels;
  int k = 0;

  std::size_t size() const { return points.size(); }

  /// Validates |points| = |labels| >= 1, labels in 1..k and every label used.
  /// Also checks that all vector payloads share one length and that payloads
  /// are all vectors or all strings.
  void validate() const;
};

/// Condensed upper-triangular pairwise distance matrix. Built in parallel with
/// a fixed partition of rows, so the contents do not depend on thread count.
class PairwiseDistances {
 public:
  PairwiseDistances(std::span<const Point> points, const MetricOracle& oracle,
                    unsigned threads = 0);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const;
  double max() const { return max_; }

 private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  std::size_t n_;
  std::vector<double> d_;
  double max_ = 0.0;
};

/// Returns a rescaled oracle under which the largest pairwise sample distance
/// is 1. Throws DegenerateDiameterError if n < 2 or all points coincide.
MetricOracle normalize_sample(const Sample& sample, const MetricOracle& oracle);
MetricOracle normalize_sample(std::span<const Point> points, const MetricOracle& oracle);

/// (2 diam / epsilon)^ddim. Values below 1 are returned as-is.
double covering_bound(double epsilon, double diam, double ddim);

enum class DdimMethod { UserSupplied, NetCounting };

struct DoublingEstimate {
  double ddim = 0.0;
  DdimMethod method = DdimMethod::NetCounting;
  std::vector<double> scales_examined;
  std::vector<std::size_t> net_sizes;
};

std::string_view to_string(DdimMethod method);

/// Greedy r-net size with points taken in stored order.
std::size_t greedy_net_size(std::span<const Point> points, const MetricOracle& oracle, double r);

/// Net-counting doubling dimension estimate. Nets are built at radii
/// diam / 2^j for j = 1..floor(log2 n); the estimate is the largest
/// log2 N(r/2) / N(r) across consecutive radii (0 when only one radius).
DoublingEstimate estimate_ddim(const Sample& sample, const MetricOracle& oracle);
DoublingEstimate estimate_ddim(std::span<const Point> points, const MetricOracle& oracle);

DoublingEstimate user_ddim(double ddim);

}  // namespace mmnn
