#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mmnn/ann_index.hpp"
#include "mmnn/metric.hpp"

namespace mmnn {

/// T_a^b(z) = max(a, min(b, z)). Throws ValidationError when a > b.
double truncate(double a, double b, double z);

/// Per-label scores f(x, y) at one query point, ascending by label.
/// Labels absent from the table have score -infinity.
struct ScoreTable {
  std::vector<std::pair<Label, double>> entries;

  std::optional<double> score(Label y) const;
};

struct Margin {
  double value = 0.0;  // T_{-1}^{1}(raw)
  double raw = 0.0;
};

/// Half the gap between f(x, y) and the best competing score. With a single
/// label the competing supremum is -infinity, so raw = +infinity and value = 1.
/// Throws ValidationError if y is not in the table.
Margin margin(const ScoreTable& scores, Label y);

/// +1 if the labels agree, -1 otherwise.
inline double xi(Label y, Label other) { return y == other ? 1.0 : -1.0; }

enum class Loss { Cutoff, Margin, ZeroOne };

inline double cutoff_loss(double u) { return u < 1.0 ? 1.0 : 0.0; }
inline double margin_loss(double u) { return truncate(0.0, 1.0, 1.0 - u); }

/// Lipschitz-extension classifier over the consistent subset S1.
///
/// The per-label score is the split, truncated Lipschitz extension
///   f(x,y) = 1/2 T(min_i {xi(Y_i,y) + L d(X_i,x)}) + 1/2 T(max_i {xi(Y_i,y) - L d(X_i,x)})
/// with T = T_{-1}^{1}. Because xi only takes the values +-1, each inner
/// optimum needs just two distances: to the nearest same-label point and to
/// the nearest other-label point of S1. h is the truncated projection of f:
/// the best label gets +gamma*, every other label -gamma*, where gamma* is
/// the margin of the best label.
///
/// Far from S1 (beyond 2/L of every point) all split scores saturate at 0, so
/// the best label is chosen by (split score, untruncated score, lowest id).
/// The untruncated score T(L (d_other - d_same) / 2) is strictly largest for
/// the nearest label, which keeps predict() equal to the 1-NN rule.
///
/// Construction checks the interpolation certificate L d(X_i,X_j) >= 2 on
/// every cross-label pair of S1. Immutable afterwards.
class LipschitzClassifier {
 public:
  /// `k` is the number of classes (labels of S1 must lie in 1..k). eta = 0
  /// with exact = true builds an exact index; otherwise a (1+eta) index.
  LipschitzClassifier(std::vector<Point> s1, std::vector<Label> labels, int k, double lipschitz,
                      MetricOracle oracle, double eta = 0.0, bool exact = true);

  double lipschitz() const { return lipschitz_; }
  int k() const { return k_; }
  double eta() const { return index_.eta(); }
  bool exact() const { return index_.mode() == NnMode::Exact; }
  const NnIndex& index() const { return index_; }
  const MetricOracle& oracle() const { return index_.oracle(); }
  const std::vector<Point>& points() const { return index_.points(); }
  const std::vector<Label>& labels() const { return index_.labels(); }

  /// f_NN(x, y) = -d(x, S1^y) for labels present in S1.
  ScoreTable nn_scores(const Point& x) const;

  /// Split-form score f(x, y) for every label 1..k (index y-1).
  std::vector<double> split_scores(const Point& x) const;
  /// Untruncated extension 1/2 (min_i{...} + max_i{...}) for every label.
  std::vector<double> raw_scores(const Point& x) const;
  /// h(x, y) for every label 1..k (index y-1).
  std::vector<double> evaluate_all(const Point& x) const;
  double evaluate_h(const Point& x, Label y) const;

  /// Label with the largest split score; ties go to the largest untruncated
  /// score, then to the lowest label id. Equals argmax_y h(x, y) whenever the
  /// margin is positive.
  Label predict(const Point& x) const;

  struct Prediction {
    Label label;
    double margin;  // h(x, label), in [-1, 1]
  };
  Prediction predict_with_margin(const Point& x) const;

  /// Mean loss over a labeled sample. Cutoff and margin losses act on
  /// h(X_i, Y_i); zero-one compares predict(X_i) with Y_i.
  double empirical_loss(const Sample& sample, Loss loss) const;

 private:
  struct Evaluation {
    std::vector<double> split;
    std::vector<double> raw;
    Label best;
  };
  Evaluation evaluate(const Point& x) const;
  std::vector<double> per_label_distances(const Point& x) const;

  NnIndex index_;
  int k_;
  double lipschitz_;
};

/// Projection of per-label scores (index y-1) onto the truncated class: label
/// `best` gets T(gamma*), all others -T(gamma*), with gamma* the margin of
/// `best`. `best` must be an argmax of the scores.
std::vector<double> truncated_projection(std::span<const double> scores, Label best);

}  // namespace mmnn
