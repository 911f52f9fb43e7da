#include "mmnn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmnn/error.hpp"

namespace mmnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp1(double z) { return std::max(-1.0, std::min(1.0, z)); }

}  // namespace

double truncate(double a, double b, double z) {
  if (a > b) throw ValidationError("truncate: lower bound exceeds upper bound");
  return std::max(a, std::min(b, z));
}

std::optional<double> ScoreTable::score(Label y) const {
  for (const auto& [label, s] : entries)
    if (label == y) return s;
  return std::nullopt;
}

Margin margin(const ScoreTable& scores, Label y) {
  const auto own = scores.score(y);
  if (!own) throw ValidationError("label " + std::to_string(y) + " not in score table");
  double rival = -kInf;
  for (const auto& [label, s] : scores.entries)
    if (label != y) rival = std::max(rival, s);
  Margin m;
  m.raw = rival == -kInf ? kInf : 0.5 * (*own - rival);
  m.value = clamp1(m.raw);
  return m;
}

std::vector<double> truncated_projection(std::span<const double> scores, Label best) {
  if (best < 1 || static_cast<std::size_t>(best) > scores.size())
    throw ValidationError("projection label out of range");
  const auto b = static_cast<std::size_t>(best - 1);
  double rival = -kInf;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (i != b) rival = std::max(rival, scores[i]);
  const double gamma = rival == -kInf ? 1.0 : clamp1(0.5 * (scores[b] - rival));
  std::vector<double> out(scores.size(), -gamma);
  out[b] = gamma;
  return out;
}

LipschitzClassifier::LipschitzClassifier(std::vector<Point> s1, std::vector<Label> labels, int k,
                                         double lipschitz, MetricOracle oracle, double eta,
                                         bool exact)
    : index_(std::move(s1), std::move(labels), oracle, exact ? NnMode::Exact : NnMode::Approximate,
             exact ? 0.0 : eta),
      k_(k),
      lipschitz_(lipschitz) {
  if (k_ < 1) throw ValidationError("k must be >= 1");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
    throw ValidationError("Lipschitz constant must be positive and finite");
  for (Label y : index_.labels())
    if (y < 1 || y > k_) throw ValidationError("label " + std::to_string(y) + " outside 1..k");

  const auto& pts = index_.points();
  const auto& lab = index_.labels();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (lab[i] == lab[j]) continue;
      if (!(lipschitz_ * oracle(pts[i], pts[j]) >= 2.0))
        throw ValidationError("S1 violates the interpolation certificate at pair (" +
                              std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
}

std::vector<double> LipschitzClassifier::per_label_distances(const Point& x) const {
  std::vector<double> d(static_cast<std::size_t>(k_), kInf);
  for (const auto& nb : index_.query_per_label(x)) d[static_cast<std::size_t>(nb.label - 1)] = nb.dist;
  return d;
}

ScoreTable LipschitzClassifier::nn_scores(const Point& x) const {
  ScoreTable t;
  for (const auto& nb : index_.query_per_label(x)) t.entries.emplace_back(nb.label, -nb.dist);
  return t;
}

LipschitzClassifier::Evaluation LipschitzClassifier::evaluate(const Point& x) const {
  const auto d = per_label_distances(x);
  const std::size_t k = d.size();

  // Two smallest per-label distances give d_other for every label.
  std::size_t first = 0;
  for (std::size_t y = 1; y < k; ++y)
    if (d[y] < d[first]) first = y;
  double second = kInf;
  for (std::size_t y = 0; y < k; ++y)
    if (y != first) second = std::min(second, d[y]);

  const double L = lipschitz_;
  Evaluation ev;
  ev.split.resize(k);
  ev.raw.resize(k);
  for (std::size_t y = 0; y < k; ++y) {
    const double same = d[y];
    const double other = (y == first) ? second : d[first];
    const double lo = std::min(1.0 + L * same, -1.0 + L * other);
    const double hi = std::max(1.0 - L * same, -1.0 - L * other);
    ev.split[y] = 0.5 * clamp1(lo) + 0.5 * clamp1(hi);
    ev.raw[y] = 0.5 * (lo + hi);
  }

  std::size_t best = 0;
  for (std::size_t y = 1; y < k; ++y) {
    if (ev.split[y] > ev.split[best] || (ev.split[y] == ev.split[best] && ev.raw[y] > ev.raw[best]))
      best = y;
  }
  ev.best = static_cast<Label>(best + 1);
  return ev;
}

std::vector<double> LipschitzClassifier::split_scores(const Point& x) const {
  return evaluate(x).split;
}

std::vector<double> LipschitzClassifier::raw_scores(const Point& x) const {
  return evaluate(x).raw;
}

std::vector<double> LipschitzClassifier::evaluate_all(const Point& x) const {
  const auto ev = evaluate(x);
  return truncated_projection(ev.split, ev.best);
}

double LipschitzClassifier::evaluate_h(const Point& x, Label y) const {
  if (y < 1 || y > k_) throw ValidationError("label " + std::to_string(y) + " outside 1..k");
  return evaluate_all(x)[static_cast<std::size_t>(y - 1)];
}

Label LipschitzClassifier::predict(const Point& x) const { return evaluate(x).best; }

LipschitzClassifier::Prediction LipschitzClassifier::predict_with_margin(const Point& x) const {
  const auto ev = evaluate(x);
  const auto h = truncated_projection(ev.split, ev.best);
  return {ev.best, h[static_cast<std::size_t>(ev.best - 1)]};
}

double LipschitzClassifier::empirical_loss(const Sample& sample, Loss loss) const {
  if (sample.size() == 0) throw ValidationError("empty sample");
  if (sample.labels.size() != sample.points.size())
    throw ValidationError("sample points and labels differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Label y = sample.labels[i];
    if (y < 1 || y > k_) throw ValidationError("label " + std::to_string(y) + " outside 1..k");
    switch (loss) {
      case Loss::Cutoff:
        total += cutoff_loss(evaluate_h(sample.points[i], y));
        break;
      case Loss::Margin:
        total += margin_loss(evaluate_h(sample.points[i], y));
        break;
      case Loss::ZeroOne:
        total += predict(sample.points[i]) == y ? 0.0 : 1.0;
        break;
    }
  }
  return total / static_cast<double>(sample.size());
}

}  // namespace mmnn
