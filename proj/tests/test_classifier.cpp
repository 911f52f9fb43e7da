#include <doctest.h>

#include "mmnn/classifier.hpp"
#include "mmnn/error.hpp"
#include "support.hpp"

using namespace mmnn;
using testing::line;

namespace {

double T(double z) { return std::max(-1.0, std::min(1.0, z)); }

// Split form evaluated literally over every point of S1.
std::vector<double> brute_split(const LipschitzClassifier& c, const Point& x) {
  std::vector<double> out;
  for (Label y = 1; y <= c.k(); ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < c.points().size(); ++i) {
      const double d = c.oracle()(x, c.points()[i]);
      lo = std::min(lo, xi(c.labels()[i], y) + c.lipschitz() * d);
      hi = std::max(hi, xi(c.labels()[i], y) - c.lipschitz() * d);
    }
    out.push_back(0.5 * T(lo) + 0.5 * T(hi));
  }
  return out;
}

std::vector<double> brute_raw(const LipschitzClassifier& c, const Point& x) {
  std::vector<double> out;
  for (Label y = 1; y <= c.k(); ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < c.points().size(); ++i) {
      const double d = c.oracle()(x, c.points()[i]);
      lo = std::min(lo, xi(c.labels()[i], y) + c.lipschitz() * d);
      hi = std::max(hi, xi(c.labels()[i], y) - c.lipschitz() * d);
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

// 1-NN label; among equidistant points the lowest label wins.
Label brute_nn_label(const std::vector<Point>& pts, const std::vector<Label>& labels,
                     const MetricOracle& o, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  Label lab = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = o(x, pts[i]);
    if (d < best || (d == best && labels[i] < lab)) {
      best = d;
      lab = labels[i];
    }
  }
  return lab;
}

// Random S1 that satisfies the certificate: drop points conflicting with
// earlier survivors.
struct Instance {
  std::vector<Point> pts;
  std::vector<Label> labels;
  double L;
};

Instance consistent_instance(StreamRng& rng, std::size_t n, std::size_t dim, int k, double L,
                             const MetricOracle& o) {
  const auto cand = testing::random_vectors(rng, n, dim);
  const auto lab = testing::random_labels(rng, n, k);
  Instance inst{{}, {}, L};
  for (std::size_t i = 0; i < n; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < inst.pts.size() && ok; ++j)
      if (inst.labels[j] != lab[i] && !(L * o(cand[i], inst.pts[j]) >= 2.0)) ok = false;
    if (ok) {
      inst.pts.push_back(cand[i]);
      inst.labels.push_back(lab[i]);
    }
  }
  return inst;
}

}  // namespace

TEST_CASE("truncate") {
  CHECK(truncate(-1, 1, 0.5) == 0.5);
  CHECK(truncate(-1, 1, 3) == 1);
  CHECK(truncate(0, 1, -2) == 0);
  CHECK_THROWS_AS(truncate(1, 0, 0.5), ValidationError);
}

TEST_CASE("margin") {
  ScoreTable t{{{1, 0.5}, {2, 0.1}, {3, -0.2}}};
  CHECK(margin(t, 1).raw == doctest::Approx(0.2));
  CHECK(margin(ScoreTable{{{1, 0.0}, {2, 0.0}}}, 1).raw == 0.0);
  const auto m = margin(ScoreTable{{{1, 0.1}, {2, 0.9}}}, 1);
  CHECK(m.raw == doctest::Approx(-0.4));
  CHECK(m.value == m.raw);
  CHECK(margin(ScoreTable{{{1, 9.0}, {2, -9.0}}}, 1).value == 1.0);
  const auto single = margin(ScoreTable{{{4, 0.3}}}, 4);
  CHECK(std::isinf(single.raw));
  CHECK(single.value == 1.0);
  CHECK_THROWS_AS(margin(t, 9), ValidationError);
}

TEST_CASE("xi and losses") {
  CHECK(xi(1, 1) == 1.0);
  CHECK(xi(1, 2) == -1.0);
  CHECK(xi(7, 7) == 1.0);
  const double h[] = {1.0, 1.0, 0.2, -1.0};
  double cut = 0, mar = 0;
  for (double v : h) {
    cut += cutoff_loss(v);
    mar += margin_loss(v);
  }
  CHECK(cut / 4 == 0.5);
  CHECK(mar / 4 == doctest::Approx(0.45));
  CHECK(margin_loss(0.5) == 0.5);
  CHECK(cutoff_loss(0.5) == 1.0);
}

TEST_CASE("two-point line examples") {
  const MetricOracle o(MetricKind::L1);
  const LipschitzClassifier c(line({0.0, 1.0}), {1, 2}, 2, 2.0, o);
  const auto nn = c.nn_scores(Point{0.25});
  CHECK(*nn.score(1) == -0.25);
  CHECK(*nn.score(2) == -0.75);
  CHECK(*c.nn_scores(Point{1.0}).score(2) == 0.0);

  CHECK(c.evaluate_h(Point{0.25}, 1) == 0.5);
  CHECK(c.evaluate_h(Point{0.25}, 2) == -0.5);
  CHECK(c.evaluate_h(Point{0.0}, 1) == 1.0);
  CHECK(c.evaluate_h(Point{0.0}, 2) == -1.0);
  CHECK(c.split_scores(Point{0.25}) == brute_split(c, Point{0.25}));
  CHECK(c.predict(Point{0.25}) == 1);
  CHECK(c.predict(Point{0.5}) == 1);
  CHECK(c.predict(Point{0.75}) == 2);

  const LipschitzClassifier flipped(line({0.0, 1.0}), {2, 1}, 2, 2.0, o);
  CHECK(flipped.predict(Point{0.5}) == 1);

  CHECK_THROWS_AS(LipschitzClassifier(line({0.0, 1.0}), {1, 2}, 2, 1.5, o), ValidationError);
  CHECK_THROWS_AS(LipschitzClassifier(line({0.0, 1.0}), {1, 3}, 2, 2.0, o), ValidationError);
}

TEST_CASE("projection keeps one positive label for k >= 3") {
  // Nearest A at 0.5, B at 1.5, C at 3.5, L = 1. The split scores alone are
  // (0.5, -0.5, -0.75), which has two distinct negative values.
  const MetricOracle o(MetricKind::L1);
  const LipschitzClassifier c(line({0.0, 2.0, 4.0}), {1, 2, 3}, 3, 1.0, o);
  const auto split = c.split_scores(Point{0.5});
  CHECK(split == std::vector<double>{0.5, -0.5, -0.75});
  const auto h = c.evaluate_all(Point{0.5});
  CHECK(h == std::vector<double>{0.5, -0.5, -0.5});
}

TEST_CASE("predict follows the nearest label far from S1") {
  // Beyond 2/L of every stored point all split scores are 0.
  const MetricOracle o(MetricKind::L1);
  const LipschitzClassifier c(line({0.0, 10.0}), {1, 2}, 3, 10.0, o);
  CHECK(c.split_scores(Point{8.0}) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(c.predict(Point{8.0}) == 2);
  CHECK(c.predict(Point{2.0}) == 1);
  CHECK(c.predict_with_margin(Point{8.0}).margin == 0.0);
  const auto raw = c.raw_scores(Point{8.0});
  CHECK(raw == brute_raw(c, Point{8.0}));
  CHECK(raw[1] > raw[0]);
}

TEST_CASE("single-label classifier") {
  const MetricOracle o(MetricKind::L2);
  const LipschitzClassifier c(line({0.0, 0.3}), {1, 1}, 1, 4.0, o);
  CHECK(c.predict(Point{5.0}) == 1);
  CHECK(c.evaluate_h(Point{5.0}, 1) == 1.0);
  CHECK(c.predict_with_margin(Point{0.1}).margin == 1.0);
}

TEST_CASE("brute-force agreement and NN equivalence") {
  StreamRng rng(21, 0);
  const MetricOracle o(MetricKind::L2);
  for (int rep = 0; rep < 5; ++rep) {
    const auto inst = consistent_instance(rng, 200, 2, 3, 12.0, o);
    const LipschitzClassifier c(inst.pts, inst.labels, 3, inst.L, o);
    for (const auto& q : testing::random_vectors(rng, 50, 2)) {
      CHECK(c.split_scores(q) == brute_split(c, q));
      CHECK(c.raw_scores(q) == brute_raw(c, q));
      CHECK(c.predict(q) == brute_nn_label(inst.pts, inst.labels, o, q));
      const auto nn = c.nn_scores(q);
      for (const auto& [y, s] : nn.entries) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < inst.pts.size(); ++i)
          if (inst.labels[i] == y) best = std::min(best, o(q, inst.pts[i]));
        CHECK(s == -best);
      }
    }
  }
}

TEST_CASE("Lipschitz, single-positive and interpolation properties") {
  StreamRng rng(22, 0);
  for (auto kind : {MetricKind::L2, MetricKind::LInf}) {
    const MetricOracle o(kind);
    const auto inst = consistent_instance(rng, 300, 2, 4, 8.0, o);
    const LipschitzClassifier c(inst.pts, inst.labels, 4, inst.L, o);
    const auto a = testing::random_vectors(rng, 1000, 2);
    const auto b = testing::random_vectors(rng, 1000, 2);
    for (std::size_t t = 0; t < a.size(); ++t) {
      const auto ha = c.evaluate_all(a[t]);
      const auto hb = c.evaluate_all(b[t]);
      const double d = o(a[t], b[t]);
      int positive = 0;
      for (std::size_t y = 0; y < ha.size(); ++y) {
        CHECK(std::abs(ha[y] - hb[y]) <= c.lipschitz() * d + testing::ulps(1.0, 8));
        if (ha[y] > 0) {
          ++positive;
          for (std::size_t z = 0; z < ha.size(); ++z)
            if (z != y) CHECK(std::abs(ha[z] + ha[y]) <= testing::ulps(1.0, 8));
        }
      }
      CHECK(positive <= 1);
    }
    for (std::size_t i = 0; i < inst.pts.size(); ++i) {
      const auto h = c.evaluate_all(inst.pts[i]);
      for (Label y = 1; y <= 4; ++y) CHECK(h[static_cast<std::size_t>(y - 1)] == (y == inst.labels[i] ? 1.0 : -1.0));
    }
  }
}

TEST_CASE("approximate evaluation stays within 2 eta") {
  StreamRng rng(23, 0);
  const MetricOracle o(MetricKind::L2);
  const auto inst = consistent_instance(rng, 500, 2, 3, 10.0, o);
  const LipschitzClassifier exact(inst.pts, inst.labels, 3, inst.L, o);
  for (double eta : {0.05, 0.1, 0.25}) {
    const LipschitzClassifier approx(inst.pts, inst.labels, 3, inst.L, o, eta, false);
    CHECK(!approx.exact());
    for (const auto& q : testing::random_vectors(rng, 200, 2)) {
      const auto h = exact.evaluate_all(q);
      const auto ht = approx.evaluate_all(q);
      for (std::size_t y = 0; y < h.size(); ++y) CHECK(std::abs(h[y] - ht[y]) <= 2 * eta);
      const auto pe = exact.predict_with_margin(q);
      if (approx.predict(q) != pe.label) CHECK(pe.margin <= 2 * eta);
    }
  }
}

TEST_CASE("empirical losses") {
  const MetricOracle o(MetricKind::L1);
  const LipschitzClassifier c(line({0.0, 1.0}), {1, 2}, 2, 2.0, o);
  auto s = testing::make_sample(line({0.0, 1.0}), {1, 2}, 2);
  CHECK(c.empirical_loss(s, Loss::Cutoff) == 0.0);
  CHECK(c.empirical_loss(s, Loss::ZeroOne) == 0.0);
  s = testing::make_sample(line({0.25, 0.75}), {1, 2}, 2);
  CHECK(c.empirical_loss(s, Loss::Margin) == 0.5);
  CHECK(c.empirical_loss(s, Loss::Cutoff) == 1.0);
  s = testing::make_sample(line({0.0, 0.0, 0.25, 1.0}), {1, 1, 1, 1}, 1);
  // h values 1, 1, 0.5, -1
  CHECK(c.empirical_loss(s, Loss::Cutoff) == 0.5);
  CHECK(c.empirical_loss(s, Loss::Margin) == doctest::Approx((0 + 0 + 0.5 + 1) / 4.0));
  CHECK(c.empirical_loss(s, Loss::ZeroOne) == 0.25);
}
