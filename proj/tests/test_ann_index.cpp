#include <doctest.h>

#include "mmnn/ann_index.hpp"
#include "mmnn/error.hpp"
#include "support.hpp"

using namespace mmnn;
using testing::line;

namespace {

NnAnswer brute(const std::vector<Point>& pts, const std::vector<Label>& labels,
               const MetricOracle& o, const Point& x) {
  NnAnswer best{0, labels[0], o(x, pts[0])};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = o(x, pts[i]);
    if (d < best.dist) best = {i, labels[i], d};
  }
  return best;
}

double brute_label(const std::vector<Point>& pts, const std::vector<Label>& labels,
                   const MetricOracle& o, const Point& x, Label y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (labels[i] == y) best = std::min(best, o(x, pts[i]));
  return best;
}

void check_invariants(const NetHierarchy& h, const std::vector<Point>& pts, const MetricOracle& o) {
  std::size_t seen = 0;
  for (std::size_t l = 0; l < h.levels(); ++l) {
    const auto centers = h.centers(l);
    for (std::size_t a = 0; a < centers.size(); ++a)
      for (std::size_t b = a + 1; b < centers.size(); ++b)
        REQUIRE(o(pts[centers[a]], pts[centers[b]]) > h.radius(l));
    if (l + 1 == h.levels()) {
      for (std::size_t c = 0; c < centers.size(); ++c) {
        seen += 1 + h.duplicates(c).size();
        for (auto id : h.duplicates(c)) REQUIRE(o(pts[id], pts[centers[c]]) == 0.0);
      }
      break;
    }
    const auto next = h.centers(l + 1);
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const auto kids = h.children(l, c);
      REQUIRE(!kids.empty());
      REQUIRE(next[kids[0]] == centers[c]);
      for (auto k : kids) REQUIRE(o(pts[centers[c]], pts[next[k]]) <= h.radius(l));
    }
  }
  CHECK(seen == h.point_count());
}

}  // namespace

TEST_CASE("query examples") {
  const MetricOracle o(MetricKind::L1);
  const auto idx = NnIndex::exact(line({0.0, 10.0}), {1, 2}, o);
  CHECK(idx.query(Point{1.0}).index == 0);
  CHECK(idx.query(Point{1.0}).dist == 1.0);
  CHECK(idx.query(Point{5.0}).index == 0);
  const auto approx = NnIndex::approximate(line({0.0, 10.0}), {1, 2}, o, 0.0);
  CHECK(approx.query(Point{5.0}).index == 0);

  const auto one = NnIndex::approximate(line({3.0}), {1}, o, 0.1);
  CHECK(one.query(Point{-7.0}).index == 0);
  CHECK(one.query(Point{-7.0}).dist == 10.0);

  const auto two = NnIndex::exact(line({0.0, 1.0}), {1, 2}, o);
  const auto per = two.query_per_label(Point{0.25});
  REQUIRE(per.size() == 2);
  CHECK(per[0].label == 1);
  CHECK(per[0].dist == 0.25);
  CHECK(per[0].index == 0);
  CHECK(per[1].dist == 0.75);
  CHECK(per[1].index == 1);
  CHECK(NnIndex::exact(line({0.0, 1.0}), {2, 2}, o).query_per_label(Point{0.0}).size() == 1);

  CHECK_THROWS_AS(NnIndex::exact({}, {}, o), ValidationError);
  CHECK_THROWS_AS(NnIndex::approximate(line({0.0}), {1}, o, -0.5), ValidationError);
}

TEST_CASE("net invariants on a line and in the square") {
  const MetricOracle l2(MetricKind::L2);
  std::vector<Point> pts;
  for (int i = 0; i < 1024; ++i) pts.push_back(Point{i / 1023.0});
  const auto idx = NnIndex::approximate(pts, std::vector<Label>(pts.size(), 1), l2, 0.1);
  check_invariants(idx.hierarchy(), pts, l2);

  StreamRng rng(3, 0);
  auto cloud = testing::random_vectors(rng, 400, 2);
  cloud.push_back(cloud[17]);
  cloud.push_back(cloud[17]);
  const auto labels = testing::random_labels(rng, cloud.size(), 3);
  const auto idx2 = NnIndex::approximate(cloud, labels, l2, 0.25);
  check_invariants(idx2.hierarchy(), cloud, l2);
  for (Label y = 1; y <= 3; ++y) check_invariants(idx2.label_hierarchy(y), cloud, l2);
}

TEST_CASE("approximate answers satisfy the sandwich") {
  StreamRng rng(4, 0);
  for (auto kind : {MetricKind::L2, MetricKind::L1, MetricKind::LInf}) {
    const MetricOracle o(kind);
    const auto pts = testing::random_vectors(rng, 500, 2);
    const auto labels = testing::random_labels(rng, pts.size(), 4);
    for (double eta : {0.0, 0.05, 0.25, 1.0}) {
      const auto idx = NnIndex::approximate(pts, labels, o, eta);
      const auto queries = testing::random_vectors(rng, 100, 2);
      for (const auto& q : queries) {
        const auto truth = brute(pts, labels, o, q);
        const auto got = idx.query(q);
        CHECK(got.dist == o(q, pts[got.index]));
        CHECK(got.dist >= truth.dist);
        CHECK(got.dist <= (1.0 + eta) * truth.dist);
        if (eta == 0.0) CHECK(got.index == truth.index);
        for (const auto& nb : idx.query_per_label(q)) {
          const double t = brute_label(pts, labels, o, q, nb.label);
          CHECK(nb.dist >= t);
          CHECK(nb.dist <= (1.0 + eta) * t);
        }
      }
    }
  }
}

TEST_CASE("eta zero reproduces exact ties") {
  const MetricOracle o(MetricKind::L1);
  std::vector<Point> pts;
  for (int i = 0; i < 64; ++i) pts.push_back(Point{static_cast<double>(i % 16)});
  std::vector<Label> labels(pts.size(), 1);
  const auto ex = NnIndex::exact(pts, labels, o);
  const auto ap = NnIndex::approximate(pts, labels, o, 0.0);
  for (double x = -1.0; x <= 16.0; x += 0.5) {
    CHECK(ex.query(Point{x}).index == ap.query(Point{x}).index);
    CHECK(ex.query(Point{x}).dist == ap.query(Point{x}).dist);
  }
}

TEST_CASE("strings under edit distance") {
  StreamRng rng(8, 0);
  const MetricOracle lev(MetricKind::Levenshtein);
  const auto pts = testing::random_strings(rng, 200, 10);
  const auto labels = testing::random_labels(rng, pts.size(), 2);
  const auto idx = NnIndex::approximate(pts, labels, lev, 0.1);
  check_invariants(idx.hierarchy(), pts, lev);
  for (const auto& q : testing::random_strings(rng, 50, 10)) {
    const auto truth = brute(pts, labels, lev, q);
    const auto got = idx.query(q);
    CHECK(got.dist >= truth.dist);
    CHECK(got.dist <= 1.1 * truth.dist);
  }
}
