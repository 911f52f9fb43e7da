#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mmnn/metric.hpp"
#include "mmnn/rng.hpp"

namespace testing {

using mmnn::Label;
using mmnn::Point;

inline double ulps(double x, int n) {
  return n * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline std::vector<Point> random_vectors(mmnn::StreamRng& rng, std::size_t n, std::size_t dim) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform();
    out.emplace_back(std::move(v));
  }
  return out;
}

inline std::vector<Point> random_strings(mmnn::StreamRng& rng, std::size_t n, std::size_t max_len) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s(rng.below(max_len + 1), 'a');
    for (auto& c : s) c = static_cast<char>('a' + rng.below(4));
    out.emplace_back(std::move(s));
  }
  return out;
}

inline std::vector<Label> random_labels(mmnn::StreamRng& rng, std::size_t n, int k) {
  std::vector<Label> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Label>(1 + rng.below(static_cast<std::uint64_t>(k)));
  // Make every label appear so the sample validates.
  for (int y = 1; y <= k && static_cast<std::size_t>(y) <= n; ++y) out[static_cast<std::size_t>(y - 1)] = y;
  return out;
}

inline mmnn::Sample make_sample(std::vector<Point> pts, std::vector<Label> labels, int k) {
  mmnn::Sample s;
  s.points = std::move(pts);
  s.labels = std::move(labels);
  s.k = k;
  return s;
}

inline std::vector<Point> line(std::initializer_list<double> xs) {
  std::vector<Point> out;
  for (double x : xs) out.push_back(Point{x});
  return out;
}

}  // namespace testing
