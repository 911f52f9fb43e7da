#include "mmnn/metric.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "mmnn/error.hpp"
#include "mmnn/parallel.hpp"

namespace mmnn {

namespace {
std::atomic<unsigned> g_default_threads{0};
}

unsigned default_threads() {
  if (unsigned t = g_default_threads.load(); t != 0) return t;
  if (const char* env = std::getenv("METRIC_MARGIN_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(unsigned threads) { g_default_threads = threads; }

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::L1: return "l1";
    case MetricKind::L2: return "l2";
    case MetricKind::LInf: return "linf";
    case MetricKind::Levenshtein: return "levenshtein";
  }
  return "unknown";
}

MetricKind parse_metric_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "l1") return MetricKind::L1;
  if (s == "l2") return MetricKind::L2;
  if (s == "linf") return MetricKind::LInf;
  if (s == "levenshtein") return MetricKind::Levenshtein;
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

bool is_vector_metric(MetricKind kind) { return kind != MetricKind::Levenshtein; }

MetricOracle::MetricOracle(MetricKind kind, double scale) : kind_(kind), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw ValidationError("metric scale must be a positive finite number");
}

void MetricOracle::check_payload(const Point& p) const {
  if (is_vector_metric(kind_) != p.is_vector())
    throw MetricMismatchError(std::string("metric ") + std::string(to_string(kind_)) +
                              " cannot measure a " + (p.is_vector() ? "vector" : "string") +
                              " payload");
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double MetricOracle::raw(const Point& a, const Point& b) const {
  check_payload(a);
  check_payload(b);
  if (kind_ == MetricKind::Levenshtein)
    return static_cast<double>(levenshtein(a.str(), b.str()));

  const auto& x = a.vec();
  const auto& y = b.vec();
  if (x.size() != y.size())
    throw MetricMismatchError("vector lengths differ: " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
  double acc = 0.0;
  switch (kind_) {
    case MetricKind::L1:
      for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
      return acc;
    case MetricKind::L2:
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i] - y[i];
        acc += t * t;
      }
      return std::sqrt(acc);
    case MetricKind::LInf:
      for (std::size_t i = 0; i < x.size(); ++i) acc = std::max(acc, std::abs(x[i] - y[i]));
      return acc;
    case MetricKind::Levenshtein:
      break;
  }
  return acc;
}

double distance(const MetricOracle& oracle, const Point& a, const Point& b) { return oracle(a, b); }

void Sample::validate() const {
  if (points.empty()) throw ValidationError("sample is empty");
  if (points.size() != labels.size())
    throw ValidationError("sample has " + std::to_string(points.size()) + " points but " +
                          std::to_string(labels.size()) + " labels");
  if (k < 1) throw ValidationError("sample label count k must be >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(k) + 1, false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > k)
      throw ValidationError("label id " + std::to_string(labels[i]) + " at row " +
                            std::to_string(i) + " outside 1.." + std::to_string(k));
    seen[static_cast<std::size_t>(labels[i])] = true;
  }
  for (int y = 1; y <= k; ++y)
    if (!seen[static_cast<std::size_t>(y)])
      throw ValidationError("label id " + std::to_string(y) + " never occurs");
  const bool vec = points.front().is_vector();
  const std::size_t dim = vec ? points.front().vec().size() : 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_vector() != vec)
      throw ValidationError("row " + std::to_string(i) + " mixes vector and string payloads");
    if (vec && points[i].vec().size() != dim)
      throw ValidationError("row " + std::to_string(i) + " has dimension " +
                            std::to_string(points[i].vec().size()) + ", expected " +
                            std::to_string(dim));
  }
}

PairwiseDistances::PairwiseDistances(std::span<const Point> points, const MetricOracle& oracle,
                                     unsigned threads)
    : n_(points.size()), d_(n_ < 2 ? 0 : n_ * (n_ - 1) / 2) {
  parallel_for(n_ > 0 ? n_ - 1 : 0, threads, [&](std::size_t i) {
    double* row = d_.data() + offset(i, i + 1);
    for (std::size_t j = i + 1; j < n_; ++j) row[j - i - 1] = oracle(points[i], points[j]);
  });
  for (double v : d_) max_ = std::max(max_, v);
}

std::size_t PairwiseDistances::offset(std::size_t i, std::size_t j) const {
  // Row i starts after rows 0..i-1, which hold (n-1) + ... + (n-i) entries.
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

double PairwiseDistances::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  return d_[offset(i, j)];
}

MetricOracle normalize_sample(std::span<const Point> points, const MetricOracle& oracle) {
  if (points.size() < 2) throw DegenerateDiameterError("normalization needs at least two points");
  const MetricOracle unit = oracle.rescaled(1.0);
  const PairwiseDistances pd(points, unit);
  if (!(pd.max() > 0.0)) throw DegenerateDiameterError("all sample points coincide");
  return oracle.rescaled(1.0 / pd.max());
}

MetricOracle normalize_sample(const Sample& sample, const MetricOracle& oracle) {
  return normalize_sample(std::span<const Point>(sample.points), oracle);
}

double covering_bound(double epsilon, double diam, double ddim) {
  return std::pow(2.0 * diam / epsilon, ddim);
}

std::string_view to_string(DdimMethod method) {
  return method == DdimMethod::UserSupplied ? "user-supplied" : "net-counting";
}

std::size_t greedy_net_size(std::span<const Point> points, const MetricOracle& oracle, double r) {
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool covered = false;
    for (std::size_t c : centers) {
      if (oracle(points[i], points[c]) <= r) {
        covered = true;
        break;
      }
    }
    if (!covered) centers.push_back(i);
  }
  return centers.size();
}

DoublingEstimate estimate_ddim(std::span<const Point> points, const MetricOracle& oracle) {
  if (points.size() < 2) throw DegenerateDiameterError("ddim estimation needs at least two points");
  const PairwiseDistances pd(points, oracle);
  const double diam = pd.max();
  if (!(diam > 0.0)) throw DegenerateDiameterError("all sample points coincide");

  DoublingEstimate est;
  est.method = DdimMethod::NetCounting;
  const auto levels = static_cast<int>(std::floor(std::log2(static_cast<double>(points.size()))));
  for (int j = 1; j <= levels; ++j) {
    const double r = std::ldexp(diam, -j);
    est.scales_examined.push_back(r);
    est.net_sizes.push_back(greedy_net_size(points, oracle, r));
  }
  for (std::size_t j = 1; j < est.net_sizes.size(); ++j) {
    const double ratio =
        static_cast<double>(est.net_sizes[j]) / static_cast<double>(est.net_sizes[j - 1]);
    est.ddim = std::max(est.ddim, std::log2(ratio));
  }
  return est;
}

DoublingEstimate estimate_ddim(const Sample& sample, const MetricOracle& oracle) {
  return estimate_ddim(std::span<const Point>(sample.points), oracle);
}

DoublingEstimate user_ddim(double ddim) {
  if (!(ddim >= 0.0) || !std::isfinite(ddim))
    throw ValidationError("doubling dimension must be a nonnegative finite number");
  DoublingEstimate est;
  est.ddim = ddim;
  est.method = DdimMethod::UserSupplied;
  return est;
}

}  // namespace mmnn
