#include "mmnn/bayes_sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mmnn/error.hpp"
#include "mmnn/parallel.hpp"
#include "mmnn/rng.hpp"

namespace mmnn {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Interval: return "interval";
    case Domain::SquareLInf: return "square-linf";
    case Domain::SquareL2: return "square-l2";
  }
  return "?";
}

Domain parse_domain(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "interval") return Domain::Interval;
  if (s == "square-linf") return Domain::SquareLInf;
  if (s == "square-l2") return Domain::SquareL2;
  throw ValidationError("unknown domain '" + std::string(name) +
                        "' (interval, square-linf, square-l2)");
}

int domain_dimension(Domain d) { return d == Domain::Interval ? 1 : 2; }

double domain_side(Domain d) { return d == Domain::SquareL2 ? 1.0 / std::sqrt(2.0) : 1.0; }

namespace {

constexpr double kSimplexTol = 1e-12;

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

SyntheticDistribution::SyntheticDistribution(Domain domain, int cells,
                                             std::vector<std::vector<double>> anchors,
                                             double L_post)
    : domain_(domain), cells_(cells), k_(0), L_post_(L_post), anchors_(std::move(anchors)) {
  if (cells_ < 1) throw ValidationError("need at least one grid cell");
  if (!(L_post_ > 0.0)) throw ValidationError("L_post must be positive");
  const std::size_t side = static_cast<std::size_t>(cells_) + 1;
  const std::size_t expect = dimension() == 1 ? side : side * side;
  if (anchors_.size() != expect)
    throw ValidationError("expected " + std::to_string(expect) + " anchors, got " +
                          std::to_string(anchors_.size()));
  k_ = static_cast<int>(anchors_.front().size());
  if (k_ < 1) throw ValidationError("anchors need at least one class");
  for (const auto& a : anchors_) {
    if (a.size() != static_cast<std::size_t>(k_)) throw ValidationError("ragged anchors");
    double s = 0.0;
    for (double v : a) {
      if (!(v >= 0.0)) throw ValidationError("anchor has a negative probability");
      s += v;
    }
    if (std::abs(s - 1.0) > kSimplexTol) throw ValidationError("anchor does not sum to 1");
  }

  const double h = domain_side(domain_) / cells_;
  if (dimension() == 1) {
    for (std::size_t i = 0; i + 1 < side; ++i)
      certified_ = std::max(certified_, sup_diff(anchors_[i], anchors_[i + 1]) / h);
  } else {
    // Bilinear cells: |f(p) - f(q)| <= g (|dx| + |dy|) / h <= 2 g d(p, q) / h,
    // with g the largest edge difference, for both L-infinity and L2.
    double g = 0.0;
    for (std::size_t j = 0; j < side; ++j)
      for (std::size_t i = 0; i < side; ++i) {
        if (i + 1 < side) g = std::max(g, sup_diff(anchors_[j * side + i], anchors_[j * side + i + 1]));
        if (j + 1 < side) g = std::max(g, sup_diff(anchors_[j * side + i], anchors_[(j + 1) * side + i]));
      }
    certified_ = 2.0 * g / h;
  }
  if (certified_ > L_post_ * (1.0 + 1e-12))
    throw ValidationError("anchors are " + std::to_string(certified_) + "-Lipschitz, above L_post " +
                          std::to_string(L_post_));

  const auto first = argmax(anchors_.front());
  bool varies = false;
  for (const auto& a : anchors_) varies = varies || argmax(a) != first;
  if (!varies && k_ > 1)
    warnings_.push_back("Bayes classifier is constant; L_post may be too small to separate classes");
}

std::vector<double> SyntheticDistribution::posterior(const double* x) const {
  const double side = domain_side(domain_);
  auto locate = [&](double c, std::size_t& cell, double& t) {
    const double u = std::clamp(c / side, 0.0, 1.0) * cells_;
    cell = std::min(static_cast<std::size_t>(u), static_cast<std::size_t>(cells_) - 1);
    t = u - static_cast<double>(cell);
  };
  std::vector<double> out(static_cast<std::size_t>(k_));
  std::size_t i = 0;
  double tx = 0.0;
  locate(x[0], i, tx);
  if (dimension() == 1) {
    const auto& a = anchors_[i];
    const auto& b = anchors_[i + 1];
    for (std::size_t y = 0; y < out.size(); ++y) out[y] = (1.0 - tx) * a[y] + tx * b[y];
    return out;
  }
  std::size_t j = 0;
  double ty = 0.0;
  locate(x[1], j, ty);
  const std::size_t side_n = static_cast<std::size_t>(cells_) + 1;
  const auto& a00 = anchors_[j * side_n + i];
  const auto& a10 = anchors_[j * side_n + i + 1];
  const auto& a01 = anchors_[(j + 1) * side_n + i];
  const auto& a11 = anchors_[(j + 1) * side_n + i + 1];
  for (std::size_t y = 0; y < out.size(); ++y)
    out[y] = (1.0 - ty) * ((1.0 - tx) * a00[y] + tx * a10[y]) + ty * ((1.0 - tx) * a01[y] + tx * a11[y]);
  return out;
}

double SyntheticDistribution::distance(const double* a, const double* b) const {
  switch (domain_) {
    case Domain::Interval: return std::abs(a[0] - b[0]);
    case Domain::SquareLInf: return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
    case Domain::SquareL2: return std::hypot(a[0] - b[0], a[1] - b[1]);
  }
  return 0.0;
}

namespace {

std::vector<double> random_vertex(StreamRng& rng, int k) {
  std::vector<double> v(static_cast<std::size_t>(k), 0.0);
  v[rng.below(static_cast<std::uint64_t>(k))] = 1.0;
  return v;
}

std::vector<double> random_simplex_point(StreamRng& rng, int k) {
  std::vector<double> v(static_cast<std::size_t>(k));
  double s = 0.0;
  for (auto& x : v) {
    x = -std::log1p(-rng.uniform());
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

// Walk of length `steps`, each step a convex move towards a random vertex
// whose sup-norm length is at most `budget`.
std::vector<std::vector<double>> chain(StreamRng& rng, int k, int steps, double budget) {
  std::vector<std::vector<double>> out;
  out.push_back(random_simplex_point(rng, k));
  for (int s = 0; s < steps; ++s) {
    const auto& cur = out.back();
    const auto target = random_vertex(rng, k);
    const double gap = sup_diff(cur, target);
    const double t = gap > 0.0 ? std::min(1.0, budget / gap) : 0.0;
    std::vector<double> next(cur.size());
    double sum = 0.0;
    for (std::size_t y = 0; y < next.size(); ++y) {
      next[y] = cur[y] + t * (target[y] - cur[y]);
      sum += next[y];
    }
    for (auto& v : next) v /= sum;
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

SyntheticDistribution make_distribution(const DistributionSpec& spec) {
  if (spec.k < 2) throw ValidationError("k must be >= 2");
  if (!(spec.L_post > 0.0)) throw ValidationError("L_post must be positive");
  if (spec.cells < 1) throw ValidationError("need at least one grid cell");
  StreamRng rng(spec.seed, 0);
  const double h = domain_side(spec.domain) / spec.cells;
  // Renormalizing a step can stretch it by a few ulps; keep a margin.
  const double shrink = 1.0 - 1e-9;
  std::vector<std::vector<double>> anchors;
  if (domain_dimension(spec.domain) == 1) {
    anchors = chain(rng, spec.k, spec.cells, spec.L_post * h * shrink);
  } else {
    // a_ij = (u_i + v_j) / 2: edge differences are half a chain step, and the
    // bilinear certificate doubles them back to L_post.
    const auto u = chain(rng, spec.k, spec.cells, spec.L_post * h * shrink);
    const auto v = chain(rng, spec.k, spec.cells, spec.L_post * h * shrink);
    for (const auto& vj : v)
      for (const auto& ui : u) {
        std::vector<double> a(ui.size());
        for (std::size_t y = 0; y < a.size(); ++y) a[y] = 0.5 * (ui[y] + vj[y]);
        anchors.push_back(std::move(a));
      }
  }
  return SyntheticDistribution(spec.domain, spec.cells, std::move(anchors), spec.L_post);
}

SyntheticDistribution constant_distribution(std::vector<double> eta) {
  return SyntheticDistribution(Domain::Interval, 1, {eta, eta}, 1.0);
}

namespace {

// Exact integral over [0, len] of 1 - max_y f_y(t), where each f_y is linear
// from a[y] at t = 0 to b[y] at t = len. The max is piecewise linear with
// kinks only where two lines cross, so the trapezoid rule on those is exact.
double integrate_linear_loss(const std::vector<double>& a, const std::vector<double>& b, double len) {
  std::vector<double> ts{0.0, 1.0};
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double slope = (b[i] - a[i]) - (b[j] - a[j]);
      if (slope == 0.0) continue;
      const double t = (a[j] - a[i]) / slope;
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  std::sort(ts.begin(), ts.end());
  auto top = [&](double t) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < a.size(); ++y) m = std::max(m, a[y] + t * (b[y] - a[y]));
    return m;
  };
  double area = 0.0;
  double prev_t = ts.front(), prev_v = top(prev_t);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double v = top(ts[i]);
    area += 0.5 * (ts[i] - prev_t) * (prev_v + v);
    prev_t = ts[i];
    prev_v = v;
  }
  return len * (1.0 - area);
}

}  // namespace

double bayes_risk(const SyntheticDistribution& dist) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned kDepth = 20;
  constexpr double kRelTol = 1e-10;
  const double h = domain_side(dist.domain()) / dist.cells();
  const double area = std::pow(domain_side(dist.domain()), dist.dimension());
  double total = 0.0;
  for (int i = 0; i < dist.cells(); ++i) {
    const double x0 = i * h, x1 = (i + 1) * h;
    if (dist.dimension() == 1) {
      const auto a = dist.posterior(&x0), b = dist.posterior(&x1);
      total += integrate_linear_loss(a, b, h);
      continue;
    }
    // Bilinear posteriors are linear in y at fixed x: exact inner integral,
    // adaptive quadrature across x.
    for (int j = 0; j < dist.cells(); ++j) {
      const double y0 = j * h, y1 = (j + 1) * h;
      auto inner = [&](double x) {
        const double p0[2] = {x, y0}, p1[2] = {x, y1};
        return integrate_linear_loss(dist.posterior(p0), dist.posterior(p1), h);
      };
      total += gauss_kronrod<double, 15>::integrate(inner, x0, x1, kDepth, kRelTol);
    }
  }
  return total / area;
}

namespace {

void draw_point(const SyntheticDistribution& dist, StreamRng& rng, double* out) {
  const double side = domain_side(dist.domain());
  for (int c = 0; c < dist.dimension(); ++c) out[c] = rng.uniform() * side;
}

int draw_label(const std::vector<double>& eta, StreamRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t y = 0; y < eta.size(); ++y) {
    acc += eta[y];
    if (u < acc) return static_cast<int>(y);
  }
  // Rounding left u above the running sum; take the last class with mass.
  for (std::size_t y = eta.size(); y-- > 0;)
    if (eta[y] > 0.0) return static_cast<int>(y);
  return 0;
}

double trial_risk(const SyntheticDistribution& dist, int n, int test_points, StreamRng& rng) {
  const int D = dist.dimension();
  std::vector<double> xs(static_cast<std::size_t>(n) * D);
  std::vector<int> ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double* p = &xs[static_cast<std::size_t>(i) * D];
    draw_point(dist, rng, p);
    ys[static_cast<std::size_t>(i)] = draw_label(dist.posterior(p), rng);
  }

  std::vector<std::size_t> order;
  if (D == 1) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b] || (xs[a] == xs[b] && a < b); });
  }
  auto nearest = [&](const double* q) -> std::size_t {
    if (D == 1) {
      auto it = std::lower_bound(order.begin(), order.end(), q[0],
                                 [&](std::size_t a, double v) { return xs[a] < v; });
      std::size_t best = order.size();
      double best_d = 0.0;
      auto offer = [&](std::size_t idx) {
        const double d = std::abs(xs[idx] - q[0]);
        if (best == order.size() || d < best_d || (d == best_d && idx < best)) {
          best = idx;
          best_d = d;
        }
      };
      if (it != order.end()) offer(*it);
      if (it != order.begin()) offer(*std::prev(it));
      return best;
    }
    std::size_t best = 0;
    double best_d = dist.distance(q, &xs[0]);
    for (std::size_t i = 1; i < ys.size(); ++i) {
      const double d = dist.distance(q, &xs[i * D]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };

  double risk = 0.0;
  double q[2] = {0.0, 0.0};
  for (int t = 0; t < test_points; ++t) {
    draw_point(dist, rng, q);
    const auto eta = dist.posterior(q);
    risk += 1.0 - eta[static_cast<std::size_t>(ys[nearest(q)])];
  }
  return risk / test_points;
}

}  // namespace

RiskReport nn_risk_trials(const SyntheticDistribution& dist, int n, int trials, int test_points,
                          std::uint64_t seed, unsigned threads) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (test_points < 1) throw ValidationError("test_points must be >= 1");
  std::vector<double> risks(static_cast<std::size_t>(trials));
  parallel_for(risks.size(), threads, [&](std::size_t t) {
    StreamRng rng(seed, t + 1);
    risks[t] = trial_risk(dist, n, test_points, rng);
  });

  RiskReport r;
  r.n = n;
  r.trials = trials;
  r.test_points = test_points;
  r.seed = seed;
  r.rng = StreamRng::name();
  r.bayes_risk = bayes_risk(dist);
  r.mean_nn_risk = std::accumulate(risks.begin(), risks.end(), 0.0) / trials;
  double ss = 0.0;
  for (double v : risks) ss += (v - r.mean_nn_risk) * (v - r.mean_nn_risk);
  r.mc_stderr = trials > 1 ? std::sqrt(ss / (trials - 1) / trials) : 0.0;
  const double D = dist.dimension();
  r.bound_rhs = 2.0 * r.bayes_risk + 4.0 * dist.L_post() * std::pow(static_cast<double>(n), -1.0 / (D + 1.0));
  r.pass = r.mean_nn_risk <= r.bound_rhs + 3.0 * r.mc_stderr;
  return r;
}

}  // namespace mmnn
