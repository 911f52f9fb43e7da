#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mmnn {

/// Unit interval, or a square under L-infinity or L2. The L2 square has side
/// 1/sqrt(2) so that every domain has diameter 1.
enum class Domain { Interval, SquareLInf, SquareL2 };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view name);
int domain_dimension(Domain d);
double domain_side(Domain d);

struct DistributionSpec {
  Domain domain = Domain::Interval;
  int k = 2;
  double L_post = 1.0;
  std::uint64_t seed = 0;
  /// Grid cells per axis for the piecewise-linear posterior.
  int cells = 16;
};

/// Uniform marginal with piecewise-linear (1-D) or bilinear (2-D) posteriors
/// interpolating anchor vectors on a regular grid. Anchors lie in the
/// probability simplex, so every interpolated posterior does too.
class SyntheticDistribution {
 public:
  /// anchors: (cells+1) vectors in 1-D, (cells+1)^2 in 2-D (row-major, x
  /// fastest). Throws ValidationError if an anchor leaves the simplex or the
  /// certified Lipschitz constant exceeds L_post.
  SyntheticDistribution(Domain domain, int cells, std::vector<std::vector<double>> anchors,
                        double L_post);

  Domain domain() const { return domain_; }
  int dimension() const { return domain_dimension(domain_); }
  int k() const { return k_; }
  int cells() const { return cells_; }
  double L_post() const { return L_post_; }
  const std::vector<std::vector<double>>& anchors() const { return anchors_; }
  /// Sup-norm Lipschitz constant implied by the anchor differences.
  double certified_lipschitz() const { return certified_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// eta(x); x has dimension() coordinates inside the domain.
  std::vector<double> posterior(const double* x) const;
  double distance(const double* a, const double* b) const;

 private:
  Domain domain_;
  int cells_;
  int k_;
  double L_post_;
  double certified_ = 0.0;
  std::vector<std::vector<double>> anchors_;
  std::vector<std::string> warnings_;
};

/// Seeded random instance. Anchors follow convex steps towards random simplex
/// vertices, each step kept within the Lipschitz budget of one grid cell.
SyntheticDistribution make_distribution(const DistributionSpec& spec);

/// Same posterior everywhere on the interval.
SyntheticDistribution constant_distribution(std::vector<double> eta);

/// E[1 - max_y eta_y(X)]. Exact per cell in 1-D; in 2-D exact along y and
/// adaptive Gauss-Kronrod along x.
double bayes_risk(const SyntheticDistribution& dist);

struct RiskReport {
  double bayes_risk = 0.0;
  double mean_nn_risk = 0.0;
  int trials = 0;
  int n = 0;
  int test_points = 0;
  double bound_rhs = 0.0;
  double mc_stderr = 0.0;
  std::uint64_t seed = 0;
  std::string rng;
  bool pass = false;  // mean_nn_risk <= bound_rhs + 3 mc_stderr
};

/// Draws `trials` samples of size n, fits plain 1-NN on each and measures its
/// risk on fresh test points through the conditional risk 1 - eta_{g(x)}(x).
RiskReport nn_risk_trials(const SyntheticDistribution& dist, int n, int trials, int test_points,
                          std::uint64_t seed, unsigned threads = 0);

}  // namespace mmnn
