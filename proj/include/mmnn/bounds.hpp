#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mmnn {

/// Constant c in the (c L)^D factor of the scale-sensitive bound. The
/// default is 16; 64 is what the entropy bound gives at eps = 1/4.
enum class FatConstant { Printed16, Entropy64 };

double fat_constant(FatConstant c);
std::string_view to_string(FatConstant c);

/// Which penalty enters the SRM objective.
enum class PenaltyKind { Combined, Rad, Fat };

std::string_view to_string(PenaltyKind p);
PenaltyKind parse_penalty_kind(std::string_view name);

/// Inputs shared by every bound. n is real-valued so that closed forms can be
/// probed at non-integer sizes; callers normally pass a count.
struct BoundParams {
  double n = 1.0;
  double L = 1.0;
  double D = 1.0;
  int k = 2;
  double delta = 0.01;
  /// ANN slack. Bounds are evaluated at L (1 + eta).
  double eta = 0.0;
  FatConstant fat = FatConstant::Printed16;

  /// Throws ValidationError: n >= 1, L > 0, D >= 0, k >= 2, delta in (0,1), eta >= 0.
  void validate() const;
  double effective_L() const { return L * (1.0 + eta); }
};

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundValue {
  double delta_rad = 0.0;
  double delta_fat = 0.0;
  double combined = 0.0;
  /// Additive terms of both bounds, in order.
  std::vector<BoundTerm> details;
  /// The log log2(2L) term was nonpositive and clamped to 0.
  bool stratification_clamped = false;
  /// ln(2L / delta) was nonpositive and clamped to 0.
  bool fat_log_clamped = false;
};

/// (16 L / eps)^D ln(5k / eps). Natural log.
double entropy_bound(double epsilon, double L, double D, int k);

/// 2 L (ln(5k) / n)^(1/(D+1)).
double rademacher_bound(double n, double L, double D, int k);

/// Chaining cutoff (9 (16 L)^D ln(5k) / n)^(1/(D+1)).
double rademacher_alpha_star(double n, double L, double D, int k);

/// Upper bound on the chaining objective 4 a + 12 int_a^inf sqrt(H(eps)/n) d eps,
/// integrated with the entropy bound and evaluated at a. Used only as a sanity
/// cross-check of the closed form; requires D > 1 for convergence.
double chaining_value(double alpha, double n, double L, double D, int k);

/// 8 L (ln 5k / n)^(1/(D+1)) + sqrt(max(0, ln log2(2L)) / n) + sqrt(ln(2/delta) / (2n)).
double delta_rad(const BoundParams& p);
/// sqrt((2/n)(2 (c L)^D ln(20k) + max(0, ln(2L/delta)))) + 1/n.
double delta_fat(const BoundParams& p);
BoundValue delta_combined(const BoundParams& p);
double penalty(const BoundParams& p, PenaltyKind kind);

struct DimredBound {
  /// constant * L (alpha + (ln 5k / n)^(1/(1+beta)))
  double o_form = 0.0;
  /// 2 L (ln 5k / n)^(1/(1+beta)) + L alpha / n
  double chain_alpha_over_n = 0.0;
  /// 2 L (ln 5k / n)^(1/(1+beta)) + L alpha
  double chain_alpha = 0.0;
};

DimredBound dimred_bound(double L, double alpha, double beta, int k, double n,
                         double constant = 1.0);

}  // namespace mmnn
