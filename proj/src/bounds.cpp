#include "mmnn/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "mmnn/error.hpp"

namespace mmnn {

double fat_constant(FatConstant c) { return c == FatConstant::Printed16 ? 16.0 : 64.0; }

std::string_view to_string(FatConstant c) {
  return c == FatConstant::Printed16 ? "16L" : "64L";
}

std::string_view to_string(PenaltyKind p) {
  switch (p) {
    case PenaltyKind::Combined: return "combined";
    case PenaltyKind::Rad: return "rad";
    case PenaltyKind::Fat: return "fat";
  }
  return "?";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "combined") return PenaltyKind::Combined;
  if (s == "rad") return PenaltyKind::Rad;
  if (s == "fat") return PenaltyKind::Fat;
  throw ValidationError("unknown penalty '" + std::string(name) + "' (combined, rad, fat)");
}

void BoundParams::validate() const {
  if (!(n >= 1.0) || !std::isfinite(n)) throw ValidationError("n must be >= 1");
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L must be positive and finite");
  if (!(D >= 0.0) || !std::isfinite(D)) throw ValidationError("D must be >= 0");
  if (k < 2) throw ValidationError("k must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be >= 0");
}

namespace {

void check_common(double L, double D, int k) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L must be positive and finite");
  if (!(D >= 0.0) || !std::isfinite(D)) throw ValidationError("D must be >= 0");
  if (k < 1) throw ValidationError("k must be >= 1");
}

// (ln 5k / n)^(1/(D+1))
double rate(double n, double D, int k) {
  return std::pow(std::log(5.0 * k) / n, 1.0 / (D + 1.0));
}

struct RadTerms {
  double complexity, stratification, confidence;
  bool clamped;
};

RadTerms rad_terms(const BoundParams& p) {
  p.validate();
  const double L = p.effective_L();
  RadTerms t{};
  t.complexity = 8.0 * L * rate(p.n, p.D, p.k);
  const double lg = std::log2(2.0 * L);
  const double inner = lg > 1.0 ? std::log(lg) : 0.0;
  t.clamped = !(lg > 1.0);
  t.stratification = std::sqrt(inner / p.n);
  t.confidence = std::sqrt(std::log(2.0 / p.delta) / (2.0 * p.n));
  return t;
}

struct FatTerms {
  double entropy, confidence, sample;
  bool clamped;
};

FatTerms fat_terms(const BoundParams& p) {
  p.validate();
  const double L = p.effective_L();
  FatTerms t{};
  t.entropy = 2.0 * std::pow(fat_constant(p.fat) * L, p.D) * std::log(20.0 * p.k);
  const double lg = std::log(2.0 * L / p.delta);
  t.clamped = !(lg > 0.0);
  t.confidence = t.clamped ? 0.0 : lg;
  t.sample = 1.0 / p.n;
  return t;
}

double fat_total(const BoundParams& p, const FatTerms& t) {
  return std::sqrt((2.0 / p.n) * (t.entropy + t.confidence)) + t.sample;
}

}  // namespace

double entropy_bound(double epsilon, double L, double D, int k) {
  check_common(L, D, k);
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  return std::pow(16.0 * L / epsilon, D) * std::log(5.0 * k / epsilon);
}

double rademacher_bound(double n, double L, double D, int k) {
  check_common(L, D, k);
  if (!(n >= 1.0)) throw ValidationError("n must be >= 1");
  return 2.0 * L * rate(n, D, k);
}

double rademacher_alpha_star(double n, double L, double D, int k) {
  check_common(L, D, k);
  if (!(n >= 1.0)) throw ValidationError("n must be >= 1");
  return std::pow(9.0 * std::pow(16.0 * L, D) * std::log(5.0 * k) / n, 1.0 / (D + 1.0));
}

double chaining_value(double alpha, double n, double L, double D, int k) {
  check_common(L, D, k);
  if (!(D > 1.0)) throw ValidationError("chaining integral diverges for D <= 1");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  const double integral = std::sqrt(std::log(5.0 * k) / n) * std::pow(16.0 * L, D / 2.0) *
                          (2.0 / (D - 1.0)) * std::pow(alpha, -(D - 1.0) / 2.0);
  return 4.0 * alpha + 12.0 * integral;
}

double delta_rad(const BoundParams& p) {
  const auto t = rad_terms(p);
  return t.complexity + t.stratification + t.confidence;
}

double delta_fat(const BoundParams& p) { return fat_total(p, fat_terms(p)); }

BoundValue delta_combined(const BoundParams& p) {
  const auto r = rad_terms(p);
  const auto f = fat_terms(p);
  BoundValue v;
  v.delta_rad = r.complexity + r.stratification + r.confidence;
  v.delta_fat = fat_total(p, f);
  v.combined = std::min(v.delta_rad, v.delta_fat);
  v.stratification_clamped = r.clamped;
  v.fat_log_clamped = f.clamped;
  v.details = {
      {"rad_complexity", r.complexity},
      {"rad_stratification", r.stratification},
      {"rad_confidence", r.confidence},
      {"fat_entropy", f.entropy},
      {"fat_confidence", f.confidence},
      {"fat_sample", f.sample},
  };
  return v;
}

double penalty(const BoundParams& p, PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Rad: return delta_rad(p);
    case PenaltyKind::Fat: return delta_fat(p);
    case PenaltyKind::Combined: break;
  }
  return delta_combined(p).combined;
}

DimredBound dimred_bound(double L, double alpha, double beta, int k, double n, double constant) {
  check_common(L, beta, k);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be >= 0");
  if (!(n >= 1.0)) throw ValidationError("n must be >= 1");
  if (!(constant > 0.0)) throw ValidationError("constant must be positive");
  const double r = rate(n, beta, k);
  DimredBound b;
  b.o_form = constant * L * (alpha + r);
  b.chain_alpha_over_n = 2.0 * L * r + L * alpha / n;
  b.chain_alpha = 2.0 * L * r + L * alpha;
  return b;
}

}  // namespace mmnn
