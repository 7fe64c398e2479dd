#pragma once

#include <cstddef>
#include <span>

namespace scav {

struct SummaryStats {
  double mean = 0.0;
  double se = 0.0;         // standard error of the mean (sample sd / sqrt(n))
  double ci95_half = 0.0;  // 1.96 * se
  std::size_t n = 0;
};

/// Normal-approximation 95% confidence interval. n = 1 gives zero SE.
SummaryStats ci95(std::span<const double> samples);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
  double df = 0.0;
};

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom. Degenerate (zero-variance) inputs report the exact-equality
/// case: p = 1 when the means agree, 0 otherwise.
TTestResult welch_t(std::span<const double> a, std::span<const double> b);

/// One-sample t-test of the paired differences against zero.
TTestResult paired_t(std::span<const double> diffs);

/// P(T > t) for Student's t with df degrees of freedom.
double student_t_sf(double t, double df);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace scav
