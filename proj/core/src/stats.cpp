#include "scav/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scav {

namespace {

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return s / static_cast<double>(xs.size() - 1);
}

/// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  // the continued fraction converges fastest for x < (a+1)/(a+b+2)
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_sf: df must be positive");
  if (std::isinf(t)) return t > 0.0 ? 0.0 : 1.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? tail : 1.0 - tail;
}

SummaryStats ci95(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ci95: empty input");
  SummaryStats s;
  s.n = samples.size();
  s.mean = mean_of(samples);
  if (s.n >= 2) s.se = std::sqrt(sample_variance(samples, s.mean) / s.n);
  s.ci95_half = 1.96 * s.se;
  return s;
}

namespace {

TTestResult finish_t_test(double t_num, double t_den, double df, double mean_diff) {
  TTestResult r;
  r.df = df;
  if (t_den == 0.0) {
    // degenerate variance: exact-equality case
    if (mean_diff == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = t_num > 0.0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.t = t_num / t_den;
  r.p = 2.0 * student_t_sf(std::abs(r.t), df);
  return r;
}

}  // namespace

TTestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_t: need at least two samples per group");
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sample_variance(a, ma), vb = sample_variance(b, mb);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = va / na, sb = vb / nb;
  const double den = std::sqrt(sa + sb);
  double df = 1.0;
  if (sa + sb > 0.0)
    df = (sa + sb) * (sa + sb) /
         (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  return finish_t_test(ma - mb, den, df, ma - mb);
}

TTestResult paired_t(std::span<const double> diffs) {
  if (diffs.size() < 2)
    throw std::invalid_argument("paired_t: need at least two differences");
  const double m = mean_of(diffs);
  const double v = sample_variance(diffs, m);
  const double n = static_cast<double>(diffs.size());
  return finish_t_test(m, std::sqrt(v / n), n - 1.0, m);
}

}  // namespace scav
