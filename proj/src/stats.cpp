#include "newsrec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "newsrec/types.hpp"

namespace newsrec {

namespace {

constexpr double kTolerance = 1e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

/// Continued fraction for I_x(a, b), modified Lentz. Converges fast for x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kTolerance) return h;
  }
  throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw Error("incomplete beta: a and b must be > 0");
  if (std::isnan(x)) throw Error("incomplete beta: x is NaN");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_p_value(double t, double df) {
  if (!(df > 0)) throw Error("t distribution: df must be > 0");
  if (std::isnan(t)) throw Error("t distribution: t is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  const double p = incomplete_beta(df / 2.0, 0.5, x);
  return std::clamp(p, 0.0, 1.0);
}

std::string_view to_string(TTestVariant v) { return v == TTestVariant::Welch ? "welch" : "student"; }

std::optional<TTestVariant> parse_variant(std::string_view s) {
  if (s == "student") return TTestVariant::Student;
  if (s == "welch") return TTestVariant::Welch;
  return std::nullopt;
}

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

ComparisonReport t_test(std::span<const double> a, std::span<const double> b, TTestVariant variant,
                        std::string metric) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error("t-test" + (metric.empty() ? std::string() : " on " + metric) + ": each sample needs n >= 2 (got " +
                std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  }
  for (auto xs : {a, b}) {
    for (double x : xs) {
      if (!std::isfinite(x)) throw Error("t-test: non-finite sample value");
    }
  }
  ComparisonReport r;
  r.metric = std::move(metric);
  r.variant = variant;
  r.group_a = summarize(a);
  r.group_b = summarize(b);
  const double na = static_cast<double>(r.group_a.n), nb = static_cast<double>(r.group_b.n);
  const double va = r.group_a.sd * r.group_a.sd, vb = r.group_b.sd * r.group_b.sd;
  const double diff = r.group_a.mean - r.group_b.mean;

  double se2 = 0;
  if (variant == TTestVariant::Student) {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
    se2 = pooled * (1.0 / na + 1.0 / nb);
  } else {
    const double qa = va / na, qb = vb / nb;
    se2 = qa + qb;
    const double denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
    r.df = denom > 0 ? se2 * se2 / denom : na + nb - 2.0;
  }

  if (se2 <= 0) {
    r.t_stat = diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = diff == 0 ? 1.0 : 0.0;
  } else {
    r.t_stat = diff / std::sqrt(se2);
    r.p_value = student_t_p_value(r.t_stat, r.df);
  }
  r.significant = r.p_value < kAlpha;
  return r;
}

}  // namespace newsrec
