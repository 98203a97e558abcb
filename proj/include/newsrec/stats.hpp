#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace newsrec {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_p_value(double t, double df);

enum class TTestVariant { Student, Welch };
std::string_view to_string(TTestVariant v);
std::optional<TTestVariant> parse_variant(std::string_view s);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

SampleSummary summarize(std::span<const double> xs);

struct ComparisonReport {
  std::string metric;
  SampleSummary group_a;
  SampleSummary group_b;
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool significant = false;
  TTestVariant variant = TTestVariant::Student;
};

inline constexpr double kAlpha = 0.05;

/// Two-sample t-test for mean(a) - mean(b). Throws Error when either sample
/// has fewer than 2 values or a non-finite value.
ComparisonReport t_test(std::span<const double> a, std::span<const double> b,
                        TTestVariant variant = TTestVariant::Student, std::string metric = {});

}  // namespace newsrec
