#pragma once

#include <cstddef>
#include <span>

namespace browkit::stats {

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  /// Two-sided.
  double p = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;  // 0 for one-sample tests
  double mean1 = 0.0;
  double mean2 = 0.0;
  double sd1 = 0.0;
  double sd2 = 0.0;
};

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
/// (modified Lentz) with the usual symmetry switch. Relative error ~1e-14.
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom (df may be
/// fractional).
double student_t_two_sided_p(double t, double df);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> xs);

/// Throws InvalidArgument for n < 2 or zero sample variance.
TTestResult t_one_sample(std::span<const double> xs, double mu0 = 0.0);

/// Welch's unequal-variance test with Welch-Satterthwaite df. Throws when a
/// sample has n < 2 or both samples have zero variance.
TTestResult t_welch(std::span<const double> xs, std::span<const double> ys);

}  // namespace browkit::stats
