#include "browkit/stats.hpp"

#include "browkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace browkit::stats {

namespace {

// Continued fraction for I_x(a,b), evaluated by the modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
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
    const double m2 = 2.0 * m;
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
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete beta needs a > 0 and b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
  if (std::isnan(t)) throw InvalidArgument("t statistic is NaN");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidArgument("standard deviation needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TTestResult t_one_sample(std::span<const double> xs, double mu0) {
  if (xs.size() < 2) throw InvalidArgument("one-sample t-test needs n >= 2");
  TTestResult r;
  r.n1 = xs.size();
  r.mean1 = mean(xs);
  r.sd1 = sample_sd(xs);
  if (!(r.sd1 > 0.0)) throw InvalidArgument("one-sample t-test: sample has zero variance");
  r.df = static_cast<double>(r.n1 - 1);
  r.t = (r.mean1 - mu0) / (r.sd1 / std::sqrt(static_cast<double>(r.n1)));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

TTestResult t_welch(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 2 || ys.size() < 2) throw InvalidArgument("Welch t-test needs n >= 2 per sample");
  TTestResult r;
  r.n1 = xs.size();
  r.n2 = ys.size();
  r.mean1 = mean(xs);
  r.mean2 = mean(ys);
  r.sd1 = sample_sd(xs);
  r.sd2 = sample_sd(ys);
  const double v1 = r.sd1 * r.sd1 / static_cast<double>(r.n1);
  const double v2 = r.sd2 * r.sd2 / static_cast<double>(r.n2);
  if (!(v1 + v2 > 0.0)) throw InvalidArgument("Welch t-test: both samples have zero variance");
  r.t = (r.mean1 - r.mean2) / std::sqrt(v1 + v2);
  r.df = (v1 + v2) * (v1 + v2) /
         (v1 * v1 / static_cast<double>(r.n1 - 1) + v2 * v2 / static_cast<double>(r.n2 - 1));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

}  // namespace browkit::stats
