#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ocm::stats {

/// Two-sided standard normal quantile for 99% intervals.
inline constexpr double kZ99 = 2.5758293035489004;

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1)
  double stderr_mean = 0.0;

  double ci_low(double z = kZ99) const noexcept { return mean - z * stderr_mean; }
  double ci_high(double z = kZ99) const noexcept { return mean + z * stderr_mean; }
};

Summary summarize(std::span<const double> xs);

double correlation(std::span<const double> xs, std::span<const double> ys);

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and `cdf`.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic P(D > d) for effective sample size n_eff, with Stephens' small-sample correction.
double ks_pvalue(double d, double n_eff);

/// Effective sample size n*m/(n+m) for the two-sample test.
inline double ks_effective_size(std::size_t n, std::size_t m) {
  return static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
}

/// Asymptotic critical value c(alpha)/sqrt(n_eff); c(0.01) = 1.6276.
double ks_critical(double alpha, double n_eff);

/// Regularized lower incomplete gamma: CDF of Gamma(shape, 1) at x.
double gamma_cdf(double shape, double x);

}  // namespace ocm::stats
