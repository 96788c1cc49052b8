#include "ocm/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "ocm/error.hpp"

namespace ocm::stats {

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size() && xs.size() > 1, ErrorCode::InvalidArgument, "correlation needs paired samples");
  const Summary a = summarize(xs);
  const Summary b = summarize(ys);
  double cov = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) cov += (xs[i] - a.mean) * (ys[i] - b.mean);
  cov /= static_cast<double>(xs.size() - 1);
  return cov / (a.stddev * b.stddev);
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  require(!xs.empty(), ErrorCode::InvalidArgument, "KS test needs samples");
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::InvalidArgument, "KS test needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, double n_eff) {
  const double sq = std::sqrt(n_eff);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical(double alpha, double n_eff) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n_eff);
}

double gamma_cdf(double shape, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x);
}

}  // namespace ocm::stats
