#include <algorithm>
#include <cmath>
#include <numeric>

#include "rstjpeg/analysis.hpp"

namespace rstjpeg {

namespace {

double sorted_quantile(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Kolmogorov distribution tail, Q(lambda) = 2 sum_j (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12 * std::fabs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  return sorted_quantile(values, q);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "box statistics of an empty sample");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  s.min = values.front();
  s.max = values.back();
  s.p25 = sorted_quantile(values, 0.25);
  s.p50 = sorted_quantile(values, 0.50);
  s.p75 = sorted_quantile(values, 0.75);
  const double iqr = s.p75 - s.p25;
  const double lo_fence = s.p25 - 1.5 * iqr;
  const double hi_fence = s.p75 + 1.5 * iqr;
  s.whisker_low = s.p25;
  s.whisker_high = s.p75;
  bool have_low = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!have_low) {
      s.whisker_low = v;
      have_low = true;
    }
    s.whisker_high = v;
  }
  return s;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::InvalidArgument, "KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.d = d;
  const double en = std::sqrt(n * m / (n + m));
  r.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
  return r;
}

}  // namespace rstjpeg
