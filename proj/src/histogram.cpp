#include <cmath>

#include "rstjpeg/analysis.hpp"

namespace rstjpeg {

double normalized_correlation(const Histogram& a, const Histogram& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    ab += x * y;
    aa += x * x;
    bb += y * y;
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

double pearson_correlation(const Histogram& a, const Histogram& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += static_cast<double>(a[i]);
    mb += static_cast<double>(b[i]);
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]) - ma;
    const double y = static_cast<double>(b[i]) - mb;
    ab += x * y;
    aa += x * x;
    bb += y * y;
  }
  // Constant histograms carry no shape; they correlate only with themselves.
  if (aa == 0 || bb == 0) return a == b ? 1.0 : 0.0;
  return ab / std::sqrt(aa * bb);
}

double chi_square_distance(const Histogram& a, const Histogram& b) {
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  if (na == 0 || nb == 0) return na == nb ? 0.0 : 2.0;
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]) / na;
    const double y = static_cast<double>(b[i]) / nb;
    if (x + y > 0) d += (x - y) * (x - y) / (x + y);
  }
  return d;
}

namespace {

template <typename F>
ChannelPairScores pairwise(const std::array<Histogram, 3>& h, F&& score) {
  return {score(h[0], h[1]), score(h[0], h[2]), score(h[1], h[2])};
}

template <typename F>
double against(const std::array<Histogram, 3>& h, const std::array<Histogram, 3>& ref, F&& score) {
  return (score(h[0], ref[0]) + score(h[1], ref[1]) + score(h[2], ref[2])) / 3.0;
}

std::array<Histogram, 3> channel_histograms(const RasterImage& img) {
  if (img.channels != 3) fail(ErrorKind::ChannelMismatch, "histogram analysis needs an RGB image");
  std::array<Histogram, 3> h{};
  for (std::size_t i = 0; i < img.samples.size(); ++i) ++h[i % 3][img.samples[i]];
  return h;
}

}  // namespace

HistogramReport histogram_report(const RasterImage& img, const RasterImage* reference) {
  HistogramReport r;
  r.channels = channel_histograms(img);
  r.similarity = pairwise(r.channels, normalized_correlation);
  r.pearson = pairwise(r.channels, pearson_correlation);
  r.chi_square = pairwise(r.channels, chi_square_distance);
  if (reference) {
    const auto ref = channel_histograms(*reference);
    r.similarity_to_reference = against(r.channels, ref, normalized_correlation);
    r.pearson_to_reference = against(r.channels, ref, pearson_correlation);
    r.chi_square_to_reference = against(r.channels, ref, chi_square_distance);
  }
  return r;
}

}  // namespace rstjpeg
