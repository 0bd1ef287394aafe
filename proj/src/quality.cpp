#include <cmath>
#include <limits>
#include <string>

#include "rstjpeg/pixels.hpp"

namespace rstjpeg {

namespace {

void require_same_shape(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    fail(ErrorKind::DimensionMismatch, std::to_string(a.width) + "x" + std::to_string(a.height) + "x" +
                                           std::to_string(a.channels) + " vs " + std::to_string(b.width) +
                                           "x" + std::to_string(b.height) + "x" + std::to_string(b.channels));
  }
}

// Sum over every win x win window; result is (rows-win+1) x (cols-win+1).
LumaPlane box_sum(const LumaPlane& p, int win) {
  const Eigen::Index rows = p.rows() - win + 1;
  const Eigen::Index cols = p.cols() - win + 1;
  LumaPlane horiz(p.rows(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) horiz.col(c) = p.middleCols(c, win).rowwise().sum();
  LumaPlane out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) out.row(r) = horiz.middleRows(r, win).colwise().sum();
  return out;
}

}  // namespace

LumaPlane luma(const RasterImage& img) {
  LumaPlane y(static_cast<Eigen::Index>(img.height), static_cast<Eigen::Index>(img.width));
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          img.channels == 1 ? img.at(c, r)
                            : 0.299 * img.at(c, r, 0) + 0.587 * img.at(c, r, 1) + 0.114 * img.at(c, r, 2);
    }
  }
  return y;
}

double psnr(const RasterImage& a, const RasterImage& b) {
  require_same_shape(a, b);
  if (a.samples.empty()) fail(ErrorKind::DimensionMismatch, "empty image");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.samples.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& params) {
  require_same_shape(a, b);
  return ssim(luma(a), luma(b), params);
}

double ssim(const LumaPlane& x, const LumaPlane& y, const SsimParams& params) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) fail(ErrorKind::DimensionMismatch, "luma planes differ");
  const int w = params.window;
  if (x.rows() < w || x.cols() < w) fail(ErrorKind::DimensionMismatch, "image smaller than the SSIM window");

  const double n = static_cast<double>(w) * w;
  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

  const LumaPlane mx = box_sum(x, w) / n;
  const LumaPlane my = box_sum(y, w) / n;
  const LumaPlane vx = box_sum(x * x, w) / n - mx * mx;
  const LumaPlane vy = box_sum(y * y, w) / n - my * my;
  const LumaPlane cxy = box_sum(x * y, w) / n - mx * my;

  const LumaPlane map = ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                        ((mx * mx + my * my + c1) * (vx + vy + c2));
  return map.mean();
}

}  // namespace rstjpeg
