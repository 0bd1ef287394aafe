#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "rstjpeg/pixels.hpp"

namespace rstjpeg {

namespace {

constexpr std::array<std::uint8_t, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,  12, 19, 26, 33, 40, 48,
    41, 34, 27, 20, 13, 6,  7,  14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23,
    30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

using Block = Eigen::Matrix<double, 8, 8, Eigen::RowMajor>;

// basis(u, x) = C(u)/2 cos((2x+1) u pi / 16), so spatial = basis^T F basis.
const Block& idct_basis() {
  static const Block basis = [] {
    Block b;
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::numbers::sqrt2 / 2.0 : 1.0;
      for (int x = 0; x < 8; ++x) b(u, x) = 0.5 * cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
    return b;
  }();
  return basis;
}

std::uint8_t clamp_round(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct Plane {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> data;
  std::uint8_t at(std::size_t x, std::size_t y) const { return data[y * width + x]; }
};

}  // namespace

RasterImage decode_pixels(const SegmentedJpeg& jpeg, ColorSpace space) {
  const CodingTables tables = build_tables(jpeg);
  const ScanWalk walk = walk_scan(jpeg, tables);
  return decode_pixels(tables, walk.decoded, space);
}

RasterImage decode_pixels(const CodingTables& tables, const DecodedScan& decoded, ColorSpace space) {
  const FrameGeometry& f = tables.frame;
  const std::vector<std::uint8_t> layout = tables.mcu_layout();
  const Block& basis = idct_basis();

  std::vector<Plane> planes(tables.components.size());
  for (std::size_t c = 0; c < planes.size(); ++c) {
    planes[c].width = f.mcus_x * tables.components[c].h * 8;
    planes[c].height = f.mcus_y * tables.components[c].v * 8;
    planes[c].data.assign(planes[c].width * planes[c].height, 0);
  }

  std::vector<unsigned> seen(tables.components.size());
  for (std::size_t m = 0; m < decoded.mcu_count(); ++m) {
    const std::size_t mx = m % f.mcus_x;
    const std::size_t my = m / f.mcus_x;
    std::fill(seen.begin(), seen.end(), 0u);
    for (std::size_t u = 0; u < layout.size(); ++u) {
      const DataUnit& du = decoded.units[m * layout.size() + u];
      const ComponentSpec& comp = tables.components[du.component];
      const QuantTable& q = tables.quant_table(comp);

      Block coeffs = Block::Zero();
      for (int k = 0; k < 64; ++k) {
        const int n = kZigzagToNatural[k];
        coeffs(n / 8, n % 8) = static_cast<double>(du.coef[k]) * q[k];
      }
      const Block spatial = basis.transpose() * coeffs * basis;

      const unsigned idx = seen[du.component]++;
      Plane& p = planes[du.component];
      const std::size_t bx = (mx * comp.h + idx % comp.h) * 8;
      const std::size_t by = (my * comp.v + idx / comp.h) * 8;
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) p.data[(by + y) * p.width + bx + x] = clamp_round(spatial(y, x) + 128.0);
      }
    }
  }

  RasterImage img(f.width, f.height, 3);
  const unsigned sx = f.hmax;  // chroma subsampling factors
  const unsigned sy = f.vmax;
  for (std::size_t y = 0; y < f.height; ++y) {
    for (std::size_t x = 0; x < f.width; ++x) {
      if (space == ColorSpace::YCbCr) {
        img.at(x, y, 0) = planes[0].at(x, y);
        img.at(x, y, 1) = planes[1].at(x / sx, y / sy);
        img.at(x, y, 2) = planes[2].at(x / sx, y / sy);
        continue;
      }
      const double yy = planes[0].at(x, y);
      const double cb = planes[1].at(x / sx, y / sy) - 128.0;
      const double cr = planes[2].at(x / sx, y / sy) - 128.0;
      img.at(x, y, 0) = clamp_round(yy + 1.402 * cr);
      img.at(x, y, 1) = clamp_round(yy - 0.344136 * cb - 0.714136 * cr);
      img.at(x, y, 2) = clamp_round(yy + 1.772 * cb);
    }
  }
  return img;
}

}  // namespace rstjpeg
