#include <algorithm>
#include <cmath>

#include "rstjpeg/analysis.hpp"

namespace rstjpeg {

RasterImage SketchImage::render() const {
  RasterImage img(width, height, 1);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    img.samples[i] = static_cast<std::uint8_t>(std::min<unsigned>(255, (counts[i] * 255u + max_count / 2) / max_count));
  }
  return img;
}

RasterImage SketchImage::render_equalized() const {
  RasterImage img(width, height, 1);
  if (counts.empty()) return img;
  std::vector<std::size_t> cdf(max_count + 1, 0);
  for (auto c : counts) ++cdf[std::min<unsigned>(c, max_count)];
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
  const std::size_t lowest = *std::find_if(cdf.begin(), cdf.end(), [](std::size_t v) { return v > 0; });
  const double span = static_cast<double>(counts.size() - lowest);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double v = span > 0 ? (cdf[std::min<unsigned>(counts[i], max_count)] - lowest) / span : 0.0;
    img.samples[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  return img;
}

SketchImage nzca(const SegmentedJpeg& jpeg) {
  const CodingTables tables = build_tables(jpeg);
  return nzca(tables, walk_scan(jpeg, tables).map);
}

SketchImage nzca(const CodingTables& tables, const ScanMap& map) {
  const FrameGeometry& f = tables.frame;
  const ComponentSpec& y = tables.components.front();
  SketchImage s;
  s.width = (f.width + 7u) / 8u;
  s.height = (f.height + 7u) / 8u;
  s.max_count = 64;
  s.counts.assign(s.width * s.height, 0);
  const std::size_t per_mcu = map.units_per_mcu;
  const std::size_t mcus = per_mcu ? map.coeff_counts.size() / per_mcu : 0;
  for (std::size_t m = 0; m < mcus; ++m) {
    // Luma occupies the first h*v units of every MCU.
    for (std::size_t u = 0; u < std::size_t{y.h} * y.v; ++u) {
      const std::size_t bx = (m % f.mcus_x) * y.h + u % y.h;
      const std::size_t by = (m / f.mcus_x) * y.v + u / y.h;
      if (bx < s.width && by < s.height) s.counts[by * s.width + bx] = map.coeff_counts[m * per_mcu + u];
    }
  }
  return s;
}

SketchImage nzca_per_mcu(const CodingTables& tables, const ScanMap& map) {
  const FrameGeometry& f = tables.frame;
  const ComponentSpec& y = tables.components.front();
  const std::size_t luma_units = std::size_t{y.h} * y.v;
  SketchImage s;
  s.width = f.mcus_x;
  s.height = f.mcus_y;
  s.max_count = static_cast<unsigned>(64 * luma_units);
  s.counts.assign(s.width * s.height, 0);
  for (std::size_t m = 0; m < s.counts.size(); ++m) {
    unsigned sum = 0;
    for (std::size_t u = 0; u < luma_units; ++u) sum += map.coeff_counts[m * map.units_per_mcu + u];
    s.counts[m] = static_cast<std::uint16_t>(sum);
  }
  return s;
}

}  // namespace rstjpeg
