#include <cmath>
#include <numbers>

#include "rstjpeg/analysis.hpp"

namespace rstjpeg {

double log2_factorial(std::size_t n) {
  return std::lgamma(static_cast<double>(n) + 1.0) / std::numbers::ln2;
}

KeySpaceReport key_space(std::size_t width, std::size_t height, std::size_t ri, std::size_t t,
                         unsigned mcu_size) {
  if (ri == 0) fail(ErrorKind::InvalidArgument, "restart interval must be positive");
  if (width < mcu_size || height < mcu_size) fail(ErrorKind::InvalidArgument, "image smaller than one MCU");
  KeySpaceReport r;
  r.width = width;
  r.height = height;
  r.ri = ri;
  r.t = t;
  const std::size_t mcus = ((width + mcu_size - 1) / mcu_size) * ((height + mcu_size - 1) / mcu_size);
  r.blocks = mcus / ri;
  r.s_enc_min_bits = static_cast<double>(t);
  r.s_enc_max_bits = 7.0 * static_cast<double>(t);
  r.s_bp_log2 = log2_factorial(r.blocks);
  r.s_min_bits = r.s_enc_min_bits + r.s_bp_log2;
  r.s_max_bits = r.s_enc_max_bits + r.s_bp_log2;
  return r;
}

KeySpaceReport key_space_for(const SegmentedJpeg& jpeg, std::uint16_t ri) {
  const CodingTables tables = build_tables(jpeg);
  const SegmentedJpeg shaped = jpeg.restart_interval == ri ? jpeg : restructure(jpeg, tables, ri);
  const ScanWalk walk = walk_scan(shaped, tables);
  return key_space(tables.frame.width, tables.frame.height, ri, count_pattern4(walk.map),
                   tables.frame.mcu_width());
}

}  // namespace rstjpeg
