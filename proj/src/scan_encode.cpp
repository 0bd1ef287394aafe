#include <algorithm>
#include <cstdlib>
#include <string>

#include "rstjpeg/entropy.hpp"

namespace rstjpeg {

namespace {

class BitWriter {
 public:
  explicit BitWriter(Bytes& out) : out_(out) {}

  void put(std::uint32_t bits, unsigned n) {
    for (unsigned i = n; i-- > 0;) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((bits >> i) & 1u));
      if (++fill_ == 8) flush_byte();
    }
  }

  void put_code(const HuffmanTable& table, std::uint8_t symbol) {
    const auto code = table.code_for(symbol);
    if (code.length == 0) {
      fail(ErrorKind::InvalidHuffmanSpec, "Huffman table has no code for symbol " + std::to_string(symbol));
    }
    put(code.bits, code.length);
  }

  // Fills the partial byte with 1s.
  void align() {
    if (fill_ > 0) put(0xFFu, 8 - fill_);
  }

  void marker(std::uint8_t code) {
    align();
    out_.push_back(0xFF);
    out_.push_back(code);
  }

 private:
  void flush_byte() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    fill_ = 0;
  }

  Bytes& out_;
  std::uint8_t acc_ = 0;
  unsigned fill_ = 0;
};

unsigned magnitude_category(std::int32_t v) {
  unsigned a = static_cast<unsigned>(std::abs(v));
  unsigned s = 0;
  while (a) {
    ++s;
    a >>= 1;
  }
  return s;
}

}  // namespace

Bytes encode_scan(const DecodedScan& decoded, const CodingTables& tables, std::uint16_t restart_interval) {
  Bytes out;
  out.reserve(decoded.units.size() * 16);
  BitWriter writer(out);
  std::vector<std::int32_t> pred(tables.components.size(), 0);
  const std::size_t per_mcu = decoded.units_per_mcu;
  const std::size_t mcus = decoded.mcu_count();

  for (std::size_t m = 0; m < mcus; ++m) {
    if (restart_interval > 0 && m > 0 && m % restart_interval == 0) {
      writer.marker(MarkerCode::rst(static_cast<unsigned>((m / restart_interval - 1) % 8)).code());
      std::fill(pred.begin(), pred.end(), 0);
    }
    for (std::size_t u = 0; u < per_mcu; ++u) {
      const DataUnit& du = decoded.units[m * per_mcu + u];
      const ComponentSpec& comp = tables.components[du.component];
      const std::int32_t diff = du.coef[0] - pred[du.component];
      pred[du.component] = du.coef[0];
      const unsigned size = magnitude_category(diff);
      writer.put_code(tables.dc_table(comp), static_cast<std::uint8_t>(size));
      if (size) {
        const auto bits = diff >= 0 ? static_cast<std::uint32_t>(diff)
                                    : static_cast<std::uint32_t>(diff + (1 << size) - 1);
        writer.put(bits, size);
      }
      const HuffmanTable& ac = tables.ac_table(comp);
      for (const AcSymbol& s : du.ac) {
        writer.put_code(ac, s.run_size);
        writer.put(s.bits, s.run_size & 15u);
      }
    }
  }
  writer.align();
  return out;
}

SegmentedJpeg restructure(const SegmentedJpeg& jpeg, const CodingTables& tables, std::uint16_t new_ri) {
  if (new_ri == 0) fail(ErrorKind::InvalidArgument, "restart interval must be positive");
  const ScanWalk walk = walk_scan(jpeg, tables);

  SegmentedJpeg out;
  out.post_scan = jpeg.post_scan;
  out.restart_interval = new_ri;
  out.scan = encode_scan(walk.decoded, tables, new_ri);

  const Bytes dri_payload{static_cast<std::uint8_t>(new_ri >> 8), static_cast<std::uint8_t>(new_ri & 0xFF)};
  bool placed = false;
  for (const Segment& s : jpeg.pre_scan) {
    if (s.marker.kind() == MarkerKind::DRI) {
      out.pre_scan.push_back({s.marker, dri_payload});
      placed = true;
      continue;
    }
    if (s.marker.kind() == MarkerKind::SOS && !placed) {
      out.pre_scan.push_back({MarkerCode::dri(), dri_payload});
      placed = true;
    }
    out.pre_scan.push_back(s);
  }
  return out;
}

}  // namespace rstjpeg
