#include <algorithm>
#include <string>

#include "rstjpeg/entropy.hpp"

namespace rstjpeg {

char pattern_char(BytePattern p) {
  switch (p) {
    case BytePattern::P1: return '1';
    case BytePattern::P2: return '2';
    case BytePattern::P3: return '3';
    case BytePattern::P4: return '4';
    case BytePattern::P5: return '5';
    case BytePattern::Marker: return 'M';
    case BytePattern::Padding: return 'p';
  }
  return '?';
}

std::size_t ScanMap::count(BytePattern p) const {
  return static_cast<std::size_t>(std::count(byte_patterns.begin(), byte_patterns.end(), p));
}

std::size_t ScanMap::block_of_byte(std::size_t byte) const {
  auto it = std::upper_bound(block_bytes.begin(), block_bytes.end(), byte,
                             [](std::size_t b, const ByteSpan& s) { return b < s.begin; });
  return it == block_bytes.begin() ? 0 : static_cast<std::size_t>(it - block_bytes.begin()) - 1;
}

namespace {

// Reads the scan one bit at a time and records the role of every bit it
// touches. Stuffed zeros are skipped transparently.
class LabelingReader {
 public:
  LabelingReader(const Bytes& scan, std::vector<BitRole>& roles) : scan_(scan), roles_(roles) {}

  std::size_t bit_position() const { return 8 * byte_ + bit_; }
  std::size_t byte_position() const { return byte_; }
  bool exhausted() const { return byte_ >= scan_.size(); }

  unsigned read(BitRole role) {
    if (bit_ == 0) check_data_byte();
    const unsigned b = (scan_[byte_] >> (7 - bit_)) & 1u;
    roles_[8 * byte_ + bit_] = role;
    if (++bit_ == 8) next_byte();
    return b;
  }

  std::uint32_t read_bits(unsigned n, BitRole role) {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < n; ++i) v = (v << 1) | read(role);
    return v;
  }

  std::uint8_t decode(const HuffmanTable& table) {
    std::uint32_t code = 0;
    for (unsigned len = 1; len <= 16; ++len) {
      code = (code << 1) | read(BitRole::HuffmanCode);
      if (auto s = table.match(code, len)) return *s;
    }
    fail(ErrorKind::HuffmanDecodeFailure,
         "no Huffman code matches at scan byte " + std::to_string(byte_));
  }

  void pad_to_byte() {
    if (bit_ == 0) return;
    for (; bit_ < 8; ++bit_) roles_[8 * byte_ + bit_] = BitRole::PaddingBit;
    next_byte();
  }

  void expect_rst(unsigned n) {
    if (byte_ + 1 >= scan_.size() || scan_[byte_] != 0xFF || scan_[byte_ + 1] < 0xD0 ||
        scan_[byte_ + 1] > 0xD7) {
      fail(ErrorKind::MarkerDesyncError,
           "expected RST" + std::to_string(n) + " at scan byte " + std::to_string(byte_));
    }
    if (scan_[byte_ + 1] - 0xD0u != n) {
      fail(ErrorKind::InconsistentMarkers, "RST" + std::to_string(scan_[byte_ + 1] - 0xD0) +
                                               " found where RST" + std::to_string(n) + " was expected");
    }
    std::fill_n(roles_.begin() + static_cast<std::ptrdiff_t>(8 * byte_), 16, BitRole::Marker);
    byte_ += 2;
  }

 private:
  void check_data_byte() {
    if (byte_ >= scan_.size()) fail(ErrorKind::TruncatedScan, "scan ended mid-MCU");
    if (scan_[byte_] != 0xFF) return;
    if (byte_ + 1 >= scan_.size()) fail(ErrorKind::TruncatedScan, "scan ends with 0xFF");
    const std::uint8_t next = scan_[byte_ + 1];
    if (next >= 0xD0 && next <= 0xD7) {
      fail(ErrorKind::MarkerDesyncError, "RST marker inside an MCU at scan byte " + std::to_string(byte_));
    }
    if (next != 0x00) fail(ErrorKind::TruncatedScan, "unexpected marker in scan");
  }

  void next_byte() {
    bit_ = 0;
    if (scan_[byte_] == 0xFF) {
      std::fill_n(roles_.begin() + static_cast<std::ptrdiff_t>(8 * (byte_ + 1)), 8, BitRole::StuffedZero);
      byte_ += 2;
    } else {
      byte_ += 1;
    }
  }

  const Bytes& scan_;
  std::vector<BitRole>& roles_;
  std::size_t byte_ = 0;
  unsigned bit_ = 0;
};

BytePattern classify(std::uint8_t value, const BitRole* roles) {
  bool hc = false, ab = false, hc_zero = false, pad = false;
  bool marker = false, stuffed = false;
  for (unsigned k = 0; k < 8; ++k) {
    switch (roles[k]) {
      case BitRole::HuffmanCode:
        hc = true;
        if (((value >> (7 - k)) & 1u) == 0) hc_zero = true;
        break;
      case BitRole::AdditionalBit: ab = true; break;
      case BitRole::PaddingBit: pad = true; break;
      case BitRole::StuffedZero: stuffed = true; break;
      case BitRole::Marker: marker = true; break;
    }
  }
  if (marker) return BytePattern::Marker;
  if (stuffed) return BytePattern::P5;
  if (pad) return BytePattern::Padding;
  if (hc && ab) return hc_zero ? BytePattern::P4 : BytePattern::P3;
  return ab ? BytePattern::P2 : BytePattern::P1;
}

}  // namespace

ScanWalk walk_scan(const SegmentedJpeg& jpeg, const CodingTables& tables) {
  const std::vector<std::uint8_t> layout = tables.mcu_layout();
  const std::size_t mcu_count = tables.frame.mcu_count();
  const std::size_t ri = jpeg.restart_interval;

  std::vector<const HuffmanTable*> dc_tables, ac_tables;
  for (const auto& c : tables.components) {
    dc_tables.push_back(&tables.dc_table(c));
    ac_tables.push_back(&tables.ac_table(c));
  }

  ScanWalk out;
  ScanMap& map = out.map;
  DecodedScan& dec = out.decoded;
  map.units_per_mcu = dec.units_per_mcu = layout.size();
  dec.restart_interval = jpeg.restart_interval;
  // Bytes never touched by the reader would stay HuffmanCode; the final
  // consistency check below rules that out.
  map.bit_roles.assign(8 * jpeg.scan.size(), BitRole::HuffmanCode);
  map.mcu_bit_offsets.reserve(mcu_count);
  map.mcu_block.reserve(mcu_count);
  map.coeff_counts.reserve(mcu_count * layout.size());
  dec.units.reserve(mcu_count * layout.size());

  LabelingReader reader(jpeg.scan, map.bit_roles);
  std::vector<std::int32_t> pred(tables.components.size(), 0);
  std::size_t block = 0;
  std::size_t block_start = 0;

  for (std::size_t m = 0; m < mcu_count; ++m) {
    if (ri > 0 && m > 0 && m % ri == 0) {
      reader.pad_to_byte();
      map.block_bytes.push_back({block_start, reader.byte_position()});
      reader.expect_rst(static_cast<unsigned>(block % 8));
      block_start = reader.byte_position();
      ++block;
      std::fill(pred.begin(), pred.end(), 0);
    }
    map.mcu_bit_offsets.push_back(reader.bit_position());
    map.mcu_block.push_back(block);

    for (std::uint8_t ci : layout) {
      DataUnit du;
      du.component = ci;
      du.dc_size = reader.decode(*dc_tables[ci]);
      if (du.dc_size > 11) fail(ErrorKind::HuffmanDecodeFailure, "DC magnitude category above 11");
      du.dc_bits = static_cast<std::uint16_t>(reader.read_bits(du.dc_size, BitRole::AdditionalBit));
      du.dc_diff = extend(du.dc_bits, du.dc_size);
      pred[ci] += du.dc_diff;
      du.coef[0] = static_cast<std::int16_t>(pred[ci]);

      std::uint8_t nonzero = 0;
      for (unsigned k = 1; k < 64;) {
        const std::uint8_t rs = reader.decode(*ac_tables[ci]);
        const unsigned run = rs >> 4;
        const unsigned size = rs & 15;
        if (size == 0) {
          du.ac.push_back({rs, 0});
          if (run == 15) {
            k += 16;
            continue;
          }
          if (run != 0) fail(ErrorKind::HuffmanDecodeFailure, "invalid AC symbol with zero size");
          break;  // EOB
        }
        k += run;
        if (k > 63 || size > 10) fail(ErrorKind::HuffmanDecodeFailure, "AC coefficient index out of range");
        const auto bits = static_cast<std::uint16_t>(reader.read_bits(size, BitRole::AdditionalBit));
        du.ac.push_back({rs, bits});
        du.coef[k] = static_cast<std::int16_t>(extend(bits, size));
        ++nonzero;
        ++k;
      }
      map.coeff_counts.push_back(nonzero);
      dec.units.push_back(std::move(du));
    }
  }
  reader.pad_to_byte();
  if (!reader.exhausted()) {
    fail(ErrorKind::MarkerDesyncError, "entropy-coded data continues after the last MCU");
  }
  map.block_bytes.push_back({block_start, jpeg.scan.size()});
  if (ri > 0 && map.block_bytes.size() != (mcu_count + ri - 1) / ri) {
    fail(ErrorKind::InconsistentMarkers, "extended-block count does not match the restart interval");
  }

  map.byte_patterns.resize(jpeg.scan.size());
  for (std::size_t i = 0; i < jpeg.scan.size(); ++i) {
    map.byte_patterns[i] = classify(jpeg.scan[i], &map.bit_roles[8 * i]);
  }
  return out;
}

std::size_t count_pattern4(const ScanMap& map, const std::set<std::size_t>* region) {
  std::size_t t = 0;
  for (std::size_t b = 0; b < map.block_bytes.size(); ++b) {
    if (region && !region->contains(b)) continue;
    const ByteSpan span = map.block_bytes[b];
    t += static_cast<std::size_t>(std::count(map.byte_patterns.begin() + static_cast<std::ptrdiff_t>(span.begin),
                                             map.byte_patterns.begin() + static_cast<std::ptrdiff_t>(span.end),
                                             BytePattern::P4));
  }
  return t;
}

}  // namespace rstjpeg
