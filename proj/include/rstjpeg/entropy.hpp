#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "rstjpeg/bitstream.hpp"

namespace rstjpeg {

// Canonical Huffman table as declared in a DHT segment (JPEG Annex C).
class HuffmanTable {
 public:
  struct Code {
    std::uint16_t bits = 0;
    std::uint8_t length = 0;  // 0 when the symbol has no code
  };

  HuffmanTable() = default;
  // Throws InvalidHuffmanSpec when the counts overflow the code space or
  // more than 256 symbols are declared.
  HuffmanTable(const std::array<std::uint8_t, 16>& counts, std::vector<std::uint8_t> symbols);

  bool empty() const { return symbols_.empty(); }
  const std::array<std::uint8_t, 16>& counts() const { return counts_; }
  const std::vector<std::uint8_t>& symbols() const { return symbols_; }
  Code code_for(std::uint8_t symbol) const { return codes_[symbol]; }

  // Incremental canonical decode: given the first `length` bits of a
  // candidate code, returns the symbol if they form a complete code.
  std::optional<std::uint8_t> match(std::uint32_t code, unsigned length) const;

 private:
  std::array<std::uint8_t, 16> counts_{};
  std::vector<std::uint8_t> symbols_;
  std::array<std::int32_t, 17> mincode_{};
  std::array<std::int32_t, 17> maxcode_{};
  std::array<std::int32_t, 17> valptr_{};
  std::array<Code, 256> codes_{};
};

struct ComponentSpec {
  std::uint8_t id = 0;
  std::uint8_t h = 1;
  std::uint8_t v = 1;
  std::uint8_t quant_id = 0;
  std::uint8_t dc_table = 0;
  std::uint8_t ac_table = 0;
};

enum class Sampling { YCbCr420, YCbCr444 };

struct FrameGeometry {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  Sampling sampling = Sampling::YCbCr420;
  unsigned hmax = 1;
  unsigned vmax = 1;
  std::size_t mcus_x = 0;
  std::size_t mcus_y = 0;
  std::size_t units_per_mcu = 0;

  std::size_t mcu_count() const { return mcus_x * mcus_y; }
  unsigned mcu_width() const { return 8 * hmax; }
  unsigned mcu_height() const { return 8 * vmax; }
};

using QuantTable = std::array<std::uint16_t, 64>;  // zigzag order, as stored

struct CodingTables {
  std::array<std::optional<HuffmanTable>, 4> dc;
  std::array<std::optional<HuffmanTable>, 4> ac;
  std::array<std::optional<QuantTable>, 4> quant;
  std::vector<ComponentSpec> components;  // scan order
  FrameGeometry frame;

  const HuffmanTable& dc_table(const ComponentSpec& c) const;
  const HuffmanTable& ac_table(const ComponentSpec& c) const;
  const QuantTable& quant_table(const ComponentSpec& c) const;
  // Component index (into `components`) of each data unit within an MCU.
  std::vector<std::uint8_t> mcu_layout() const;
};

CodingTables build_tables(const SegmentedJpeg& jpeg);

enum class BitRole : std::uint8_t { HuffmanCode, AdditionalBit, PaddingBit, StuffedZero, Marker };

enum class BytePattern : std::uint8_t {
  P1 = 1,   // Huffman-code bits only
  P2 = 2,   // additional bits only
  P3 = 3,   // both, every Huffman-code bit is 1
  P4 = 4,   // both, at least one Huffman-code bit is 0 (encryptable)
  P5 = 5,   // stuffed 0x00 after 0xFF
  Marker,   // either byte of an RSTn marker
  Padding,  // carries fill bits before a marker or the end of scan
};

char pattern_char(BytePattern p);

// Bit-exact annotation of a scan. Bit k of byte i (MSB first) lives at
// index 8*i + k of bit_roles.
struct ScanMap {
  std::vector<BitRole> bit_roles;
  std::vector<BytePattern> byte_patterns;
  std::vector<std::size_t> mcu_bit_offsets;
  std::vector<std::size_t> mcu_block;  // extended-block index of each MCU
  std::vector<ByteSpan> block_bytes;   // byte span of each extended block
  std::vector<std::uint8_t> coeff_counts;  // non-zero AC coefficients per data unit
  std::size_t units_per_mcu = 0;

  BitRole role(std::size_t byte, unsigned bit) const { return bit_roles[8 * byte + bit]; }
  std::size_t count(BytePattern p) const;
  std::size_t block_of_byte(std::size_t byte) const;
};

struct AcSymbol {
  std::uint8_t run_size = 0;  // RRRRSSSS
  std::uint16_t bits = 0;     // raw additional bits, SSSS of them
};

struct DataUnit {
  std::uint8_t component = 0;  // index into CodingTables::components
  std::uint8_t dc_size = 0;
  std::uint16_t dc_bits = 0;
  std::int32_t dc_diff = 0;
  std::vector<AcSymbol> ac;
  std::array<std::int16_t, 64> coef{};  // quantized, zigzag order, DC absolute
};

struct DecodedScan {
  std::vector<DataUnit> units;  // scan order, units_per_mcu per MCU
  std::size_t units_per_mcu = 0;
  std::uint16_t restart_interval = 0;

  std::size_t mcu_count() const { return units_per_mcu ? units.size() / units_per_mcu : 0; }
};

struct ScanWalk {
  ScanMap map;
  DecodedScan decoded;
};

ScanWalk walk_scan(const SegmentedJpeg& jpeg, const CodingTables& tables);

// Number of Pattern-4 bytes, optionally restricted to a set of extended blocks.
std::size_t count_pattern4(const ScanMap& map, const std::set<std::size_t>* region = nullptr);

// Entropy-codes `decoded` with RSTn markers every `restart_interval` MCUs
// (0 = none). DC differences are recomputed against the new restart
// boundaries; AC symbols are emitted verbatim. Fill bits are 1s.
Bytes encode_scan(const DecodedScan& decoded, const CodingTables& tables,
                  std::uint16_t restart_interval);

// Re-encodes `jpeg` losslessly with a new restart interval and a matching
// DRI segment (inserted before SOS when absent).
SegmentedJpeg restructure(const SegmentedJpeg& jpeg, const CodingTables& tables,
                          std::uint16_t new_ri);

// Decodes the additional bits of a coefficient of magnitude category `size`.
constexpr std::int32_t extend(std::uint32_t bits, unsigned size) {
  if (size == 0) return 0;
  return bits < (1u << (size - 1)) ? static_cast<std::int32_t>(bits) - (1 << size) + 1
                                   : static_cast<std::int32_t>(bits);
}

}  // namespace rstjpeg
