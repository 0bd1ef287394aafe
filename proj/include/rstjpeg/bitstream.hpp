#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rstjpeg/error.hpp"

namespace rstjpeg {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class MarkerKind { SOI, EOI, SOS, DHT, DQT, SOF0, DRI, RST, APP, COM, Other };

// Second byte of a two-byte marker; the first byte is always 0xFF.
// 0x00 (stuffing) and 0xFF (fill) are not marker codes.
class MarkerCode {
 public:
  static constexpr std::uint8_t kPrefix = 0xFF;

  constexpr MarkerCode() = default;
  explicit MarkerCode(std::uint8_t code);

  static constexpr MarkerCode soi() { return MarkerCode(Raw{0xD8}); }
  static constexpr MarkerCode eoi() { return MarkerCode(Raw{0xD9}); }
  static constexpr MarkerCode sos() { return MarkerCode(Raw{0xDA}); }
  static constexpr MarkerCode dri() { return MarkerCode(Raw{0xDD}); }
  static constexpr MarkerCode rst(unsigned n) {
    return MarkerCode(Raw{static_cast<std::uint8_t>(0xD0 + (n & 7))});
  }

  constexpr std::uint8_t code() const { return code_; }
  MarkerKind kind() const;
  bool is_rst() const { return code_ >= 0xD0 && code_ <= 0xD7; }
  // Index n of RSTn; only meaningful when is_rst().
  unsigned rst_index() const { return code_ - 0xD0u; }
  // SOI, EOI and RSTn stand alone; every other marker carries a length field.
  bool has_length() const;

  friend constexpr bool operator==(MarkerCode, MarkerCode) = default;

 private:
  struct Raw {
    std::uint8_t v;
  };
  constexpr explicit MarkerCode(Raw r) : code_(r.v) {}
  std::uint8_t code_ = 0xD8;
};

struct Segment {
  MarkerCode marker;
  Bytes payload;  // bytes after the 2-byte length field

  friend bool operator==(const Segment&, const Segment&) = default;
};

// A baseline JPEG split around its single scan. `scan` holds the
// entropy-coded bytes exactly as stored: stuffed zeros and RSTn markers
// included.
struct SegmentedJpeg {
  std::vector<Segment> pre_scan;  // SOI .. SOS inclusive
  Bytes scan;
  std::vector<Segment> post_scan;  // EOI (and anything legal before it)
  std::uint16_t restart_interval = 0;

  const Segment* find(MarkerKind kind) const;
  std::size_t byte_size() const;

  friend bool operator==(const SegmentedJpeg&, const SegmentedJpeg&) = default;
};

SegmentedJpeg parse(ByteView bytes);
Bytes serialize(const SegmentedJpeg& jpeg);

// Half-open byte range [begin, end) into SegmentedJpeg::scan.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct ExtendedBlock {
  std::size_t index = 0;
  ByteSpan bytes;  // entropy-coded data only, markers excluded
};

// Splits the scan at its RSTn markers. Requires a nonzero restart interval
// and markers cycling RST0..RST7 in order.
std::vector<ExtendedBlock> split_extended_blocks(const SegmentedJpeg& jpeg);

// Rebuilds a scan from per-block payloads, inserting RSTn markers numbered
// cyclically from RST0.
Bytes join_extended_blocks(const std::vector<ByteView>& blocks);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView bytes);

}  // namespace rstjpeg
