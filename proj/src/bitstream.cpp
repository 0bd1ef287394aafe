#include "rstjpeg/bitstream.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

namespace rstjpeg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedMarker: return "MalformedMarker";
    case ErrorKind::UnsupportedCoding: return "UnsupportedCoding";
    case ErrorKind::MultipleScans: return "MultipleScans";
    case ErrorKind::NoRestartMarkers: return "NoRestartMarkers";
    case ErrorKind::InconsistentMarkers: return "InconsistentMarkers";
    case ErrorKind::InvalidHuffmanSpec: return "InvalidHuffmanSpec";
    case ErrorKind::HuffmanDecodeFailure: return "HuffmanDecodeFailure";
    case ErrorKind::TruncatedScan: return "TruncatedScan";
    case ErrorKind::MarkerDesyncError: return "MarkerDesyncError";
    case ErrorKind::BadKeyLength: return "BadKeyLength";
    case ErrorKind::RecipeMismatch: return "RecipeMismatch";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ChannelMismatch: return "ChannelMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

MarkerCode::MarkerCode(std::uint8_t code) : code_(code) {
  if (code == 0x00 || code == 0xFF) {
    fail(ErrorKind::MalformedMarker, "0xFF" + std::to_string(code) + " is not a marker code");
  }
}

MarkerKind MarkerCode::kind() const {
  switch (code_) {
    case 0xD8: return MarkerKind::SOI;
    case 0xD9: return MarkerKind::EOI;
    case 0xDA: return MarkerKind::SOS;
    case 0xC4: return MarkerKind::DHT;
    case 0xDB: return MarkerKind::DQT;
    case 0xC0: return MarkerKind::SOF0;
    case 0xDD: return MarkerKind::DRI;
    case 0xFE: return MarkerKind::COM;
    default: break;
  }
  if (is_rst()) return MarkerKind::RST;
  if (code_ >= 0xE0 && code_ <= 0xEF) return MarkerKind::APP;
  return MarkerKind::Other;
}

bool MarkerCode::has_length() const {
  return !(code_ == 0xD8 || code_ == 0xD9 || is_rst() || code_ == 0x01);
}

const Segment* SegmentedJpeg::find(MarkerKind kind) const {
  for (const auto& s : pre_scan) {
    if (s.marker.kind() == kind) return &s;
  }
  return nullptr;
}

std::size_t SegmentedJpeg::byte_size() const {
  std::size_t n = scan.size();
  for (const auto* list : {&pre_scan, &post_scan}) {
    for (const auto& s : *list) n += 2 + (s.marker.has_length() ? 2 + s.payload.size() : 0);
  }
  return n;
}

namespace {

// SOFn other than baseline, plus DAC (arithmetic conditioning).
bool is_unsupported_frame(std::uint8_t code) {
  if (code == 0xCC) return true;
  return code >= 0xC1 && code <= 0xCF && code != 0xC4;
}

class SegmentReader {
 public:
  explicit SegmentReader(ByteView bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  Segment next() {
    if (pos_ + 2 > bytes_.size()) {
      fail(ErrorKind::MalformedMarker, "truncated marker at offset " + std::to_string(pos_));
    }
    if (bytes_[pos_] != MarkerCode::kPrefix) {
      fail(ErrorKind::MalformedMarker, "expected 0xFF at offset " + std::to_string(pos_));
    }
    Segment seg{MarkerCode(bytes_[pos_ + 1]), {}};
    pos_ += 2;
    if (!seg.marker.has_length()) return seg;
    if (pos_ + 2 > bytes_.size()) fail(ErrorKind::MalformedMarker, "truncated segment length");
    const std::size_t len = (std::size_t{bytes_[pos_]} << 8) | bytes_[pos_ + 1];
    if (len < 2 || pos_ + len > bytes_.size()) {
      fail(ErrorKind::MalformedMarker, "segment length runs past end of file");
    }
    seg.payload.assign(bytes_.begin() + pos_ + 2, bytes_.begin() + pos_ + len);
    pos_ += len;
    return seg;
  }

  // Consumes entropy-coded bytes up to (not including) the first marker
  // that is neither a stuffed zero nor RSTn.
  Bytes scan_data() {
    const std::size_t start = pos_;
    while (true) {
      if (pos_ >= bytes_.size()) fail(ErrorKind::MalformedMarker, "scan not terminated by a marker");
      if (bytes_[pos_] != 0xFF) {
        ++pos_;
        continue;
      }
      if (pos_ + 1 >= bytes_.size()) fail(ErrorKind::MalformedMarker, "dangling 0xFF in scan");
      const std::uint8_t next = bytes_[pos_ + 1];
      if (next == 0x00 || (next >= 0xD0 && next <= 0xD7)) {
        pos_ += 2;
        continue;
      }
      if (next == 0xFF) fail(ErrorKind::MalformedMarker, "fill bytes inside scan are not supported");
      break;
    }
    return Bytes(bytes_.begin() + start, bytes_.begin() + pos_);
  }

 private:
  ByteView bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

SegmentedJpeg parse(ByteView bytes) {
  SegmentedJpeg out;
  SegmentReader reader(bytes);

  if (bytes.size() < 4 || bytes[0] != 0xFF || bytes[1] != 0xD8) {
    fail(ErrorKind::MalformedMarker, "missing SOI");
  }
  out.pre_scan.push_back(reader.next());

  bool have_frame = false;
  bool have_dri = false;
  while (true) {
    if (reader.at_end()) fail(ErrorKind::MalformedMarker, "no SOS before end of file");
    if (reader.pos() + 1 < bytes.size() && bytes[reader.pos()] == 0xFF &&
        is_unsupported_frame(bytes[reader.pos() + 1])) {
      fail(ErrorKind::UnsupportedCoding, "only baseline Huffman (SOF0) is supported");
    }
    Segment seg = reader.next();
    switch (seg.marker.kind()) {
      case MarkerKind::SOI:
      case MarkerKind::EOI:
      case MarkerKind::RST:
        fail(ErrorKind::MalformedMarker, "unexpected standalone marker before scan");
      case MarkerKind::SOF0:
        if (have_frame) fail(ErrorKind::MalformedMarker, "duplicate SOF0");
        have_frame = true;
        break;
      case MarkerKind::DRI:
        if (have_dri) fail(ErrorKind::UnsupportedCoding, "multiple DRI segments");
        if (seg.payload.size() != 2) fail(ErrorKind::MalformedMarker, "DRI payload must be 2 bytes");
        have_dri = true;
        out.restart_interval = static_cast<std::uint16_t>((seg.payload[0] << 8) | seg.payload[1]);
        break;
      case MarkerKind::SOS:
        if (!have_frame) fail(ErrorKind::MalformedMarker, "SOS before SOF0");
        break;
      default:
        break;
    }
    const bool is_sos = seg.marker.kind() == MarkerKind::SOS;
    out.pre_scan.push_back(std::move(seg));
    if (is_sos) break;
  }

  out.scan = reader.scan_data();

  while (true) {
    Segment seg = reader.next();
    const MarkerKind kind = seg.marker.kind();
    if (kind == MarkerKind::SOS) fail(ErrorKind::MultipleScans, "more than one scan");
    if (kind == MarkerKind::SOI || kind == MarkerKind::RST) {
      fail(ErrorKind::MalformedMarker, "unexpected marker after scan");
    }
    if (kind == MarkerKind::DRI) fail(ErrorKind::UnsupportedCoding, "DRI after scan");
    if (is_unsupported_frame(seg.marker.code())) fail(ErrorKind::UnsupportedCoding, "frame marker after scan");
    out.post_scan.push_back(std::move(seg));
    if (kind == MarkerKind::EOI) break;
    if (reader.at_end()) fail(ErrorKind::MalformedMarker, "missing EOI");
  }
  if (!reader.at_end()) fail(ErrorKind::MalformedMarker, "trailing bytes after EOI");
  return out;
}

Bytes serialize(const SegmentedJpeg& jpeg) {
  Bytes out;
  out.reserve(jpeg.byte_size());
  auto put_segment = [&out](const Segment& s) {
    out.push_back(MarkerCode::kPrefix);
    out.push_back(s.marker.code());
    if (!s.marker.has_length()) return;
    const std::size_t len = s.payload.size() + 2;
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len & 0xFF));
    out.insert(out.end(), s.payload.begin(), s.payload.end());
  };
  for (const auto& s : jpeg.pre_scan) put_segment(s);
  out.insert(out.end(), jpeg.scan.begin(), jpeg.scan.end());
  for (const auto& s : jpeg.post_scan) put_segment(s);
  return out;
}

std::vector<ExtendedBlock> split_extended_blocks(const SegmentedJpeg& jpeg) {
  if (jpeg.restart_interval == 0) {
    fail(ErrorKind::NoRestartMarkers, "restart interval is 0; the scan has no extended blocks");
  }
  const Bytes& scan = jpeg.scan;
  std::vector<ExtendedBlock> blocks;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < scan.size();) {
    if (scan[i] != 0xFF) {
      ++i;
      continue;
    }
    const std::uint8_t next = scan[i + 1];
    if (next >= 0xD0 && next <= 0xD7) {
      const unsigned expected = blocks.size() % 8;
      if (next - 0xD0u != expected) {
        fail(ErrorKind::InconsistentMarkers, "RST" + std::to_string(next - 0xD0) + " where RST" +
                                                 std::to_string(expected) + " was expected");
      }
      blocks.push_back({blocks.size(), {start, i}});
      start = i + 2;
    }
    i += 2;
  }
  blocks.push_back({blocks.size(), {start, scan.size()}});
  return blocks;
}

Bytes join_extended_blocks(const std::vector<ByteView>& blocks) {
  Bytes out;
  std::size_t total = 2 * blocks.size();
  for (auto b : blocks) total += b.size();
  out.reserve(total);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0) {
      out.push_back(MarkerCode::kPrefix);
      out.push_back(MarkerCode::rst(static_cast<unsigned>((i - 1) % 8)).code());
    }
    out.insert(out.end(), blocks[i].begin(), blocks[i].end());
  }
  return out;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

}  // namespace rstjpeg
