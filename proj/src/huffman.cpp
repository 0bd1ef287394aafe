#include <algorithm>
#include <string>

#include "rstjpeg/entropy.hpp"

namespace rstjpeg {

HuffmanTable::HuffmanTable(const std::array<std::uint8_t, 16>& counts,
                           std::vector<std::uint8_t> symbols)
    : counts_(counts), symbols_(std::move(symbols)) {
  std::size_t total = 0;
  for (auto c : counts_) total += c;
  if (total != symbols_.size() || total > 256) {
    fail(ErrorKind::InvalidHuffmanSpec, "DHT symbol count does not match its length counts");
  }
  std::array<bool, 256> seen{};
  for (auto s : symbols_) {
    if (seen[s]) fail(ErrorKind::InvalidHuffmanSpec, "duplicate symbol in DHT");
    seen[s] = true;
  }

  std::uint32_t code = 0;
  std::int32_t k = 0;
  for (unsigned len = 1; len <= 16; ++len) {
    const unsigned n = counts_[len - 1];
    valptr_[len] = k;
    mincode_[len] = static_cast<std::int32_t>(code);
    for (unsigned i = 0; i < n; ++i, ++k, ++code) {
      codes_[symbols_[k]] = Code{static_cast<std::uint16_t>(code), static_cast<std::uint8_t>(len)};
    }
    // Canonical codes of this length must fit in `len` bits.
    if (code > (1u << len)) fail(ErrorKind::InvalidHuffmanSpec, "Huffman code space overflow");
    maxcode_[len] = n ? static_cast<std::int32_t>(code) - 1 : -1;
    code <<= 1;
  }
}

std::optional<std::uint8_t> HuffmanTable::match(std::uint32_t code, unsigned length) const {
  if (length == 0 || length > 16 || counts_[length - 1] == 0) return std::nullopt;
  const auto c = static_cast<std::int32_t>(code);
  if (c > maxcode_[length] || c < mincode_[length]) return std::nullopt;
  return symbols_[valptr_[length] + c - mincode_[length]];
}

const HuffmanTable& CodingTables::dc_table(const ComponentSpec& c) const {
  if (!dc[c.dc_table] || dc[c.dc_table]->empty()) {
    fail(ErrorKind::InvalidHuffmanSpec, "DC table " + std::to_string(c.dc_table) + " is undefined or empty");
  }
  return *dc[c.dc_table];
}

const HuffmanTable& CodingTables::ac_table(const ComponentSpec& c) const {
  if (!ac[c.ac_table] || ac[c.ac_table]->empty()) {
    fail(ErrorKind::InvalidHuffmanSpec, "AC table " + std::to_string(c.ac_table) + " is undefined or empty");
  }
  return *ac[c.ac_table];
}

const QuantTable& CodingTables::quant_table(const ComponentSpec& c) const {
  if (!quant[c.quant_id]) {
    fail(ErrorKind::MalformedMarker, "quantization table " + std::to_string(c.quant_id) + " is undefined");
  }
  return *quant[c.quant_id];
}

std::vector<std::uint8_t> CodingTables::mcu_layout() const {
  std::vector<std::uint8_t> layout;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    layout.insert(layout.end(), std::size_t{c.h} * c.v, static_cast<std::uint8_t>(i));
  }
  return layout;
}

namespace {

class PayloadReader {
 public:
  PayloadReader(const Bytes& payload, const char* what) : p_(payload), what_(what) {}

  std::uint8_t u8() {
    need(1);
    return p_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>((p_[pos_] << 8) | p_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  bool done() const { return pos_ >= p_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > p_.size()) fail(ErrorKind::MalformedMarker, std::string("truncated ") + what_ + " segment");
  }
  const Bytes& p_;
  const char* what_;
  std::size_t pos_ = 0;
};

void read_dqt(const Bytes& payload, CodingTables& t) {
  PayloadReader r(payload, "DQT");
  while (!r.done()) {
    const std::uint8_t pq_tq = r.u8();
    const unsigned precision = pq_tq >> 4;
    const unsigned id = pq_tq & 15;
    if (id > 3 || precision > 1) fail(ErrorKind::MalformedMarker, "bad DQT table header");
    QuantTable q{};
    for (auto& v : q) v = precision ? r.u16() : r.u8();
    t.quant[id] = q;
  }
}

void read_dht(const Bytes& payload, CodingTables& t) {
  PayloadReader r(payload, "DHT");
  while (!r.done()) {
    const std::uint8_t tc_th = r.u8();
    const unsigned cls = tc_th >> 4;
    const unsigned id = tc_th & 15;
    if (cls > 1 || id > 3) fail(ErrorKind::InvalidHuffmanSpec, "bad DHT table class or id");
    std::array<std::uint8_t, 16> counts{};
    std::size_t total = 0;
    for (auto& c : counts) total += (c = r.u8());
    std::vector<std::uint8_t> symbols(total);
    for (auto& s : symbols) s = r.u8();
    (cls == 0 ? t.dc : t.ac)[id] = HuffmanTable(counts, std::move(symbols));
  }
}

struct FrameComponent {
  std::uint8_t id, h, v, tq;
};

std::vector<FrameComponent> read_sof0(const Bytes& payload, CodingTables& t) {
  PayloadReader r(payload, "SOF0");
  if (r.u8() != 8) fail(ErrorKind::UnsupportedCoding, "only 8-bit sample precision is supported");
  t.frame.height = r.u16();
  t.frame.width = r.u16();
  if (t.frame.height == 0 || t.frame.width == 0) {
    fail(ErrorKind::UnsupportedCoding, "zero frame dimension (DNL) is not supported");
  }
  const unsigned n = r.u8();
  std::vector<FrameComponent> comps(n);
  for (auto& c : comps) {
    c.id = r.u8();
    const std::uint8_t hv = r.u8();
    c.h = hv >> 4;
    c.v = hv & 15;
    c.tq = r.u8();
    if (c.tq > 3) fail(ErrorKind::MalformedMarker, "quantization table id out of range");
  }
  if (n != 3) fail(ErrorKind::UnsupportedCoding, "only 3-component YCbCr images are supported");
  const bool is420 = comps[0].h == 2 && comps[0].v == 2;
  const bool is444 = comps[0].h == 1 && comps[0].v == 1;
  for (std::size_t i = 1; i < 3; ++i) {
    if (comps[i].h != 1 || comps[i].v != 1) fail(ErrorKind::UnsupportedCoding, "unsupported chroma sampling");
  }
  if (!is420 && !is444) fail(ErrorKind::UnsupportedCoding, "unsupported luma sampling");
  t.frame.sampling = is420 ? Sampling::YCbCr420 : Sampling::YCbCr444;
  t.frame.hmax = comps[0].h;
  t.frame.vmax = comps[0].v;
  t.frame.mcus_x = (t.frame.width + t.frame.mcu_width() - 1) / t.frame.mcu_width();
  t.frame.mcus_y = (t.frame.height + t.frame.mcu_height() - 1) / t.frame.mcu_height();
  return comps;
}

void read_sos(const Bytes& payload, const std::vector<FrameComponent>& frame, CodingTables& t) {
  PayloadReader r(payload, "SOS");
  const unsigned ns = r.u8();
  if (ns != frame.size()) fail(ErrorKind::UnsupportedCoding, "scan must interleave every component");
  for (unsigned i = 0; i < ns; ++i) {
    const std::uint8_t id = r.u8();
    const std::uint8_t td_ta = r.u8();
    auto it = std::find_if(frame.begin(), frame.end(), [id](const FrameComponent& c) { return c.id == id; });
    if (it == frame.end()) fail(ErrorKind::MalformedMarker, "SOS references unknown component");
    if (it != frame.begin() + i) fail(ErrorKind::UnsupportedCoding, "scan component order differs from frame order");
    ComponentSpec spec;
    spec.id = id;
    spec.h = it->h;
    spec.v = it->v;
    spec.quant_id = it->tq;
    spec.dc_table = td_ta >> 4;
    spec.ac_table = td_ta & 15;
    if (spec.dc_table > 3 || spec.ac_table > 3) fail(ErrorKind::MalformedMarker, "Huffman table id out of range");
    t.components.push_back(spec);
  }
  const unsigned ss = r.u8();
  const unsigned se = r.u8();
  const unsigned ah_al = r.u8();
  if (ss != 0 || se != 63 || ah_al != 0) {
    fail(ErrorKind::UnsupportedCoding, "spectral selection or successive approximation in a baseline scan");
  }
}

}  // namespace

CodingTables build_tables(const SegmentedJpeg& jpeg) {
  CodingTables t;
  std::vector<FrameComponent> frame;
  bool have_frame = false;
  for (const auto& seg : jpeg.pre_scan) {
    switch (seg.marker.kind()) {
      case MarkerKind::DQT: read_dqt(seg.payload, t); break;
      case MarkerKind::DHT: read_dht(seg.payload, t); break;
      case MarkerKind::SOF0:
        frame = read_sof0(seg.payload, t);
        have_frame = true;
        break;
      case MarkerKind::SOS:
        if (!have_frame) fail(ErrorKind::MalformedMarker, "SOS before SOF0");
        read_sos(seg.payload, frame, t);
        break;
      default: break;
    }
  }
  if (t.components.empty()) fail(ErrorKind::MalformedMarker, "no SOS segment");
  t.frame.units_per_mcu = t.mcu_layout().size();
  return t;
}

}  // namespace rstjpeg
