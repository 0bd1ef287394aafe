#include "bitwalk_oracle.hpp"

#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace rstjpeg::testing {

namespace {

struct Code {
  int length;
  unsigned bits;
  int symbol;
};

std::vector<Code> build_codes(const std::uint8_t* counts, const std::uint8_t* symbols) {
  std::vector<Code> codes;
  unsigned code = 0;
  int k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < counts[len - 1]; ++i) codes.push_back({len, code++, symbols[k++]});
    code <<= 1;
  }
  return codes;
}

}  // namespace

OracleWalk oracle_walk(ByteView f) {
  std::map<std::pair<int, int>, std::vector<Code>> tables;  // (class, id)
  int width = 0, height = 0, ri = 0;
  std::vector<std::tuple<int, int, int>> comps;  // id, h, v
  std::vector<std::pair<int, int>> scan_tables;  // (dc id, ac id) per scan component
  std::size_t pos = 2;
  while (true) {
    const int marker = f[pos + 1];
    const std::size_t len = (f[pos + 2] << 8) | f[pos + 3];
    const std::uint8_t* p = &f[pos + 4];
    if (marker == 0xC4) {
      std::size_t q = 0;
      while (q < len - 2) {
        const int cls = p[q] >> 4, id = p[q] & 15;
        int total = 0;
        for (int i = 0; i < 16; ++i) total += p[q + 1 + i];
        tables[{cls, id}] = build_codes(p + q + 1, p + q + 17);
        q += 17 + total;
      }
    } else if (marker == 0xC0) {
      height = (p[1] << 8) | p[2];
      width = (p[3] << 8) | p[4];
      for (int i = 0; i < p[5]; ++i) comps.emplace_back(p[6 + 3 * i], p[7 + 3 * i] >> 4, p[7 + 3 * i] & 15);
    } else if (marker == 0xDD) {
      ri = (p[0] << 8) | p[1];
    } else if (marker == 0xDA) {
      for (int i = 0; i < p[0]; ++i) scan_tables.emplace_back(p[2 + 2 * i] >> 4, p[2 + 2 * i] & 15);
      pos += 2 + len;
      break;
    }
    pos += 2 + len;
  }
  std::size_t end = pos;
  while (!(f[end] == 0xFF && f[end + 1] != 0x00 && (f[end + 1] < 0xD0 || f[end + 1] > 0xD7))) ++end;
  const std::uint8_t* scan = &f[pos];
  const std::size_t n = end - pos;

  int hmax = 0, vmax = 0;
  for (auto& [id, h, v] : comps) {
    hmax = std::max(hmax, h);
    vmax = std::max(vmax, v);
  }
  const std::size_t mcus = static_cast<std::size_t>((width + 8 * hmax - 1) / (8 * hmax)) *
                           static_cast<std::size_t>((height + 8 * vmax - 1) / (8 * vmax));

  OracleWalk out;
  out.mcus = mcus;
  out.bit_roles.assign(8 * n, '?');
  std::size_t byte = 0;
  int bit = 0;
  auto advance = [&] {
    bit = 0;
    if (scan[byte] == 0xFF) {
      for (int k = 0; k < 8; ++k) out.bit_roles[8 * (byte + 1) + k] = 'S';
      byte += 2;
    } else {
      byte += 1;
    }
  };
  auto read = [&](char role) {
    if (byte >= n) throw std::runtime_error("oracle: scan exhausted");
    const unsigned b = (scan[byte] >> (7 - bit)) & 1u;
    out.bit_roles[8 * byte + bit] = role;
    if (++bit == 8) advance();
    return b;
  };
  auto decode = [&](const std::vector<Code>& codes) {
    unsigned acc = 0;
    for (int len = 1; len <= 16; ++len) {
      acc = (acc << 1) | read('H');
      for (const Code& c : codes) {
        if (c.length == len && c.bits == acc) return c.symbol;
      }
    }
    throw std::runtime_error("oracle: bad code");
  };
  auto pad = [&] {
    if (bit == 0) return;
    while (bit < 8) out.bit_roles[8 * byte + bit++] = 'P';
    advance();
  };

  for (std::size_t m = 0; m < mcus; ++m) {
    if (ri && m && m % ri == 0) {
      pad();
      for (int k = 0; k < 16; ++k) out.bit_roles[8 * byte + k] = 'M';
      byte += 2;
    }
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const int units = std::get<1>(comps[c]) * std::get<2>(comps[c]);
      const auto& dc = tables.at({0, scan_tables[c].first});
      const auto& ac = tables.at({1, scan_tables[c].second});
      for (int u = 0; u < units; ++u) {
        const int s = decode(dc);
        for (int i = 0; i < s; ++i) read('A');
        for (int k = 1; k < 64; ++k) {
          const int rs = decode(ac);
          if (rs == 0) break;
          if (rs == 0xF0) {
            k += 15;
            continue;
          }
          k += rs >> 4;
          for (int i = 0; i < (rs & 15); ++i) read('A');
        }
      }
    }
  }
  pad();

  out.byte_classes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string r = out.bit_roles.substr(8 * i, 8);
    char cls;
    if (r.find('M') != std::string::npos) {
      cls = 'M';
    } else if (r.find('S') != std::string::npos) {
      cls = '5';
    } else if (r.find('P') != std::string::npos) {
      cls = 'p';
    } else {
      const bool has_h = r.find('H') != std::string::npos;
      const bool has_a = r.find('A') != std::string::npos;
      bool zero_in_h = false;
      for (int k = 0; k < 8; ++k) zero_in_h |= r[k] == 'H' && ((scan[i] >> (7 - k)) & 1u) == 0;
      cls = has_h && has_a ? (zero_in_h ? '4' : '3') : (has_a ? '2' : '1');
    }
    out.byte_classes[i] = cls;
  }
  return out;
}

}  // namespace rstjpeg::testing
