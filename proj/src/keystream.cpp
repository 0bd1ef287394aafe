#include "rstjpeg/keystream.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cctype>
#include <vector>

namespace rstjpeg {

namespace {

using Digest = std::array<std::uint8_t, HmacDrbg::kOutLen>;

Digest hmac_sha256(ByteView key, std::initializer_list<ByteView> parts) {
  std::vector<std::uint8_t> msg;
  for (auto p : parts) msg.insert(msg.end(), p.begin(), p.end());
  Digest out{};
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(), out.data(), &len) ||
      len != out.size()) {
    fail(ErrorKind::InvalidArgument, "HMAC-SHA-256 failed");
  }
  return out;
}

}  // namespace

HmacDrbg::HmacDrbg(ByteView entropy, ByteView nonce, ByteView personalization) {
  key_.fill(0x00);
  v_.fill(0x01);
  update(entropy, nonce, personalization);
  reseed_counter_ = 1;
}

void HmacDrbg::update(ByteView a, ByteView b, ByteView c) {
  static constexpr std::uint8_t kZero[1] = {0x00};
  static constexpr std::uint8_t kOne[1] = {0x01};
  key_ = hmac_sha256(key_, {v_, kZero, a, b, c});
  v_ = hmac_sha256(key_, {v_});
  if (a.empty() && b.empty() && c.empty()) return;
  key_ = hmac_sha256(key_, {v_, kOne, a, b, c});
  v_ = hmac_sha256(key_, {v_});
}

void HmacDrbg::reseed(ByteView entropy, ByteView additional) {
  update(entropy, additional);
  reseed_counter_ = 1;
}

void HmacDrbg::generate(std::span<std::uint8_t> out, ByteView additional) {
  if (out.size() > kMaxRequestBytes) fail(ErrorKind::InvalidArgument, "HMAC_DRBG request too large");
  if (!additional.empty()) update(additional);
  std::size_t done = 0;
  while (done < out.size()) {
    v_ = hmac_sha256(key_, {v_});
    const std::size_t n = std::min(out.size() - done, v_.size());
    std::copy_n(v_.begin(), n, out.begin() + static_cast<std::ptrdiff_t>(done));
    done += n;
  }
  update(additional);
  ++reseed_counter_;
}

Key key_from_hex(std::string_view hex) {
  if (hex.size() != 2 * kKeyBytes) {
    fail(ErrorKind::BadKeyLength, "key must be " + std::to_string(2 * kKeyBytes) + " hex characters, got " +
                                      std::to_string(hex.size()));
  }
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    const int l = std::tolower(static_cast<unsigned char>(c));
    if (l >= 'a' && l <= 'f') return static_cast<unsigned>(l - 'a' + 10);
    fail(ErrorKind::BadKeyLength, std::string("non-hex character '") + c + "' in key");
  };
  Key k{};
  for (std::size_t i = 0; i < kKeyBytes; ++i) {
    k[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return k;
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 * bytes.size());
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

Key flip_bit(const Key& key, unsigned bit) {
  if (bit >= 8 * kKeyBytes) fail(ErrorKind::InvalidArgument, "key bit index out of range");
  Key k = key;
  k[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
  return k;
}

Keystream::Keystream(ByteView key)
    : drbg_([&]() -> ByteView {
        if (key.size() != kKeyBytes) {
          fail(ErrorKind::BadKeyLength, "key must be 48 bytes, got " + std::to_string(key.size()));
        }
        return key;
      }()) {}

void Keystream::refill() {
  drbg_.generate(buffer_);
  bit_pos_ = 0;
}

unsigned Keystream::next_bit() {
  if (bit_pos_ == 8 * kRequestBytes) refill();
  const unsigned b = (buffer_[bit_pos_ / 8] >> (7 - bit_pos_ % 8)) & 1u;
  ++bit_pos_;
  ++consumed_;
  return b;
}

std::uint32_t Keystream::next_u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 32; ++i) v = (v << 1) | next_bit();
  return v;
}

std::uint32_t Keystream::uniform_below(std::uint32_t bound) {
  if (bound == 0) fail(ErrorKind::InvalidArgument, "uniform_below(0)");
  // Largest multiple of `bound` that fits in 2^32; draws at or above it are rejected.
  const std::uint64_t limit = (std::uint64_t{1} << 32) - ((std::uint64_t{1} << 32) % bound);
  while (true) {
    const std::uint32_t u = next_u32();
    if (u < limit) return u % bound;
  }
}

}  // namespace rstjpeg
