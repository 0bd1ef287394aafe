#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "rstjpeg/bitstream.hpp"

namespace rstjpeg {

// HMAC_DRBG (NIST SP 800-90A, section 10.1.2) over HMAC-SHA-256, without
// prediction resistance.
class HmacDrbg {
 public:
  static constexpr std::size_t kOutLen = 32;
  static constexpr std::size_t kMaxRequestBytes = (1u << 19) / 8;

  HmacDrbg(ByteView entropy, ByteView nonce = {}, ByteView personalization = {});

  void reseed(ByteView entropy, ByteView additional = {});
  void generate(std::span<std::uint8_t> out, ByteView additional = {});

 private:
  void update(ByteView a, ByteView b = {}, ByteView c = {});

  std::array<std::uint8_t, kOutLen> key_{};
  std::array<std::uint8_t, kOutLen> v_{};
  std::uint64_t reseed_counter_ = 0;
};

inline constexpr std::size_t kKeyBytes = 48;
using Key = std::array<std::uint8_t, kKeyBytes>;

// 96 hex characters, either case. Throws BadKeyLength.
Key key_from_hex(std::string_view hex);
std::string to_hex(ByteView bytes);
Key flip_bit(const Key& key, unsigned bit);

// Bit source for the cipher. The DRBG is instantiated with the 384-bit key
// as entropy input, empty nonce and personalization; output is drawn in
// 1024-byte generate requests and consumed MSB-first.
class Keystream {
 public:
  static constexpr std::size_t kRequestBytes = 1024;

  explicit Keystream(ByteView key);

  unsigned next_bit();
  std::uint32_t next_u32();
  // Uniform integer in [0, bound) by rejection sampling of 32-bit draws.
  std::uint32_t uniform_below(std::uint32_t bound);
  std::uint64_t bits_consumed() const { return consumed_; }

 private:
  void refill();

  HmacDrbg drbg_;
  std::array<std::uint8_t, kRequestBytes> buffer_{};
  std::size_t bit_pos_ = 8 * kRequestBytes;
  std::uint64_t consumed_ = 0;
};

}  // namespace rstjpeg
