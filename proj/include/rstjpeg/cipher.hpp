#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rstjpeg/bitstream.hpp"
#include "rstjpeg/entropy.hpp"
#include "rstjpeg/keystream.hpp"

namespace rstjpeg {

struct AllBlocks {
  friend bool operator==(AllBlocks, AllBlocks) = default;
};

// Half-open rectangle [x0, x1) x [y0, y1) in MCU units. Every extended
// block owning at least one MCU inside it is selected.
struct McuRect {
  std::size_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  friend bool operator==(const McuRect&, const McuRect&) = default;
};

using Region = std::variant<AllBlocks, std::set<std::size_t>, McuRect>;

struct EncryptionRecipe {
  std::uint16_t ri = 1;
  Region region = AllBlocks{};
  Key k1{};  // additional-bit scrambling
  Key k2{};  // extended-block permutation
};

// Selected extended-block indices. Explicit indices must be < block_count.
std::set<std::size_t> resolve_region(const Region& region, const FrameGeometry& frame, std::uint16_t ri,
                                     std::size_t block_count);

// mapping[i] = source index placed at position i.
struct BlockPermutation {
  std::vector<std::size_t> mapping;

  static BlockPermutation identity(std::size_t n);
  bool is_bijection() const;
  BlockPermutation inverse() const;
};

// Keyed Fisher-Yates shuffle of n indices, j drawn by rejection sampling
// from the K2 keystream (i from n-1 down to 1).
BlockPermutation derive_permutation(const Key& k2, std::size_t n);

struct CipherOptions {
  bool scramble_bits = true;
  bool permute_blocks = true;
};

// Where every extended block of a ciphertext came from. For each output
// block position, `source[p]` is the plaintext block stored there.
struct BlockArrangement {
  std::set<std::size_t> selected;
  std::vector<std::size_t> permutable;  // selected blocks holding exactly ri MCUs
  BlockPermutation permutation;         // over `permutable`
  std::vector<std::size_t> source;
};

BlockArrangement arrange_blocks(const CodingTables& tables, const EncryptionRecipe& recipe,
                                const CipherOptions& options = {});

// The input's restart interval must equal recipe.ri. A zero interval is
// only accepted with permutation disabled (the whole scan is then one block).
SegmentedJpeg encrypt(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe,
                      const CipherOptions& options = {});
SegmentedJpeg decrypt(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe,
                      const CipherOptions& options = {});

}  // namespace rstjpeg
