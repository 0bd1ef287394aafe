#include "rstjpeg/cipher.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace rstjpeg {

namespace {

std::size_t block_count_for(const FrameGeometry& frame, std::uint16_t ri) {
  if (ri == 0) return 1;
  return (frame.mcu_count() + ri - 1) / ri;
}

void check_recipe(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe, const CipherOptions& options) {
  if (jpeg.restart_interval != recipe.ri) {
    fail(ErrorKind::RecipeMismatch, "file restart interval " + std::to_string(jpeg.restart_interval) +
                                        " differs from recipe ri " + std::to_string(recipe.ri) +
                                        "; restructure first");
  }
  if (recipe.ri == 0 && options.permute_blocks) {
    fail(ErrorKind::NoRestartMarkers, "block permutation needs restart markers");
  }
}

// XORs the additional bits of every Pattern-4 byte inside the selected
// blocks with the K1 keystream, in scan order.
void scramble(Bytes& scan, const ScanMap& map, const std::set<std::size_t>& selected, const Key& k1) {
  Keystream ks(k1);
  for (std::size_t b : selected) {
    const ByteSpan span = map.block_bytes[b];
    for (std::size_t i = span.begin; i < span.end; ++i) {
      if (map.byte_patterns[i] != BytePattern::P4) continue;
      std::uint8_t mask = 0;
      for (unsigned k = 0; k < 8; ++k) {
        if (map.role(i, k) == BitRole::AdditionalBit) mask |= static_cast<std::uint8_t>(ks.next_bit() << (7 - k));
      }
      scan[i] ^= mask;
    }
  }
}

Bytes rearrange(const SegmentedJpeg& jpeg, const std::vector<std::size_t>& source) {
  const auto blocks = split_extended_blocks(jpeg);
  if (blocks.size() != source.size()) fail(ErrorKind::InconsistentMarkers, "extended-block count mismatch");
  std::vector<ByteView> views;
  views.reserve(blocks.size());
  for (std::size_t p = 0; p < source.size(); ++p) {
    const ByteSpan s = blocks[source[p]].bytes;
    views.emplace_back(jpeg.scan.data() + s.begin, s.size());
  }
  return join_extended_blocks(views);
}

}  // namespace

std::set<std::size_t> resolve_region(const Region& region, const FrameGeometry& frame, std::uint16_t ri,
                                     std::size_t block_count) {
  std::set<std::size_t> out;
  if (std::holds_alternative<AllBlocks>(region)) {
    for (std::size_t b = 0; b < block_count; ++b) out.insert(b);
  } else if (const auto* ids = std::get_if<std::set<std::size_t>>(&region)) {
    for (std::size_t b : *ids) {
      if (b >= block_count) {
        fail(ErrorKind::InvalidArgument, "block index " + std::to_string(b) + " out of range (" +
                                             std::to_string(block_count) + " blocks)");
      }
    }
    out = *ids;
  } else {
    const McuRect& r = std::get<McuRect>(region);
    for (std::size_t y = r.y0; y < std::min(r.y1, frame.mcus_y); ++y) {
      for (std::size_t x = r.x0; x < std::min(r.x1, frame.mcus_x); ++x) {
        out.insert(ri ? (y * frame.mcus_x + x) / ri : 0);
      }
    }
  }
  return out;
}

BlockPermutation BlockPermutation::identity(std::size_t n) {
  BlockPermutation p;
  p.mapping.resize(n);
  std::iota(p.mapping.begin(), p.mapping.end(), std::size_t{0});
  return p;
}

bool BlockPermutation::is_bijection() const {
  std::vector<bool> seen(mapping.size(), false);
  for (std::size_t v : mapping) {
    if (v >= mapping.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

BlockPermutation BlockPermutation::inverse() const {
  BlockPermutation inv;
  inv.mapping.resize(mapping.size());
  for (std::size_t i = 0; i < mapping.size(); ++i) inv.mapping[mapping[i]] = i;
  return inv;
}

BlockPermutation derive_permutation(const Key& k2, std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "permutation over zero blocks");
  BlockPermutation p = BlockPermutation::identity(n);
  Keystream ks(k2);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t j = ks.uniform_below(static_cast<std::uint32_t>(i + 1));
    std::swap(p.mapping[i], p.mapping[j]);
  }
  return p;
}

BlockArrangement arrange_blocks(const CodingTables& tables, const EncryptionRecipe& recipe,
                                const CipherOptions& options) {
  const FrameGeometry& frame = tables.frame;
  const std::size_t nblocks = block_count_for(frame, recipe.ri);
  BlockArrangement a;
  a.selected = resolve_region(recipe.region, frame, recipe.ri, nblocks);
  if (a.selected.empty()) fail(ErrorKind::EmptyRegion, "no extended block selected");
  a.source = BlockPermutation::identity(nblocks).mapping;
  if (!options.permute_blocks || recipe.ri == 0) {
    a.permutation = BlockPermutation::identity(0);
    return a;
  }
  // A trailing short block cannot move without desynchronizing the decoder.
  for (std::size_t b : a.selected) {
    if (frame.mcu_count() - b * recipe.ri >= recipe.ri) a.permutable.push_back(b);
  }
  a.permutation = a.permutable.empty() ? BlockPermutation::identity(0)
                                       : derive_permutation(recipe.k2, a.permutable.size());
  for (std::size_t i = 0; i < a.permutable.size(); ++i) {
    a.source[a.permutable[i]] = a.permutable[a.permutation.mapping[i]];
  }
  return a;
}

SegmentedJpeg encrypt(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe, const CipherOptions& options) {
  check_recipe(jpeg, recipe, options);
  const CodingTables tables = build_tables(jpeg);
  const BlockArrangement arrangement = arrange_blocks(tables, recipe, options);

  SegmentedJpeg out = jpeg;
  if (options.scramble_bits) {
    const ScanWalk walk = walk_scan(jpeg, tables);
    scramble(out.scan, walk.map, arrangement.selected, recipe.k1);
  }
  if (options.permute_blocks) out.scan = rearrange(out, arrangement.source);
  return out;
}

SegmentedJpeg decrypt(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe, const CipherOptions& options) {
  check_recipe(jpeg, recipe, options);
  const CodingTables tables = build_tables(jpeg);
  const BlockArrangement arrangement = arrange_blocks(tables, recipe, options);

  SegmentedJpeg out = jpeg;
  if (options.permute_blocks) {
    std::vector<std::size_t> back(arrangement.source.size());
    for (std::size_t p = 0; p < back.size(); ++p) back[arrangement.source[p]] = p;
    out.scan = rearrange(out, back);
  }
  if (options.scramble_bits) {
    // Pattern classes and bit roles survive encryption, so the ciphertext's
    // own map locates the same bits.
    const ScanWalk walk = walk_scan(out, tables);
    scramble(out.scan, walk.map, arrangement.selected, recipe.k1);
  }
  return out;
}

}  // namespace rstjpeg
