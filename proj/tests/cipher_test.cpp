#include <doctest.h>

#include <random>

#include "rstjpeg/cipher.hpp"
#include "rstjpeg/pixels.hpp"
#include "support/corpus.hpp"
#include "reference/reference_decoder.hpp"
#include "test_helpers.hpp"

using namespace rstjpeg;
using namespace rstjpeg::testing;
using namespace rstjpeg::reference;

namespace {

SegmentedJpeg load_at(const Bytes& bytes, std::uint16_t ri) {
  const SegmentedJpeg j = parse(bytes);
  return restructure(j, build_tables(j), ri);
}

EncryptionRecipe recipe_for(std::uint16_t ri, std::mt19937_64& rng, Region region = AllBlocks{}) {
  EncryptionRecipe r;
  r.ri = ri;
  r.region = std::move(region);
  r.k1 = random_key(rng);
  r.k2 = random_key(rng);
  return r;
}

std::vector<std::size_t> ff_positions(const Bytes& b) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == 0xFF) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_SUITE("cipher") {

TEST_CASE("permutation derivation") {
  std::mt19937_64 rng(10);
  SUBCASE("single block is the identity") {
    CHECK(derive_permutation(random_key(rng), 1).mapping == std::vector<std::size_t>{0});
  }
  SUBCASE("bijection for many sizes") {
    for (std::size_t n : {2, 3, 17, 192, 1000}) {
      const auto p = derive_permutation(random_key(rng), n);
      CHECK(p.is_bijection());
      CHECK(p.inverse().inverse().mapping == p.mapping);
    }
  }
  SUBCASE("key determines the permutation") {
    const Key k = random_key(rng);
    CHECK(derive_permutation(k, 192).mapping == derive_permutation(k, 192).mapping);
    CHECK(derive_permutation(k, 192).mapping != derive_permutation(flip_bit(k, 5), 192).mapping);
  }
  SUBCASE("every position is uniform over 10000 keys") {
    constexpr std::size_t n = 8;
    constexpr int keys = 10000;
    std::array<std::array<unsigned, n>, n> counts{};
    for (int t = 0; t < keys; ++t) {
      const auto p = derive_permutation(random_key(rng), n);
      for (std::size_t i = 0; i < n; ++i) ++counts[i][p.mapping[i]];
    }
    const double expected = static_cast<double>(keys) / n;
    for (std::size_t i = 0; i < n; ++i) {
      double chi2 = 0;
      for (auto c : counts[i]) chi2 += (c - expected) * (c - expected) / expected;
      // Chi-square, 7 degrees of freedom, family-wise 0.1% over the 8 positions.
      CHECK(chi2 < 29.348);
    }
  }
}

TEST_CASE("identity when both stages are off") {
  std::mt19937_64 rng(11);
  const SegmentedJpeg j = load_at(read_file(corpus_files().front()), 4);
  const auto r = recipe_for(4, rng);
  CHECK(encrypt(j, r, CipherOptions{false, false}) == j);
}

TEST_CASE("format preservation over the corpus") {
  std::mt19937_64 rng(12);
  for (const auto& path : corpus_files()) {
    CAPTURE(path);
    for (std::uint16_t ri : {1, 4, 9}) {
      const SegmentedJpeg j = load_at(read_file(path), ri);
      const auto recipe = recipe_for(ri, rng);
      const SegmentedJpeg c = encrypt(j, recipe);
      const Bytes pb = serialize(j), cb = serialize(c);
      CHECK(cb.size() == pb.size());
      CHECK(c.pre_scan == j.pre_scan);
      CHECK(c.post_scan == j.post_scan);
      CHECK(ff_positions(c.scan).size() == ff_positions(j.scan).size());
      CHECK(parse(cb) == c);
      const ReferenceDecode ref = reference_decode_default(cb);
      CHECK(ref.ok);
      CHECK(ref.warnings == 0);
      CHECK(decrypt(c, recipe) == j);
    }
  }
}

TEST_CASE("Huffman symbols survive encryption") {
  std::mt19937_64 rng(13);
  for (const auto& path : corpus_files()) {
    CAPTURE(path);
    const std::uint16_t ri = 4;
    const SegmentedJpeg j = load_at(read_file(path), ri);
    const CodingTables t = build_tables(j);
    const auto recipe = recipe_for(ri, rng);
    const SegmentedJpeg c = encrypt(j, recipe);
    const DecodedScan pd = walk_scan(j, t).decoded;
    const ScanWalk cw = walk_scan(c, t);
    const BlockArrangement a = arrange_blocks(t, recipe);
    const std::size_t upm = t.frame.units_per_mcu;
    bool symbols_same = true, counts_same = true;
    for (std::size_t m = 0; m < t.frame.mcu_count(); ++m) {
      const std::size_t src_mcu = a.source[m / ri] * ri + m % ri;
      for (std::size_t u = 0; u < upm; ++u) {
        const DataUnit& cu = cw.decoded.units[m * upm + u];
        const DataUnit& pu = pd.units[src_mcu * upm + u];
        symbols_same = symbols_same && cu.dc_size == pu.dc_size && cu.ac.size() == pu.ac.size();
        for (std::size_t k = 0; symbols_same && k < cu.ac.size(); ++k) {
          symbols_same = cu.ac[k].run_size == pu.ac[k].run_size;
        }
        unsigned nz = 0;
        for (int k = 1; k < 64; ++k) nz += pu.coef[k] != 0;
        counts_same = counts_same && cw.map.coeff_counts[m * upm + u] == nz;
      }
    }
    CHECK(symbols_same);
    CHECK(counts_same);
  }
}

TEST_CASE("Pattern-4 bytes never become FF over 1000 keys") {
  std::mt19937_64 rng(14);
  const SegmentedJpeg j = load_at(fixture("noise.jpg"), 2);
  const ScanMap m = walk_scan(j, build_tables(j)).map;
  REQUIRE(count_pattern4(m) > 0);
  std::size_t bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const SegmentedJpeg c = encrypt(j, recipe_for(2, rng), CipherOptions{true, false});
    for (std::size_t i = 0; i < c.scan.size(); ++i) {
      if (m.byte_patterns[i] == BytePattern::P4) bad += c.scan[i] == 0xFF;
      if (m.byte_patterns[i] != BytePattern::P4) bad += c.scan[i] != j.scan[i];
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("XOR-only encryption without restart markers") {
  std::mt19937_64 rng(15);
  const SegmentedJpeg j = parse(read_file(corpus_files().front()));
  const auto recipe = recipe_for(0, rng);
  const CipherOptions xor_only{true, false};
  const SegmentedJpeg c = encrypt(j, recipe, xor_only);
  CHECK(c.scan != j.scan);
  CHECK(c.scan.size() == j.scan.size());
  CHECK(decrypt(c, recipe, xor_only) == j);
  CHECK_ERROR_KIND(encrypt(j, recipe), ErrorKind::NoRestartMarkers);
}

TEST_CASE("partial region leaves other blocks bit-identical") {
  std::mt19937_64 rng(16);
  const std::uint16_t ri = 2;
  const SegmentedJpeg j = load_at(read_file(corpus_files().front()), ri);
  const CodingTables t = build_tables(j);
  const McuRect rect{4, 3, 12, 9};
  const auto recipe = recipe_for(ri, rng, rect);
  const BlockArrangement a = arrange_blocks(t, recipe);
  const SegmentedJpeg c = encrypt(j, recipe);
  const RasterImage pp = decode_pixels(j), cp = decode_pixels(c);
  std::size_t outside_diff = 0, inside_diff = 0;
  for (std::size_t y = 0; y < t.frame.height; ++y) {
    for (std::size_t x = 0; x < t.frame.width; ++x) {
      const std::size_t mcu = (y / 16) * t.frame.mcus_x + x / 16;
      const bool selected = a.selected.count(mcu / ri) > 0;
      for (int ch = 0; ch < 3; ++ch) (selected ? inside_diff : outside_diff) += pp.at(x, y, ch) != cp.at(x, y, ch);
    }
  }
  CHECK(outside_diff == 0);
  CHECK(inside_diff > 0);
  CHECK(decrypt(c, recipe) == j);

  const auto blocks = split_extended_blocks(j);
  const auto cblocks = split_extended_blocks(c);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (a.selected.count(b)) continue;
    // Offsets shift when selected blocks of different lengths swap; contents do not.
    CHECK(blocks[b].bytes.size() == cblocks[b].bytes.size());
    CHECK(std::equal(j.scan.begin() + blocks[b].bytes.begin, j.scan.begin() + blocks[b].bytes.end,
                     c.scan.begin() + cblocks[b].bytes.begin));
  }
}

TEST_CASE("trailing short block stays in place") {
  std::mt19937_64 rng(17);
  const std::uint16_t ri = 7;
  const SegmentedJpeg j = load_at(fixture("chelsea_odd.jpg"), ri);
  const CodingTables t = build_tables(j);
  REQUIRE(t.frame.mcu_count() % ri != 0);
  const auto recipe = recipe_for(ri, rng);
  const BlockArrangement a = arrange_blocks(t, recipe);
  const std::size_t last = a.source.size() - 1;
  CHECK(a.source[last] == last);
  CHECK(a.permutable.size() == last);
  const SegmentedJpeg c = encrypt(j, recipe);
  const ReferenceDecode ref = reference_decode_default(serialize(c));
  CHECK(ref.ok);
  CHECK(ref.warnings == 0);
  CHECK(decrypt(c, recipe) == j);
}

TEST_CASE("wrong keys do not decrypt") {
  std::mt19937_64 rng(18);
  const std::uint16_t ri = 4;
  const SegmentedJpeg j = load_at(read_file(corpus_files().front()), ri);
  const auto recipe = recipe_for(ri, rng);
  const SegmentedJpeg c = encrypt(j, recipe);
  const RasterImage original = decode_pixels(j);
  for (unsigned key : {1u, 2u}) {
    EncryptionRecipe wrong = recipe;
    (key == 1 ? wrong.k1 : wrong.k2) = flip_bit(key == 1 ? recipe.k1 : recipe.k2, 200);
    const SegmentedJpeg d = decrypt(c, wrong);
    CHECK(d != j);
    CHECK(ssim(decode_pixels(d), original) < 0.6);
  }
  SUBCASE("wrong region decrypts to garbage without failing") {
    EncryptionRecipe wrong = recipe;
    wrong.region = McuRect{0, 0, 4, 4};
    const SegmentedJpeg d = decrypt(c, wrong);
    CHECK(d != j);
    CHECK(d.scan.size() == j.scan.size());
  }
}

TEST_CASE("recipe validation") {
  std::mt19937_64 rng(19);
  const SegmentedJpeg j = load_at(fixture("six_mcu.jpg"), 2);
  CHECK_ERROR_KIND(encrypt(j, recipe_for(3, rng)), ErrorKind::RecipeMismatch);
  CHECK_ERROR_KIND(decrypt(j, recipe_for(1, rng)), ErrorKind::RecipeMismatch);
  CHECK_ERROR_KIND(encrypt(j, recipe_for(2, rng, std::set<std::size_t>{})), ErrorKind::EmptyRegion);
  CHECK_ERROR_KIND(encrypt(j, recipe_for(2, rng, McuRect{10, 10, 20, 20})), ErrorKind::EmptyRegion);
  CHECK_ERROR_KIND(encrypt(j, recipe_for(2, rng, std::set<std::size_t>{3})), ErrorKind::InvalidArgument);
}

TEST_CASE("region resolution") {
  FrameGeometry f;
  f.mcus_x = 6;
  f.mcus_y = 1;
  CHECK(resolve_region(AllBlocks{}, f, 2, 3) == std::set<std::size_t>{0, 1, 2});
  CHECK(resolve_region(McuRect{1, 0, 3, 1}, f, 2, 3) == std::set<std::size_t>{0, 1});
  CHECK(resolve_region(McuRect{2, 0, 2, 1}, f, 2, 3).empty());
}

}  // TEST_SUITE
