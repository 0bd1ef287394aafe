#include <random>

#include "rstjpeg/analysis.hpp"

namespace rstjpeg {

namespace {

Key random_key(std::mt19937_64& rng) {
  Key k{};
  std::uniform_int_distribution<unsigned> byte(0, 255);
  for (auto& b : k) b = static_cast<std::uint8_t>(byte(rng));
  return k;
}

RasterImage decode(const SegmentedJpeg& jpeg, const CodingTables& tables) {
  return decode_pixels(tables, walk_scan(jpeg, tables).decoded);
}

}  // namespace

SensitivityReport sensitivity_experiment(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe,
                                         std::size_t trials, std::uint64_t seed) {
  if (trials == 0) fail(ErrorKind::InvalidArgument, "sensitivity experiment needs at least one trial");
  const CodingTables tables = build_tables(jpeg);
  const SegmentedJpeg plain = jpeg.restart_interval == recipe.ri ? jpeg : restructure(jpeg, tables, recipe.ri);

  const LumaPlane original = luma(decode(plain, tables));
  const SegmentedJpeg cipher = encrypt(plain, recipe);
  const LumaPlane cipher_luma = luma(decode(cipher, tables));

  SensitivityReport r;
  r.control.push_back(ssim(original, luma(decode(decrypt(cipher, recipe), tables))));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> which_key(1, 2);
  std::uniform_int_distribution<unsigned> which_bit(0, 8 * kKeyBytes - 1);
  for (std::size_t t = 0; t < trials; ++t) {
    const KeyFlip flip{which_key(rng), which_bit(rng)};
    r.flips.push_back(flip);
    EncryptionRecipe flipped = recipe;
    (flip.key == 1 ? flipped.k1 : flipped.k2) = flip_bit(flip.key == 1 ? recipe.k1 : recipe.k2, flip.bit);

    EncryptionRecipe fresh_one = recipe;
    (flip.key == 1 ? fresh_one.k1 : fresh_one.k2) = random_key(rng);
    EncryptionRecipe fresh_both = recipe;
    fresh_both.k1 = random_key(rng);
    fresh_both.k2 = random_key(rng);

    r.case1.push_back(ssim(cipher_luma, luma(decode(encrypt(plain, flipped), tables))));
    r.independent.push_back(ssim(cipher_luma, luma(decode(encrypt(plain, fresh_one), tables))));
    r.independent_both.push_back(ssim(cipher_luma, luma(decode(encrypt(plain, fresh_both), tables))));
    r.case2.push_back(ssim(original, luma(decode(decrypt(cipher, flipped), tables))));
  }
  r.case1_vs_independent = ks_two_sample(r.case1, r.independent);
  r.case1_vs_independent_both = ks_two_sample(r.case1, r.independent_both);
  return r;
}

}  // namespace rstjpeg
