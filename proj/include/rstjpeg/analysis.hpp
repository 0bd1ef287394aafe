#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rstjpeg/cipher.hpp"
#include "rstjpeg/entropy.hpp"
#include "rstjpeg/pixels.hpp"

namespace rstjpeg {

// ---------------------------------------------------------------------------
// Key space

struct KeySpaceReport {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t ri = 0;
  std::size_t t = 0;       // encryptable (Pattern-4) bytes
  std::size_t blocks = 0;  // floor(ceil(M/16) * ceil(N/16) / r)
  double s_enc_min_bits = 0;
  double s_enc_max_bits = 0;
  double s_bp_log2 = 0;  // log2(blocks!)
  double s_min_bits = 0;
  double s_max_bits = 0;
};

double log2_factorial(std::size_t n);

// `mcu_size` is 16 for 4:2:0 (the textbook case) and 8 for 4:4:4.
KeySpaceReport key_space(std::size_t width, std::size_t height, std::size_t ri, std::size_t t,
                         unsigned mcu_size = 16);

// Restructures to `ri` when needed, then counts Pattern-4 bytes.
KeySpaceReport key_space_for(const SegmentedJpeg& jpeg, std::uint16_t ri);

// ---------------------------------------------------------------------------
// Non-zero counting attack

// Grid of per-block non-zero AC coefficient counts. `max_count` fixes the
// grayscale normalization (count * 255 / max_count).
struct SketchImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned max_count = 64;
  std::vector<std::uint16_t> counts;

  std::uint16_t at(std::size_t x, std::size_t y) const { return counts[y * width + x]; }
  RasterImage render() const;
  RasterImage render_equalized() const;

  friend bool operator==(const SketchImage&, const SketchImage&) = default;
};

// One cell per 8x8 luma data unit, cropped to ceil(W/8) x ceil(H/8).
SketchImage nzca(const SegmentedJpeg& jpeg);
SketchImage nzca(const CodingTables& tables, const ScanMap& map);
// One cell per MCU, summing its luma data units.
SketchImage nzca_per_mcu(const CodingTables& tables, const ScanMap& map);

// ---------------------------------------------------------------------------
// Histogram analysis

using Histogram = std::array<std::uint64_t, 256>;

// Uncentered normalized correlation (cosine) of two bin vectors.
double normalized_correlation(const Histogram& a, const Histogram& b);
double pearson_correlation(const Histogram& a, const Histogram& b);
// Symmetric chi-square distance between the normalized histograms, in [0, 2].
double chi_square_distance(const Histogram& a, const Histogram& b);

struct ChannelPairScores {
  double rg = 0, rb = 0, gb = 0;
  double mean() const { return (rg + rb + gb) / 3.0; }
};

struct HistogramReport {
  std::array<Histogram, 3> channels{};
  ChannelPairScores similarity;  // normalized correlation
  ChannelPairScores pearson;
  ChannelPairScores chi_square;
  // Mean over R, G, B of the per-channel score against the reference.
  std::optional<double> similarity_to_reference;
  std::optional<double> pearson_to_reference;
  std::optional<double> chi_square_to_reference;
};

HistogramReport histogram_report(const RasterImage& img, const RasterImage* reference = nullptr);

// ---------------------------------------------------------------------------
// Statistics

// Box-plot summary: quartiles by linear interpolation, whiskers at the
// most extreme samples within 1.5 IQR of the box.
struct BoxStats {
  std::size_t n = 0;
  double mean = 0, min = 0, p25 = 0, p50 = 0, p75 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);
double quantile(std::vector<double> values, double q);

struct KsResult {
  double d = 0;
  double p_value = 1;
  bool reject(double alpha = 0.05) const { return p_value < alpha; }
};

// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with the
// small-sample correction sqrt(ne) + 0.12 + 0.11 / sqrt(ne).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Key sensitivity

struct KeyFlip {
  unsigned key = 1;  // 1 = K1, 2 = K2
  unsigned bit = 0;  // 0..383, MSB of byte 0 first
};

struct SensitivityReport {
  std::vector<KeyFlip> flips;
  std::vector<double> control;  // original vs correct-key decryption
  std::vector<double> case1;    // enc(k) vs enc(flip(k))
  // enc(k) vs enc(k with the flipped subkey replaced by a fresh random key)
  std::vector<double> independent;
  // enc(k) vs enc(fresh K1 and fresh K2). A one-bit flip of K1 keeps the
  // block permutation, so Case 1 sits above this baseline.
  std::vector<double> independent_both;
  std::vector<double> case2;  // original vs dec(enc(k), flip(k))
  KsResult case1_vs_independent;
  KsResult case1_vs_independent_both;
};

// Each trial flips one bit of K1 or K2 (key and position uniform) and
// draws fresh keys for both baselines, all from a generator seeded by `seed`.
SensitivityReport sensitivity_experiment(const SegmentedJpeg& jpeg, const EncryptionRecipe& recipe,
                                         std::size_t trials, std::uint64_t seed = 0);

}  // namespace rstjpeg
