#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rstjpeg/bitstream.hpp"
#include "rstjpeg/entropy.hpp"

namespace rstjpeg {

struct RasterImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 3;  // 3 = RGB, 1 = gray
  std::vector<std::uint8_t> samples;  // row-major, interleaved

  RasterImage() = default;
  RasterImage(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), samples(w * h * c, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c = 0) {
    return samples[(y * width + x) * channels + c];
  }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return samples[(y * width + x) * channels + c];
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

using LumaPlane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ColorSpace { RGB, YCbCr };

// Baseline decode: Huffman, dequantize, separable floating-point IDCT
// rounded half away from zero, box (replicating) chroma upsampling, BT.601
// full-range YCbCr to RGB. With ColorSpace::YCbCr the upsampled component
// samples are returned before color conversion.
RasterImage decode_pixels(const SegmentedJpeg& jpeg, ColorSpace space = ColorSpace::RGB);
RasterImage decode_pixels(const CodingTables& tables, const DecodedScan& decoded,
                          ColorSpace space = ColorSpace::RGB);

// Y = 0.299 R + 0.587 G + 0.114 B, unrounded. Gray images pass through.
LumaPlane luma(const RasterImage& img);

// 10 log10(255^2 / MSE) with one MSE over every sample of every channel;
// +inf for identical images.
double psnr(const RasterImage& a, const RasterImage& b);

struct SsimParams {
  int window = 8;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

// Mean SSIM over every 8x8 window position (stride 1, uniform weights,
// population statistics) of the luma planes.
double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& params = {});
double ssim(const LumaPlane& a, const LumaPlane& b, const SsimParams& params = {});

void write_pnm(const std::string& path, const RasterImage& img);
void write_png(const std::string& path, const RasterImage& img);

}  // namespace rstjpeg
