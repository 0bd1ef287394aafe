#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "rstjpeg/pixels.hpp"
#include "support/corpus.hpp"
#include "reference/reference_decoder.hpp"
#include "test_helpers.hpp"

using namespace rstjpeg;
using namespace rstjpeg::testing;
using namespace rstjpeg::reference;

namespace {

RasterImage random_image(std::size_t w, std::size_t h, std::size_t c, std::mt19937_64& rng) {
  RasterImage img(w, h, c);
  for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

// Straightforward per-window SSIM, no running sums.
double naive_ssim(const LumaPlane& a, const LumaPlane& b) {
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  double total = 0;
  std::size_t windows = 0;
  for (Eigen::Index y = 0; y + 8 <= a.rows(); ++y) {
    for (Eigen::Index x = 0; x + 8 <= a.cols(); ++x) {
      double ma = 0, mb = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          ma += a(y + i, x + j);
          mb += b(y + i, x + j);
        }
      ma /= 64;
      mb /= 64;
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          const double da = a(y + i, x + j) - ma, db = b(y + i, x + j) - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      va /= 64;
      vb /= 64;
      cov /= 64;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

int max_abs_diff(const RasterImage& a, const RasterImage& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) m = std::max(m, std::abs(int(a.samples[i]) - int(b.samples[i])));
  return m;
}

}  // namespace

TEST_SUITE("pixels") {

TEST_CASE("flat gray decodes to a uniform image") {
  const RasterImage img = decode_pixels(parse(fixture("flat_gray.jpg")));
  CHECK(img.width == 32);
  CHECK(img.height == 32);
  for (auto s : img.samples) CHECK(int(s) == doctest::Approx(128).epsilon(0.01));
  const auto first = img.samples.front();
  CHECK(std::all_of(img.samples.begin(), img.samples.end(), [&](auto s) { return s == first; }));
}

// Conformance is judged on component samples. Color conversion adds a luma
// error to a chroma error scaled by up to 1.772, so RGB may differ by 3.
TEST_CASE("decoder agrees with libjpeg within one level per component sample") {
  std::vector<std::string> files = corpus_files();
  for (const char* f : {"one_mcu.jpg", "six_mcu.jpg", "chelsea_odd.jpg", "chelsea_444.jpg", "noise.jpg"}) {
    files.push_back(data_path(std::string("fixtures/") + f));
  }
  for (const auto& path : files) {
    CAPTURE(path);
    const Bytes bytes = read_file(path);
    const ReferenceDecode ref = reference_decode(bytes, ColorSpace::YCbCr);
    REQUIRE(ref.ok);
    const RasterImage ours = decode_pixels(parse(bytes), ColorSpace::YCbCr);
    REQUIRE(ours.width == ref.image.width);
    REQUIRE(ours.height == ref.image.height);
    CHECK(max_abs_diff(ours, ref.image) <= 1);
    const ReferenceDecode ref_rgb = reference_decode(bytes);
    CHECK(max_abs_diff(decode_pixels(parse(bytes)), ref_rgb.image) <= 3);
  }
}

TEST_CASE("PSNR") {
  std::mt19937_64 rng(30);
  const RasterImage a = random_image(40, 24, 3, rng);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(RasterImage(8, 8, 3, 0), RasterImage(8, 8, 3, 255)) == doctest::Approx(0.0));
  // One sample off by one in 192: MSE = 1/192.
  RasterImage b(8, 8, 3, 100);
  RasterImage c = b;
  c.at(3, 4, 1) = 101;
  CHECK(psnr(b, c) == doctest::Approx(10 * std::log10(255.0 * 255.0 * 192.0)));
  const RasterImage d = random_image(40, 24, 3, rng);
  CHECK(psnr(a, d) == psnr(d, a));
  CHECK_ERROR_KIND(psnr(a, RasterImage(40, 23, 3)), ErrorKind::DimensionMismatch);
  CHECK_ERROR_KIND(psnr(a, RasterImage(40, 24, 1)), ErrorKind::DimensionMismatch);
}

TEST_CASE("SSIM") {
  std::mt19937_64 rng(31);
  const RasterImage img = decode_pixels(parse(read_file(corpus_files().front())));
  CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));

  RasterImage inverted = img;
  for (auto& s : inverted.samples) s = static_cast<std::uint8_t>(255 - s);
  CHECK(ssim(img, inverted) < 0.0);

  const RasterImage noisy = random_image(img.width, img.height, 3, rng);
  CHECK(ssim(img, noisy) == doctest::Approx(ssim(noisy, img)).epsilon(1e-12));
  CHECK(ssim(img, noisy) < 0.1);
  CHECK_ERROR_KIND(ssim(img, RasterImage(8, 8, 3)), ErrorKind::DimensionMismatch);

  SUBCASE("matches a direct per-window computation") {
    const RasterImage x = random_image(37, 29, 3, rng);
    RasterImage y = x;
    for (auto& s : y.samples) s = static_cast<std::uint8_t>(std::clamp<int>(s + int(rng() % 41) - 20, 0, 255));
    CHECK(ssim(x, y) == doctest::Approx(naive_ssim(luma(x), luma(y))).epsilon(1e-10));
    const LumaPlane lx = luma(img), ly = luma(noisy);
    CHECK(ssim(lx, ly) == doctest::Approx(naive_ssim(lx, ly)).epsilon(1e-10));
  }
}

TEST_CASE("luma weights") {
  RasterImage px(1, 1, 3);
  px.at(0, 0, 0) = 200;
  px.at(0, 0, 1) = 100;
  px.at(0, 0, 2) = 50;
  CHECK(luma(px)(0, 0) == doctest::Approx(0.299 * 200 + 0.587 * 100 + 0.114 * 50));
  RasterImage g(2, 1, 1);
  g.at(1, 0) = 77;
  CHECK(luma(g)(0, 1) == 77.0);
}

TEST_CASE("image writers") {
  const auto dir = std::filesystem::temp_directory_path() / "rstjpeg_pixels_test";
  std::filesystem::create_directories(dir);
  RasterImage img(3, 2, 3);
  for (std::size_t i = 0; i < img.samples.size(); ++i) img.samples[i] = static_cast<std::uint8_t>(i * 10);

  write_pnm((dir / "a.ppm").string(), img);
  const Bytes ppm = read_file((dir / "a.ppm").string());
  const std::string header = "P6\n3 2\n255\n";
  REQUIRE(ppm.size() == header.size() + img.samples.size());
  CHECK(std::equal(header.begin(), header.end(), ppm.begin()));
  CHECK(std::equal(img.samples.begin(), img.samples.end(), ppm.begin() + header.size()));

  write_png((dir / "a.png").string(), img);
  const Bytes png = read_file((dir / "a.png").string());
  REQUIRE(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK(png[2] == 'N');
  CHECK(png[3] == 'G');
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
