#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>

#include "rstjpeg/pixels.hpp"

namespace rstjpeg {

void write_pnm(const std::string& path, const RasterImage& img) {
  if (img.channels != 1 && img.channels != 3) fail(ErrorKind::ChannelMismatch, "PNM needs 1 or 3 channels");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.samples.data()), static_cast<std::streamsize>(img.samples.size()));
  if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

void write_png(const std::string& path, const RasterImage& img) {
  if (img.channels != 1 && img.channels != 3) fail(ErrorKind::ChannelMismatch, "PNG export needs 1 or 3 channels");
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) fail(ErrorKind::IoError, "cannot write " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, "libpng failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < img.height; ++y) {
    png_write_row(png, img.samples.data() + y * img.width * img.channels);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace rstjpeg
