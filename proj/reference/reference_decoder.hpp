#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rstjpeg/bitstream.hpp"
#include "rstjpeg/pixels.hpp"

namespace rstjpeg::reference {

// libjpeg(-turbo) as an independent decoder.
struct ReferenceDecode {
  bool ok = false;
  long warnings = 0;
  std::string message;
  RasterImage image;
};

// Integer-accurate IDCT, non-fancy (replicating) upsampling so the output is
// comparable with rstjpeg's box upsampling.
ReferenceDecode reference_decode(ByteView jpeg, ColorSpace space = ColorSpace::RGB);

// Default libjpeg settings (fancy upsampling); used only for the
// "decodes without errors or warnings" check.
ReferenceDecode reference_decode_default(ByteView jpeg);

// Quantized coefficients per data unit, natural order, as libjpeg reads them.
struct ReferenceCoefficients {
  bool ok = false;
  std::string message;
  // [component][block row][block col][coef]
  std::vector<std::vector<std::vector<std::array<std::int16_t, 64>>>> blocks;
};

ReferenceCoefficients reference_coefficients(ByteView jpeg);

}  // namespace rstjpeg::reference
