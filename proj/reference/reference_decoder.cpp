#include "reference/reference_decoder.hpp"

#include <csetjmp>
#include <cstdio>

#include <jpeglib.h>

namespace rstjpeg::reference {

namespace {

struct ErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char last[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->last);
  std::longjmp(err->jump, 1);
}

void on_message(j_common_ptr cinfo, int level) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  if (level < 0) {
    ++cinfo->err->num_warnings;
    (*cinfo->err->format_message)(cinfo, err->last);
  }
}

ReferenceDecode decode_impl(ByteView jpeg, bool comparable, ColorSpace space) {
  ReferenceDecode out;
  jpeg_decompress_struct cinfo{};
  ErrorManager err{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.emit_message = on_message;
  if (setjmp(err.jump)) {
    out.message = err.last;
    jpeg_destroy_decompress(&cinfo);
    return out;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, jpeg.data(), static_cast<unsigned long>(jpeg.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = space == ColorSpace::YCbCr ? JCS_YCbCr : JCS_RGB;
  if (comparable) {
    cinfo.dct_method = JDCT_ISLOW;
    cinfo.do_fancy_upsampling = FALSE;
  }
  jpeg_start_decompress(&cinfo);
  out.image = RasterImage(cinfo.output_width, cinfo.output_height, 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.image.samples.data() + std::size_t{cinfo.output_scanline} * cinfo.output_width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  out.warnings = err.pub.num_warnings;
  if (out.warnings) out.message = err.last;
  jpeg_destroy_decompress(&cinfo);
  out.ok = true;
  return out;
}

}  // namespace

ReferenceDecode reference_decode(ByteView jpeg, ColorSpace space) { return decode_impl(jpeg, true, space); }
ReferenceDecode reference_decode_default(ByteView jpeg) { return decode_impl(jpeg, false, ColorSpace::RGB); }

ReferenceCoefficients reference_coefficients(ByteView jpeg) {
  ReferenceCoefficients out;
  jpeg_decompress_struct cinfo{};
  ErrorManager err{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.emit_message = on_message;
  if (setjmp(err.jump)) {
    out.message = err.last;
    jpeg_destroy_decompress(&cinfo);
    return out;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, jpeg.data(), static_cast<unsigned long>(jpeg.size()));
  jpeg_read_header(&cinfo, TRUE);
  jvirt_barray_ptr* arrays = jpeg_read_coefficients(&cinfo);
  out.blocks.resize(cinfo.num_components);
  for (int c = 0; c < cinfo.num_components; ++c) {
    const jpeg_component_info& comp = cinfo.comp_info[c];
    auto& rows = out.blocks[c];
    rows.resize(comp.height_in_blocks);
    for (JDIMENSION r = 0; r < comp.height_in_blocks; ++r) {
      JBLOCKARRAY row = (*cinfo.mem->access_virt_barray)(reinterpret_cast<j_common_ptr>(&cinfo), arrays[c], r, 1, FALSE);
      rows[r].resize(comp.width_in_blocks);
      for (JDIMENSION b = 0; b < comp.width_in_blocks; ++b) {
        for (int k = 0; k < 64; ++k) rows[r][b][k] = row[0][b][k];
      }
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  out.ok = true;
  return out;
}

}  // namespace rstjpeg::reference
