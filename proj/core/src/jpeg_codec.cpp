#include "jpeg_codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <stdexcept>

#include <jpeglib.h>

namespace scratchkit::jpeg {

namespace {

struct ErrorTrap {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

void on_error(j_common_ptr cinfo) {
  ErrorTrap* trap = reinterpret_cast<ErrorTrap*>(cinfo->err);
  std::longjmp(trap->jump, 1);
}

}  // namespace

std::vector<std::uint8_t> encode_rgb8(const std::uint8_t* rgb, int width,
                                      int height, int quality) {
  jpeg_compress_struct cinfo;
  ErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = on_error;

  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;

  if (setjmp(trap.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (buffer) free(buffer);
    throw std::runtime_error("JPEG encode failed");
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &buffer_size);

  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  // 4:4:4: keep chroma at full resolution.
  for (int c = 0; c < cinfo.num_components; ++c) {
    cinfo.comp_info[c].h_samp_factor = 1;
    cinfo.comp_info[c].v_samp_factor = 1;
  }
  jpeg_start_compress(&cinfo, TRUE);

  const std::size_t row_stride = static_cast<std::size_t>(width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(rgb + cinfo.next_scanline * row_stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<std::uint8_t> out(buffer, buffer + buffer_size);
  free(buffer);
  return out;
}

DecodedImage decode_rgb8(const std::uint8_t* data, std::size_t size) {
  jpeg_decompress_struct cinfo;
  ErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = on_error;

  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("JPEG decode failed");
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  DecodedImage decoded;
  decoded.width = static_cast<int>(cinfo.output_width);
  decoded.height = static_cast<int>(cinfo.output_height);
  decoded.rgb.resize(static_cast<std::size_t>(decoded.width) * decoded.height * 3);

  const std::size_t row_stride = static_cast<std::size_t>(decoded.width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = decoded.rgb.data() + cinfo.output_scanline * row_stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return decoded;
}

}  // namespace scratchkit::jpeg
