#pragma once

#include <cstdint>
#include <vector>

namespace scratchkit::jpeg {

// In-memory baseline sequential JPEG round trip over interleaved 8-bit RGB.
// No chroma subsampling, so thin high-chroma features survive encoding as
// well as the quality factor allows.

std::vector<std::uint8_t> encode_rgb8(const std::uint8_t* rgb, int width,
                                      int height, int quality);

struct DecodedImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};

DecodedImage decode_rgb8(const std::uint8_t* data, std::size_t size);

}  // namespace scratchkit::jpeg
