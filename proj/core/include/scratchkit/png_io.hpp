#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scratchkit/image.hpp"

namespace scratchkit {

// 8-bit RGB PNG interchange. Loaded values are exactly k/255; writing
// quantizes with round-to-nearest. Grayscale and paletted files are expanded
// to RGB on read. All functions throw std::runtime_error on I/O or codec
// failure.

Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& image);

std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(const std::uint8_t* data, std::size_t size);

// Masks ride in single-channel PNGs; any nonzero sample marks a perturbable
// pixel.
TargetRegion read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const TargetRegion& region);

}  // namespace scratchkit
