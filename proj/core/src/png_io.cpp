#include "scratchkit/png_io.hpp"

#include <png.h>

#include <cstring>
#include <stdexcept>

namespace scratchkit {

namespace {

Image image_from_rgb8(const std::vector<std::uint8_t>& rgb, int height,
                      int width) {
  Image img;
  img.height = height;
  img.width = width;
  img.channels = 3;
  img.data.resize(rgb.size());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    img.data[i] = dequantize8(rgb[i]);
  }
  return img;
}

std::vector<std::uint8_t> rgb8_from_image(const Image& image) {
  if (image.channels != 3) {
    throw std::runtime_error("PNG writer expects 3-channel images");
  }
  std::vector<std::uint8_t> rgb(image.data.size());
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    rgb[i] = quantize8(image.data[i]);
  }
  return rgb;
}

}  // namespace

Image read_png(const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw std::runtime_error("cannot read PNG " + path + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, rgb.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw std::runtime_error("cannot decode PNG " + path + ": " + message);
  }
  return image_from_rgb8(rgb, static_cast<int>(png.height),
                         static_cast<int>(png.width));
}

void write_png(const std::string& path, const Image& image) {
  const std::vector<std::uint8_t> rgb = rgb8_from_image(image);
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, rgb.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write PNG " + path + ": " + png.message);
  }
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  const std::vector<std::uint8_t> rgb = rgb8_from_image(image);
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, rgb.data(), 0,
                                 nullptr)) {
    throw std::runtime_error(std::string("PNG encode sizing failed: ") +
                             png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, rgb.data(), 0,
                                 nullptr)) {
    throw std::runtime_error(std::string("PNG encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(const std::uint8_t* data, std::size_t size) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, data, size)) {
    throw std::runtime_error(std::string("cannot parse PNG bytes: ") +
                             png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, rgb.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw std::runtime_error(std::string("cannot decode PNG bytes: ") + message);
  }
  return image_from_rgb8(rgb, static_cast<int>(png.height),
                         static_cast<int>(png.width));
}

TargetRegion read_mask_png(const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw std::runtime_error("cannot read mask " + path + ": " + png.message);
  }
  png.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, gray.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw std::runtime_error("cannot decode mask " + path + ": " + message);
  }
  TargetRegion region;
  region.height = static_cast<int>(png.height);
  region.width = static_cast<int>(png.width);
  region.mask.resize(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    region.mask[i] = gray[i] != 0 ? 1 : 0;
  }
  return region;
}

void write_mask_png(const std::string& path, const TargetRegion& region) {
  std::vector<std::uint8_t> gray(region.mask.size());
  for (std::size_t i = 0; i < region.mask.size(); ++i) {
    gray[i] = region.mask[i] ? 255 : 0;
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(region.width);
  png.height = static_cast<png_uint_32>(region.height);
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, gray.data(), 0,
                               nullptr)) {
    throw std::runtime_error("cannot write mask " + path + ": " + png.message);
  }
}

}  // namespace scratchkit
