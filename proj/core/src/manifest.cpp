#include "scratchkit/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "scratchkit/png_io.hpp"

namespace scratchkit {

namespace {

using nlohmann::json;

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error("manifest " + path + " is not valid JSON: " +
                             e.what());
  }
  if (!doc.is_array()) {
    throw std::runtime_error("manifest " + path + " must be a JSON array");
  }

  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  std::vector<ManifestEntry> entries;
  entries.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    ManifestEntry entry;
    try {
      entry.image_path = resolve_path(base_dir, item.at("image_path").get<std::string>());
      entry.label = item.at("label").get<int>();
      entry.image_id = item.value("image_id", std::string{});
      if (entry.image_id.empty()) {
        entry.image_id = std::filesystem::path(item.at("image_path").get<std::string>())
                             .stem()
                             .string();
      }
      if (item.contains("mask_path") && !item["mask_path"].is_null()) {
        entry.mask_path = resolve_path(base_dir, item["mask_path"].get<std::string>());
      }
    } catch (const json::exception& e) {
      throw std::runtime_error("manifest entry " + std::to_string(i) + ": " +
                               e.what());
    }
    if (entry.label < 0) {
      throw std::runtime_error("manifest entry " + entry.image_id +
                               ": label must be >= 0");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

CampaignImage load_campaign_image(const ManifestEntry& entry) {
  CampaignImage out;
  out.image_id = entry.image_id;
  out.label = entry.label;
  out.image = read_png(entry.image_path);
  if (entry.mask_path.empty()) {
    out.region = TargetRegion::all_ones(out.image.height, out.image.width);
  } else {
    out.region = read_mask_png(entry.mask_path);
    if (out.region.height != out.image.height ||
        out.region.width != out.image.width) {
      throw std::runtime_error(
          "mask shape mismatch for image " + entry.image_id + ": image is " +
          std::to_string(out.image.height) + "x" + std::to_string(out.image.width) +
          ", mask is " + std::to_string(out.region.height) + "x" +
          std::to_string(out.region.width));
    }
  }
  return out;
}

std::vector<CampaignImage> load_campaign_images(
    const std::vector<ManifestEntry>& entries) {
  std::vector<CampaignImage> images;
  images.reserve(entries.size());
  for (const ManifestEntry& entry : entries) {
    images.push_back(load_campaign_image(entry));
  }
  return images;
}

}  // namespace scratchkit
