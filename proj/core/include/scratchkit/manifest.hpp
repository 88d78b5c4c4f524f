#pragma once

#include <string>
#include <vector>

#include "scratchkit/attack.hpp"

namespace scratchkit {

struct ManifestEntry {
  std::string image_id;
  std::string image_path;  // PNG; resolved against the manifest directory
  int label = -1;
  std::string mask_path;  // optional; empty means an unrestricted region
};

// Parses a JSON array of entries. Validates fields eagerly but decodes
// images lazily (see load_campaign_image). Load errors name the offending
// entry.
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Decodes the entry's image and mask. An absent mask yields an all-ones
// region; a mask of mismatched shape raises an error citing the image_id.
CampaignImage load_campaign_image(const ManifestEntry& entry);
std::vector<CampaignImage> load_campaign_images(
    const std::vector<ManifestEntry>& entries);

}  // namespace scratchkit
