#include "scratchkit/records.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace scratchkit {

namespace {

using nlohmann::json;

json params_to_json(const ScratchParams& params) {
  return json{{"order", params.order},
              {"coords", params.coords},
              {"color_params", params.color_params}};
}

ScratchParams params_from_json(const json& doc) {
  ScratchParams params;
  params.order = doc.at("order").get<int>();
  params.coords = doc.at("coords").get<std::vector<double>>();
  const auto colors = doc.at("color_params");
  if (!colors.is_array() || colors.size() != 3) {
    throw std::invalid_argument("record: color_params must have 3 entries");
  }
  for (int i = 0; i < 3; ++i) params.color_params[i] = colors[i].get<double>();
  return params;
}

}  // namespace

std::string record_to_json_line(const AttackRecord& record) {
  json doc;
  doc["v"] = kRecordSchemaVersion;
  doc["image_id"] = record.image_id;
  doc["seed"] = record.seed;
  doc["status"] = attack_status_name(record.status);
  doc["success"] = record.success;
  doc["queries"] = record.queries;
  doc["achieved_l0"] = record.achieved_l0;
  doc["true_label"] = record.true_label;
  doc["adversarial_label"] = record.adversarial_label;
  doc["wall_time_s"] = record.wall_time_s;
  json params = json::array();
  for (const ScratchParams& p : record.final_params) {
    params.push_back(params_to_json(p));
  }
  doc["final_params"] = std::move(params);
  if (!record.error.empty()) doc["error"] = record.error;
  return doc.dump();
}

AttackRecord record_from_json_line(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("bad record line: ") + e.what());
  }
  const int version = doc.at("v").get<int>();
  if (version != kRecordSchemaVersion) {
    throw std::invalid_argument("unsupported record schema version " +
                                std::to_string(version));
  }
  AttackRecord record;
  record.image_id = doc.at("image_id").get<std::string>();
  record.seed = doc.at("seed").get<std::uint64_t>();
  record.status = attack_status_from_name(doc.at("status").get<std::string>());
  record.success = doc.at("success").get<bool>();
  record.queries = doc.at("queries").get<int>();
  record.achieved_l0 = doc.at("achieved_l0").get<int>();
  record.true_label = doc.at("true_label").get<int>();
  record.adversarial_label = doc.at("adversarial_label").get<int>();
  record.wall_time_s = doc.at("wall_time_s").get<double>();
  for (const json& p : doc.at("final_params")) {
    record.final_params.push_back(params_from_json(p));
  }
  if (doc.contains("error")) record.error = doc["error"].get<std::string>();
  return record;
}

void write_records(const std::string& path,
                   std::span<const AttackRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const AttackRecord& record : records) {
    out << record_to_json_line(record) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<AttackRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file: " + path);
  std::vector<AttackRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return records;
}

std::string summary_to_json(const CampaignSummary& summary) {
  json doc;
  doc["schema_version"] = kRecordSchemaVersion;
  doc["fooling_rate"] = {{"mean", summary.fr_mean}, {"std", summary.fr_std}};
  const auto opt_pair = [](const std::optional<double>& mean,
                           const std::optional<double>& std_dev) {
    json j;
    if (mean) {
      j["mean"] = *mean;
      j["std"] = std_dev.value_or(0.0);
    } else {
      j = nullptr;  // undefined: no successful attacks in any seed
    }
    return j;
  };
  doc["avg_queries"] = opt_pair(summary.aq_mean, summary.aq_std);
  doc["median_queries"] = opt_pair(summary.mq_mean, summary.mq_std);
  if (summary.avg_l0_mean) {
    doc["avg_l0"] = *summary.avg_l0_mean;
  } else {
    doc["avg_l0"] = nullptr;
  }
  doc["skipped_misclassified"] = summary.skipped_misclassified;
  doc["errored"] = summary.errored;
  json seeds = json::array();
  for (const SeedMetrics& m : summary.per_seed) {
    json entry;
    entry["seed"] = m.seed;
    entry["attempted"] = m.attempted;
    entry["successes"] = m.successes;
    entry["skipped"] = m.skipped;
    entry["errored"] = m.errored;
    entry["fooling_rate"] = m.fooling_rate;
    entry["avg_queries"] = m.avg_queries ? json(*m.avg_queries) : json(nullptr);
    entry["median_queries"] =
        m.median_queries ? json(*m.median_queries) : json(nullptr);
    entry["avg_l0"] = m.avg_l0 ? json(*m.avg_l0) : json(nullptr);
    seeds.push_back(std::move(entry));
  }
  doc["per_seed"] = std::move(seeds);
  return doc.dump(2);
}

}  // namespace scratchkit
