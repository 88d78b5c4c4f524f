#include "scratchkit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "scratchkit/toy_model.hpp"

namespace scratchkit {

namespace {

using nlohmann::json;

constexpr const char* kDefaultToyModelPath = "fixtures/toy_model.json";

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " +
                                  where);
    }
  }
}

AttackConfig parse_attack(const json& obj) {
  reject_unknown_keys(obj,
                      {"scratch_count", "per_scratch_l0", "bezier_order",
                       "color_mode", "query_limit"},
                      "attack");
  AttackConfig attack;
  attack.scratch_count = obj.value("scratch_count", attack.scratch_count);
  attack.per_scratch_l0 = obj.value("per_scratch_l0", attack.per_scratch_l0);
  attack.bezier_order = obj.value("bezier_order", attack.bezier_order);
  if (obj.contains("color_mode")) {
    attack.color_mode = color_mode_from_name(obj["color_mode"].get<std::string>());
  }
  attack.query_limit = obj.value("query_limit", attack.query_limit);
  attack.validate();
  return attack;
}

OracleSpec parse_oracle(const json& obj) {
  reject_unknown_keys(obj,
                      {"kind", "path", "url", "min_interval_s", "max_retries",
                       "timeout_s"},
                      "oracle");
  OracleSpec spec;
  const std::string kind = obj.value("kind", std::string("toy"));
  if (kind == "toy") {
    spec.kind = OracleSpec::Kind::Toy;
    spec.path = obj.value("path", std::string(kDefaultToyModelPath));
  } else if (kind == "local-file") {
    spec.kind = OracleSpec::Kind::LocalFile;
    spec.path = obj.at("path").get<std::string>();
  } else if (kind == "http") {
    spec.kind = OracleSpec::Kind::Http;
    spec.http.url = obj.at("url").get<std::string>();
    spec.http.min_interval_s = obj.value("min_interval_s", spec.http.min_interval_s);
    spec.http.max_retries = obj.value("max_retries", spec.http.max_retries);
    spec.http.timeout_s = obj.value("timeout_s", spec.http.timeout_s);
  } else {
    throw std::invalid_argument("config: oracle.kind must be toy, local-file, or http");
  }
  return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  reject_unknown_keys(doc,
                      {"attack", "optimizer", "oracle", "defense", "defenses",
                       "manifest", "output_dir", "workers"},
                      "top level");

  RunConfig config;
  if (doc.contains("attack")) config.attack = parse_attack(doc["attack"]);

  if (doc.contains("optimizer")) {
    const json& opt = doc["optimizer"];
    reject_unknown_keys(opt, {"strategy", "seeds"}, "optimizer");
    if (opt.contains("strategy")) {
      config.strategy = strategy_from_name(opt["strategy"].get<std::string>());
    }
    if (opt.contains("seeds")) {
      config.seeds = opt["seeds"].get<std::vector<std::uint64_t>>();
      if (config.seeds.empty()) {
        throw std::invalid_argument("config: optimizer.seeds must be nonempty");
      }
    }
  }

  if (doc.contains("oracle")) config.oracle = parse_oracle(doc["oracle"]);
  if (config.oracle.kind == OracleSpec::Kind::Toy && config.oracle.path.empty()) {
    config.oracle.path = kDefaultToyModelPath;
  }

  const auto parse_defense_entry = [](const json& d) {
    if (d.is_string()) return DefenseSpec::parse(d.get<std::string>());
    reject_unknown_keys(d, {"kind", "quality"}, "defense");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "median3x3" || kind == "median") return DefenseSpec::median();
    if (kind == "jpeg") return DefenseSpec::jpeg(d.value("quality", 85));
    throw std::invalid_argument("config: defense.kind must be median3x3 or jpeg");
  };
  if (doc.contains("defense")) {
    config.defenses.push_back(parse_defense_entry(doc["defense"]));
  }
  if (doc.contains("defenses")) {
    for (const json& d : doc["defenses"]) {
      config.defenses.push_back(parse_defense_entry(d));
    }
  }

  if (doc.contains("manifest")) {
    config.manifest_path = doc["manifest"].get<std::string>();
  }
  if (doc.contains("output_dir")) {
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("workers")) {
    config.workers = doc["workers"].get<int>();
    if (config.workers < 1) {
      throw std::invalid_argument("config: workers must be >= 1");
    }
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string run_config_to_json(const RunConfig& config) {
  json doc;
  doc["attack"] = {{"scratch_count", config.attack.scratch_count},
                   {"per_scratch_l0", config.attack.per_scratch_l0},
                   {"bezier_order", config.attack.bezier_order},
                   {"color_mode", color_mode_name(config.attack.color_mode)},
                   {"query_limit", config.attack.query_limit}};
  doc["optimizer"] = {{"strategy", strategy_name(config.strategy)},
                      {"seeds", config.seeds}};
  json oracle;
  switch (config.oracle.kind) {
    case OracleSpec::Kind::Toy:
      oracle = {{"kind", "toy"}, {"path", config.oracle.path}};
      break;
    case OracleSpec::Kind::LocalFile:
      oracle = {{"kind", "local-file"}, {"path", config.oracle.path}};
      break;
    case OracleSpec::Kind::Http:
      oracle = {{"kind", "http"},
                {"url", config.oracle.http.url},
                {"min_interval_s", config.oracle.http.min_interval_s},
                {"max_retries", config.oracle.http.max_retries}};
      break;
  }
  doc["oracle"] = std::move(oracle);
  if (!config.defenses.empty()) {
    json defenses = json::array();
    for (const DefenseSpec& d : config.defenses) defenses.push_back(d.name());
    doc["defenses"] = std::move(defenses);
  }
  doc["manifest"] = config.manifest_path;
  doc["output_dir"] = config.output_dir;
  doc["workers"] = config.workers;
  return doc.dump(2);
}

std::unique_ptr<Oracle> make_oracle(const OracleSpec& spec) {
  switch (spec.kind) {
    case OracleSpec::Kind::Toy:
    case OracleSpec::Kind::LocalFile:
      return std::make_unique<ToyModel>(ToyModel::load_file(spec.path));
    case OracleSpec::Kind::Http:
      return std::make_unique<HttpOracle>(spec.http);
  }
  throw std::invalid_argument("unknown oracle kind");
}

}  // namespace scratchkit
