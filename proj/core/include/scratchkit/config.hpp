#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scratchkit/defense.hpp"
#include "scratchkit/http_oracle.hpp"
#include "scratchkit/optimizer.hpp"
#include "scratchkit/scratch.hpp"

namespace scratchkit {

struct OracleSpec {
  enum class Kind { Toy, LocalFile, Http };
  Kind kind = Kind::Toy;
  std::string path;  // LocalFile; Toy defaults to fixtures/toy_model.json
  HttpOracleConfig http;  // Http
};

// Full run description. The JSON schema mirrors this struct one key per
// field; unknown keys anywhere are rejected so typos fail before any work
// starts. CLI flags override file values.
struct RunConfig {
  AttackConfig attack;
  Strategy strategy = Strategy::NgoLike;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  OracleSpec oracle;
  std::vector<DefenseSpec> defenses;  // used by the defend command
  std::string manifest_path;
  std::string output_dir = "out";
  int workers = 1;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Configuration echo for summaries and logs (deterministic, sorted keys).
std::string run_config_to_json(const RunConfig& config);

std::unique_ptr<Oracle> make_oracle(const OracleSpec& spec);

}  // namespace scratchkit
