#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "scratchkit/png_io.hpp"
#include "scratchkit/records.hpp"

using namespace scratchkit;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SCRATCHKIT_CLI_PATH;
const std::string kFixtures = SCRATCHKIT_FIXTURES_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() /
           ("scratchkit_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(n++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string command = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small two-image manifest over the bundled fixtures.
std::string write_small_manifest(const fs::path& dir) {
  nlohmann::json manifest = nlohmann::json::array();
  manifest.push_back({{"image_id", "img_00"},
                      {"image_path", kFixtures + "/images/img_00.png"},
                      {"label", 0}});
  manifest.push_back({{"image_id", "img_15"},
                      {"image_path", kFixtures + "/images/img_15.png"},
                      {"label", 3},
                      {"mask_path", kFixtures + "/masks/img_15_mask.png"}});
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2);
  return path.string();
}

std::string attack_args(const std::string& manifest, const fs::path& out_dir) {
  return "attack --manifest " + manifest + " --oracle toy --model " +
         kFixtures + "/toy_model.json --strategy ngo --seeds 1,2 "
         "--scratches 3 --l0 16 --budget 500 --out-dir " +
         out_dir.string();
}

}  // namespace

TEST_CASE("attack: produces records, summary, config echo; exit 0") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  const fs::path out = tmp.path / "run";
  REQUIRE(run(attack_args(manifest, out)) == 0);

  REQUIRE(fs::exists(out / "records.jsonl"));
  REQUIRE(fs::exists(out / "summary.json"));
  REQUIRE(fs::exists(out / "run_config.json"));
  REQUIRE(fs::exists(out / "run_meta.json"));

  const auto records = read_records((out / "records.jsonl").string());
  CHECK(records.size() == 4);  // 2 images x 2 seeds

  const nlohmann::json summary =
      nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["fooling_rate"]["mean"].get<double>() >= 0.0);
  CHECK(summary.dump().find("time") == std::string::npos);
  // Timestamps live in the sidecar instead.
  const nlohmann::json meta = nlohmann::json::parse(slurp(out / "run_meta.json"));
  CHECK(meta.contains("started_unix"));
}

TEST_CASE("attack: identical configs reproduce summary.json byte for byte") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  const fs::path out_a = tmp.path / "a";
  const fs::path out_b = tmp.path / "b";
  REQUIRE(run(attack_args(manifest, out_a)) == 0);
  REQUIRE(run(attack_args(manifest, out_b)) == 0);
  CHECK(slurp(out_a / "summary.json") == slurp(out_b / "summary.json"));
}

TEST_CASE("report: metrics tables and adversarial renders; mask is honored") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  const fs::path out = tmp.path / "run";
  REQUIRE(run(attack_args(manifest, out)) == 0);

  const fs::path report = tmp.path / "report";
  REQUIRE(run("report --records " + (out / "records.jsonl").string() +
              " --manifest " + manifest + " --out-dir " + report.string()) == 0);
  REQUIRE(fs::exists(report / "metrics.csv"));
  REQUIRE(fs::exists(report / "metrics.md"));

  const std::string csv = slurp(report / "metrics.csv");
  CHECK(csv.find("seed,") == 0);
  CHECK(csv.find("\n1,") != std::string::npos);

  // Every successful record has a rendered adversarial PNG, and masked-out
  // pixels are untouched in the render.
  const auto records = read_records((out / "records.jsonl").string());
  const Image original = read_png(kFixtures + "/images/img_15.png");
  const TargetRegion mask = read_mask_png(kFixtures + "/masks/img_15_mask.png");
  int rendered = 0;
  for (const auto& record : records) {
    if (!record.success) continue;
    const fs::path png = report / "adversarial" /
                         (record.image_id + "_seed" +
                          std::to_string(record.seed) + ".png");
    REQUIRE(fs::exists(png));
    ++rendered;
    if (record.image_id == "img_15") {
      const Image adv = read_png(png.string());
      for (int r = 0; r < adv.height; ++r) {
        for (int c = 0; c < adv.width; ++c) {
          if (mask.contains(r, c)) continue;
          for (int ch = 0; ch < 3; ++ch) {
            CHECK(adv.at(r, c, ch) == original.at(r, c, ch));
          }
        }
      }
    }
  }
  CHECK(rendered > 0);
}

TEST_CASE("report: an empty records file yields empty tables and exit 0") {
  TempDir tmp;
  const fs::path empty = tmp.path / "records.jsonl";
  std::ofstream(empty).close();
  const fs::path report = tmp.path / "report";
  CHECK(run("report --records " + empty.string() + " --out-dir " +
            report.string()) == 0);
  REQUIRE(fs::exists(report / "metrics.csv"));
  const std::string csv = slurp(report / "metrics.csv");
  CHECK(csv.find("seed,") == 0);
  CHECK(csv.find("\n1,") == std::string::npos);  // header only
}

TEST_CASE("defend: recovery table over attack records") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  const fs::path out = tmp.path / "run";
  REQUIRE(run(attack_args(manifest, out)) == 0);

  const fs::path defense = tmp.path / "defense";
  REQUIRE(run("defend --records " + (out / "records.jsonl").string() +
              " --manifest " + manifest + " --model " + kFixtures +
              "/toy_model.json --defense median3x3 --defense jpeg:85" +
              " --out-dir " + defense.string()) == 0);

  const nlohmann::json report =
      nlohmann::json::parse(slurp(defense / "defense_report.json"));
  REQUIRE(report["defenses"].size() == 2);
  for (const auto& row : report["defenses"]) {
    CHECK(row.contains("recovery_rate"));
    const double clean = row["clean_accuracy"].get<double>();
    CHECK(clean >= 0.0);
    CHECK(clean <= 1.0);
    if (!row["recovery_rate"].is_null()) {
      const double rr = row["recovery_rate"].get<double>();
      CHECK(rr >= 0.0);
      CHECK(rr <= 1.0);
    }
  }
  CHECK(fs::exists(defense / "defense_report.md"));
}

TEST_CASE("defend: --save-images writes JPEG bytes for the jpeg defense") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  const fs::path out = tmp.path / "run";
  REQUIRE(run(attack_args(manifest, out)) == 0);

  const fs::path defense = tmp.path / "defense";
  REQUIRE(run("defend --records " + (out / "records.jsonl").string() +
              " --manifest " + manifest + " --model " + kFixtures +
              "/toy_model.json --defense jpeg:90 --save-images --out-dir " +
              defense.string()) == 0);
  const fs::path dir = defense / "defended" / "jpeg:90";
  REQUIRE(fs::exists(dir));
  bool found_jpeg = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".jpg") {
      found_jpeg = true;
      // JPEG interchange bytes start with the SOI marker.
      std::ifstream in(entry.path(), std::ios::binary);
      unsigned char soi[2] = {0, 0};
      in.read(reinterpret_cast<char*>(soi), 2);
      CHECK(soi[0] == 0xFF);
      CHECK(soi[1] == 0xD8);
    }
  }
  CHECK(found_jpeg);
}

TEST_CASE("rasterize: a mask confines the debug render") {
  TempDir tmp;
  TargetRegion region = TargetRegion::all_zeros(24, 24);
  for (int r = 8; r < 16; ++r) {
    for (int c = 0; c < 24; ++c) region.set(r, c, true);
  }
  const fs::path mask = tmp.path / "mask.png";
  write_mask_png(mask.string(), region);

  const fs::path out = tmp.path / "masked.png";
  REQUIRE(run("rasterize --params 12,0,12,12,12,23,0,0,0 --height 24 "
              "--width 24 --mask " +
              mask.string() + " --out " + out.string()) == 0);
  const Image img = read_png(out.string());
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      const bool painted = img.at(r, c, 0) == 0.0 && img.at(r, c, 1) == 0.0 &&
                           img.at(r, c, 2) == 0.0;
      if (painted) CHECK(region.contains(r, c));
    }
  }
}

TEST_CASE("attack: all-errored campaigns exit nonzero") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  const fs::path out = tmp.path / "errored";
  // Nothing listens on port 1; every classification fails after the retry
  // cap, so records are errored and the exit status reports it.
  const int status =
      run("attack --manifest " + manifest +
          " --oracle http --url http://127.0.0.1:1/score --max-retries 0 "
          "--seeds 1 --budget 10 --out-dir " +
          out.string());
  CHECK(status != 0);
  const auto records = read_records((out / "records.jsonl").string());
  REQUIRE(records.size() == 2);
  for (const auto& record : records) {
    CHECK(record.status == AttackStatus::Errored);
    CHECK(!record.error.empty());
  }
}

TEST_CASE("rasterize: debug rendering paints the requested scratch") {
  TempDir tmp;
  const fs::path out = tmp.path / "scratch.png";
  REQUIRE(run("rasterize --params 2,2,12,20,21,3,1,0,0 --height 24 --width 24 "
              "--out " +
              out.string()) == 0);
  const Image img = read_png(out.string());
  CHECK(img.height == 24);
  CHECK(img.width == 24);
  int red_pixels = 0;
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      if (img.at(r, c, 0) == 1.0 && img.at(r, c, 1) == 0.0 &&
          img.at(r, c, 2) == 0.0) {
        ++red_pixels;
      }
    }
  }
  CHECK(red_pixels >= 20);
}

TEST_CASE("config file drives the run; flags override") {
  TempDir tmp;
  const std::string manifest = write_small_manifest(tmp.path);
  nlohmann::json config;
  config["attack"] = {{"scratch_count", 1},
                      {"per_scratch_l0", 48},
                      {"query_limit", 400}};
  config["optimizer"] = {{"strategy", "de"}, {"seeds", {5}}};
  config["oracle"] = {{"kind", "local-file"},
                      {"path", kFixtures + "/toy_model.json"}};
  config["manifest"] = manifest;
  const fs::path config_path = tmp.path / "config.json";
  std::ofstream(config_path) << config.dump();

  const fs::path out = tmp.path / "from_config";
  REQUIRE(run("attack --config " + config_path.string() + " --out-dir " +
              out.string()) == 0);
  const nlohmann::json echo =
      nlohmann::json::parse(slurp(out / "run_config.json"));
  CHECK(echo["attack"]["scratch_count"] == 1);
  CHECK(echo["optimizer"]["strategy"] == "de");
  // The flag overrode the config's output_dir default.
  CHECK(echo["output_dir"] == out.string());
}

TEST_CASE("errors surface as machine-readable JSON with nonzero status") {
  TempDir tmp;
  const fs::path config_path = tmp.path / "bad.json";
  std::ofstream(config_path) << R"({"attack": {"scratch_count": 99}})";
  const std::string command = kCli + " attack --config " + config_path.string() +
                              " 2> " + (tmp.path / "err.txt").string() +
                              " > /dev/null";
  const int status = WEXITSTATUS(std::system(command.c_str()));
  CHECK(status != 0);
  const nlohmann::json err = nlohmann::json::parse(slurp(tmp.path / "err.txt"));
  CHECK(err.contains("error"));

  CHECK(run("attack") != 0);  // no manifest anywhere
  CHECK(run("defend --records /nonexistent.jsonl") != 0);
}
