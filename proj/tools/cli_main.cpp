// Command-line surface: attack campaigns, defense evaluation, report
// rendering, and debug rasterization. Configuration comes from an optional
// JSON file mirrored by flags; flags win on conflict. Errors print a
// machine-readable JSON object on stderr and exit nonzero.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scratchkit/attack.hpp"
#include "scratchkit/config.hpp"
#include "scratchkit/defense.hpp"
#include "scratchkit/manifest.hpp"
#include "scratchkit/png_io.hpp"
#include "scratchkit/records.hpp"

using namespace scratchkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string manifest;
  std::string output_dir;
  std::string oracle_kind;
  std::string model_path;
  std::string url;
  std::string strategy;
  std::string seeds;
  std::string color_mode;
  int scratches = -1;
  int l0 = -1;
  int order = -1;
  int budget = -1;
  int workers = -1;
  double min_interval = -1.0;
  int max_retries = -1;
  std::vector<std::string> defenses;
  bool save_images = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration");
  cmd->add_option("--manifest", flags.manifest, "Dataset manifest (JSON)");
  cmd->add_option("--out-dir", flags.output_dir, "Output directory");
  cmd->add_option("--oracle", flags.oracle_kind,
                  "Oracle kind: toy, local-file, http");
  cmd->add_option("--model", flags.model_path,
                  "Model file for toy/local-file oracles");
  cmd->add_option("--url", flags.url, "HTTP oracle endpoint");
  cmd->add_option("--strategy", flags.strategy, "Optimizer: rs, de, pso, ngo");
  cmd->add_option("--seeds", flags.seeds, "Comma-separated seed list");
  cmd->add_option("--scratches", flags.scratches, "Number of scratches");
  cmd->add_option("--l0", flags.l0, "Per-scratch pixel budget");
  cmd->add_option("--order", flags.order, "Bezier order");
  cmd->add_option("--color-mode", flags.color_mode,
                  "polychrome-saturated, monochrome-saturated, "
                  "polychrome-grayscale, polychrome-image-color");
  cmd->add_option("--budget", flags.budget, "Query limit per image");
  cmd->add_option("--workers", flags.workers, "Parallel attacks");
  cmd->add_option("--min-interval", flags.min_interval,
                  "Minimum seconds between HTTP requests");
  cmd->add_option("--max-retries", flags.max_retries, "HTTP retry cap");
  cmd->add_option("--defense", flags.defenses,
                  "Defense spec (median3x3 or jpeg:Q); repeatable");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

// File config first, then flag overrides.
RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    config = load_run_config(flags.config_path);
  }
  if (!flags.manifest.empty()) config.manifest_path = flags.manifest;
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  if (!flags.strategy.empty()) {
    config.strategy = strategy_from_name(flags.strategy);
  }
  if (!flags.seeds.empty()) config.seeds = parse_seed_list(flags.seeds);
  if (flags.scratches > 0) config.attack.scratch_count = flags.scratches;
  if (flags.l0 > 0) config.attack.per_scratch_l0 = flags.l0;
  if (flags.order > 0) config.attack.bezier_order = flags.order;
  if (!flags.color_mode.empty()) {
    config.attack.color_mode = color_mode_from_name(flags.color_mode);
  }
  if (flags.budget > 0) config.attack.query_limit = flags.budget;
  if (flags.workers > 0) config.workers = flags.workers;
  if (!flags.oracle_kind.empty()) {
    if (flags.oracle_kind == "toy") {
      config.oracle.kind = OracleSpec::Kind::Toy;
      if (config.oracle.path.empty()) {
        config.oracle.path = "fixtures/toy_model.json";
      }
    } else if (flags.oracle_kind == "local-file") {
      config.oracle.kind = OracleSpec::Kind::LocalFile;
    } else if (flags.oracle_kind == "http") {
      config.oracle.kind = OracleSpec::Kind::Http;
    } else {
      throw std::invalid_argument("unknown oracle kind: " + flags.oracle_kind);
    }
  }
  if (!flags.model_path.empty()) config.oracle.path = flags.model_path;
  if (!flags.url.empty()) config.oracle.http.url = flags.url;
  if (flags.min_interval >= 0.0) {
    config.oracle.http.min_interval_s = flags.min_interval;
  }
  if (flags.max_retries >= 0) config.oracle.http.max_retries = flags.max_retries;
  for (const std::string& d : flags.defenses) {
    config.defenses.push_back(DefenseSpec::parse(d));
  }
  config.attack.validate();
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? std::to_string(*v) : std::string("");
}

std::string md_cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

void write_metrics_tables(const fs::path& dir, const CampaignSummary& summary) {
  std::ostringstream csv;
  csv << "seed,attempted,successes,skipped,errored,fooling_rate,avg_queries,"
         "median_queries,avg_l0\n";
  for (const SeedMetrics& m : summary.per_seed) {
    csv << m.seed << ',' << m.attempted << ',' << m.successes << ','
        << m.skipped << ',' << m.errored << ',' << m.fooling_rate << ','
        << csv_cell(m.avg_queries) << ',' << csv_cell(m.median_queries) << ','
        << csv_cell(m.avg_l0) << '\n';
  }
  write_text(dir / "metrics.csv", csv.str());

  std::ostringstream md;
  md << "| Seed | FR | AQ | MQ | Avg L0 |\n";
  md << "|------|----|----|----|--------|\n";
  char fr[32];
  for (const SeedMetrics& m : summary.per_seed) {
    std::snprintf(fr, sizeof(fr), "%.3f", m.fooling_rate);
    md << "| " << m.seed << " | " << fr << " | " << md_cell(m.avg_queries)
       << " | " << md_cell(m.median_queries) << " | " << md_cell(m.avg_l0)
       << " |\n";
  }
  std::snprintf(fr, sizeof(fr), "%.3f +- %.3f", summary.fr_mean, summary.fr_std);
  md << "| **mean** | " << fr << " | " << md_cell(summary.aq_mean) << " | "
     << md_cell(summary.mq_mean) << " | " << md_cell(summary.avg_l0_mean)
     << " |\n";
  write_text(dir / "metrics.md", md.str());
}

int cmd_attack(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  if (config.manifest_path.empty()) {
    throw std::invalid_argument("attack: --manifest (or config manifest) required");
  }
  const std::vector<CampaignImage> images =
      load_campaign_images(load_manifest(config.manifest_path));
  std::unique_ptr<Oracle> oracle = make_oracle(config.oracle);

  const auto start = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  const CampaignResult result =
      run_campaign(images, config.attack, config.strategy, *oracle,
                   config.seeds, config.workers);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  write_records((dir / "records.jsonl").string(), result.records);
  write_text(dir / "summary.json", summary_to_json(result.summary));
  write_text(dir / "run_config.json", run_config_to_json(config));

  // Timestamps live here, away from the reproducible summary.
  json meta;
  meta["started_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                             start.time_since_epoch())
                             .count();
  meta["elapsed_s"] = elapsed;
  write_text(dir / "run_meta.json", meta.dump(2));

  std::printf("attacked %zu images x %zu seeds: FR %.3f +- %.3f\n",
              images.size(), config.seeds.size(), result.summary.fr_mean,
              result.summary.fr_std);
  std::printf("records: %s\n", (dir / "records.jsonl").c_str());
  return result.summary.errored == 0 ? 0 : 1;
}

int cmd_defend(CommonFlags flags, const std::string& records_path) {
  if (flags.config_path.empty()) {
    const fs::path sibling = fs::path(records_path).parent_path() / "run_config.json";
    if (fs::exists(sibling)) flags.config_path = sibling.string();
  }
  RunConfig config = resolve_config(flags);
  if (config.defenses.empty()) {
    config.defenses = {DefenseSpec::median(), DefenseSpec::jpeg(85),
                       DefenseSpec::jpeg(90), DefenseSpec::jpeg(95),
                       DefenseSpec::jpeg(99)};
  }
  if (config.manifest_path.empty()) {
    throw std::invalid_argument("defend: manifest required (flag or run config)");
  }

  const std::vector<AttackRecord> records = read_records(records_path);
  const std::vector<CampaignImage> images =
      load_campaign_images(load_manifest(config.manifest_path));
  std::unique_ptr<Oracle> oracle = make_oracle(config.oracle);

  const auto find_image = [&](const std::string& id) -> const CampaignImage* {
    for (const CampaignImage& img : images) {
      if (img.image_id == id) return &img;
    }
    return nullptr;
  };

  json report;
  report["records"] = records_path;
  json rows = json::array();
  std::ostringstream md;
  md << "| Defense | Recovery rate | Clean acc | Defended acc | Delta |\n";
  md << "|---------|---------------|-----------|--------------|-------|\n";

  for (const DefenseSpec& spec : config.defenses) {
    std::vector<RecoveryFlags> flags_set;
    for (const AttackRecord& record : records) {
      if (record.status == AttackStatus::Skipped ||
          record.status == AttackStatus::Errored) {
        continue;
      }
      const CampaignImage* img = find_image(record.image_id);
      if (!img) {
        throw std::runtime_error("records reference unknown image " +
                                 record.image_id);
      }
      RecoveryFlags rf;
      rf.clean_correct = true;  // skipped records were filtered above
      rf.attack_success = record.success;
      if (record.success) {
        const ScratchApplication adv = apply_scratches(
            img->image, record.final_params, config.attack.per_scratch_l0,
            img->region, config.attack.color_mode);
        const Image defended = defend(adv.image, spec);
        rf.defended_correct =
            oracle->classify(defended).label == record.true_label;
        if (flags.save_images) {
          const fs::path img_dir =
              fs::path(config.output_dir) / "defended" / spec.name();
          fs::create_directories(img_dir);
          const std::string stem =
              record.image_id + "_seed" + std::to_string(record.seed);
          if (spec.kind == DefenseKind::Jpeg) {
            // Interchange as the codec's own file bytes.
            const std::vector<std::uint8_t> bytes =
                jpeg_bytes(adv.image, spec.jpeg_quality);
            std::ofstream out(img_dir / (stem + ".jpg"), std::ios::binary);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
          } else {
            write_png((img_dir / (stem + ".png")).string(), defended);
          }
        }
      }
      flags_set.push_back(rf);
    }
    const std::optional<double> rr = recovery_rate(flags_set);
    const AccuracyReport acc = clean_accuracy_delta(images, *oracle, spec);

    json row;
    row["defense"] = spec.name();
    row["recovery_rate"] = rr ? json(*rr) : json(nullptr);
    row["clean_accuracy"] = acc.clean_accuracy;
    row["defended_accuracy"] = acc.defended_accuracy;
    row["delta"] = acc.delta;
    rows.push_back(row);

    char rr_text[32];
    if (rr) {
      std::snprintf(rr_text, sizeof(rr_text), "%.1f%%", 100.0 * *rr);
    } else {
      std::snprintf(rr_text, sizeof(rr_text), "-");
    }
    char line[160];
    std::snprintf(line, sizeof(line), "| %s | %s | %.1f%% | %.1f%% | %+.1f%% |\n",
                  spec.name().c_str(), rr_text, 100.0 * acc.clean_accuracy,
                  100.0 * acc.defended_accuracy, 100.0 * acc.delta);
    md << line;
    std::printf("%s: RR %s, accuracy delta %+.1f%%\n", spec.name().c_str(),
                rr_text, 100.0 * acc.delta);
  }
  report["defenses"] = std::move(rows);

  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  write_text(dir / "defense_report.json", report.dump(2));
  write_text(dir / "defense_report.md", md.str());
  return 0;
}

int cmd_report(CommonFlags flags, const std::string& records_path) {
  if (flags.config_path.empty()) {
    const fs::path sibling = fs::path(records_path).parent_path() / "run_config.json";
    if (fs::exists(sibling)) flags.config_path = sibling.string();
  }
  const RunConfig config = resolve_config(flags);
  const std::vector<AttackRecord> records = read_records(records_path);

  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);

  std::vector<std::uint64_t> seeds;
  for (const AttackRecord& r : records) {
    if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) {
      seeds.push_back(r.seed);
    }
  }
  const CampaignSummary summary = summarize_records(records, seeds);
  write_metrics_tables(dir, summary);

  // Adversarial renders need the source images.
  if (!config.manifest_path.empty()) {
    const std::vector<CampaignImage> images =
        load_campaign_images(load_manifest(config.manifest_path));
    fs::create_directories(dir / "adversarial");
    for (const AttackRecord& record : records) {
      if (!record.success) continue;
      const CampaignImage* img = nullptr;
      for (const CampaignImage& candidate : images) {
        if (candidate.image_id == record.image_id) img = &candidate;
      }
      if (!img) continue;
      const ScratchApplication adv = apply_scratches(
          img->image, record.final_params, config.attack.per_scratch_l0,
          img->region, config.attack.color_mode);
      char name[96];
      std::snprintf(name, sizeof(name), "%s_seed%llu.png",
                    record.image_id.c_str(),
                    static_cast<unsigned long long>(record.seed));
      write_png((dir / "adversarial" / name).string(), adv.image);
    }
  }

  std::printf("report written to %s (%zu records)\n", dir.c_str(),
              records.size());
  return 0;
}

int cmd_rasterize(const std::string& params_text, int height, int width,
                  const std::string& base_image, const std::string& mask_path,
                  int k, const std::string& color_mode_name,
                  const std::string& out_path) {
  std::vector<double> values;
  {
    std::stringstream ss(params_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) values.push_back(std::stod(item));
    }
  }
  // Infer the order from the vector length: 2*(n+1)+3 values per scratch.
  ScratchParams params;
  if (values.size() < 7 || (values.size() - 3) % 2 != 0) {
    throw std::invalid_argument(
        "rasterize: expected x0,y0,...,xn,yn,r,g,b coordinates");
  }
  params.order = static_cast<int>((values.size() - 3) / 2) - 1;
  params.coords.assign(values.begin(), values.end() - 3);
  std::copy(values.end() - 3, values.end(), params.color_params.begin());

  Image base;
  if (!base_image.empty()) {
    base = read_png(base_image);
  } else {
    if (height < 1 || width < 1) {
      throw std::invalid_argument("rasterize: --height/--width required");
    }
    base = Image::filled(height, width, 0.5);
  }
  TargetRegion region = mask_path.empty()
                            ? TargetRegion::all_ones(base.height, base.width)
                            : read_mask_png(mask_path);
  const ColorMode mode = color_mode_name.empty()
                             ? ColorMode::PolychromeSaturated
                             : color_mode_from_name(color_mode_name);
  const int budget = k > 0 ? k : base.height * base.width;
  const ScratchApplication out =
      apply_scratches(base, {params}, budget, region, mode);
  write_png(out_path, out.image);
  std::printf("wrote %s (painted %d pixels)\n", out_path.c_str(), out.total_l0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scratch-shaped black-box adversarial attacks and defenses"};
  app.require_subcommand(1);

  CommonFlags attack_flags, defend_flags, report_flags;
  std::string defend_records, report_records;

  CLI::App* attack = app.add_subcommand("attack", "Run an attack campaign");
  add_common_flags(attack, attack_flags);

  CLI::App* defend =
      app.add_subcommand("defend", "Evaluate input-filtering defenses");
  add_common_flags(defend, defend_flags);
  defend->add_option("--records", defend_records, "records.jsonl from attack")
      ->required();
  defend->add_flag("--save-images", defend_flags.save_images,
                   "Write defended adversarial images (JPEG bytes for the "
                   "jpeg defense, PNG otherwise)");

  CLI::App* report = app.add_subcommand("report", "Render metrics and images");
  add_common_flags(report, report_flags);
  report->add_option("--records", report_records, "records.jsonl from attack")
      ->required();

  CLI::App* raster = app.add_subcommand("rasterize", "Debug-render a scratch");
  std::string raster_params, raster_base, raster_mask, raster_mode;
  std::string raster_out = "scratch.png";
  int raster_h = 0, raster_w = 0, raster_k = 0;
  raster->add_option("--params", raster_params,
                     "x0,y0,...,xn,yn,r,g,b (colors in [0,1])")
      ->required();
  raster->add_option("--height", raster_h, "Canvas height");
  raster->add_option("--width", raster_w, "Canvas width");
  raster->add_option("--image", raster_base, "Base PNG instead of a canvas");
  raster->add_option("--mask", raster_mask, "Region mask PNG");
  raster->add_option("--k", raster_k, "Pixel budget (default: unlimited)");
  raster->add_option("--color-mode", raster_mode, "Color mode");
  raster->add_option("--out", raster_out, "Output PNG");

  CLI11_PARSE(app, argc, argv);

  try {
    if (attack->parsed()) return cmd_attack(attack_flags);
    if (defend->parsed()) return cmd_defend(defend_flags, defend_records);
    if (report->parsed()) return cmd_report(report_flags, report_records);
    if (raster->parsed()) {
      return cmd_rasterize(raster_params, raster_h, raster_w, raster_base,
                           raster_mask, raster_k, raster_mode, raster_out);
    }
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    std::cerr << err.dump() << '\n';
    return 2;
  }
  return 0;
}
