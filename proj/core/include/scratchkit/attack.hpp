#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scratchkit/image.hpp"
#include "scratchkit/optimizer.hpp"
#include "scratchkit/oracle.hpp"
#include "scratchkit/scratch.hpp"

namespace scratchkit {

enum class AttackStatus {
  Success,  // adversarial sample found within the query budget
  Failure,  // budget exhausted
  Skipped,  // clean image already misclassified; excluded from metrics
  Errored,  // oracle transport failure; excluded from metrics
};

std::string attack_status_name(AttackStatus status);
AttackStatus attack_status_from_name(const std::string& name);

struct AttackRecord {
  std::string image_id;
  std::uint64_t seed = 0;
  AttackStatus status = AttackStatus::Failure;
  bool success = false;
  int queries = 0;       // loop iterations consumed (clean check uncharged)
  int achieved_l0 = 0;   // distinct changed pixels of the successful sample
  int true_label = -1;
  int adversarial_label = -1;  // -1 unless success
  std::vector<ScratchParams> final_params;  // clipped; empty unless success
  double wall_time_s = 0.0;
  std::string error;

  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

struct EngineOptions {
  // Retries per oracle call on retryable transport errors before the attack
  // is marked Errored. Failed calls never consume query budget.
  int transport_retry_cap = 3;
};

// Per-scratch bounds: coordinates over the image box, colors in [0, 1].
SearchSpace attack_search_space(const AttackConfig& config, int height,
                                int width);

// Runs the untargeted attack loop on one image: ask, clip, apply, query,
// margin loss, stop on loss < 0 (strict) else tell. The told loss is the
// loss of the clipped sample attributed to the unclipped vector. Images the
// oracle misclassifies untouched are skipped.
AttackRecord attack_image(const Image& image, int true_label,
                          const TargetRegion& region, const AttackConfig& config,
                          Strategy strategy, Oracle& oracle,
                          std::uint64_t optimizer_seed,
                          const EngineOptions& options = {});

// Targeted variant minimizing the one-hot cross entropy toward target_label;
// success requires argmax == target_label explicitly. Raw scores are passed
// through a softmax when they are not already a probability vector. Throws
// std::invalid_argument when the clean prediction already equals the target.
AttackRecord targeted_attack_image(const Image& image, int target_label,
                                   const TargetRegion& region,
                                   const AttackConfig& config, Strategy strategy,
                                   Oracle& oracle, std::uint64_t optimizer_seed,
                                   const EngineOptions& options = {});

struct CampaignImage {
  std::string image_id;
  Image image;
  TargetRegion region;
  int label = -1;
};

struct SeedMetrics {
  std::uint64_t seed = 0;
  int attempted = 0;  // records entering FR (not skipped, not errored)
  int successes = 0;
  int skipped = 0;
  int errored = 0;
  double fooling_rate = 0.0;
  std::optional<double> avg_queries;     // over successes; absent when none
  std::optional<double> median_queries;  // over successes; absent when none
  std::optional<double> avg_l0;          // over successes; absent when none
};

struct CampaignSummary {
  std::vector<SeedMetrics> per_seed;
  double fr_mean = 0.0;
  double fr_std = 0.0;  // sample std across seeds; 0 for a single seed
  std::optional<double> aq_mean, aq_std;
  std::optional<double> mq_mean, mq_std;
  std::optional<double> avg_l0_mean;
  int skipped_misclassified = 0;
  int errored = 0;
};

struct CampaignResult {
  std::vector<AttackRecord> records;  // ordered by (seed, image) task order
  CampaignSummary summary;
};

// Runs every (image, seed) attack and aggregates FR/AQ/MQ per seed, then
// mean +- sample standard deviation across seeds. Per-task optimizer seeds
// derive from (seed, image_id) only, so results do not depend on worker
// scheduling; workers > 1 requires an oracle that permits concurrency.
CampaignResult run_campaign(const std::vector<CampaignImage>& images,
                            const AttackConfig& config, Strategy strategy,
                            Oracle& oracle, const std::vector<std::uint64_t>& seeds,
                            int workers = 1, const EngineOptions& options = {});

// Metrics recomputation used by the summary and available to callers for
// independent cross-checks.
SeedMetrics compute_seed_metrics(std::span<const AttackRecord> records,
                                 std::uint64_t seed);
CampaignSummary summarize_records(std::span<const AttackRecord> records,
                                  const std::vector<std::uint64_t>& seeds);

double sample_std(std::span<const double> values);
double median_of(std::vector<double> values);

}  // namespace scratchkit
