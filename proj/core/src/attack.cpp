#include "scratchkit/attack.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "scratchkit/rng.hpp"

namespace scratchkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Oracle call with bounded retries on retryable transport errors. Failed
// calls never consume query budget; a non-retryable error or an exhausted
// retry cap surfaces to the caller.
Prediction classify_with_retries(Oracle& oracle, const Image& image,
                                 const EngineOptions& options) {
  int failures = 0;
  while (true) {
    try {
      return oracle.classify(image);
    } catch (const TransportError& e) {
      if (!e.retryable || failures >= options.transport_retry_cap) throw;
      ++failures;
    }
  }
}

struct LoopCallbacks {
  // Loss for the clipped sample's scores; engine stops when stop() is true.
  std::function<double(const Prediction&)> loss;
  std::function<bool(const Prediction&, double loss)> stop;
};

AttackRecord run_attack_loop(const Image& image, const TargetRegion& region,
                             const AttackConfig& config, Strategy strategy,
                             Oracle& oracle, std::uint64_t optimizer_seed,
                             const EngineOptions& options,
                             const LoopCallbacks& callbacks,
                             AttackRecord record, Clock::time_point start) {
  const SearchSpace space =
      attack_search_space(config, image.height, image.width);
  auto optimizer = make_optimizer(strategy, space, optimizer_seed);
  QueryLedger ledger(config.query_limit);

  while (!ledger.exhausted()) {
    const std::vector<double> candidate = optimizer->ask();
    const std::vector<ScratchParams> scratches =
        split_params(candidate, config.scratch_count, config.bezier_order);
    ScratchApplication applied = apply_scratches(
        image, scratches, config.per_scratch_l0, region, config.color_mode);

    Prediction prediction;
    try {
      prediction = classify_with_retries(oracle, applied.image, options);
    } catch (const std::exception& e) {
      record.status = AttackStatus::Errored;
      record.success = false;
      record.queries = ledger.count();
      record.error = e.what();
      record.wall_time_s = seconds_since(start);
      return record;
    }
    ledger.charge();

    const double loss = callbacks.loss(prediction);
    if (callbacks.stop(prediction, loss)) {
      record.status = AttackStatus::Success;
      record.success = true;
      record.queries = ledger.count();
      record.achieved_l0 = applied.total_l0;
      record.adversarial_label = prediction.label;
      record.final_params.reserve(applied.scratches.size());
      for (const ClippedScratch& clip : applied.scratches) {
        record.final_params.push_back(clip.params);
      }
      record.wall_time_s = seconds_since(start);
      return record;
    }
    // Loss of the clipped sample, attributed to the unclipped vector.
    optimizer->tell(candidate, loss);
  }

  record.status = AttackStatus::Failure;
  record.success = false;
  record.queries = ledger.count();
  record.wall_time_s = seconds_since(start);
  return record;
}

}  // namespace

std::string attack_status_name(AttackStatus status) {
  switch (status) {
    case AttackStatus::Success: return "success";
    case AttackStatus::Failure: return "failure";
    case AttackStatus::Skipped: return "skipped";
    case AttackStatus::Errored: return "error";
  }
  throw std::invalid_argument("unknown attack status");
}

AttackStatus attack_status_from_name(const std::string& name) {
  if (name == "success") return AttackStatus::Success;
  if (name == "failure") return AttackStatus::Failure;
  if (name == "skipped") return AttackStatus::Skipped;
  if (name == "error") return AttackStatus::Errored;
  throw std::invalid_argument("unknown attack status: " + name);
}

SearchSpace attack_search_space(const AttackConfig& config, int height,
                                int width) {
  config.validate();
  if (height < 2 || width < 2) {
    throw std::invalid_argument("attack needs at least a 2x2 image");
  }
  SearchSpace space;
  const int per = ScratchParams::vector_size(config.bezier_order);
  space.lower.reserve(static_cast<std::size_t>(per) * config.scratch_count);
  space.upper.reserve(space.lower.capacity());
  for (int s = 0; s < config.scratch_count; ++s) {
    for (int p = 0; p <= config.bezier_order; ++p) {
      space.lower.push_back(0.0);
      space.upper.push_back(static_cast<double>(width - 1));   // x
      space.lower.push_back(0.0);
      space.upper.push_back(static_cast<double>(height - 1));  // y
    }
    for (int c = 0; c < 3; ++c) {
      space.lower.push_back(0.0);
      space.upper.push_back(1.0);
    }
  }
  return space;
}

AttackRecord attack_image(const Image& image, int true_label,
                          const TargetRegion& region, const AttackConfig& config,
                          Strategy strategy, Oracle& oracle,
                          std::uint64_t optimizer_seed,
                          const EngineOptions& options) {
  config.validate();
  if (region.height != image.height || region.width != image.width) {
    throw std::invalid_argument("attack_image: region shape mismatch");
  }
  const auto start = Clock::now();
  AttackRecord record;
  record.seed = optimizer_seed;
  record.true_label = true_label;

  Prediction clean;
  try {
    clean = classify_with_retries(oracle, image, options);  // uncharged
  } catch (const std::exception& e) {
    record.status = AttackStatus::Errored;
    record.error = e.what();
    record.wall_time_s = seconds_since(start);
    return record;
  }
  if (clean.label != true_label) {
    record.status = AttackStatus::Skipped;
    record.wall_time_s = seconds_since(start);
    return record;
  }

  LoopCallbacks callbacks;
  callbacks.loss = [true_label](const Prediction& p) {
    return margin_loss(p.scores, true_label);
  };
  callbacks.stop = [](const Prediction&, double loss) { return loss < 0.0; };
  return run_attack_loop(image, region, config, strategy, oracle,
                         optimizer_seed, options, callbacks, std::move(record),
                         start);
}

AttackRecord targeted_attack_image(const Image& image, int target_label,
                                   const TargetRegion& region,
                                   const AttackConfig& config, Strategy strategy,
                                   Oracle& oracle, std::uint64_t optimizer_seed,
                                   const EngineOptions& options) {
  config.validate();
  if (region.height != image.height || region.width != image.width) {
    throw std::invalid_argument("targeted_attack_image: region shape mismatch");
  }
  const auto start = Clock::now();
  AttackRecord record;
  record.seed = optimizer_seed;
  record.true_label = target_label;  // records carry the target here

  Prediction clean;
  try {
    clean = classify_with_retries(oracle, image, options);
  } catch (const std::exception& e) {
    record.status = AttackStatus::Errored;
    record.error = e.what();
    record.wall_time_s = seconds_since(start);
    return record;
  }
  if (clean.label == target_label) {
    throw std::invalid_argument(
        "targeted attack: clean prediction already equals the target");
  }

  LoopCallbacks callbacks;
  callbacks.loss = [target_label](const Prediction& p) {
    const ScoreVector probs =
        is_probability_vector(p.scores) ? p.scores : softmax(p.scores);
    return targeted_cross_entropy(probs, target_label);
  };
  // A low loss alone is not success; the predicted class must be the target.
  callbacks.stop = [target_label](const Prediction& p, double) {
    return p.label == target_label;
  };
  return run_attack_loop(image, region, config, strategy, oracle,
                         optimizer_seed, options, callbacks, std::move(record),
                         start);
}

CampaignResult run_campaign(const std::vector<CampaignImage>& images,
                            const AttackConfig& config, Strategy strategy,
                            Oracle& oracle, const std::vector<std::uint64_t>& seeds,
                            int workers, const EngineOptions& options) {
  if (images.empty()) throw std::invalid_argument("campaign: no images");
  if (seeds.empty()) throw std::invalid_argument("campaign: no seeds");
  config.validate();

  struct Task {
    const CampaignImage* image;
    std::uint64_t seed;
    std::uint64_t task_seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(images.size() * seeds.size());
  for (std::uint64_t seed : seeds) {
    for (const CampaignImage& img : images) {
      tasks.push_back({&img, seed, mix_seed(seed, hash_string(img.image_id))});
    }
  }

  std::vector<AttackRecord> records(tasks.size());
  auto run_task = [&](std::size_t index) {
    const Task& task = tasks[index];
    AttackRecord record =
        attack_image(task.image->image, task.image->label, task.image->region,
                     config, strategy, oracle, task.task_seed, options);
    record.image_id = task.image->image_id;
    record.seed = task.seed;  // campaign seed, not the derived stream seed
    records[index] = std::move(record);
  };

  const int usable_workers =
      oracle.supports_concurrency() ? std::max(1, workers) : 1;
  if (usable_workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const int n = std::min<int>(usable_workers, static_cast<int>(tasks.size()));
    for (int w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  CampaignResult result;
  result.records = std::move(records);
  result.summary = summarize_records(result.records, seeds);
  return result;
}

}  // namespace scratchkit
