#include <algorithm>
#include <cmath>

#include "scratchkit/attack.hpp"

namespace scratchkit {

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median_of(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of empty set");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SeedMetrics compute_seed_metrics(std::span<const AttackRecord> records,
                                 std::uint64_t seed) {
  SeedMetrics m;
  m.seed = seed;
  std::vector<double> queries;
  std::vector<double> l0s;
  for (const AttackRecord& r : records) {
    if (r.seed != seed) continue;
    switch (r.status) {
      case AttackStatus::Skipped:
        ++m.skipped;
        continue;
      case AttackStatus::Errored:
        ++m.errored;
        continue;
      case AttackStatus::Success:
        ++m.attempted;
        ++m.successes;
        queries.push_back(static_cast<double>(r.queries));
        l0s.push_back(static_cast<double>(r.achieved_l0));
        break;
      case AttackStatus::Failure:
        ++m.attempted;
        break;
    }
  }
  m.fooling_rate = m.attempted > 0
                       ? static_cast<double>(m.successes) / m.attempted
                       : 0.0;
  if (!queries.empty()) {
    double total = 0.0;
    for (double q : queries) total += q;
    m.avg_queries = total / static_cast<double>(queries.size());
    m.median_queries = median_of(queries);
    double l0_total = 0.0;
    for (double v : l0s) l0_total += v;
    m.avg_l0 = l0_total / static_cast<double>(l0s.size());
  }
  return m;
}

CampaignSummary summarize_records(std::span<const AttackRecord> records,
                                  const std::vector<std::uint64_t>& seeds) {
  CampaignSummary summary;
  std::vector<double> frs, aqs, mqs, l0s;
  for (std::uint64_t seed : seeds) {
    SeedMetrics m = compute_seed_metrics(records, seed);
    summary.skipped_misclassified += m.skipped;
    summary.errored += m.errored;
    frs.push_back(m.fooling_rate);
    if (m.avg_queries) aqs.push_back(*m.avg_queries);
    if (m.median_queries) mqs.push_back(*m.median_queries);
    if (m.avg_l0) l0s.push_back(*m.avg_l0);
    summary.per_seed.push_back(std::move(m));
  }

  const auto mean = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v) total += x;
    return total / static_cast<double>(v.size());
  };
  summary.fr_mean = frs.empty() ? 0.0 : mean(frs);
  summary.fr_std = sample_std(frs);
  if (!aqs.empty()) {
    summary.aq_mean = mean(aqs);
    summary.aq_std = sample_std(aqs);
  }
  if (!mqs.empty()) {
    summary.mq_mean = mean(mqs);
    summary.mq_std = sample_std(mqs);
  }
  if (!l0s.empty()) {
    summary.avg_l0_mean = mean(l0s);
  }
  return summary;
}

}  // namespace scratchkit
