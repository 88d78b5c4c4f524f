#include "scratchkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scratchkit {

int argmax_label(const ScoreVector& scores) {
  if (scores.empty()) throw std::domain_error("argmax over empty score vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Prediction Oracle::classify(const Image& image) {
  OracleResult result = query(image);
  if (result.scores.empty()) {
    throw ProtocolError("oracle returned no class scores");
  }
  Prediction pred;
  pred.label = argmax_label(result.scores);
  pred.scores = std::move(result.scores);
  return pred;
}

QueryLedger::QueryLedger(int limit) : limit_(limit) {
  if (limit < 1) throw std::invalid_argument("query limit must be >= 1");
}

void QueryLedger::charge() {
  if (count_ >= limit_) throw std::logic_error("query budget exceeded");
  ++count_;
}

double margin_loss(const ScoreVector& scores, int true_label) {
  if (scores.size() < 2) {
    throw std::domain_error("margin loss needs at least two classes");
  }
  if (true_label < 0 || true_label >= static_cast<int>(scores.size())) {
    throw std::domain_error("margin loss: label out of range");
  }
  double best_other = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    if (i == true_label) continue;
    best_other = std::max(best_other, scores[i]);
  }
  return scores[true_label] - best_other;
}

double targeted_cross_entropy(const ScoreVector& probabilities,
                              int target_label) {
  if (probabilities.size() < 2) {
    throw std::domain_error("cross entropy needs at least two classes");
  }
  if (target_label < 0 ||
      target_label >= static_cast<int>(probabilities.size())) {
    throw std::domain_error("cross entropy: target label out of range");
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::domain_error("cross entropy: entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::domain_error("cross entropy: scores do not sum to 1");
  }
  constexpr double kEps = 1e-12;
  double loss = 0.0;
  for (int i = 0; i < static_cast<int>(probabilities.size()); ++i) {
    const double p = std::clamp(probabilities[i], kEps, 1.0 - kEps);
    if (i == target_label) {
      loss -= std::log(p);
    } else {
      loss -= std::log(1.0 - p);
    }
  }
  return loss;
}

double confidence_loss(double confidence) { return confidence; }

ScoreVector softmax(const ScoreVector& scores) {
  if (scores.empty()) return {};
  const double peak = *std::max_element(scores.begin(), scores.end());
  ScoreVector out(scores.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - peak);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

bool is_probability_vector(const ScoreVector& scores, double tol) {
  if (scores.empty()) return false;
  double sum = 0.0;
  for (double v : scores) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace scratchkit
