#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scratchkit/image.hpp"

namespace scratchkit {

// One score per class. Values need not be probabilities: the margin loss is
// scale-tolerant on any monotone score.
using ScoreVector = std::vector<double>;

struct Prediction {
  int label = -1;  // argmax of scores, lowest index on ties
  ScoreVector scores;
};

// Lowest-index argmax, so predictions are deterministic under ties.
int argmax_label(const ScoreVector& scores);

// Remote endpoint failed to deliver a usable response (connectivity,
// timeout, non-2xx status). Carries retry metadata for the caller.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int attempts, int http_status,
                 bool retryable)
      : std::runtime_error(what),
        attempts(attempts),
        http_status(http_status),
        retryable(retryable) {}

  int attempts = 0;
  int http_status = -1;  // -1: no HTTP response at all
  bool retryable = false;
};

// The endpoint responded but the payload does not match the expected schema.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw response of a scoring endpoint. Classification endpoints fill
// `scores`; captioning endpoints fill `confidence` and `caption` instead.
struct OracleResult {
  ScoreVector scores;
  std::optional<double> confidence;
  std::optional<std::string> caption;
};

// Score-based black-box classifier. Implementations expose scores only:
// no gradients, no internals.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual OracleResult query(const Image& image) = 0;

  // Whether concurrent query() calls from multiple threads are permitted.
  virtual bool supports_concurrency() const { return false; }

  // Queries and reduces to a labeled prediction. Throws ProtocolError when
  // the endpoint returned no scores (captioning-only endpoints).
  Prediction classify(const Image& image);
};

// Counts oracle evaluations inside an attack loop against a hard limit. The
// initial clean-image classification is not charged.
class QueryLedger {
 public:
  explicit QueryLedger(int limit);

  int count() const { return count_; }
  int limit() const { return limit_; }
  bool exhausted() const { return count_ >= limit_; }

  // Throws std::logic_error when charging past the limit.
  void charge();

 private:
  int count_ = 0;
  int limit_ = 0;
};

// Margin loss: scores[true_label] - max over other classes. Negative iff
// the sample is misclassified; exactly zero on ties (not yet adversarial).
// Throws std::domain_error for vectors with fewer than two classes.
double margin_loss(const ScoreVector& scores, int true_label);

// Targeted loss over a probability vector:
//   -log(p[target]) - sum_{i != target} log(1 - p[i]).
// Entries are clamped to [1e-12, 1 - 1e-12] before the logs. Throws
// std::domain_error unless the vector sums to 1 within 1e-6 with entries in
// [0, 1], or when the target index is out of range.
double targeted_cross_entropy(const ScoreVector& probabilities,
                              int target_label);

// Loss for captioning/confidence endpoints: the reported confidence itself.
// Success criteria (confidence drop, caption change) are caller-defined.
double confidence_loss(double confidence);

ScoreVector softmax(const ScoreVector& scores);
bool is_probability_vector(const ScoreVector& scores, double tol = 1e-6);

// Fixed-response oracle, useful for tests and dry runs.
class ConstantOracle : public Oracle {
 public:
  explicit ConstantOracle(ScoreVector scores) : scores_(std::move(scores)) {}
  OracleResult query(const Image&) override { return {scores_, {}, {}}; }
  bool supports_concurrency() const override { return true; }

 private:
  ScoreVector scores_;
};

// Wraps an arbitrary scoring function.
class CallbackOracle : public Oracle {
 public:
  using Fn = std::function<OracleResult(const Image&)>;
  explicit CallbackOracle(Fn fn, bool concurrent = false)
      : fn_(std::move(fn)), concurrent_(concurrent) {}
  OracleResult query(const Image& image) override { return fn_(image); }
  bool supports_concurrency() const override { return concurrent_; }

 private:
  Fn fn_;
  bool concurrent_;
};

}  // namespace scratchkit
