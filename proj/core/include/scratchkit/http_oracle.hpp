#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "scratchkit/oracle.hpp"

namespace scratchkit {

struct HttpOracleConfig {
  // Full endpoint, e.g. "http://127.0.0.1:8080/score".
  std::string url;
  // Minimum spacing between request starts; 0 disables rate limiting.
  double min_interval_s = 0.0;
  // Retries after a retryable failure (connection loss, timeout, 5xx).
  int max_retries = 3;
  // First retry delay; doubled per attempt.
  double backoff_base_s = 0.25;
  double timeout_s = 10.0;
};

// Remote score endpoint. Each query POSTs the image as PNG bytes and expects
// a JSON body shaped either {"scores": [...]} or
// {"confidence": r, "caption": s}. Non-2xx responses raise TransportError;
// well-formed 2xx responses that match neither schema raise ProtocolError.
// Honors HTTPS_PROXY / HTTP_PROXY (host:port).
//
// When a rate limit is configured, requests are serialized; queries are
// otherwise safe to issue from one thread at a time per instance.
class HttpOracle : public Oracle {
 public:
  explicit HttpOracle(HttpOracleConfig config);
  ~HttpOracle() override;

  OracleResult query(const Image& image) override;
  bool supports_concurrency() const override { return false; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scratchkit
