#include "scratchkit/http_oracle.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "scratchkit/png_io.hpp"

namespace scratchkit {

namespace {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

ParsedUrl parse_url(const std::string& url) {
  const std::string prefix = "http://";
  if (url.rfind(prefix, 0) != 0) {
    throw std::invalid_argument("http oracle: only http:// URLs are supported: " + url);
  }
  std::string rest = url.substr(prefix.size());
  ParsedUrl parsed;
  const auto slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  parsed.path = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.find(':');
  if (colon == std::string::npos) {
    parsed.host = authority;
  } else {
    parsed.host = authority.substr(0, colon);
    parsed.port = std::stoi(authority.substr(colon + 1));
  }
  if (parsed.host.empty()) {
    throw std::invalid_argument("http oracle: URL has no host: " + url);
  }
  return parsed;
}

}  // namespace

struct HttpOracle::Impl {
  HttpOracleConfig config;
  ParsedUrl url;
  httplib::Client client;
  std::mutex mutex;
  std::chrono::steady_clock::time_point last_request{};
  bool any_request = false;

  explicit Impl(HttpOracleConfig cfg)
      : config(std::move(cfg)),
        url(parse_url(config.url)),
        client(url.host, url.port) {
    const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::duration<double>(config.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const char* proxy = std::getenv("HTTP_PROXY");
    if (!proxy) proxy = std::getenv("http_proxy");
    if (proxy && *proxy) {
      try {
        const ParsedUrl p = parse_url(std::string(proxy).rfind("http://", 0) == 0
                                          ? std::string(proxy)
                                          : "http://" + std::string(proxy));
        client.set_proxy(p.host, p.port);
      } catch (const std::invalid_argument&) {
        // Unusable proxy setting; connect directly.
      }
    }
  }

  void respect_rate_limit() {
    if (config.min_interval_s <= 0.0) return;
    const auto interval = std::chrono::duration<double>(config.min_interval_s);
    if (any_request) {
      const auto next_allowed =
          last_request + std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval);
      const auto now = std::chrono::steady_clock::now();
      if (now < next_allowed) {
        std::this_thread::sleep_for(next_allowed - now);
      }
    }
    last_request = std::chrono::steady_clock::now();
    any_request = true;
  }
};

HttpOracle::HttpOracle(HttpOracleConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
  if (impl_->config.max_retries < 0) {
    throw std::invalid_argument("http oracle: max_retries must be >= 0");
  }
}

HttpOracle::~HttpOracle() = default;

OracleResult HttpOracle::query(const Image& image) {
  const std::vector<std::uint8_t> png = encode_png(image);
  const std::string body(reinterpret_cast<const char*>(png.data()), png.size());

  std::lock_guard<std::mutex> lock(impl_->mutex);

  int attempts = 0;
  std::string last_failure;
  int last_status = -1;
  while (attempts <= impl_->config.max_retries) {
    if (attempts > 0) {
      const double delay =
          impl_->config.backoff_base_s * static_cast<double>(1 << (attempts - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    impl_->respect_rate_limit();
    ++attempts;

    httplib::Result res =
        impl_->client.Post(impl_->url.path, body, "image/png");
    if (!res) {
      last_failure = "connection failure: " + httplib::to_string(res.error());
      last_status = -1;
      continue;  // retryable
    }
    if (res->status >= 500) {
      last_failure = "server error " + std::to_string(res->status);
      last_status = res->status;
      continue;  // retryable
    }
    if (res->status < 200 || res->status >= 300) {
      throw TransportError("oracle endpoint returned HTTP " +
                               std::to_string(res->status),
                           attempts, res->status, /*retryable=*/false);
    }

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError(std::string("oracle response is not JSON: ") + e.what());
    }
    OracleResult result;
    if (doc.contains("scores")) {
      if (!doc["scores"].is_array() || doc["scores"].size() < 2) {
        throw ProtocolError("oracle response: \"scores\" must list >= 2 classes");
      }
      result.scores = doc["scores"].get<std::vector<double>>();
      for (double v : result.scores) {
        if (!std::isfinite(v)) {
          throw ProtocolError("oracle response: non-finite score");
        }
      }
    } else if (doc.contains("confidence")) {
      result.confidence = doc["confidence"].get<double>();
      if (doc.contains("caption")) {
        result.caption = doc["caption"].get<std::string>();
      }
    } else {
      throw ProtocolError("oracle response missing \"scores\" or \"confidence\"");
    }
    return result;
  }

  throw TransportError("oracle unreachable after " + std::to_string(attempts) +
                           " attempts: " + last_failure,
                       attempts, last_status, /*retryable=*/true);
}

}  // namespace scratchkit
