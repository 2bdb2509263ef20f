#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csicl/promptkit/assemble.hpp"
#include "csicl/util/json_store.hpp"

namespace csicl {

struct ChatRequest {
  std::string model_id;
  std::string system;
  std::vector<Message> messages;
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

/// Request for a prompt bundle: system prompt, demonstration turns, query.
ChatRequest to_request(const PromptBundle& bundle);

enum class Finish { stop, length, error };

std::string_view to_string(Finish f) noexcept;
Finish parse_finish(std::string_view s);

struct Usage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ModelResponse {
  std::string text;
  Finish finish = Finish::error;
  double latency_ms = 0.0;
  bool from_cache = false;
  std::optional<Usage> usage;
  /// Set when finish == error.
  std::string error;
  int attempts = 0;
  /// Temperature actually sent, when the endpoint forced a different one.
  std::optional<double> temperature_substituted;

  bool ok() const noexcept { return finish != Finish::error; }
};

/// How to reach one model.
struct ModelEndpoint {
  std::string id;
  /// Name sent on the wire; defaults to id.
  std::string model;
  /// e.g. "https://openrouter.ai/api/v1"; "mock://" selects the offline mock.
  std::string base_url = "mock://";
  /// Environment variable holding the bearer token; empty for none.
  std::string api_key_env;
  /// 0 disables rate limiting.
  double requests_per_minute = 0.0;
  /// Lowest temperature the provider accepts.
  std::optional<double> min_temperature;
  std::optional<int> max_tokens;
  double timeout_seconds = 120.0;

  std::string wire_model() const { return model.empty() ? id : model; }
};

struct HttpReply {
  /// 0 for a connection-level failure.
  int status = 0;
  std::string body;
  std::string error;
};

/// Delivers one serialized chat-completion body and returns the raw reply.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpReply post(const ModelEndpoint& endpoint, const std::string& body) = 0;
};

/// POST <base_url>/chat/completions over HTTP(S).
class HttpTransport final : public ChatTransport {
 public:
  HttpReply post(const ModelEndpoint& endpoint, const std::string& body) override;
};

/// Deterministic offline model. The reply depends only on the request body:
/// a choice letter (bare or after "The answer is" when the system prompt asks
/// for the marker), a ladder for gradual-instruction prompts, an echo for
/// translations, and an unparseable reply for roughly 1 in 50 requests.
class MockModelTransport final : public ChatTransport {
 public:
  HttpReply post(const ModelEndpoint& endpoint, const std::string& body) override;
  /// The reply text for a request body, without the HTTP envelope.
  static std::string reply_text(const nlohmann::json& request);
};

/// The chat-completion request body for `req` as sent to `endpoint`.
nlohmann::json wire_body(const ChatRequest& req, const ModelEndpoint& endpoint, double temperature);

/// Parses choices[0].message.content, finish_reason and usage.
/// Throws std::runtime_error on a malformed reply.
ModelResponse parse_wire_reply(const std::string& body);

/// Content-addressed response store under <cache_dir>/responses.
class ResponseCache {
 public:
  explicit ResponseCache(const std::filesystem::path& cache_dir);

  /// SHA-256 over (model_id, system, messages, temperature).
  static std::string digest(const ChatRequest& req);

  std::optional<ModelResponse> get(const ChatRequest& req) const;
  void put(const ChatRequest& req, const ModelResponse& resp);

 private:
  JsonStore store_;
};

struct RetryPolicy {
  int max_tries = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
};

/// Blocks the calling thread; replaceable so tests do not sleep.
using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Minimum spacing between request starts for one model.
class RateLimiter {
 public:
  RateLimiter(double requests_per_minute, Sleeper sleeper);
  void acquire();

 private:
  std::chrono::nanoseconds interval_{0};
  Sleeper sleeper_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

struct GatewayOptions {
  std::filesystem::path cache_dir = "cache";
  RetryPolicy retry;
  Sleeper sleeper;
  /// Chooses the transport for an endpoint; default: mock:// → mock, else HTTP.
  std::function<std::shared_ptr<ChatTransport>(const ModelEndpoint&)> transport_for;
  /// Disables the network entirely; cache misses become errors.
  bool offline = false;
};

class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Gateway {
 public:
  Gateway(std::vector<ModelEndpoint> endpoints, GatewayOptions options);

  /// Cache lookup, else POST with retries on 429, 5xx and connection errors.
  /// Failures come back as error responses; throws GatewayError only for an
  /// unknown model id.
  ModelResponse complete(const ChatRequest& req);

  /// Responses in request order with at most max_in_flight outstanding.
  std::vector<ModelResponse> complete_batch(const std::vector<ChatRequest>& reqs, std::size_t max_in_flight);

  /// Transport calls made so far (each retry counts).
  std::size_t network_calls() const noexcept { return network_calls_.load(); }

  const ModelEndpoint& endpoint(const std::string& model_id) const;

 private:
  struct Model {
    ModelEndpoint endpoint;
    std::shared_ptr<ChatTransport> transport;
    std::unique_ptr<RateLimiter> limiter;
  };

  ModelResponse fetch(Model& model, const ChatRequest& req);

  GatewayOptions options_;
  ResponseCache cache_;
  std::map<std::string, Model> models_;
  std::atomic<std::size_t> network_calls_{0};
};

/// Demonstration generator backed by a chat model: sends the generation
/// request's system and user text through the gateway.
class ChatGenerator final : public TextGenerator {
 public:
  ChatGenerator(Gateway& gateway, std::string model_id, double temperature = 0.0);
  std::string id() const override;
  std::string generate(const GenerationRequest& request) override;

 private:
  Gateway& gateway_;
  std::string model_id_;
  double temperature_;
};

}  // namespace csicl
