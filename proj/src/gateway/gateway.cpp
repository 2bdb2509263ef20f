#include "csicl/gateway/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "csicl/extraction/extraction.hpp"
#include "csicl/util/digest.hpp"
#include "csicl/util/text.hpp"

namespace csicl {

using nlohmann::json;

std::string_view to_string(Finish f) noexcept {
  switch (f) {
    case Finish::stop: return "stop";
    case Finish::length: return "length";
    case Finish::error: return "error";
  }
  return "error";
}

Finish parse_finish(std::string_view s) {
  if (s == "stop") return Finish::stop;
  if (s == "length") return Finish::length;
  if (s == "error") return Finish::error;
  throw std::invalid_argument("unknown finish reason: " + std::string(s));
}

ChatRequest to_request(const PromptBundle& bundle) {
  ChatRequest req;
  req.model_id = bundle.model_id;
  req.system = bundle.system;
  req.messages = bundle.conversation();
  req.temperature = bundle.temperature;
  return req;
}

json wire_body(const ChatRequest& req, const ModelEndpoint& endpoint, double temperature) {
  json messages = json::array();
  if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
  for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body{{"model", endpoint.wire_model()}, {"messages", messages}, {"temperature", temperature}};
  if (auto mt = req.max_tokens ? req.max_tokens : endpoint.max_tokens) body["max_tokens"] = *mt;
  return body;
}

ModelResponse parse_wire_reply(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("reply is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
    throw std::runtime_error("reply has no choices");
  const json& choice = j["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string())
    throw std::runtime_error("reply has no choices[0].message.content string");
  ModelResponse r;
  r.text = choice["message"]["content"].get<std::string>();
  const std::string reason = choice.value("finish_reason", json("stop")).is_string()
                                 ? choice.value("finish_reason", std::string("stop"))
                                 : std::string("stop");
  r.finish = reason == "length" ? Finish::length : Finish::stop;
  if (j.contains("usage") && j["usage"].is_object()) {
    Usage u;
    u.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
    u.completion_tokens = j["usage"].value("completion_tokens", 0L);
    r.usage = u;
  }
  return r;
}

ResponseCache::ResponseCache(const std::filesystem::path& cache_dir) : store_(cache_dir / "responses") {}

namespace {

json request_key(const ChatRequest& req) {
  json messages = json::array();
  for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model_id", req.model_id}, {"system", req.system}, {"messages", messages}, {"temperature", req.temperature}};
}

}  // namespace

std::string ResponseCache::digest(const ChatRequest& req) { return sha256_hex(request_key(req).dump()); }

std::optional<ModelResponse> ResponseCache::get(const ChatRequest& req) const {
  const auto doc = store_.get(digest(req));
  if (!doc) return std::nullopt;
  const json& r = doc->at("response");
  ModelResponse out;
  out.text = r.at("text").get<std::string>();
  out.finish = parse_finish(r.at("finish").get<std::string>());
  if (r.contains("usage")) out.usage = Usage{r["usage"].at("prompt_tokens"), r["usage"].at("completion_tokens")};
  if (r.contains("temperature_substituted")) out.temperature_substituted = r["temperature_substituted"].get<double>();
  out.attempts = 0;
  out.from_cache = true;
  return out;
}

void ResponseCache::put(const ChatRequest& req, const ModelResponse& resp) {
  json r{{"text", resp.text}, {"finish", to_string(resp.finish)}, {"latency_ms", resp.latency_ms},
         {"attempts", resp.attempts}};
  if (resp.usage) r["usage"] = {{"prompt_tokens", resp.usage->prompt_tokens},
                                {"completion_tokens", resp.usage->completion_tokens}};
  if (resp.temperature_substituted) r["temperature_substituted"] = *resp.temperature_substituted;
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  store_.put(digest(req), json{{"request", request_key(req)}, {"response", r}, {"created_unix", now}});
}

RateLimiter::RateLimiter(double requests_per_minute, Sleeper sleeper) : sleeper_(std::move(sleeper)) {
  if (requests_per_minute > 0.0)
    interval_ = std::chrono::nanoseconds(static_cast<long long>(std::llround(60e9 / requests_per_minute)));
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  const auto wait = slot - std::chrono::steady_clock::now();
  if (wait > std::chrono::nanoseconds::zero())
    sleeper_(std::chrono::ceil<std::chrono::milliseconds>(wait));
}

Gateway::Gateway(std::vector<ModelEndpoint> endpoints, GatewayOptions options)
    : options_(std::move(options)), cache_(options_.cache_dir) {
  if (!options_.sleeper) options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (!options_.transport_for) {
    auto http = std::make_shared<HttpTransport>();
    auto mock = std::make_shared<MockModelTransport>();
    options_.transport_for = [http, mock](const ModelEndpoint& ep) -> std::shared_ptr<ChatTransport> {
      if (ep.base_url.rfind("mock://", 0) == 0) return mock;
      return http;
    };
  }
  for (auto& ep : endpoints) {
    if (ep.id.empty()) throw std::invalid_argument("model endpoint without id");
    Model m;
    m.transport = options_.transport_for(ep);
    m.limiter = std::make_unique<RateLimiter>(ep.requests_per_minute, options_.sleeper);
    m.endpoint = std::move(ep);
    const std::string id = m.endpoint.id;
    if (!models_.emplace(id, std::move(m)).second) throw std::invalid_argument("duplicate model id " + id);
  }
}

const ModelEndpoint& Gateway::endpoint(const std::string& model_id) const {
  const auto it = models_.find(model_id);
  if (it == models_.end()) throw GatewayError("no endpoint configured for model " + model_id);
  return it->second.endpoint;
}

ModelResponse Gateway::complete(const ChatRequest& req) {
  const auto it = models_.find(req.model_id);
  if (it == models_.end()) throw GatewayError("no endpoint configured for model " + req.model_id);
  if (auto hit = cache_.get(req)) return *hit;
  if (options_.offline) {
    ModelResponse r;
    r.error = "offline mode and no cached response for model " + req.model_id;
    return r;
  }
  ModelResponse r = fetch(it->second, req);
  if (r.ok()) cache_.put(req, r);
  return r;
}

ModelResponse Gateway::fetch(Model& model, const ChatRequest& req) {
  const ModelEndpoint& ep = model.endpoint;
  ModelResponse failure;
  double temperature = req.temperature;
  if (ep.min_temperature && temperature < *ep.min_temperature) {
    temperature = *ep.min_temperature;
    failure.temperature_substituted = temperature;
  }
  if (!ep.api_key_env.empty() && std::getenv(ep.api_key_env.c_str()) == nullptr) {
    failure.error = "missing credentials for " + ep.id + ": environment variable " + ep.api_key_env + " is not set";
    return failure;
  }
  const std::string body = wire_body(req, ep, temperature).dump();
  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_tries; ++attempt) {
    model.limiter->acquire();
    ++network_calls_;
    const auto start = std::chrono::steady_clock::now();
    const HttpReply reply = model.transport->post(ep, body);
    const double latency = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    failure.attempts = attempt;
    failure.latency_ms = latency;

    if (reply.status == 200) {
      try {
        ModelResponse r = parse_wire_reply(reply.body);
        r.attempts = attempt;
        r.latency_ms = latency;
        r.temperature_substituted = failure.temperature_substituted;
        return r;
      } catch (const std::exception& e) {
        failure.error = "malformed reply from " + ep.base_url + ": " + e.what();
        return failure;
      }
    }
    const std::string detail =
        reply.status == 0 ? "connection error: " + reply.error
                          : "HTTP " + std::to_string(reply.status) + ": " + reply.body.substr(0, 200);
    if (reply.status == 401 || reply.status == 403) {
      failure.error = "authentication failed for " + ep.id + " (" + detail + ")";
      return failure;
    }
    const bool transient = reply.status == 0 || reply.status == 429 || reply.status >= 500;
    if (!transient) {
      failure.error = "request rejected by " + ep.base_url + " (" + detail + ")";
      return failure;
    }
    last_error = detail;
    if (attempt < options_.retry.max_tries) {
      const double ms =
          static_cast<double>(options_.retry.base_delay.count()) * std::pow(options_.retry.factor, attempt - 1);
      options_.sleeper(std::chrono::milliseconds(static_cast<long long>(ms)));
    }
  }
  failure.error = "gave up after " + std::to_string(options_.retry.max_tries) + " tries: " + last_error;
  return failure;
}

std::vector<ModelResponse> Gateway::complete_batch(const std::vector<ChatRequest>& reqs, std::size_t max_in_flight) {
  if (max_in_flight < 1) throw std::invalid_argument("complete_batch: max_in_flight must be >= 1");
  std::vector<ModelResponse> out(reqs.size());
  if (reqs.empty()) return out;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < reqs.size(); i = next++) {
      try {
        out[i] = complete(reqs[i]);
      } catch (const std::exception& e) {
        out[i] = ModelResponse{};
        out[i].error = e.what();
      }
    }
  };
  const std::size_t n = std::min(max_in_flight, reqs.size());
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return out;
}

ChatGenerator::ChatGenerator(Gateway& gateway, std::string model_id, double temperature)
    : gateway_(gateway), model_id_(std::move(model_id)), temperature_(temperature) {
  gateway_.endpoint(model_id_);
}

std::string ChatGenerator::id() const { return "chat:" + model_id_ + ":t=" + format_fixed(temperature_, 2); }

std::string ChatGenerator::generate(const GenerationRequest& request) {
  ChatRequest req;
  req.model_id = model_id_;
  req.system = request.system;
  req.messages = {{"user", request.user}};
  req.temperature = temperature_;
  const ModelResponse r = gateway_.complete(req);
  if (!r.ok()) throw GeneratorError("generator model " + model_id_ + " failed: " + r.error);
  return r.text;
}

}  // namespace csicl
