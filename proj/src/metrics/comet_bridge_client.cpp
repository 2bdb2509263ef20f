#include <httplib.h>

#include "csicl/metrics/metrics.hpp"

namespace csicl {

using nlohmann::json;

CometBridgeClient::CometBridgeClient(std::string endpoint, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.empty()) throw std::invalid_argument("COMET bridge endpoint is empty");
}

std::vector<double> CometBridgeClient::score(std::span<const TranslationTriple> pairs) const {
  const std::string url = endpoint_ + "/score";
  json body{{"pairs", json::array()}};
  for (const auto& p : pairs)
    body["pairs"].push_back({{"source", p.source}, {"hypothesis", p.hypothesis}, {"reference", p.reference}});

  const auto scheme_end = endpoint_.find("://");
  const auto path_start = scheme_end == std::string::npos ? std::string::npos : endpoint_.find('/', scheme_end + 3);
  const std::string origin = endpoint_.substr(0, path_start);
  const std::string prefix = path_start == std::string::npos ? "" : endpoint_.substr(path_start);

  httplib::Result res{nullptr, httplib::Error::Unknown};
  try {
    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(timeout_seconds_);
    client.set_connection_timeout(std::min<time_t>(secs, 10));
    client.set_read_timeout(secs);
    res = client.Post(prefix + "/score", body.dump(), "application/json");
  } catch (const std::exception& e) {
    throw BridgeError("COMET bridge at " + url + " failed: " + e.what());
  }
  if (!res) throw BridgeError("COMET bridge unreachable at " + url + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw BridgeError("COMET bridge at " + url + " returned HTTP " + std::to_string(res->status) + ": " +
                      res->body.substr(0, 200));
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw BridgeError("COMET bridge at " + url + " returned invalid JSON: " + e.what());
  }
  if (!reply.contains("scores") || !reply["scores"].is_array())
    throw BridgeError("COMET bridge at " + url + " reply has no scores array");
  if (reply["scores"].size() != pairs.size())
    throw BridgeError("COMET bridge at " + url + " returned " + std::to_string(reply["scores"].size()) +
                      " scores for " + std::to_string(pairs.size()) + " pairs");
  std::vector<double> out;
  for (const auto& s : reply["scores"]) {
    if (!s.is_number()) throw BridgeError("COMET bridge at " + url + " returned a non-numeric score");
    const double v = s.get<double>();
    if (v < 0.0 || v > 1.0)
      throw BridgeError("COMET bridge at " + url + " returned score " + std::to_string(v) + " outside [0, 1]");
    out.push_back(v);
  }
  return out;
}

}  // namespace csicl
