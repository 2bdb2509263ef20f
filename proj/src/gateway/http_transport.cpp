#include <cstdlib>

#include <httplib.h>

#include "csicl/gateway/gateway.hpp"

namespace csicl {

HttpReply HttpTransport::post(const ModelEndpoint& endpoint, const std::string& body) {
  // Split "https://host:port/prefix" into client origin and path prefix.
  const std::string& url = endpoint.base_url;
  const auto scheme_end = url.find("://");
  const auto path_start = scheme_end == std::string::npos ? std::string::npos : url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  HttpReply reply;
  try {
    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(endpoint.timeout_seconds);
    client.set_connection_timeout(std::min<time_t>(secs, 30));
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);
    httplib::Headers headers;
    if (!endpoint.api_key_env.empty())
      if (const char* key = std::getenv(endpoint.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);
    auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
    if (!res) {
      reply.error = httplib::to_string(res.error()) + " (" + url + ")";
      return reply;
    }
    reply.status = res->status;
    reply.body = res->body;
  } catch (const std::exception& e) {
    reply.error = e.what();
  }
  return reply;
}

}  // namespace csicl
