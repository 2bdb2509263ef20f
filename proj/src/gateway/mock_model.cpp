#include <string>
#include <vector>

#include "csicl/gateway/gateway.hpp"
#include "csicl/extraction/extraction.hpp"
#include "csicl/util/digest.hpp"
#include "csicl/util/text.hpp"

namespace csicl {

using nlohmann::json;

namespace {

std::uint64_t request_hash(const json& request) {
  return std::stoull(sha256_hex(request.dump()).substr(0, 16), nullptr, 16);
}

std::vector<std::string> choice_letters(const std::string& query) {
  std::vector<std::string> letters;
  for (const auto& line : split_lines(query))
    if (line.size() >= 3 && line[0] >= 'A' && line[0] <= 'Z' && line[1] == '.' && line[2] == ' ')
      letters.push_back(line.substr(0, 1));
  return letters;
}

std::string between(const std::string& text, const std::string& open, const std::string& close) {
  const auto a = text.find(open);
  if (a == std::string::npos) return {};
  const auto b = text.find(close, a + open.size());
  if (b == std::string::npos) return {};
  return text.substr(a + open.size(), b - a - open.size());
}

}  // namespace

std::string MockModelTransport::reply_text(const json& request) {
  const std::uint64_t h = request_hash(request);
  std::string system;
  std::string query;
  for (const auto& m : request.at("messages")) {
    if (m.at("role") == "system") system = m.at("content").get<std::string>();
    if (m.at("role") == "user") query = m.at("content").get<std::string>();
  }
  if (h % 50 == 7) return "I am not able to answer this question.";

  const auto lines = split_lines(query);
  const std::string stem = lines.empty() ? std::string() : std::string(trim(lines.front()));
  const auto letters = choice_letters(query);
  std::string answer;
  if (!letters.empty()) {
    answer = letters[(h >> 8) % letters.size()];
  } else if (system.find("English equivalent") != std::string::npos ||
             system.find("English translation") != std::string::npos) {
    answer = stem;
  } else {
    const auto words = split_whitespace(stem);
    answer = words.empty() ? std::string("unknown") : words[(h >> 8) % words.size()];
  }

  if (system.find("Gradual Code-Switching Output") != std::string::npos) {
    std::string out = between(system, "exact sentence: \"", "\"") + "\n\n";
    for (int i = 1; i <= 5; ++i) out += std::to_string(i) + ". " + stem + "\n";
    return out + "\n" + std::string(kAnswerMarker) + " " + answer;
  }
  if (system.find("\"The answer is X\"") != std::string::npos)
    return stem + "\n\n" + std::string(kAnswerMarker) + " " + answer;
  return answer;
}

HttpReply MockModelTransport::post(const ModelEndpoint&, const std::string& body) {
  HttpReply reply;
  json request;
  try {
    request = json::parse(body);
  } catch (const json::exception& e) {
    reply.status = 400;
    reply.body = json{{"error", e.what()}}.dump();
    return reply;
  }
  const std::string text = reply_text(request);
  reply.status = 200;
  reply.body = json{{"id", "mock-" + sha256_hex(body).substr(0, 12)},
                    {"choices", json::array({{{"index", 0},
                                              {"message", {{"role", "assistant"}, {"content", text}}},
                                              {"finish_reason", "stop"}}})},
                    {"usage", {{"prompt_tokens", body.size() / 4}, {"completion_tokens", text.size() / 4}}}}
                   .dump();
  return reply;
}

}  // namespace csicl
