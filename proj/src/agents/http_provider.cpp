#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "refgame/agents/http_provider.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace refgame::agents {

namespace {

using nlohmann::json;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

std::string mime_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  return "image/png";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProviderError("image asset not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path prefix
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ProviderError("api base must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

}  // namespace

HttpProviderOptions HttpProviderOptions::from_environment() {
  HttpProviderOptions o;
  o.api_base = env_or("REFGAME_API_BASE", o.api_base);
  o.api_key = env_or("REFGAME_API_KEY", env_or("OPENAI_API_KEY", ""));
  o.asset_dir = env_or("REFGAME_ASSET_DIR", o.asset_dir.string());
  return o;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string completion_text(const json& response) {
  try {
    const auto& content = response.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string text;
    for (const auto& part : content) {
      if (part.value("type", "") == "text") text += part.at("text").get<std::string>();
    }
    return text;
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected completion response: ") + e.what());
  }
}

ChatCompletionsProvider::ChatCompletionsProvider(HttpProviderOptions options) : options_(std::move(options)) {}

json ChatCompletionsProvider::request_body(const CompletionRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) {
    if (!m.image_ref) {
      messages.push_back({{"role", m.role}, {"content", m.text}});
      continue;
    }
    const auto path = options_.asset_dir / *m.image_ref;
    const std::string url = "data:" + mime_type(path) + ";base64," + base64_encode(read_file(path));
    messages.push_back({{"role", m.role},
                        {"content",
                         {{{"type", "text"}, {"text", m.text}},
                          {{"type", "image_url"}, {"image_url", {{"url", url}}}}}}});
  }
  json body{{"model", request.model_id}, {"messages", std::move(messages)}};
  if (request.reasoning_effort && *request.reasoning_effort != ReasoningEffort::None) {
    body["reasoning_effort"] = to_string(*request.reasoning_effort);
  }
  return body;
}

std::string ChatCompletionsProvider::complete(const CompletionRequest& request) {
  const auto endpoint = split_url(options_.api_base);
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(request.timeout);
  client.set_read_timeout(request.timeout);
  client.set_write_timeout(request.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  const auto res =
      client.Post(endpoint.path + "/chat/completions", headers, request_body(request).dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw ProviderTimeout("completion request timed out: " + what);
    }
    throw ProviderError("completion request failed: " + what);
  }
  if (res->status != 200) {
    throw ProviderError("completion endpoint returned HTTP " + std::to_string(res->status) + ": " +
                        res->body.substr(0, 500));
  }
  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("completion response is not JSON: ") + e.what());
  }
  return completion_text(parsed);
}

}  // namespace refgame::agents
