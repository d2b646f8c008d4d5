#pragma once

#include "refgame/agents/provider.hpp"

#include <filesystem>
#include <string>

namespace refgame::agents {

struct HttpProviderOptions {
  /// Base URL up to and including the API version, e.g. https://api.openai.com/v1
  std::string api_base = "https://api.openai.com/v1";
  std::string api_key;
  /// Root directory for image_ref lookups.
  std::filesystem::path asset_dir = "assets";

  /// REFGAME_API_BASE, REFGAME_API_KEY (or OPENAI_API_KEY), REFGAME_ASSET_DIR.
  static HttpProviderOptions from_environment();
};

/// Chat-completions client for OpenAI-compatible endpoints. Images are sent
/// inline as base64 data URLs.
class ChatCompletionsProvider final : public CompletionProvider {
 public:
  explicit ChatCompletionsProvider(HttpProviderOptions options);
  std::string complete(const CompletionRequest& request) override;

  /// Request body for `request`, exposed for inspection and tests.
  nlohmann::json request_body(const CompletionRequest& request) const;

 private:
  HttpProviderOptions options_;
};

/// Extracts choices[0].message.content from a chat-completions response.
std::string completion_text(const nlohmann::json& response);

std::string base64_encode(std::string_view bytes);

}  // namespace refgame::agents
