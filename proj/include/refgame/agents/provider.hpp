#pragma once

#include "refgame/agents/prompts.hpp"
#include "refgame/agents/spec.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refgame::agents {

struct Observation;

struct ProviderMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string text;
  std::optional<std::string> image_ref;
  bool operator==(const ProviderMessage&) const = default;
};

struct CompletionRequest {
  std::string model_id;
  std::vector<ProviderMessage> messages;
  std::optional<ReasoningEffort> reasoning_effort;
  std::chrono::seconds timeout{120};
  /// In-process mock providers read the live game through this; it is never
  /// part of the wire form.
  const Observation* observation = nullptr;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProviderTimeout : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  /// Returns the raw completion text. Throws ProviderTimeout / ProviderError.
  virtual std::string complete(const CompletionRequest& request) = 0;
};

/// Wire form: {"model_id", "messages": [{"role", "text", "image_ref"?}],
/// "reasoning_effort"?}.
nlohmann::json to_wire(const CompletionRequest& request);
CompletionRequest request_from_wire(const nlohmann::json& j);

/// Stable hex digest of the wire form.
std::string fingerprint(const CompletionRequest& request);

/// Orders a bundle as provider messages: system text, context, chat history
/// (own turns as assistant), then the trailing per-turn system text.
std::vector<ProviderMessage> to_messages(const PromptBundle& bundle);

/// Serves responses recorded earlier, keyed by request fingerprint. Unknown
/// requests are a ProviderError.
class ReplayProvider final : public CompletionProvider {
 public:
  ReplayProvider() = default;
  explicit ReplayProvider(const std::filesystem::path& jsonl);

  void add(const std::string& fingerprint, std::string response);
  std::string complete(const CompletionRequest& request) override;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> responses_;
};

/// Forwards to an inner provider and appends every exchange to a JSONL file
/// readable by ReplayProvider.
class RecordingProvider final : public CompletionProvider {
 public:
  RecordingProvider(CompletionProvider& inner, std::filesystem::path jsonl);
  std::string complete(const CompletionRequest& request) override;

 private:
  CompletionProvider& inner_;
  std::filesystem::path path_;
  std::mutex mutex_;
};

}  // namespace refgame::agents
