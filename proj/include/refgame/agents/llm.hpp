#pragma once

#include "refgame/agents/participant.hpp"
#include "refgame/agents/provider.hpp"
#include "refgame/game/session.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>

namespace refgame::agents {

struct LlmOptions {
  game::PromptVariant variant = game::PromptVariant::Default;
  int max_attempts = 3;
  std::chrono::seconds timeout{120};
};

/// Prompt -> provider -> validated reply, retrying with a corrective notice
/// on every rejected reply.
class LlmParticipant final : public Participant {
 public:
  LlmParticipant(ParticipantSpec spec, std::shared_ptr<CompletionProvider> provider, LlmOptions options);
  const ParticipantSpec& spec() const override { return spec_; }
  Action act(const Observation& observation) override;

 private:
  ParticipantSpec spec_;
  std::shared_ptr<CompletionProvider> provider_;
  LlmOptions options_;
};

/// Corrective notice appended after a rejected reply.
std::string retry_notice(const std::string& error);

/// In-process stand-in for a model: decides like a scripted agent with the
/// spec's behaviour profile and answers in the reply schema. With
/// probability `mock_malformed_rate` a reply is corrupted instead.
class MockAgentProvider final : public CompletionProvider {
 public:
  MockAgentProvider(ParticipantSpec spec, std::uint64_t seed, game::PromptVariant variant);
  std::string complete(const CompletionRequest& request) override;

 private:
  ParticipantSpec spec_;
  std::unique_ptr<Participant> oracle_;
  game::PromptVariant variant_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

using ProviderFactory = std::function<std::shared_ptr<CompletionProvider>(const ParticipantSpec&)>;

/// Builds the participant for `role`. Scripted and LLM kinds only; humans
/// act through the service. `providers` is consulted for LLM kinds.
std::unique_ptr<Participant> make_participant(const game::SessionConfig& config, Role role,
                                              const ProviderFactory& providers);

/// Factory handing every LLM participant its own MockAgentProvider.
ProviderFactory mock_providers(const game::SessionConfig& config);

}  // namespace refgame::agents
