#include "refgame/agents/llm.hpp"

#include "refgame/agents/prompts.hpp"
#include "refgame/agents/replies.hpp"
#include "refgame/agents/scripted.hpp"
#include "refgame/game/rng.hpp"
#include "refgame/resources.hpp"

namespace refgame::agents {

namespace {

using nlohmann::json;

std::string trimmed(std::string_view text) {
  const auto first = text.find_first_not_of(" \n\r\t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \n\r\t");
  return std::string(text.substr(first, last - first + 1));
}

Action director_action(const DirectorReply& reply) { return Action{.utterance = reply.utterance}; }

Action matcher_action(const MatcherReply& reply, const game::RoundState& round) {
  Action action{.utterance = reply.utterance};
  if (reply.selection.candidate_index) {
    if (auto target = target_of(reply.selection, round)) {
      action.placement = PlacementAction{Tile{*reply.selection.candidate_index}, *target};
    }
  }
  action.submit = reply.selection.ready_to_submit;
  return action;
}

}  // namespace

std::string retry_notice(const std::string& error) {
  std::string text = trimmed(resources::retry_notice());
  const std::string marker = "<ERROR>";
  text.replace(text.find(marker), marker.size(), error);
  return text;
}

LlmParticipant::LlmParticipant(ParticipantSpec spec, std::shared_ptr<CompletionProvider> provider,
                               LlmOptions options)
    : spec_(std::move(spec)), provider_(std::move(provider)), options_(options) {}

Action LlmParticipant::act(const Observation& obs) {
  const auto& round = obs.round();
  const PromptBundle bundle = obs.role == Role::Director
                                  ? build_director_prompt(obs.session, round.round_index, options_.variant)
                                  : build_matcher_prompt(obs.session, round.round_index, options_.variant);
  CompletionRequest request;
  request.model_id = spec_.model_id.value_or("");
  request.messages = to_messages(bundle);
  request.reasoning_effort = spec_.reasoning_effort;
  request.timeout = options_.timeout;
  request.observation = &obs;

  const DirectorReplyContext context{.round_opening = bundle.history.empty()};
  std::vector<std::string> errors;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    const std::string raw = provider_->complete(request);
    try {
      Action action = obs.role == Role::Director
                          ? director_action(parse_director_reply(raw, context, options_.variant))
                          : matcher_action(parse_matcher_reply(raw, round, options_.variant), round);
      action.retry_errors = errors;
      return action;
    } catch (const ReplyError& e) {
      errors.push_back(std::string(to_string(e.kind())) + ": " + e.what());
      request.messages.push_back({"assistant", raw, std::nullopt});
      request.messages.push_back({"user", retry_notice(e.what()), std::nullopt});
    }
  }
  throw RetriesExhausted(options_.max_attempts, std::move(errors));
}

MockAgentProvider::MockAgentProvider(ParticipantSpec spec, std::uint64_t seed, game::PromptVariant variant)
    : spec_(spec), variant_(variant), seed_(seed) {
  if (spec.role == Role::Director) {
    oracle_ = std::make_unique<ScriptedDirector>(spec, seed);
  } else {
    oracle_ = std::make_unique<ScriptedMatcher>(spec, seed);
  }
}

std::string MockAgentProvider::complete(const CompletionRequest& request) {
  if (request.observation == nullptr) {
    throw ProviderError("mock provider needs the in-process observation");
  }
  const Observation& obs = *request.observation;
  const Action action = oracle_->act(obs);
  const auto& round = obs.round();
  const bool simple = variant_ == game::PromptVariant::Simple;

  json reply;
  if (spec_.role == Role::Director) {
    DirectorReply r{.utterance = action.utterance};
    if (!simple) {
      DirectorReasoning reasoning;
      reasoning.target_position = action.tags.empty() ? kPositions : action.tags.front().position;
      if (!action.tags.empty()) reasoning.distinctive_features = {action.tags.front().phrase};
      reasoning.discriminative_strategy = "name the features no other basket shares";
      r.reasoning = reasoning;
    }
    reply = to_json(r);
  } else {
    MatcherReply r{.utterance = action.utterance};
    if (action.placement) {
      r.selection.candidate_index = action.placement->tile.index;
      r.selection.position = action.placement->position.index;
    }
    r.selection.ready_to_submit = action.submit;
    if (!simple) {
      MatcherReasoning reasoning;
      reasoning.target_position = action.placement ? action.placement->position.index
                                                   : round.first_empty().value_or(Position{kPositions}).index;
      if (action.placement) reasoning.best_guess_candidate_index = action.placement->tile.index;
      reasoning.discriminative_question = "Does it match every feature you listed?";
      r.reasoning = reasoning;
    }
    reply = to_json(r);
  }

  game::Rng rng(game::derive_seed(seed_, 0x6d6f636bULL + static_cast<std::uint64_t>(spec_.role), ++calls_));
  if (spec_.mock_malformed_rate > 0.0 && rng.uniform() < spec_.mock_malformed_rate) {
    switch (rng.below(3)) {
      case 0: return "Sure! Here is my reply:\n" + reply.dump();
      case 1: reply.erase("utterance"); return reply.dump();
      default: reply["confidence"] = 0.9; return reply.dump();
    }
  }
  return reply.dump();
}

std::unique_ptr<Participant> make_participant(const game::SessionConfig& config, Role role,
                                              const ProviderFactory& providers) {
  const auto& spec = config.participant(role);
  switch (spec.kind) {
    case ParticipantKind::Scripted:
      if (role == Role::Director) return std::make_unique<ScriptedDirector>(spec, config.seed);
      return std::make_unique<ScriptedMatcher>(spec, config.seed);
    case ParticipantKind::Llm: {
      if (!providers) throw std::invalid_argument("no completion provider configured for llm participant");
      LlmOptions options{config.prompt_variant, config.max_attempts,
                         std::chrono::seconds(config.provider_timeout_s)};
      return std::make_unique<LlmParticipant>(spec, providers(spec), options);
    }
    case ParticipantKind::Human:
      break;
  }
  throw std::invalid_argument("human participants act through the session service");
}

ProviderFactory mock_providers(const game::SessionConfig& config) {
  return [seed = config.seed, variant = config.prompt_variant](const ParticipantSpec& spec) {
    return std::make_shared<MockAgentProvider>(spec, seed, variant);
  };
}

}  // namespace refgame::agents
