#pragma once

#include "refgame/game/round.hpp"
#include "refgame/game/session.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace refgame::agents {

class ReplyError : public std::runtime_error {
 public:
  enum class Kind { Malformed, SchemaViolation, IllegalSubmit };

  ReplyError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ReplyError::Kind kind);

struct DirectorReasoning {
  int target_position = 0;
  std::vector<std::string> shared_features;
  std::vector<std::string> distinctive_features;
  std::vector<int> likely_confusions;
  std::string discriminative_strategy;
  bool operator==(const DirectorReasoning&) const = default;
};

/// `reasoning` is absent only under the simplified prompt.
struct DirectorReply {
  std::optional<DirectorReasoning> reasoning;
  std::string utterance;
  bool operator==(const DirectorReply&) const = default;
};

struct MatcherReasoning {
  int target_position = 0;
  std::vector<std::string> shared_features;
  std::vector<std::string> distinctive_features;
  std::optional<int> best_guess_candidate_index;
  std::vector<int> likely_confusions;
  std::string discriminative_question;
  bool operator==(const MatcherReasoning&) const = default;
};

struct Selection {
  std::optional<int> candidate_index;
  std::optional<int> position;  // nullopt means "next available"
  bool ready_to_submit = false;
  bool operator==(const Selection&) const = default;
};

struct MatcherReply {
  std::optional<MatcherReasoning> reasoning;
  std::string utterance;
  Selection selection;
  bool operator==(const MatcherReply&) const = default;
};

/// What the director validator needs to know about the conversation so far.
struct DirectorReplyContext {
  /// No chat has happened yet this round, so the reply must describe
  /// Basket 1.
  bool round_opening = false;
};

/// Parses and validates a director reply. The text must be exactly one JSON
/// object (surrounding whitespace allowed).
DirectorReply parse_director_reply(std::string_view raw, const DirectorReplyContext& context = {},
                                   game::PromptVariant variant = game::PromptVariant::Default);

/// Parses and validates a matcher reply against the live round. Submission
/// gating is checked on the sequence as it would be after this reply's
/// selection is applied.
MatcherReply parse_matcher_reply(std::string_view raw, const game::RoundState& round,
                                 game::PromptVariant variant = game::PromptVariant::Default);

/// Position a selection commits to: the explicit one, or the lowest empty.
std::optional<Position> target_of(const Selection& selection, const game::RoundState& round);

nlohmann::json to_json(const DirectorReply& reply);
nlohmann::json to_json(const MatcherReply& reply);

}  // namespace refgame::agents
