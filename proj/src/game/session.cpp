#include "refgame/game/session.hpp"

#include "refgame/game/rng.hpp"

#include <stdexcept>

namespace refgame::game {

namespace {

constexpr std::uint64_t kDirectorStream = 1;
constexpr std::uint64_t kPoolStream = 2;

bool any_scripted(const SessionConfig& c) {
  return c.director.kind == agents::ParticipantKind::Scripted ||
         c.matcher.kind == agents::ParticipantKind::Scripted;
}

}  // namespace

std::string_view to_string(PromptVariant variant) {
  return variant == PromptVariant::Simple ? "simple" : "default";
}

PromptVariant parse_prompt_variant(std::string_view text) {
  if (text == "default") return PromptVariant::Default;
  if (text == "simple") return PromptVariant::Simple;
  throw std::invalid_argument("unknown prompt variant: " + std::string(text));
}

void SessionConfig::validate() const {
  catalog.validate(any_scripted(*this));
  if (n_rounds < 1) throw GameError(GameError::Code::InvalidConfig, "n_rounds must be >= 1");
  if (turn_cap < 2 * kPositions) {
    throw GameError(GameError::Code::InvalidConfig, "turn_cap must be >= 24");
  }
  if (max_attempts < 1) throw GameError(GameError::Code::InvalidConfig, "max_attempts must be >= 1");
  if (director.role != Role::Director || matcher.role != Role::Matcher) {
    throw GameError(GameError::Code::InvalidConfig, "participant roles do not match their slots");
  }
  try {
    director.validate();
    matcher.validate();
  } catch (const std::invalid_argument& e) {
    throw GameError(GameError::Code::InvalidConfig, e.what());
  }
  for (Role role : {Role::Director, Role::Matcher}) {
    const bool human_slot = is_human(condition, role);
    const bool human_spec = participant(role).kind == agents::ParticipantKind::Human;
    if (human_slot != human_spec) {
      throw GameError(GameError::Code::InvalidConfig,
                      std::string(to_string(role)) + " kind does not match condition " +
                          std::string(to_string(condition)));
    }
  }
}

void to_json(nlohmann::json& j, const SessionConfig& c) {
  j = nlohmann::json{{"condition", to_string(c.condition)},
                     {"n_rounds", c.n_rounds},
                     {"seed", c.seed},
                     {"catalog", c.catalog},
                     {"turn_cap", c.turn_cap},
                     {"director", c.director},
                     {"matcher", c.matcher},
                     {"prompt_variant", to_string(c.prompt_variant)},
                     {"max_attempts", c.max_attempts},
                     {"provider_timeout_s", c.provider_timeout_s},
                     {"variant", c.variant}};
}

void from_json(const nlohmann::json& j, SessionConfig& c) {
  SessionConfig d;
  c.condition = parse_condition(j.value("condition", std::string(to_string(d.condition))));
  c.n_rounds = j.value("n_rounds", d.n_rounds);
  c.seed = j.value("seed", d.seed);
  c.catalog = j.contains("catalog") ? j.at("catalog").get<BasketCatalog>() : d.catalog;
  c.turn_cap = j.value("turn_cap", d.turn_cap);
  c.director = j.contains("director") ? j.at("director").get<agents::ParticipantSpec>() : d.director;
  c.director.role = Role::Director;
  c.matcher = j.contains("matcher") ? j.at("matcher").get<agents::ParticipantSpec>() : d.matcher;
  c.matcher.role = Role::Matcher;
  c.prompt_variant =
      parse_prompt_variant(j.value("prompt_variant", std::string(to_string(d.prompt_variant))));
  c.max_attempts = j.value("max_attempts", d.max_attempts);
  c.provider_timeout_s = j.value("provider_timeout_s", d.provider_timeout_s);
  c.variant = j.value("variant", d.variant);
}

Session new_session(SessionConfig config, std::string id) {
  config.validate();
  Session s;
  s.id = std::move(id);
  s.config = std::move(config);
  return s;
}

RoundState make_round(const SessionConfig& config, int round_index) {
  RoundState round;
  round.round_index = round_index;
  for (const auto& e : config.catalog.targets) round.director_order.push_back(e.id);
  for (const auto& e : config.catalog.all()) round.pool_order.push_back(e.id);

  Rng director_rng(derive_seed(config.seed, kDirectorStream, static_cast<std::uint64_t>(round_index)));
  director_rng.shuffle(std::span<std::string>(round.director_order));
  Rng pool_rng(derive_seed(config.seed, kPoolStream, static_cast<std::uint64_t>(round_index)));
  pool_rng.shuffle(std::span<std::string>(round.pool_order));
  return round;
}

const RoundState& start_round(Session& session, int round_index) {
  if (round_index < 1 || round_index > session.config.n_rounds) {
    throw GameError(GameError::Code::RoundOutOfRange,
                    "round " + std::to_string(round_index) + " outside 1-" +
                        std::to_string(session.config.n_rounds));
  }
  if (round_index != static_cast<int>(session.rounds.size()) + 1) {
    throw GameError(GameError::Code::PreviousRoundUnfinished,
                    "round " + std::to_string(round_index) + " is not the next round");
  }
  if (!session.rounds.empty() && !session.rounds.back().finished()) {
    throw GameError(GameError::Code::PreviousRoundUnfinished,
                    "round " + std::to_string(round_index - 1) + " has not been submitted");
  }
  session.rounds.push_back(make_round(session.config, round_index));
  return session.rounds.back();
}

}  // namespace refgame::game
