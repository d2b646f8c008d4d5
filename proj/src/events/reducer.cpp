#include "refgame/events/reducer.hpp"

namespace refgame::events {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

game::RoundState& current(game::Session& session) {
  if (!session.has_current_round()) {
    throw GameError(GameError::Code::RoundOutOfRange, "no round has started");
  }
  return session.current_round();
}

}  // namespace

bool authorized(Actor actor, const Payload& payload) {
  return std::visit(
      overloaded{
          [&](const ChatMessage&) { return actor != Actor::System; },
          [&](const TypingStart&) { return actor != Actor::System; },
          [&](const TypingStop&) { return actor != Actor::System; },
          [&](const Placement&) { return actor == Actor::Matcher; },
          [&](const Clear&) { return actor == Actor::Matcher; },
          [&](const Submit&) { return actor == Actor::Matcher || actor == Actor::System; },
          [&](const RoundStart&) { return actor == Actor::System; },
          [&](const RoundFeedback&) { return actor == Actor::System; },
          [&](const AttentionAck&) { return actor != Actor::System; },
          [&](const SurveyResponse&) { return actor != Actor::System; },
          [&](const Abort&) { return true; },
      },
      payload);
}

void apply(game::Session& session, const TranscriptEvent& event) {
  std::visit(overloaded{
                 [&](const RoundStart& e) { game::start_round(session, e.round); },
                 [&](const Placement& e) {
                   game::apply_placement(current(session), Tile{e.tile}, Position{e.position});
                 },
                 [&](const Clear& e) { game::clear_position(current(session), Position{e.position}); },
                 [&](const Submit&) { game::score_round(current(session)); },
                 [&](const RoundFeedback& e) {
                   const auto& round = current(session);
                   if (round.round_index != e.round || !round.result || *round.result != e.result) {
                     throw GameError(GameError::Code::InvalidConfig,
                                     "feedback does not match the scored round");
                   }
                 },
                 [&](const Abort& e) {
                   if (e.round > 0 && session.has_current_round() &&
                       session.current_round().round_index == e.round &&
                       !session.current_round().finished()) {
                     game::abort_round(session.current_round(), e.reason);
                   }
                 },
                 [](const auto&) {},
             },
             event.payload);
}

game::Session rebuild(const game::SessionConfig& config, const std::string& session_id,
                      std::span<const TranscriptEvent> log) {
  game::Session session = game::new_session(config, session_id);
  for (const auto& event : log) {
    apply(session, event);
    session.log.push_back(event);
  }
  return session;
}

}  // namespace refgame::events
