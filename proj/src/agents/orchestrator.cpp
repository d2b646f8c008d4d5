#include "refgame/agents/orchestrator.hpp"

#include "refgame/agents/provider.hpp"

namespace refgame::agents {

namespace {

using events::Actor;

void finish(game::Session& session, events::EventRecorder& recorder, Actor actor, RoundOutcome& outcome) {
  recorder.record(session, actor, events::Submit{});
  const auto& round = session.current_round();
  recorder.record(session, Actor::System, events::RoundFeedback{round.round_index, *round.result});
  outcome.result = round.result;
}

void abort(game::Session& session, events::EventRecorder& recorder, RoundOutcome& outcome, std::string reason) {
  recorder.record(session, Actor::System, events::Abort{outcome.round_index, reason});
  outcome.aborted = true;
  outcome.abort_reason = std::move(reason);
}

}  // namespace

RoundOutcome run_ai_round(game::Session& session, events::EventRecorder& recorder, Participant& director,
                          Participant& matcher, int round_index) {
  if (!session.has_current_round() || session.current_round().round_index != round_index) {
    recorder.record(session, Actor::System, events::RoundStart{round_index});
  }
  RoundOutcome outcome{.round_index = round_index};
  const int cap = session.config.turn_cap;

  try {
    while (outcome.turns < cap) {
      const Role role = outcome.turns % 2 == 0 ? Role::Director : Role::Matcher;
      Participant& speaker = role == Role::Director ? director : matcher;
      Action action = agent_turn(speaker, Observation{session, role});
      outcome.retries += static_cast<int>(action.retry_errors.size());

      recorder.clock().elapse(events::composition_time(action.utterance));
      const Actor actor = events::actor_for(role);
      recorder.record(session, actor, events::ChatMessage{action.utterance, action.tags});
      ++outcome.turns;
      if (role != Role::Matcher) continue;

      if (action.placement) {
        recorder.record(session, actor,
                        events::Placement{action.placement->tile.index, action.placement->position.index});
      }
      if (action.submit && game::can_submit(session.current_round())) {
        finish(session, recorder, actor, outcome);
        return outcome;
      }
    }
    if (game::can_submit(session.current_round())) {
      finish(session, recorder, Actor::System, outcome);
    } else {
      abort(session, recorder, outcome, "turn cap reached with an incomplete sequence");
    }
  } catch (const RetriesExhausted& e) {
    abort(session, recorder, outcome, e.what());
  } catch (const ProviderError& e) {
    abort(session, recorder, outcome, std::string("provider failure: ") + e.what());
  }
  return outcome;
}

std::vector<RoundOutcome> run_session(game::Session& session, events::EventRecorder& recorder,
                                      Participant& director, Participant& matcher) {
  std::vector<RoundOutcome> outcomes;
  for (int k = static_cast<int>(session.rounds.size()) + 1; k <= session.config.n_rounds; ++k) {
    if (k > 1) {
      recorder.record(session, Actor::Director, events::AttentionAck{k - 1});
      recorder.record(session, Actor::Matcher, events::AttentionAck{k - 1});
    }
    outcomes.push_back(run_ai_round(session, recorder, director, matcher, k));
  }
  return outcomes;
}

}  // namespace refgame::agents
