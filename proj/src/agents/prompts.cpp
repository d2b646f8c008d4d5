#include "refgame/agents/prompts.hpp"

#include "refgame/resources.hpp"

#include <sstream>

namespace refgame::agents {

namespace {

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string trimmed(std::string_view text) {
  const auto first = text.find_first_not_of(" \n\r\t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \n\r\t");
  return std::string(text.substr(first, last - first + 1));
}

std::string with_round(std::string_view text, int round_index) {
  return replace_all(trimmed(text), "<ROUND_NUMBER>", std::to_string(round_index));
}

std::string task_background(const game::SessionConfig& config) {
  std::string text = trimmed(resources::task_background());
  if (config.n_rounds != 4) {
    text = replace_all(text, "consists of 4 rounds", "consists of " + std::to_string(config.n_rounds) + " rounds");
  }
  return text;
}

std::string with_tile_count(std::string text, int tiles) {
  if (tiles == 18) return text;
  return replace_all(std::move(text), "1-18", "1-" + std::to_string(tiles));
}

std::optional<ContextMessage> previous_feedback(const game::Session& session, int round_index) {
  if (round_index < 2 || static_cast<int>(session.rounds.size()) < round_index - 1) return std::nullopt;
  const auto& prev = session.rounds[round_index - 2];
  std::ostringstream out;
  out << "PREVIOUS ROUND FEEDBACK (round " << prev.round_index << "): ";
  if (!prev.result) {
    out << "the round ended without a scored submission.";
    return ContextMessage{out.str(), std::nullopt};
  }
  std::vector<int> right, wrong;
  for (int i = 0; i < kPositions; ++i) (prev.result->per_position_correct[i] ? right : wrong).push_back(i + 1);
  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s.empty() ? std::string("none") : s;
  };
  out << prev.result->n_correct() << " of 12 baskets were placed correctly. Correct positions: "
      << list(right) << ". Incorrect positions: " << list(wrong)
      << ". The next round shows the baskets in a DIFFERENT ORDER.";
  return ContextMessage{out.str(), std::nullopt};
}

}  // namespace

nlohmann::json SequenceStateMessage::to_json() const {
  using nlohmann::json;
  auto nullable_int = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
  json indices = json::array();
  for (const auto& v : sequence_candidate_indices) indices.push_back(nullable_int(v));
  json slots = json::array();
  for (const auto& s : sequence_slots) {
    slots.push_back({{"position", s.position},
                     {"candidate_index", nullable_int(s.candidate_index)},
                     {"image", s.image ? json(*s.image) : json(nullptr)},
                     {"originalPosition", nullable_int(s.original_position)}});
  }
  return json{{"sequence_candidate_indices", indices}, {"sequence_slots", slots}};
}

SequenceStateMessage sequence_state(const game::RoundState& round, const game::BasketCatalog& catalog) {
  SequenceStateMessage msg;
  for (int i = 0; i < kPositions; ++i) {
    const auto& slot = round.slots[i];
    msg.sequence_candidate_indices.push_back(slot);
    SequenceSlot s{i + 1, slot, std::nullopt, std::nullopt};
    if (slot) {
      s.image = catalog.at(round.basket_at_tile(Tile{*slot})).image_ref;
      s.original_position = *slot;
    }
    msg.sequence_slots.push_back(std::move(s));
  }
  return msg;
}

std::string director_composite_ref(int round_index) {
  return "composites/round-" + std::to_string(round_index) + "-director.png";
}

std::string matcher_composite_ref(int round_index) {
  return "composites/round-" + std::to_string(round_index) + "-matcher.png";
}

std::vector<ChatTurn> round_history(const game::Session& session, int round_index) {
  std::vector<ChatTurn> out;
  bool inside = false;
  for (const auto& e : session.log) {
    if (const auto* start = std::get_if<events::RoundStart>(&e.payload)) {
      inside = start->round == round_index;
      continue;
    }
    if (!inside) continue;
    if (const auto* chat = std::get_if<events::ChatMessage>(&e.payload)) {
      if (e.actor == events::Actor::System) continue;
      out.push_back({e.actor == events::Actor::Director ? Role::Director : Role::Matcher, chat->text});
    }
  }
  return out;
}

PromptBundle build_director_prompt(const game::Session& session, int round_index,
                                   game::PromptVariant variant) {
  PromptBundle b;
  b.role = Role::Director;
  b.system_text = task_background(session.config) + "\n\n" + trimmed(resources::director_base());
  if (variant == game::PromptVariant::Default) {
    b.system_text += "\n\n" + trimmed(resources::director_communication_rules()) + "\n\n" +
                     trimmed(resources::director_schema());
  } else {
    b.system_text += "\n\n" + trimmed(resources::director_minimal_schema());
  }
  if (auto feedback = previous_feedback(session, round_index)) b.context_messages.push_back(*feedback);
  b.context_messages.push_back(
      {with_round(resources::director_round_wrapper(), round_index), director_composite_ref(round_index)});
  b.context_messages.push_back({with_round(resources::director_round_start(), round_index), std::nullopt});
  b.history = round_history(session, round_index);
  return b;
}

PromptBundle build_matcher_prompt(const game::Session& session, int round_index,
                                  game::PromptVariant variant) {
  const int tiles = session.config.catalog.tile_count();
  PromptBundle b;
  b.role = Role::Matcher;
  b.system_text = task_background(session.config) + "\n\n" + trimmed(resources::matcher_base());
  if (variant == game::PromptVariant::Default) {
    b.system_text += "\n\n" + trimmed(resources::matcher_communication_rules()) + "\n\n" +
                     trimmed(resources::matcher_schema());
  } else {
    b.system_text += "\n\n" + trimmed(resources::matcher_minimal_schema());
  }
  b.system_text = with_tile_count(std::move(b.system_text), tiles);
  if (auto feedback = previous_feedback(session, round_index)) b.context_messages.push_back(*feedback);
  b.context_messages.push_back(
      {with_round(resources::matcher_round_wrapper(), round_index), matcher_composite_ref(round_index)});
  b.history = round_history(session, round_index);

  game::RoundState round = session.rounds.at(round_index - 1);
  b.trailing_system = trimmed(resources::matcher_sequence_state()) + "\n\nCURRENT STATE:\n" +
                      sequence_state(round, session.config.catalog).to_json().dump(2);
  return b;
}

std::string render(const PromptBundle& bundle) {
  std::ostringstream out;
  out << "[system]\n" << bundle.system_text << "\n";
  for (const auto& m : bundle.context_messages) {
    out << "[context]\n" << m.text << "\n";
    if (m.image_ref) out << "[image " << *m.image_ref << "]\n";
  }
  for (const auto& t : bundle.history) out << "[" << to_string(t.speaker) << "]\n" << t.text << "\n";
  if (bundle.trailing_system) out << "[system]\n" << *bundle.trailing_system << "\n";
  return out.str();
}

}  // namespace refgame::agents
