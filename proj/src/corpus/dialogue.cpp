#include "refgame/corpus/dialogue.hpp"

#include <fstream>
#include <stdexcept>

namespace refgame::corpus {

namespace {

using nlohmann::json;

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> string_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

bool ends_round(const events::Payload& p) {
  return std::holds_alternative<events::RoundFeedback>(p) || std::holds_alternative<events::Abort>(p);
}

}  // namespace

std::vector<Turn> segment_turns(std::span<const Utterance> utterances) {
  std::vector<Turn> turns;
  for (const auto& u : utterances) {
    if (turns.empty() || turns.back().actor != u.actor) turns.push_back(Turn{u.actor, {}});
    turns.back().utterances.push_back(u);
  }
  return turns;
}

std::vector<Utterance> flatten(std::span<const Turn> turns) {
  std::vector<Utterance> out;
  for (const auto& t : turns) out.insert(out.end(), t.utterances.begin(), t.utterances.end());
  return out;
}

std::vector<Dialogue> dialogues_from_session(const game::Session& session) {
  const auto& config = session.config;
  std::vector<Dialogue> out;
  std::int64_t round_start_ms = 0;
  bool open = false;
  for (const auto& event : session.log) {
    if (const auto* start = std::get_if<events::RoundStart>(&event.payload)) {
      Dialogue d;
      d.pair_id = session.id;
      d.condition = config.condition;
      d.variant = config.variant;
      d.round_index = start->round;
      d.director_kind = std::string(agents::to_string(config.director.kind));
      d.matcher_kind = std::string(agents::to_string(config.matcher.kind));
      d.director_model = config.director.model_id;
      d.matcher_model = config.matcher.model_id;
      const auto& round = session.rounds.at(static_cast<std::size_t>(start->round - 1));
      d.targets = round.director_order;
      d.pool = round.pool_order;
      d.result = round.result;
      d.aborted = round.aborted;
      d.abort_reason = round.abort_reason;
      out.push_back(std::move(d));
      round_start_ms = event.timestamp_ms;
      open = true;
      continue;
    }
    if (!open) continue;
    auto& d = out.back();
    if (const auto* chat = std::get_if<events::ChatMessage>(&event.payload)) {
      if (event.actor == events::Actor::System) continue;
      d.utterances.push_back(Utterance{event.actor == events::Actor::Director ? Role::Director : Role::Matcher,
                                       chat->text, event.timestamp_ms, chat->tags});
    } else if (const auto* place = std::get_if<events::Placement>(&event.payload)) {
      d.moves.push_back(Move{place->tile, place->position, event.timestamp_ms});
    } else if (const auto* clear = std::get_if<events::Clear>(&event.payload)) {
      d.moves.push_back(Move{0, clear->position, event.timestamp_ms});
    } else if (std::holds_alternative<events::TypingStart>(event.payload) ||
               std::holds_alternative<events::TypingStop>(event.payload)) {
      continue;
    }
    if (std::holds_alternative<events::AttentionAck>(event.payload) ||
        std::holds_alternative<events::SurveyResponse>(event.payload)) {
      continue;
    }
    d.duration_s = static_cast<double>(event.timestamp_ms - round_start_ms) / 1000.0;
    if (ends_round(event.payload)) open = false;
  }
  return out;
}

json to_json(const Dialogue& d) {
  json utterances = json::array();
  for (const auto& u : d.utterances) {
    json item{{"actor", to_string(u.actor)}, {"text", u.text}, {"timestamp", u.timestamp_ms}};
    if (!u.tags.empty()) {
      json tags = json::array();
      for (const auto& t : u.tags) tags.push_back({{"position", t.position}, {"phrase", t.phrase}});
      item["tags"] = std::move(tags);
    }
    utterances.push_back(std::move(item));
  }
  json moves = json::array();
  for (const auto& m : d.moves) {
    moves.push_back({{"tile", m.tile}, {"position", m.position}, {"timestamp", m.timestamp_ms}});
  }
  return json{{"pair_id", d.pair_id},
              {"condition", to_string(d.condition)},
              {"variant", d.variant},
              {"round", d.round_index},
              {"director_kind", d.director_kind},
              {"matcher_kind", d.matcher_kind},
              {"director_model", optional_string(d.director_model)},
              {"matcher_model", optional_string(d.matcher_model)},
              {"targets", d.targets},
              {"pool", d.pool},
              {"utterances", std::move(utterances)},
              {"moves", std::move(moves)},
              {"result", d.result ? json(*d.result) : json(nullptr)},
              {"aborted", d.aborted},
              {"abort_reason", d.abort_reason},
              {"duration_s", d.duration_s}};
}

Dialogue dialogue_from_json(const json& j) {
  Dialogue d;
  j.at("pair_id").get_to(d.pair_id);
  d.condition = parse_condition(j.at("condition").get<std::string>());
  j.at("variant").get_to(d.variant);
  j.at("round").get_to(d.round_index);
  j.at("director_kind").get_to(d.director_kind);
  j.at("matcher_kind").get_to(d.matcher_kind);
  d.director_model = string_or_null(j.at("director_model"));
  d.matcher_model = string_or_null(j.at("matcher_model"));
  j.at("targets").get_to(d.targets);
  j.at("pool").get_to(d.pool);
  for (const auto& u : j.at("utterances")) {
    Utterance item{parse_role(u.at("actor").get<std::string>()), u.at("text").get<std::string>(),
                   u.at("timestamp").get<std::int64_t>(), {}};
    if (u.contains("tags")) {
      for (const auto& t : u.at("tags")) {
        item.tags.push_back({t.at("position").get<int>(), t.at("phrase").get<std::string>()});
      }
    }
    d.utterances.push_back(std::move(item));
  }
  for (const auto& m : j.at("moves")) {
    d.moves.push_back(
        Move{m.at("tile").get<int>(), m.at("position").get<int>(), m.at("timestamp").get<std::int64_t>()});
  }
  if (!j.at("result").is_null()) d.result = j.at("result").get<game::RoundResult>();
  j.at("aborted").get_to(d.aborted);
  j.at("abort_reason").get_to(d.abort_reason);
  j.at("duration_s").get_to(d.duration_s);
  return d;
}

void write_jsonl(std::ostream& out, std::span<const Dialogue> dialogues) {
  for (const auto& d : dialogues) out << to_json(d).dump() << '\n';
}

std::vector<Dialogue> read_jsonl(std::istream& in) {
  std::vector<Dialogue> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(dialogue_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void export_jsonl(const std::filesystem::path& path, std::span<const Dialogue> dialogues) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_jsonl(out, dialogues);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<Dialogue> import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_jsonl(in);
}

}  // namespace refgame::corpus
