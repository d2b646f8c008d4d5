#pragma once

#include "refgame/events/event.hpp"
#include "refgame/game/round.hpp"
#include "refgame/game/session.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace refgame::corpus {

/// A single chat message.
struct Utterance {
  Role actor = Role::Director;
  std::string text;
  std::int64_t timestamp_ms = 0;
  std::vector<events::ReTag> tags;
  bool operator==(const Utterance&) const = default;
};

/// A placement or a clear (tile 0) performed by the matcher.
struct Move {
  int tile = 0;
  int position = 0;
  std::int64_t timestamp_ms = 0;
  bool operator==(const Move&) const = default;
};

/// One pair's conversation in one round.
struct Dialogue {
  std::string pair_id;
  Condition condition = Condition::AA;
  std::string variant = "Default";
  int round_index = 0;
  std::string director_kind;
  std::string matcher_kind;
  std::optional<std::string> director_model;
  std::optional<std::string> matcher_model;
  std::vector<std::string> targets;  // basket ids at positions 1..12
  std::vector<std::string> pool;     // basket ids at tiles 1..N
  std::vector<Utterance> utterances;
  std::vector<Move> moves;
  std::optional<game::RoundResult> result;
  bool aborted = false;
  std::string abort_reason;
  double duration_s = 0.0;

  bool operator==(const Dialogue&) const = default;
};

/// Maximal run of one speaker's messages.
struct Turn {
  Role actor = Role::Director;
  std::vector<Utterance> utterances;
  bool operator==(const Turn&) const = default;
};

std::vector<Turn> segment_turns(std::span<const Utterance> utterances);
std::vector<Utterance> flatten(std::span<const Turn> turns);

/// One dialogue per started round of `session`, in round order. Typing
/// events are not part of a dialogue; duration runs from RoundStart to the
/// round's last event.
std::vector<Dialogue> dialogues_from_session(const game::Session& session);

nlohmann::json to_json(const Dialogue& dialogue);
Dialogue dialogue_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, std::span<const Dialogue> dialogues);
std::vector<Dialogue> read_jsonl(std::istream& in);

/// Throws std::runtime_error on I/O failure or a malformed line.
void export_jsonl(const std::filesystem::path& path, std::span<const Dialogue> dialogues);
std::vector<Dialogue> import_jsonl(const std::filesystem::path& path);

}  // namespace refgame::corpus
