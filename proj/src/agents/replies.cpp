#include "refgame/agents/replies.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace refgame::agents {

namespace {

using nlohmann::json;
using Kind = ReplyError::Kind;

[[noreturn]] void malformed(const std::string& what) { throw ReplyError(Kind::Malformed, what); }
[[noreturn]] void violation(const std::string& what) { throw ReplyError(Kind::SchemaViolation, what); }

json parse_object(std::string_view raw) {
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error&) {
    malformed("reply is not a single JSON object (no text before or after the object)");
  }
  if (!j.is_object()) malformed("reply must be a JSON object");
  return j;
}

void require_exact_fields(const json& j, std::initializer_list<const char*> fields) {
  for (const char* f : fields) {
    if (!j.contains(f)) malformed(std::string("missing top-level field \"") + f + "\"");
  }
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(fields.begin(), fields.end(), [&](const char* f) { return key == f; })) {
      malformed("unexpected top-level field \"" + key + "\" (no extras allowed)");
    }
  }
}

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string string_of(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

int int_of(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) malformed(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

std::optional<int> nullable_int_of(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer()) {
    malformed(std::string("field \"") + key + "\" must be an integer or null");
  }
  return v.get<int>();
}

std::vector<std::string> strings_of(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) malformed(std::string("field \"") + key + "\" must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) malformed(std::string("field \"") + key + "\" must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<int> ints_of(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) malformed(std::string("field \"") + key + "\" must be an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) {
      malformed(std::string("field \"") + key + "\" must be an array of integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

void check_range(const char* name, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    violation(std::string(name) + " must be an integer " + std::to_string(lo) + "-" +
              std::to_string(hi) + ", got " + std::to_string(value));
  }
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

/// Distinct basket numbers an utterance talks about ("basket 3", "Basket 10").
std::set<int> mentioned_baskets(const std::string& utterance) {
  static const std::regex re(R"(\bbaskets?\s*#?\s*(\d{1,2})\b)", std::regex::icase);
  std::set<int> out;
  for (auto it = std::sregex_iterator(utterance.begin(), utterance.end(), re);
       it != std::sregex_iterator(); ++it) {
    out.insert(std::stoi((*it)[1].str()));
  }
  return out;
}

void check_utterance(const std::string& utterance) {
  if (std::all_of(utterance.begin(), utterance.end(), [](unsigned char c) { return std::isspace(c); })) {
    violation("utterance must be non-empty");
  }
}

}  // namespace

std::string_view to_string(ReplyError::Kind kind) {
  switch (kind) {
    case Kind::Malformed: return "MalformedReply";
    case Kind::SchemaViolation: return "SchemaViolation";
    case Kind::IllegalSubmit: return "IllegalSubmit";
  }
  return "MalformedReply";
}

DirectorReply parse_director_reply(std::string_view raw, const DirectorReplyContext& context,
                                   game::PromptVariant variant) {
  const json j = parse_object(raw);
  DirectorReply reply;
  if (variant == game::PromptVariant::Simple) {
    require_exact_fields(j, {"utterance"});
  } else {
    require_exact_fields(j, {"reasoning", "utterance"});
    const auto& r = field(j, "reasoning");
    if (!r.is_object()) malformed("field \"reasoning\" must be an object");
    DirectorReasoning reasoning;
    reasoning.target_position = int_of(r, "target_position");
    reasoning.shared_features = strings_of(r, "shared_features");
    reasoning.distinctive_features = strings_of(r, "distinctive_features");
    reasoning.likely_confusions = ints_of(r, "likely_confusions");
    reasoning.discriminative_strategy = string_of(r, "discriminative_strategy");
    reply.reasoning = std::move(reasoning);
  }
  reply.utterance = string_of(j, "utterance");
  check_utterance(reply.utterance);

  if (reply.reasoning) {
    const auto& r = *reply.reasoning;
    check_range("target_position", r.target_position, 1, kPositions);
    for (int c : r.likely_confusions) check_range("likely_confusions entry", c, 1, kPositions);
    if (contains(r.likely_confusions, r.target_position)) {
      violation("likely_confusions MUST NOT include target_position");
    }
    if (context.round_opening && r.target_position != 1) {
      violation("the round has just started: describe ONLY Basket 1");
    }
  }
  const auto baskets = mentioned_baskets(reply.utterance);
  if (baskets.size() > 1) violation("describe ONE BASKET PER MESSAGE");
  if (context.round_opening && !baskets.empty() && *baskets.begin() != 1) {
    violation("the round has just started: describe ONLY Basket 1");
  }
  return reply;
}

MatcherReply parse_matcher_reply(std::string_view raw, const game::RoundState& round,
                                 game::PromptVariant variant) {
  const json j = parse_object(raw);
  const int tiles = round.tile_count();
  MatcherReply reply;
  if (variant == game::PromptVariant::Simple) {
    require_exact_fields(j, {"utterance", "selection"});
  } else {
    require_exact_fields(j, {"reasoning", "utterance", "selection"});
    const auto& r = field(j, "reasoning");
    if (!r.is_object()) malformed("field \"reasoning\" must be an object");
    MatcherReasoning reasoning;
    reasoning.target_position = int_of(r, "target_position");
    reasoning.shared_features = strings_of(r, "shared_features");
    reasoning.distinctive_features = strings_of(r, "distinctive_features");
    reasoning.best_guess_candidate_index = nullable_int_of(r, "best_guess_candidate_index");
    reasoning.likely_confusions = ints_of(r, "likely_confusions");
    reasoning.discriminative_question = string_of(r, "discriminative_question");
    reply.reasoning = std::move(reasoning);
  }
  reply.utterance = string_of(j, "utterance");
  check_utterance(reply.utterance);

  const auto& s = field(j, "selection");
  if (!s.is_object()) malformed("field \"selection\" must be an object");
  reply.selection.candidate_index = nullable_int_of(s, "candidate_index");
  reply.selection.position = nullable_int_of(s, "position");
  const auto& ready = field(s, "ready_to_submit");
  if (!ready.is_boolean()) malformed("field \"ready_to_submit\" must be a boolean");
  reply.selection.ready_to_submit = ready.get<bool>();

  const auto& sel = reply.selection;
  if (sel.candidate_index) check_range("selection.candidate_index", *sel.candidate_index, 1, tiles);
  if (sel.position) check_range("selection.position", *sel.position, 1, kPositions);

  if (reply.reasoning) {
    const auto& r = *reply.reasoning;
    check_range("target_position", r.target_position, 1, kPositions);
    if (r.best_guess_candidate_index) {
      check_range("best_guess_candidate_index", *r.best_guess_candidate_index, 1, tiles);
    }
    for (int c : r.likely_confusions) check_range("likely_confusions entry", c, 1, tiles);
    if (r.best_guess_candidate_index && contains(r.likely_confusions, *r.best_guess_candidate_index)) {
      violation("likely_confusions MUST NOT include best_guess_candidate_index");
    }
    if (sel.candidate_index) {
      if (contains(r.likely_confusions, *sel.candidate_index)) {
        violation("likely_confusions MUST NOT include selection.candidate_index");
      }
      if (r.best_guess_candidate_index != sel.candidate_index) {
        violation("best_guess_candidate_index must equal selection.candidate_index when committing");
      }
      if (sel.position && *sel.position != r.target_position) {
        violation("selection.position must equal reasoning.target_position when committing");
      }
    }
  }

  if (sel.ready_to_submit) {
    game::RoundState after = round;
    if (sel.candidate_index) {
      const auto target = target_of(sel, round);
      if (target) game::apply_placement(after, Tile{*sel.candidate_index}, *target);
    }
    if (after.filled_count() != kPositions) {
      throw ReplyError(Kind::IllegalSubmit,
                       "ready_to_submit must be false while any sequence entry is null (" +
                           std::to_string(kPositions - after.filled_count()) + " empty)");
    }
  }
  return reply;
}

std::optional<Position> target_of(const Selection& selection, const game::RoundState& round) {
  if (selection.position) return Position{*selection.position};
  return round.first_empty();
}

nlohmann::json to_json(const DirectorReply& reply) {
  json j{{"utterance", reply.utterance}};
  if (reply.reasoning) {
    const auto& r = *reply.reasoning;
    j["reasoning"] = {{"target_position", r.target_position},
                      {"shared_features", r.shared_features},
                      {"distinctive_features", r.distinctive_features},
                      {"likely_confusions", r.likely_confusions},
                      {"discriminative_strategy", r.discriminative_strategy}};
  }
  return j;
}

nlohmann::json to_json(const MatcherReply& reply) {
  auto nullable = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
  json j{{"utterance", reply.utterance},
         {"selection",
          {{"candidate_index", nullable(reply.selection.candidate_index)},
           {"position", nullable(reply.selection.position)},
           {"ready_to_submit", reply.selection.ready_to_submit}}}};
  if (reply.reasoning) {
    const auto& r = *reply.reasoning;
    j["reasoning"] = {{"target_position", r.target_position},
                      {"shared_features", r.shared_features},
                      {"distinctive_features", r.distinctive_features},
                      {"best_guess_candidate_index", nullable(r.best_guess_candidate_index)},
                      {"likely_confusions", r.likely_confusions},
                      {"discriminative_question", r.discriminative_question}};
  }
  return j;
}

}  // namespace refgame::agents
