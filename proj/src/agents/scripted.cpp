#include "refgame/agents/scripted.hpp"

#include "refgame/agents/prompts.hpp"
#include "refgame/game/rng.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

namespace refgame::agents {

namespace scripted {

namespace {

std::string join(const std::vector<std::string>& parts, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n && i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out;
}

std::map<std::string, int> feature_frequency(const game::BasketCatalog& catalog) {
  std::map<std::string, int> freq;
  for (const auto& e : catalog.all()) {
    for (const auto& f : std::set<std::string>(e.features.begin(), e.features.end())) ++freq[f];
  }
  return freq;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool contains_phrase(const std::string& haystack, const std::string& phrase) {
  for (std::size_t pos = haystack.find(phrase); pos != std::string::npos;
       pos = haystack.find(phrase, pos + 1)) {
    const bool left_ok = pos == 0 || !word_char(haystack[pos - 1]);
    const std::size_t end = pos + phrase.size();
    const bool right_ok = end == haystack.size() || !word_char(haystack[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace

std::string describe_message(int position, std::string_view phrase) {
  return "Basket " + std::to_string(position) + ": " + std::string(phrase) + ".";
}

std::string repair_message(int position, std::string_view phrase) {
  return "Let me clarify basket " + std::to_string(position) + " again: " + std::string(phrase) + ".";
}

std::string placed_message(int position) {
  return "Placed it in position " + std::to_string(position) + ".";
}

std::string moved_message(int from, int to) {
  return "Moved that basket from position " + std::to_string(from) + " to position " +
         std::to_string(to) + ". Can you re-describe basket " + std::to_string(from) + "?";
}

std::string clarify_message(int position) {
  return "I'm not sure which one that is. Can you clarify basket " + std::to_string(position) + "?";
}

std::string missing_message(int position) {
  return "Position " + std::to_string(position) + " is still empty. Can you re-describe basket " +
         std::to_string(position) + "?";
}

std::vector<std::string> rarity_order(const game::BasketCatalog& catalog, const game::BasketEntry& basket) {
  const auto freq = feature_frequency(catalog);
  std::vector<std::string> order = basket.features;
  std::stable_sort(order.begin(), order.end(),
                   [&](const auto& a, const auto& b) { return freq.at(a) < freq.at(b); });
  return order;
}

int unique_prefix_length(const game::BasketCatalog& catalog, const game::BasketEntry& basket) {
  const auto order = rarity_order(catalog, basket);
  const auto others = catalog.all();
  for (std::size_t n = 1; n <= order.size(); ++n) {
    const bool ambiguous = std::any_of(others.begin(), others.end(), [&](const auto& other) {
      if (other.id == basket.id) return false;
      return std::all_of(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), [&](const auto& f) {
        return std::find(other.features.begin(), other.features.end(), f) != other.features.end();
      });
    });
    if (!ambiguous) return static_cast<int>(n);
  }
  return static_cast<int>(order.size());
}

std::string description(const game::BasketCatalog& catalog, const game::BasketEntry& basket,
                        const BehaviorProfile& profile, int round_index) {
  if (profile.kind != BehaviorProfile::Kind::Terse) return join(basket.features, basket.features.size());
  const auto order = rarity_order(catalog, basket);
  const int full = static_cast<int>(order.size());
  const int length = std::max(unique_prefix_length(catalog, basket), full - (round_index - 1));
  return join(order, static_cast<std::size_t>(length));
}

std::string underspecified_description(const game::BasketCatalog& catalog,
                                       const game::BasketEntry& basket) {
  const auto order = rarity_order(catalog, basket);
  return order.back();
}

std::vector<std::string> mentioned_features(std::string_view text,
                                            const std::vector<std::string>& vocabulary) {
  const std::string haystack = lower(text);
  std::vector<std::string> out;
  for (const auto& phrase : vocabulary) {
    if (contains_phrase(haystack, lower(phrase))) out.push_back(phrase);
  }
  return out;
}

std::optional<int> named_basket(std::string_view text) {
  static const std::regex re(R"(\bbasket\s+(\d{1,2})\b)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, re)) {
    const int n = std::stoi(m[1].str());
    if (n >= 1 && n <= kPositions) return n;
  }
  return std::nullopt;
}

}  // namespace scripted

namespace {

constexpr std::uint64_t kDirectorNoise = 0x6469726563746f72ULL;
constexpr std::uint64_t kMatcherNoise = 0x6d61746368657221ULL;

struct DirectorView {
  std::set<int> acknowledged;
  std::set<int> described;
  std::optional<int> request;
};

/// Reconstructs what the director has described and what the matcher has
/// confirmed from the chat of the current round.
DirectorView read_director_view(const std::vector<ChatTurn>& history) {
  static const std::regex own(R"(^(?:Basket (\d+):|Let me clarify basket (\d+) again:))");
  static const std::regex request(R"((?:re-describe|clarify) basket (\d+))", std::regex::icase);
  static const std::regex placed(R"((?:in|to) position (\d+))", std::regex::icase);
  static const std::regex next(R"(\bnext\b)", std::regex::icase);

  DirectorView view;
  int last_described = 0;
  for (const auto& turn : history) {
    std::smatch m;
    if (turn.speaker == Role::Director) {
      if (std::regex_search(turn.text, m, own)) {
        last_described = std::stoi(m[1].matched ? m[1].str() : m[2].str());
        view.described.insert(last_described);
        view.request.reset();
      }
      continue;
    }
    if (std::regex_search(turn.text, m, placed)) view.acknowledged.insert(std::stoi(m[1].str()));
    if (std::regex_search(turn.text, m, request)) {
      view.request = std::stoi(m[1].str());
    } else if (std::regex_search(turn.text, m, placed)) {
      view.request.reset();
    } else if (turn.text.find('?') != std::string::npos && !std::regex_search(turn.text, next)) {
      if (last_described > 0) view.request = last_described;
    } else if (last_described > 0) {
      view.acknowledged.insert(last_described);
      view.request.reset();
    }
  }
  return view;
}

}  // namespace

ScriptedDirector::ScriptedDirector(ParticipantSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {}

Action ScriptedDirector::act(const Observation& obs) {
  const auto& round = obs.round();
  const auto& catalog = obs.session.config.catalog;
  const auto view = read_director_view(round_history(obs.session, round.round_index));

  int position = 0;
  if (view.request) {
    position = *view.request;
  } else {
    for (int p = 1; p <= kPositions; ++p) {
      if (!view.acknowledged.count(p)) {
        position = p;
        break;
      }
    }
  }
  if (position == 0) return Action{.utterance = std::string(scripted::kAllPlaced)};

  const auto& basket = catalog.at(round.director_order[position - 1]);
  const bool first_time = !view.described.count(position);
  std::string phrase = scripted::description(catalog, basket, spec_.behavior, round.round_index);
  if (first_time && spec_.behavior.kind == BehaviorProfile::Kind::Noisy) {
    game::Rng rng(game::derive_seed(seed_ ^ kDirectorNoise, static_cast<std::uint64_t>(round.round_index),
                                    static_cast<std::uint64_t>(position)));
    if (rng.uniform() < spec_.behavior.p) phrase = scripted::underspecified_description(catalog, basket);
  }
  Action action;
  action.utterance = first_time ? scripted::describe_message(position, phrase)
                                : scripted::repair_message(position, phrase);
  action.tags.push_back({position, phrase});
  return action;
}

ScriptedMatcher::ScriptedMatcher(ParticipantSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {}

Action ScriptedMatcher::act(const Observation& obs) {
  const auto& round = obs.round();
  const auto& catalog = obs.session.config.catalog;
  const auto history = round_history(obs.session, round.round_index);

  std::string said;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->speaker == Role::Director) {
      said = it->text;
      break;
    }
  }

  if (game::can_submit(round)) return Action{.utterance = std::string(scripted::kSubmitting), .submit = true};

  const int target = scripted::named_basket(said).value_or(round.first_empty().value_or(Position{1}).index);
  if (said.find("submit") != std::string::npos) {
    const int missing = round.first_empty()->index;
    return Action{.utterance = scripted::missing_message(missing)};
  }

  std::vector<std::string> vocabulary;
  for (const auto& id : round.pool_order) {
    for (const auto& f : catalog.at(id).features) {
      if (std::find(vocabulary.begin(), vocabulary.end(), f) == vocabulary.end()) vocabulary.push_back(f);
    }
  }
  const auto mentioned = scripted::mentioned_features(said, vocabulary);
  std::vector<int> candidates;
  if (!mentioned.empty()) {
    for (int t = 1; t <= round.tile_count(); ++t) {
      const auto& features = catalog.at(round.pool_order[t - 1]).features;
      const bool all = std::all_of(mentioned.begin(), mentioned.end(), [&](const auto& f) {
        return std::find(features.begin(), features.end(), f) != features.end();
      });
      if (all) candidates.push_back(t);
    }
  }
  if (candidates.size() != 1) return Action{.utterance = scripted::clarify_message(target)};

  int tile = candidates.front();
  if (spec_.behavior.kind == BehaviorProfile::Kind::Noisy) {
    game::Rng rng(game::derive_seed(seed_ ^ kMatcherNoise, static_cast<std::uint64_t>(round.round_index),
                                    static_cast<std::uint64_t>(target)));
    if (rng.uniform() < spec_.behavior.p) {
      std::vector<int> wrong;
      for (int t = 1; t <= round.tile_count(); ++t) {
        if (t != tile && !round.position_of(Tile{t})) wrong.push_back(t);
      }
      if (!wrong.empty()) tile = wrong[rng.below(wrong.size())];
    }
  }

  Action action;
  const auto previous = round.position_of(Tile{tile});
  if (previous && previous->index != target) {
    action.utterance = scripted::moved_message(previous->index, target);
  } else {
    action.utterance = scripted::placed_message(target);
  }
  action.placement = PlacementAction{Tile{tile}, Position{target}};
  return action;
}

}  // namespace refgame::agents
