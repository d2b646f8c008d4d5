#include "refgame/game/catalog.hpp"

#include "refgame/game/types.hpp"

#include <algorithm>
#include <set>

namespace refgame::game {

namespace {

BasketEntry basket(std::string id, std::vector<std::string> features) {
  std::string image = "baskets/" + id + ".png";
  return BasketEntry{std::move(id), std::move(image), std::move(features)};
}

}  // namespace

void BasketCatalog::validate(bool require_features) const {
  if (targets.size() != static_cast<std::size_t>(kPositions)) {
    throw GameError(GameError::Code::InvalidCatalog,
                    "catalog must have exactly 12 targets, got " + std::to_string(targets.size()));
  }
  if (distractors.empty()) {
    throw GameError(GameError::Code::InvalidCatalog, "catalog needs at least one distractor");
  }
  std::set<std::string> seen;
  for (const auto& entry : all()) {
    if (entry.id.empty()) throw GameError(GameError::Code::InvalidCatalog, "empty basket id");
    if (!seen.insert(entry.id).second) {
      throw GameError(GameError::Code::InvalidCatalog, "duplicate basket id: " + entry.id);
    }
    if (entry.image_ref.empty()) {
      throw GameError(GameError::Code::InvalidCatalog, "basket " + entry.id + " has no image");
    }
    if (require_features && entry.features.empty()) {
      throw GameError(GameError::Code::InvalidCatalog, "basket " + entry.id + " has no features");
    }
  }
}

std::vector<BasketEntry> BasketCatalog::all() const {
  std::vector<BasketEntry> out = targets;
  out.insert(out.end(), distractors.begin(), distractors.end());
  return out;
}

const BasketEntry& BasketCatalog::at(const std::string& id) const {
  for (const auto* list : {&targets, &distractors}) {
    auto it = std::find_if(list->begin(), list->end(), [&](const auto& e) { return e.id == id; });
    if (it != list->end()) return *it;
  }
  throw GameError(GameError::Code::InvalidCatalog, "unknown basket id: " + id);
}

bool BasketCatalog::is_target(const std::string& id) const {
  return std::any_of(targets.begin(), targets.end(), [&](const auto& e) { return e.id == id; });
}

BasketCatalog default_catalog() {
  BasketCatalog c;
  c.targets = {
      basket("b01", {"tall", "cylindrical", "open top", "two small loop handles"}),
      basket("b02", {"short", "round", "dark brown", "no handles"}),
      basket("b03", {"long", "shallow", "rectangular", "light wood"}),
      basket("b04", {"oval", "deep", "woven reeds", "single arched handle"}),
      basket("b05", {"square", "lidded", "woven reeds", "side handles"}),
      basket("b06", {"round", "wide", "flower pattern", "single arched handle"}),
      basket("b07", {"tall", "square", "dark brown", "rope handles"}),
      basket("b08", {"half circle", "thick rim", "no handles", "checkered weave"}),
      basket("b09", {"short", "oval", "light wood", "little feet"}),
      basket("b10", {"round", "deep", "red eyes", "rodent face"}),
      basket("b11", {"long", "narrow", "open top", "rope handles"}),
      basket("b12", {"cylindrical", "lidded", "striped", "two small loop handles"}),
  };
  c.distractors = {
      basket("b13", {"tall", "cylindrical", "open top", "rope handles"}),
      basket("b14", {"short", "round", "dark brown", "side handles"}),
      basket("b15", {"oval", "deep", "woven reeds", "no handles"}),
      basket("b16", {"half circle", "thick rim", "no handles", "flower pattern"}),
      basket("b17", {"square", "lidded", "striped", "side handles"}),
      basket("b18", {"long", "shallow", "rectangular", "dark brown"}),
  };
  return c;
}

void to_json(nlohmann::json& j, const BasketEntry& e) {
  j = nlohmann::json{{"id", e.id}, {"image_ref", e.image_ref}, {"features", e.features}};
}

void from_json(const nlohmann::json& j, BasketEntry& e) {
  j.at("id").get_to(e.id);
  j.at("image_ref").get_to(e.image_ref);
  e.features = j.value("features", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const BasketCatalog& c) {
  j = nlohmann::json{{"targets", c.targets}, {"distractors", c.distractors}};
}

void from_json(const nlohmann::json& j, BasketCatalog& c) {
  j.at("targets").get_to(c.targets);
  j.at("distractors").get_to(c.distractors);
}

}  // namespace refgame::game
