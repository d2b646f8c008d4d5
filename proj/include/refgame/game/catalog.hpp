#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace refgame::game {

/// One basket stimulus. `features` are symbolic stand-ins for what the image
/// shows; only scripted agents read them.
struct BasketEntry {
  std::string id;
  std::string image_ref;
  std::vector<std::string> features;

  bool operator==(const BasketEntry&) const = default;
};

struct BasketCatalog {
  std::vector<BasketEntry> targets;
  std::vector<BasketEntry> distractors;

  /// Throws GameError(InvalidCatalog) on size or id violations. When
  /// `require_features` is set every entry must carry at least one feature.
  void validate(bool require_features = false) const;

  int tile_count() const { return static_cast<int>(targets.size() + distractors.size()); }
  std::vector<BasketEntry> all() const;
  const BasketEntry& at(const std::string& id) const;
  bool is_target(const std::string& id) const;

  bool operator==(const BasketCatalog&) const = default;
};

/// 12 targets + 6 distractors with hand-assigned feature tags.
BasketCatalog default_catalog();

void to_json(nlohmann::json& j, const BasketEntry& e);
void from_json(const nlohmann::json& j, BasketEntry& e);
void to_json(nlohmann::json& j, const BasketCatalog& c);
void from_json(const nlohmann::json& j, BasketCatalog& c);

}  // namespace refgame::game
