#pragma once

#include "refgame/agents/participant.hpp"
#include "refgame/game/catalog.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refgame::agents {

// Scripted oracle agents. They talk in fixed templates built from the
// catalog's feature tags, so every referring expression they produce is
// known exactly (and tagged inline on the chat event).
namespace scripted {

inline constexpr std::string_view kAllPlaced = "That's all twelve baskets. Please submit when you're ready.";
inline constexpr std::string_view kSubmitting = "Submitting our sequence now.";

std::string describe_message(int position, std::string_view phrase);
std::string repair_message(int position, std::string_view phrase);
std::string placed_message(int position);
std::string moved_message(int from, int to);
std::string clarify_message(int position);
std::string missing_message(int position);

/// Features of `basket` from rarest to most common across the catalog;
/// ties keep catalog order.
std::vector<std::string> rarity_order(const game::BasketCatalog& catalog, const game::BasketEntry& basket);

/// Shortest prefix of rarity_order that no other basket fully contains.
int unique_prefix_length(const game::BasketCatalog& catalog, const game::BasketEntry& basket);

/// The phrase a scripted director uses for `basket` in `round_index`.
std::string description(const game::BasketCatalog& catalog, const game::BasketEntry& basket,
                        const BehaviorProfile& profile, int round_index);

/// The deliberately ambiguous first description of the noisy profile.
std::string underspecified_description(const game::BasketCatalog& catalog,
                                       const game::BasketEntry& basket);

/// Catalog feature phrases occurring in `text` (case-insensitive, whole
/// words), in vocabulary order.
std::vector<std::string> mentioned_features(std::string_view text,
                                            const std::vector<std::string>& vocabulary);

/// Basket number explicitly named in `text` ("basket 7"), if any.
std::optional<int> named_basket(std::string_view text);

}  // namespace scripted

class ScriptedDirector final : public Participant {
 public:
  explicit ScriptedDirector(ParticipantSpec spec, std::uint64_t seed);
  const ParticipantSpec& spec() const override { return spec_; }
  Action act(const Observation& observation) override;

 private:
  ParticipantSpec spec_;
  std::uint64_t seed_;
};

class ScriptedMatcher final : public Participant {
 public:
  explicit ScriptedMatcher(ParticipantSpec spec, std::uint64_t seed);
  const ParticipantSpec& spec() const override { return spec_; }
  Action act(const Observation& observation) override;

 private:
  ParticipantSpec spec_;
  std::uint64_t seed_;
};

}  // namespace refgame::agents
