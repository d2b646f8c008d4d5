#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace refgame {

/// Number of target positions in the director grid (2 rows x 6 columns).
inline constexpr int kPositions = 12;

enum class Role { Director, Matcher };

/// Director-matcher pairing; first letter is the director (H human, A AI).
enum class Condition { HH, HA, AH, AA };

std::string_view to_string(Role role);
std::string_view to_string(Condition condition);
Role parse_role(std::string_view text);
Condition parse_condition(std::string_view text);

bool director_is_human(Condition condition);
bool matcher_is_human(Condition condition);
bool is_human(Condition condition, Role role);

/// 1-based index into the matcher's candidate pool.
struct Tile {
  int index = 0;
  auto operator<=>(const Tile&) const = default;
};

/// 1-based position in the 12-slot target sequence.
struct Position {
  int index = 0;
  auto operator<=>(const Position&) const = default;
};

class GameError : public std::runtime_error {
 public:
  enum class Code {
    InvalidConfig,
    InvalidCatalog,
    RoundOutOfRange,
    PreviousRoundUnfinished,
    OutOfRange,
    AlreadySubmitted,
    IncompleteSequence,
  };

  GameError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace refgame
