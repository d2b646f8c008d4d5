#include "refgame/game/types.hpp"

#include <stdexcept>
#include <string>

namespace refgame {

std::string_view to_string(Role role) {
  return role == Role::Director ? "director" : "matcher";
}

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::HH: return "HH";
    case Condition::HA: return "HA";
    case Condition::AH: return "AH";
    case Condition::AA: return "AA";
  }
  return "AA";
}

Role parse_role(std::string_view text) {
  if (text == "director") return Role::Director;
  if (text == "matcher") return Role::Matcher;
  throw std::invalid_argument("unknown role: " + std::string(text));
}

Condition parse_condition(std::string_view text) {
  if (text == "HH") return Condition::HH;
  if (text == "HA") return Condition::HA;
  if (text == "AH") return Condition::AH;
  if (text == "AA") return Condition::AA;
  throw std::invalid_argument("unknown condition: " + std::string(text));
}

bool director_is_human(Condition condition) {
  return condition == Condition::HH || condition == Condition::HA;
}

bool matcher_is_human(Condition condition) {
  return condition == Condition::HH || condition == Condition::AH;
}

bool is_human(Condition condition, Role role) {
  return role == Role::Director ? director_is_human(condition) : matcher_is_human(condition);
}

}  // namespace refgame
