#include "refgame/events/recorder.hpp"

#include "refgame/events/reducer.hpp"

#include <sstream>

namespace refgame::events {

std::int64_t SystemClock::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::chrono::milliseconds composition_time(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::int64_t words = 0;
  while (in >> word) ++words;
  return std::chrono::milliseconds(1500 + 300 * words);
}

const TranscriptEvent& EventRecorder::record(game::Session& session, Actor actor, Payload payload) {
  TranscriptEvent event{session.id, static_cast<std::int64_t>(session.log.size()) + 1,
                        clock_.now_ms(), actor, std::move(payload)};
  apply(session, event);
  session.log.push_back(std::move(event));
  return session.log.back();
}

}  // namespace refgame::events
