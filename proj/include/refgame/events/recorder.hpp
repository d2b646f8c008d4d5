#pragma once

#include "refgame/events/event.hpp"
#include "refgame/game/session.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string_view>

namespace refgame::events {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  /// Lets simulated participants "spend" time typing or thinking. Real
  /// clocks ignore this.
  virtual void elapse(std::chrono::milliseconds) {}
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() override;
};

/// Virtual time for simulations: starts at a fixed epoch and only moves
/// when told to, so durations are reproducible.
class MockClock final : public Clock {
 public:
  static constexpr std::int64_t kDefaultEpochMs = 1767225600000;  // 2026-01-01T00:00:00Z

  explicit MockClock(std::int64_t start_ms = kDefaultEpochMs) : now_(start_ms) {}
  std::int64_t now_ms() override { return now_; }
  void elapse(std::chrono::milliseconds d) override { now_ += d.count(); }

 private:
  std::atomic<std::int64_t> now_;
};

/// Simulated time for an agent to compose `text`: a fixed pause plus a
/// per-word typing cost.
std::chrono::milliseconds composition_time(std::string_view text);

/// Appends events to an in-memory session: assigns the next seq and a
/// timestamp, applies the event to game state, then logs it.
class EventRecorder {
 public:
  explicit EventRecorder(Clock& clock) : clock_(clock) {}

  const TranscriptEvent& record(game::Session& session, Actor actor, Payload payload);
  Clock& clock() { return clock_; }

 private:
  Clock& clock_;
};

}  // namespace refgame::events
