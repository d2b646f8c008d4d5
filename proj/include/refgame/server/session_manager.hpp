#pragma once

#include "refgame/agents/llm.hpp"
#include "refgame/events/recorder.hpp"
#include "refgame/game/session.hpp"

#include <boost/asio/strand.hpp>
#include <boost/asio/thread_pool.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refgame::server {

class ServiceError : public std::runtime_error {
 public:
  enum class Code { UnknownSession, UnknownToken, AlreadyConnected, Unauthorized, NotLive, Invalid, Rejected };

  ServiceError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

std::string_view to_string(ServiceError::Code code);

enum class Phase { WaitingForPlayers, Playing, Survey, Finished, Expired };
std::string_view to_string(Phase phase);

struct ManagerOptions {
  std::chrono::minutes session_expiry{30};
  /// Completion providers for LLM participants; mock providers when empty.
  agents::ProviderFactory providers;
  int agent_threads = 2;
};

struct CreatedSession {
  std::string id;
  /// Join token per human role.
  std::map<Role, std::string> tokens;
};

/// Receives the events of one session in seq order.
using EventSink = std::function<void(const events::TranscriptEvent&)>;

struct Attachment {
  std::string session_id;
  Role role = Role::Director;
  std::uint64_t connection = 0;
};

/// Owns every live session: pairing by join token, event ingestion with
/// role checks, append-only persistence (one directory per session),
/// broadcast to connected clients, agent turns on a worker pool, round and
/// survey flow, expiry of unpaired sessions and recovery after a restart.
class SessionManager {
 public:
  SessionManager(std::filesystem::path data_dir, events::Clock& clock, ManagerOptions options = {});
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  CreatedSession create(game::SessionConfig config);

  /// Hands out the next free human seat of a lobby session with `config`,
  /// creating a session when none is waiting.
  std::pair<std::string, std::string> lobby_join(const game::SessionConfig& config);

  /// Connects a client. Events with seq > `last_seq` are delivered to `sink`
  /// before any live event. A token can be attached once at a time.
  Attachment attach(const std::string& token, std::int64_t last_seq, EventSink sink);
  void detach(const Attachment& attachment);

  /// Role and session of a token without connecting.
  std::pair<std::string, Role> resolve(const std::string& token) const;

  /// Appends an event from a human participant and returns its seq.
  std::int64_t ingest(const std::string& session_id, Role actor, events::Payload payload);

  std::int64_t submit_survey(const std::string& token, events::SurveyResponse response);

  std::vector<events::TranscriptEvent> replay(const std::string& session_id, std::int64_t after_seq = 0) const;
  game::Session snapshot(const std::string& session_id) const;
  Phase phase(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;

  /// Expires sessions still waiting for players after the expiry window.
  /// Returns the ids expired.
  std::vector<std::string> expire_stale();

  /// Blocks until no agent turn is queued or running.
  void drain();
  /// Drains agents and flushes and closes every log.
  void shutdown();

 private:
  struct Live;

  Live& live(const std::string& session_id) const;
  const events::TranscriptEvent& append(Live& s, events::Actor actor, events::Payload payload);
  void advance(Live& s);
  void schedule_agents(Live& s);
  void run_agent_turn(const std::string& session_id, Role role);
  void recover();
  void persist_meta(const Live& s) const;

  std::filesystem::path data_dir_;
  events::Clock& clock_;
  ManagerOptions options_;
  events::EventRecorder recorder_;

  mutable std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<Live>> sessions_;
  std::map<std::string, std::pair<std::string, Role>> tokens_;
  std::map<std::string, std::string> lobby_;  // config fingerprint -> waiting session
  std::uint64_t next_connection_ = 1;

  std::mutex pending_mutex_;
  std::condition_variable pending_cv_;
  int pending_agent_turns_ = 0;
  bool stopping_ = false;

  boost::asio::thread_pool agent_pool_;
};

/// Random lowercase hex string of `bytes` random bytes.
std::string random_hex(std::size_t bytes);

}  // namespace refgame::server
