#pragma once

#include "refgame/server/session_manager.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

namespace refgame::server {

struct ServerOptions {
  std::string address = "0.0.0.0";
  /// 0 picks a free port; see Server::port().
  unsigned short port = 8080;
  std::filesystem::path asset_dir = "assets";
  int io_threads = 1;
  std::chrono::seconds expiry_sweep{60};
};

/// HTTP and WebSocket front end of a SessionManager.
///
///   GET  /health
///   POST /api/sessions                    body: session config -> {session_id, tokens}
///   POST /api/lobby                       body: session config -> {session_id, role, token}
///   GET  /api/sessions/{id}/events?token=&after=
///   POST /api/survey?token=               body: survey response -> {seq}
///   GET  /assets/{path}
///   GET  /ws?token=&last_seq=             WebSocket upgrade
///
/// WebSocket server frames are either a TranscriptEvent object or a control
/// object with a "frame" field (hello, round, ack, error). Client frames are
/// one payload object each, e.g. {"type":"Placement","tile":5,"position":1}.
class Server {
 public:
  Server(SessionManager& manager, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds, listens and starts the I/O threads. Throws on bind failure.
  void start();
  unsigned short port() const;
  /// Makes SIGINT and SIGTERM end wait().
  void stop_on_signals();
  /// Blocks until stop() or a handled signal. Call stop() afterwards.
  void wait();
  void stop();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace refgame::server
