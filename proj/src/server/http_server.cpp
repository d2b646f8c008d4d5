#include "refgame/server/http_server.hpp"

#include "refgame/server/views.hpp"

#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <map>
#include <thread>

namespace refgame::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view in) {
  std::string out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '+') {
      out.push_back(' ');
    } else if (in[i] == '%' && i + 2 < in.size() && hex_value(in[i + 1]) >= 0 && hex_value(in[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(in[i + 1]) * 16 + hex_value(in[i + 2])));
      i += 2;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

Target parse_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = url_decode(target.substr(0, q));
  if (q == std::string_view::npos) return t;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
      t.query[url_decode(pair)] = "";
    } else {
      t.query[url_decode(pair.substr(0, eq))] = url_decode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return t;
}

std::string query_or(const Target& t, const std::string& key, std::string fallback = {}) {
  auto it = t.query.find(key);
  return it == t.query.end() ? fallback : it->second;
}

std::int64_t query_int(const Target& t, const std::string& key) {
  const auto v = query_or(t, key, "0");
  try {
    return std::stoll(v);
  } catch (const std::exception&) {
    throw ServiceError(ServiceError::Code::Invalid, key + " must be an integer");
  }
}

http::status status_for(ServiceError::Code code) {
  using Code = ServiceError::Code;
  switch (code) {
    case Code::UnknownSession:
    case Code::UnknownToken: return http::status::not_found;
    case Code::Unauthorized: return http::status::forbidden;
    case Code::Invalid: return http::status::bad_request;
    case Code::AlreadyConnected:
    case Code::NotLive:
    case Code::Rejected: return http::status::conflict;
  }
  return http::status::bad_request;
}

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".webp") return "image/webp";
  if (ext == ".json") return "application/json";
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  return "application/octet-stream";
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ServiceError(ServiceError::Code::Invalid, std::string("body is not JSON: ") + e.what());
  }
}

game::SessionConfig config_from(const json& j) {
  try {
    return j.get<game::SessionConfig>();
  } catch (const std::exception& e) {
    throw ServiceError(ServiceError::Code::Invalid, std::string("bad session config: ") + e.what());
  }
}

}  // namespace

struct Server::Impl {
  Impl(SessionManager& m, ServerOptions o)
      : manager(m), options(std::move(o)), acceptor(ioc), expiry(ioc), signals(ioc) {}

  SessionManager& manager;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer expiry;
  net::signal_set signals;
  std::vector<std::thread> threads;
  std::mutex stop_mutex;
  std::condition_variable stopped_cv;
  bool stopping = false;
  bool stop_requested = false;
  bool stopped = false;

  void accept();
  void schedule_expiry();
  http::response<http::string_body> handle(const http::request<http::string_body>& req);
  http::response<http::string_body> route(const http::request<http::string_body>& req);
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, SessionManager& manager) : ws_(std::move(socket)), manager_(manager) {}

  void run(http::request<http::string_body> req) {
    target_ = parse_target(sv(req.target()));
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    const auto token = query_or(target_, "token");
    try {
      const auto last_seq = query_int(target_, "last_seq");
      const auto [id, role] = manager_.resolve(token);
      config_ = manager_.snapshot(id).config;
      std::weak_ptr<WsSession> weak = weak_from_this();
      const auto executor = ws_.get_executor();
      attachment_ = manager_.attach(token, last_seq, [weak, executor, role, config = config_](const events::TranscriptEvent& e) {
        std::vector<std::string> frames{events::serialize(e)};
        if (const auto* start = std::get_if<events::RoundStart>(&e.payload)) {
          frames.push_back(round_view(config, start->round, role).dump());
        }
        net::post(executor, [weak, frames = std::move(frames)] {
          if (auto self = weak.lock()) {
            for (const auto& f : frames) self->send(f);
          }
        });
      });
      const auto snapshot = manager_.snapshot(id);
      send(hello_frame(snapshot, role, manager_.phase(id)).dump());
      if (!snapshot.rounds.empty()) send(round_view(config_, static_cast<int>(snapshot.rounds.size()), role).dump());
    } catch (const ServiceError& e) {
      send(error_frame(to_string(e.code()), e.what()).dump());
      closing_ = true;
      return;
    }
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      release();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      auto payload = parse_client_frame(text);
      std::int64_t seq;
      if (auto* survey = std::get_if<events::SurveyResponse>(&payload)) {
        seq = manager_.submit_survey(query_or(target_, "token"), std::move(*survey));
      } else {
        seq = manager_.ingest(attachment_->session_id, attachment_->role, std::move(payload));
      }
      // ack queued behind the event broadcast
      net::post(ws_.get_executor(), [self = shared_from_this(), seq] {
        self->send(json{{"frame", "ack"}, {"seq", seq}}.dump());
      });
    } catch (const events::EventFormatError& e) {
      send(error_frame("invalid", e.what()).dump());
    } catch (const ServiceError& e) {
      send(error_frame(to_string(e.code()), e.what()).dump());
    }
    read();
  }

  void send(std::string frame) {
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      release();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) {
      write();
    } else if (closing_) {
      ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](beast::error_code) {});
    }
  }

  void release() {
    if (attachment_) {
      try {
        manager_.detach(*attachment_);
      } catch (const ServiceError&) {
      }
      attachment_.reset();
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionManager& manager_;
  beast::flat_buffer buffer_;
  Target target_;
  game::SessionConfig config_;
  std::optional<Attachment> attachment_;
  std::deque<std::string> queue_;
  bool closing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Server::Impl& server) : stream_(std::move(socket)), server_(server) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this()));
  }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (websocket::is_upgrade(req_) && parse_target(sv(req_.target())).path == "/ws") {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), server_.manager)->run(std::move(req_));
      return;
    }
    res_ = server_.handle(req_);
    http::async_write(stream_, res_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (!res_.keep_alive()) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    read();
  }

  beast::tcp_stream stream_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
};

}  // namespace

void Server::Impl::accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    accept();
  });
}

void Server::Impl::schedule_expiry() {
  expiry.expires_after(options.expiry_sweep);
  expiry.async_wait([this](beast::error_code ec) {
    if (ec) return;
    manager.expire_stale();
    schedule_expiry();
  });
}

http::response<http::string_body> Server::Impl::handle(const http::request<http::string_body>& req) {
  http::response<http::string_body> res;
  try {
    res = route(req);
  } catch (const ServiceError& e) {
    res.result(status_for(e.code()));
    res.set(http::field::content_type, "application/json");
    res.body() = json{{"error", to_string(e.code())}, {"message", e.what()}}.dump();
  } catch (const std::exception& e) {
    res.result(http::status::internal_server_error);
    res.set(http::field::content_type, "application/json");
    res.body() = json{{"error", "internal"}, {"message", e.what()}}.dump();
  }
  res.version(req.version());
  res.keep_alive(req.keep_alive());
  res.set(http::field::server, "refgame");
  res.prepare_payload();
  return res;
}

http::response<http::string_body> Server::Impl::route(const http::request<http::string_body>& req) {
  const auto target = parse_target(sv(req.target()));
  const auto& path = target.path;
  http::response<http::string_body> res{http::status::ok, req.version()};
  res.set(http::field::content_type, "application/json");
  const auto reply = [&](const json& j) {
    res.body() = j.dump();
    return res;
  };
  const bool get = req.method() == http::verb::get;
  const bool post = req.method() == http::verb::post;

  if (get && path == "/health") {
    return reply(json{{"status", "ok"}, {"sessions", manager.session_ids().size()}});
  }
  if (post && path == "/api/sessions") {
    const auto created = manager.create(config_from(parse_body(req.body())));
    json tokens = json::object();
    for (const auto& [role, token] : created.tokens) tokens[std::string(refgame::to_string(role))] = token;
    return reply(json{{"session_id", created.id}, {"tokens", tokens}});
  }
  if (post && path == "/api/lobby") {
    const auto [id, token] = manager.lobby_join(config_from(parse_body(req.body())));
    return reply(json{{"session_id", id}, {"role", refgame::to_string(manager.resolve(token).second)}, {"token", token}});
  }
  if (post && path == "/api/survey") {
    manager.resolve(query_or(target, "token"));
    events::SurveyResponse response;
    try {
      response = parse_body(req.body()).get<events::SurveyResponse>();
    } catch (const ServiceError&) {
      throw;
    } catch (const std::exception& e) {
      throw ServiceError(ServiceError::Code::Invalid, std::string("bad survey: ") + e.what());
    }
    return reply(json{{"seq", manager.submit_survey(query_or(target, "token"), std::move(response))}});
  }
  const std::string sessions_prefix = "/api/sessions/";
  if (get && path.rfind(sessions_prefix, 0) == 0 && path.size() > sessions_prefix.size() + 7 &&
      path.compare(path.size() - 7, 7, "/events") == 0) {
    const auto id = path.substr(sessions_prefix.size(), path.size() - sessions_prefix.size() - 7);
    if (manager.resolve(query_or(target, "token")).first != id) {
      throw ServiceError(ServiceError::Code::Unauthorized, "token does not belong to session " + id);
    }
    json events = json::array();
    for (const auto& e : manager.replay(id, query_int(target, "after"))) events.push_back(events::to_json(e));
    return reply(json{{"session_id", id}, {"phase", to_string(manager.phase(id))}, {"events", events}});
  }
  if (get && path.rfind("/assets/", 0) == 0) {
    const std::filesystem::path rel = path.substr(8);
    for (const auto& part : rel) {
      if (part == ".." || part.is_absolute()) throw ServiceError(ServiceError::Code::Invalid, "bad asset path");
    }
    const auto file = options.asset_dir / rel;
    std::ifstream in(file, std::ios::binary);
    if (rel.empty() || !std::filesystem::is_regular_file(file) || !in) {
      res.result(http::status::not_found);
      return reply(json{{"error", "not_found"}, {"message", "no asset " + rel.string()}});
    }
    res.set(http::field::content_type, std::string(mime_type(file)));
    res.body().assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return res;
  }
  res.result(http::status::not_found);
  return reply(json{{"error", "not_found"}, {"message", std::string(sv(req.method_string())) + " " + path}});
}

Server::Server(SessionManager& manager, ServerOptions options)
    : impl_(std::make_unique<Impl>(manager, std::move(options))) {}

Server::~Server() {
  stop();
}

void Server::start() {
  auto& i = *impl_;
  const tcp::endpoint endpoint{net::ip::make_address(i.options.address), i.options.port};
  i.acceptor.open(endpoint.protocol());
  i.acceptor.set_option(net::socket_base::reuse_address(true));
  i.acceptor.bind(endpoint);
  i.acceptor.listen(net::socket_base::max_listen_connections);
  i.accept();
  i.schedule_expiry();
  for (int t = 0; t < std::max(1, i.options.io_threads); ++t) {
    i.threads.emplace_back([&i] { i.ioc.run(); });
  }
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop_on_signals() {
  auto& i = *impl_;
  i.signals.add(SIGINT);
  i.signals.add(SIGTERM);
  i.signals.async_wait([this](beast::error_code ec, int) {
    if (ec) return;
    std::lock_guard lock(impl_->stop_mutex);
    impl_->stop_requested = true;
    impl_->stopped_cv.notify_all();
  });
}

void Server::wait() {
  std::unique_lock lock(impl_->stop_mutex);
  impl_->stopped_cv.wait(lock, [&] { return impl_->stopped || impl_->stop_requested; });
}

void Server::stop() {
  auto& i = *impl_;
  {
    std::lock_guard lock(i.stop_mutex);
    if (i.stopping) return;
    i.stopping = true;
  }
  i.ioc.stop();
  for (auto& t : i.threads) {
    if (t.joinable()) t.join();
  }
  std::lock_guard lock(i.stop_mutex);
  i.stopped = true;
  i.stopped_cv.notify_all();
}

}  // namespace refgame::server
