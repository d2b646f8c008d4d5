#include "doctest.h"

#include "refgame/server/http_server.hpp"

#include <boost/asio/connect.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <filesystem>
#include <fstream>

using namespace refgame;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

struct HttpReply {
  int status;
  json body;
  std::string raw;
};

HttpReply request(unsigned short port, http::verb verb, const std::string& target, const std::string& body = "") {
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  stream.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "localhost");
  req.body() = body;
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  HttpReply out{static_cast<int>(res.result_int()), json(), res.body()};
  out.body = json::parse(res.body(), nullptr, false);
  return out;
}

/// Blocking WebSocket client.
class Client {
 public:
  Client(unsigned short port, const std::string& token, std::int64_t last_seq = 0) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("localhost", "/ws?token=" + token + "&last_seq=" + std::to_string(last_seq));
  }
  ~Client() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

  json next() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  void send(const json& frame) { ws_.write(net::buffer(frame.dump())); }

  /// Reads frames until one satisfies `pred`, collecting every frame.
  template <class Pred>
  json until(Pred pred, std::vector<json>* seen = nullptr) {
    for (int i = 0; i < 500; ++i) {
      auto f = next();
      if (seen) seen->push_back(f);
      if (pred(f)) return f;
    }
    FAIL("frame never arrived");
    return {};
  }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

bool is_event(const json& f, std::string_view type) {
  return f.contains("payload") && f["payload"]["type"] == type;
}
bool is_frame(const json& f, std::string_view kind) { return f.value("frame", "") == kind; }

struct Fixture {
  std::filesystem::path dir = std::filesystem::temp_directory_path() / ("refgame-it-" + server::random_hex(4));
  events::SystemClock clock;
  std::unique_ptr<server::SessionManager> manager;
  std::unique_ptr<server::Server> srv;

  Fixture() {
    std::filesystem::create_directories(dir / "assets" / "baskets");
    std::ofstream(dir / "assets" / "baskets" / "b01.png", std::ios::binary) << "PNGDATA";
    start();
  }
  void start() {
    manager = std::make_unique<server::SessionManager>(dir / "sessions", clock);
    srv = std::make_unique<server::Server>(*manager,
                                           server::ServerOptions{.address = "127.0.0.1", .port = 0, .asset_dir = dir / "assets"});
    srv->start();
  }
  void restart() {
    srv->stop();
    srv.reset();
    manager->shutdown();
    manager.reset();
    start();
  }
  ~Fixture() {
    srv->stop();
    manager->shutdown();
    std::filesystem::remove_all(dir);
  }
  unsigned short port() const { return srv->port(); }
};

json config(std::string_view condition, int rounds = 1) {
  json c{{"condition", condition}, {"n_rounds", rounds}, {"seed", 3}};
  c["director"] = {{"kind", condition[0] == 'H' ? "human" : "scripted"}};
  c["matcher"] = {{"kind", condition[1] == 'H' ? "human" : "scripted"}};
  return c;
}

}  // namespace

TEST_CASE("health, assets and error statuses") {
  Fixture fx;
  const auto health = request(fx.port(), http::verb::get, "/health");
  CHECK(health.status == 200);
  CHECK(health.body["status"] == "ok");
  const auto asset = request(fx.port(), http::verb::get, "/assets/baskets/b01.png");
  CHECK(asset.status == 200);
  CHECK(asset.raw == "PNGDATA");
  CHECK(request(fx.port(), http::verb::get, "/assets/baskets/none.png").status == 404);
  CHECK(request(fx.port(), http::verb::get, "/assets/../secret").status == 400);
  CHECK(request(fx.port(), http::verb::get, "/nowhere").status == 404);
  CHECK(request(fx.port(), http::verb::post, "/api/sessions", "{").status == 400);
  CHECK(request(fx.port(), http::verb::post, "/api/sessions", R"({"n_rounds": 0})").status == 400);
  CHECK(request(fx.port(), http::verb::post, "/api/survey?token=nope", "{}").status == 404);
}

TEST_CASE("human pair plays a round over WebSockets") {
  Fixture fx;
  const auto created = request(fx.port(), http::verb::post, "/api/sessions", config("HH").dump());
  REQUIRE(created.status == 200);
  const std::string id = created.body["session_id"];
  const std::string dt = created.body["tokens"]["director"];
  const std::string mt = created.body["tokens"]["matcher"];

  Client director(fx.port(), dt);
  const auto hello = director.next();
  CHECK(is_frame(hello, "hello"));
  CHECK(hello["role"] == "director");
  CHECK(hello["phase"] == "waiting");
  {
    Client dup(fx.port(), dt);
    const auto err = dup.next();
    CHECK(is_frame(err, "error"));
    CHECK(err["code"] == "already_connected");
  }
  Client matcher(fx.port(), mt);
  CHECK(is_frame(matcher.next(), "hello"));
  const auto start = matcher.until([](const json& f) { return is_event(f, "RoundStart"); });
  CHECK(start["seq"] == 1);
  const auto view = matcher.next();
  REQUIRE(is_frame(view, "round"));
  CHECK(view["pool"].size() == 18);
  director.until([](const json& f) { return is_frame(f, "round"); });

  director.send({{"type", "Placement"}, {"tile", 1}, {"position", 1}});
  const auto denied = director.next();
  CHECK(is_frame(denied, "error"));
  CHECK(denied["code"] == "unauthorized");
  director.send({{"type", "Nonsense"}});
  CHECK(director.next()["code"] == "invalid");

  director.send({{"type", "TypingStart"}});
  director.send({{"type", "ChatMessage"}, {"text", "Basket 1 is round with a lid"}});
  std::vector<json> seen;
  director.until([](const json& f) { return is_event(f, "ChatMessage"); }, &seen);
  CHECK(is_event(seen.front(), "TypingStart"));

  // solve the round from the server's own view of the permutation
  const auto round = fx.manager->snapshot(id).current_round();
  for (int p = 1; p <= kPositions; ++p) {
    const int tile = round.tile_of(round.director_order[static_cast<std::size_t>(p - 1)]).index;
    matcher.send({{"type", "Placement"}, {"tile", tile}, {"position", p}});
  }
  matcher.send({{"type", "Submit"}});
  std::vector<json> director_seen;
  const auto feedback = director.until([](const json& f) { return is_event(f, "RoundFeedback"); }, &director_seen);
  CHECK(feedback["payload"]["result"]["accuracy_pct"] == 100.0);
  std::int64_t last = 0;
  for (const auto& f : director_seen) {
    if (!f.contains("seq")) continue;
    CHECK(f["seq"].get<std::int64_t>() > last);
    last = f["seq"];
  }

  const auto replay = request(fx.port(), http::verb::get, "/api/sessions/" + id + "/events?token=" + dt);
  CHECK(replay.status == 200);
  CHECK(replay.body["phase"] == "survey");
  CHECK(replay.body["events"].back()["seq"] == last);
  CHECK(request(fx.port(), http::verb::get, "/api/sessions/other/events?token=" + dt).status == 403);

  const json survey{{"partner_capability", 5}, {"partner_helpfulness", 5}, {"partner_understanding", 4},
                    {"partner_adaptability", 4}, {"collaboration_improvement", 3}, {"perceived_human_likeness", 77},
                    {"ai_familiarity", 2}, {"ai_usage_frequency", 1}, {"free_text", ""}};
  CHECK(request(fx.port(), http::verb::post, "/api/survey?token=" + dt, survey.dump()).status == 200);
  CHECK(request(fx.port(), http::verb::post, "/api/survey?token=" + dt, survey.dump()).status == 409);
  matcher.send({{"type", "SurveyResponse"}, {"response", survey}});
  matcher.until([](const json& f) { return is_event(f, "SurveyResponse") && f["actor"] == "matcher"; });
  CHECK(fx.manager->phase(id) == server::Phase::Finished);
}

TEST_CASE("human director against the scripted matcher, with resume after a restart") {
  Fixture fx;
  const auto created = request(fx.port(), http::verb::post, "/api/lobby", config("HA").dump());
  REQUIRE(created.status == 200);
  CHECK(created.body["role"] == "director");
  const std::string token = created.body["token"];
  std::int64_t last_seq = 0;
  {
    Client director(fx.port(), token);
    director.until([](const json& f) { return is_event(f, "RoundStart"); });
    director.send({{"type", "ChatMessage"}, {"text", "Basket 1: the tall one"}});
    const auto reply = director.until(
        [](const json& f) { return is_event(f, "ChatMessage") && f["actor"] == "matcher"; });
    last_seq = reply["seq"];
  }
  fx.restart();
  Client director(fx.port(), token, last_seq);
  const auto hello = director.next();
  CHECK(hello["phase"] == "playing");
  CHECK(is_frame(director.next(), "round"));
  director.send({{"type", "ChatMessage"}, {"text", "Basket 2: the short one"}});
  const auto mine = director.until([](const json& f) { return f.contains("seq"); });
  CHECK(mine["seq"].get<std::int64_t>() > last_seq);
}
