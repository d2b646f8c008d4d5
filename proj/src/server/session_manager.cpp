#include "refgame/server/session_manager.hpp"

#include "refgame/agents/participant.hpp"
#include "refgame/events/reducer.hpp"

#include <boost/asio/post.hpp>
#include <openssl/rand.h>

#include <set>
#include <sstream>

namespace refgame::server {

namespace {

using events::Actor;
using events::Payload;
using nlohmann::json;
using Code = ServiceError::Code;

constexpr int kRoles = 2;
int slot(Role r) { return r == Role::Director ? 0 : 1; }
Role role_at(int i) { return i == 0 ? Role::Director : Role::Matcher; }

std::vector<Role> human_roles(const game::SessionConfig& c) {
  std::vector<Role> out;
  for (Role r : {Role::Director, Role::Matcher}) {
    if (refgame::is_human(c.condition, r)) out.push_back(r);
  }
  return out;
}

template <class P>
bool logged(const game::Session& s, Actor actor, int round) {
  for (const auto& e : s.log) {
    if (e.actor != actor) continue;
    if (const auto* p = std::get_if<P>(&e.payload)) {
      if constexpr (requires { p->round; }) {
        if (p->round == round) return true;
      } else {
        return true;
      }
    }
  }
  return false;
}

bool session_abandoned(const game::Session& s) {
  for (const auto& e : s.log) {
    if (const auto* a = std::get_if<events::Abort>(&e.payload); a && a->round == 0) return true;
  }
  return false;
}

bool feedback_logged(const game::Session& s, int round) {
  return logged<events::RoundFeedback>(s, Actor::System, round);
}

}  // namespace

std::string_view to_string(ServiceError::Code code) {
  switch (code) {
    case Code::UnknownSession: return "unknown_session";
    case Code::UnknownToken: return "unknown_token";
    case Code::AlreadyConnected: return "already_connected";
    case Code::Unauthorized: return "unauthorized";
    case Code::NotLive: return "not_live";
    case Code::Invalid: return "invalid";
    case Code::Rejected: return "rejected";
  }
  return "invalid";
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::WaitingForPlayers: return "waiting";
    case Phase::Playing: return "playing";
    case Phase::Survey: return "survey";
    case Phase::Finished: return "finished";
    case Phase::Expired: return "expired";
  }
  return "waiting";
}

std::string random_hex(std::size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) throw std::runtime_error("RAND_bytes failed");
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : buf) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

struct SessionManager::Live {
  explicit Live(boost::asio::thread_pool& pool) : strand(pool.get_executor()) {}

  std::mutex mutex;
  game::Session session;
  std::map<Role, std::string> tokens;
  std::set<Role> joined;
  std::set<Role> handed_out;
  std::map<Role, std::uint64_t> connected;
  std::map<std::uint64_t, EventSink> sinks;
  Phase phase = Phase::WaitingForPlayers;
  std::int64_t created_ms = 0;
  std::ofstream log;
  std::unique_ptr<agents::Participant> agents[kRoles];
  bool agent_scheduled[kRoles] = {false, false};
  boost::asio::strand<boost::asio::thread_pool::executor_type> strand;

  bool all_joined() const {
    for (Role r : human_roles(session.config)) {
      if (!joined.count(r)) return false;
    }
    return true;
  }

  void refresh_phase() {
    const auto& s = session;
    if (session_abandoned(s)) {
      phase = Phase::Expired;
    } else if (s.rounds.empty()) {
      phase = Phase::WaitingForPlayers;
    } else if (!s.complete() || !feedback_or_abort_logged(s.config.n_rounds)) {
      phase = Phase::Playing;
    } else {
      bool surveyed = true;
      for (Role r : human_roles(s.config)) {
        surveyed &= logged<events::SurveyResponse>(s, events::actor_for(r), 0);
      }
      phase = surveyed ? Phase::Finished : Phase::Survey;
    }
  }

  bool feedback_or_abort_logged(int round) const {
    const auto& r = session.rounds.at(static_cast<std::size_t>(round - 1));
    return r.aborted || feedback_logged(session, round);
  }

  /// Whether the agent in `role` should speak now.
  bool agent_turn_due(Role role) const {
    if (phase != Phase::Playing || !agents[slot(role)] || !session.has_current_round()) return false;
    const auto& round = session.current_round();
    if (round.finished()) return false;
    std::optional<Actor> last;
    for (auto it = session.log.rbegin(); it != session.log.rend(); ++it) {
      if (std::holds_alternative<events::RoundStart>(it->payload)) break;
      if (std::holds_alternative<events::ChatMessage>(it->payload)) {
        last = it->actor;
        break;
      }
    }
    if (!last) return role == Role::Director;
    return *last != events::actor_for(role);
  }

  int chat_count_in_round() const {
    int n = 0;
    for (auto it = session.log.rbegin(); it != session.log.rend(); ++it) {
      if (std::holds_alternative<events::RoundStart>(it->payload)) break;
      n += std::holds_alternative<events::ChatMessage>(it->payload);
    }
    return n;
  }
};

SessionManager::SessionManager(std::filesystem::path data_dir, events::Clock& clock, ManagerOptions options)
    : data_dir_(std::move(data_dir)),
      clock_(clock),
      options_(std::move(options)),
      recorder_(clock),
      agent_pool_(static_cast<std::size_t>(std::max(1, options_.agent_threads))) {
  std::filesystem::create_directories(data_dir_);
  recover();
}

SessionManager::~SessionManager() { shutdown(); }

SessionManager::Live& SessionManager::live(const std::string& session_id) const {
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(Code::UnknownSession, "unknown session " + session_id);
  return *it->second;
}

void SessionManager::persist_meta(const Live& s) const {
  json tokens = json::object();
  for (const auto& [role, token] : s.tokens) tokens[std::string(refgame::to_string(role))] = token;
  const json meta{{"config", s.session.config}, {"tokens", tokens}, {"created", s.created_ms}};
  const auto dir = data_dir_ / s.session.id;
  std::filesystem::create_directories(dir);
  const auto tmp = dir / "session.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << meta.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / "session.json");
}

CreatedSession SessionManager::create(game::SessionConfig config) {
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw ServiceError(Code::Invalid, e.what());
  }
  auto s = std::make_unique<Live>(agent_pool_);
  s->session = game::new_session(std::move(config), random_hex(8));
  s->created_ms = clock_.now_ms();
  const auto& cfg = s->session.config;
  const auto factory = options_.providers ? options_.providers : agents::mock_providers(cfg);
  for (int i = 0; i < kRoles; ++i) {
    const Role r = role_at(i);
    if (refgame::is_human(cfg.condition, r)) {
      s->tokens[r] = random_hex(16);
    } else {
      s->agents[i] = agents::make_participant(cfg, r, factory);
    }
  }
  persist_meta(*s);
  s->log.open(data_dir_ / s->session.id / "events.jsonl", std::ios::binary | std::ios::app);

  CreatedSession out{s->session.id, s->tokens};
  Live* raw = s.get();
  {
    std::lock_guard lock(registry_mutex_);
    for (const auto& [role, token] : s->tokens) tokens_[token] = {s->session.id, role};
    sessions_[out.id] = std::move(s);
  }
  std::lock_guard lock(raw->mutex);
  advance(*raw);
  return out;
}

std::pair<std::string, std::string> SessionManager::lobby_join(const game::SessionConfig& config) {
  const std::string key = json(config).dump();
  std::string waiting;
  {
    std::lock_guard lock(registry_mutex_);
    auto it = lobby_.find(key);
    if (it != lobby_.end()) waiting = it->second;
  }
  if (!waiting.empty()) {
    Live& s = live(waiting);
    std::lock_guard lock(s.mutex);
    if (s.phase == Phase::WaitingForPlayers) {
      for (const auto& [role, token] : s.tokens) {
        if (s.handed_out.insert(role).second) return {waiting, token};
      }
    }
  }
  const auto created = create(config);
  Live& s = live(created.id);
  std::lock_guard lock(s.mutex);
  if (created.tokens.empty()) throw ServiceError(Code::Invalid, "lobby configs need a human seat");
  const auto& [role, token] = *created.tokens.begin();
  s.handed_out.insert(role);
  {
    std::lock_guard reg(registry_mutex_);
    if (created.tokens.size() > 1) {
      lobby_[key] = created.id;
    } else {
      lobby_.erase(key);
    }
  }
  return {created.id, token};
}

std::pair<std::string, Role> SessionManager::resolve(const std::string& token) const {
  std::lock_guard lock(registry_mutex_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) throw ServiceError(Code::UnknownToken, "unknown join token");
  return it->second;
}

Attachment SessionManager::attach(const std::string& token, std::int64_t last_seq, EventSink sink) {
  const auto [id, role] = resolve(token);
  Live& s = live(id);
  std::lock_guard lock(s.mutex);
  if (s.phase == Phase::Expired) throw ServiceError(Code::NotLive, "session " + id + " has expired");
  if (s.connected.count(role)) {
    throw ServiceError(Code::AlreadyConnected, std::string(refgame::to_string(role)) + " is already connected");
  }
  std::uint64_t conn;
  {
    std::lock_guard reg(registry_mutex_);
    conn = next_connection_++;
  }
  s.connected[role] = conn;
  s.joined.insert(role);
  s.handed_out.insert(role);
  for (const auto& e : s.session.log) {
    if (e.seq > last_seq) sink(e);
  }
  s.sinks[conn] = std::move(sink);
  advance(s);
  return Attachment{id, role, conn};
}

void SessionManager::detach(const Attachment& a) {
  Live& s = live(a.session_id);
  std::lock_guard lock(s.mutex);
  s.sinks.erase(a.connection);
  auto it = s.connected.find(a.role);
  if (it != s.connected.end() && it->second == a.connection) s.connected.erase(it);
}

const events::TranscriptEvent& SessionManager::append(Live& s, Actor actor, Payload payload) {
  const auto& event = recorder_.record(s.session, actor, std::move(payload));
  s.log << events::serialize(event) << '\n';
  s.log.flush();
  for (auto& [_, sink] : s.sinks) {
    try {
      sink(event);
    } catch (...) {
      // sink errors are ignored
    }
  }
  return event;
}

std::int64_t SessionManager::ingest(const std::string& session_id, Role role, Payload payload) {
  Live& s = live(session_id);
  std::lock_guard lock(s.mutex);
  const Actor actor = events::actor_for(role);
  if (!refgame::is_human(s.session.config.condition, role)) {
    throw ServiceError(Code::Unauthorized, "the " + std::string(refgame::to_string(role)) + " is an agent");
  }
  if (std::holds_alternative<events::RoundStart>(payload) || std::holds_alternative<events::RoundFeedback>(payload) ||
      std::holds_alternative<events::Abort>(payload) || !events::authorized(actor, payload)) {
    throw ServiceError(Code::Unauthorized,
                       std::string(events::payload_type(payload)) + " is not allowed for the " +
                           std::string(refgame::to_string(role)));
  }
  if (std::holds_alternative<events::SurveyResponse>(payload)) {
    throw ServiceError(Code::Invalid, "surveys are submitted through the survey endpoint");
  }
  if (s.phase != Phase::Playing) {
    throw ServiceError(Code::NotLive, "session is " + std::string(to_string(s.phase)));
  }
  if (auto* chat = std::get_if<events::ChatMessage>(&payload)) {
    chat->tags.clear();
    if (chat->text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw ServiceError(Code::Invalid, "chat message text must be non-empty");
    }
  }
  const auto& round = s.session.current_round();
  if (const auto* ack = std::get_if<events::AttentionAck>(&payload)) {
    if (!round.finished() || ack->round != round.round_index || logged<events::AttentionAck>(s.session, actor, ack->round)) {
      throw ServiceError(Code::Rejected, "no attention check pending for round " + std::to_string(ack->round));
    }
  } else if (round.finished()) {
    throw ServiceError(Code::Rejected, "round " + std::to_string(round.round_index) + " is over");
  }
  if (std::holds_alternative<events::Submit>(payload) && !game::can_submit(round)) {
    throw ServiceError(Code::Rejected, "every position must be filled before submitting");
  }

  std::int64_t seq;
  try {
    seq = append(s, actor, std::move(payload)).seq;
  } catch (const GameError& e) {
    throw ServiceError(Code::Rejected, e.what());
  }
  advance(s);
  return seq;
}

std::int64_t SessionManager::submit_survey(const std::string& token, events::SurveyResponse response) {
  const auto [id, role] = resolve(token);
  Live& s = live(id);
  std::lock_guard lock(s.mutex);
  if (s.phase != Phase::Survey) throw ServiceError(Code::NotLive, "the survey is not open");
  const Actor actor = events::actor_for(role);
  if (logged<events::SurveyResponse>(s.session, actor, 0)) {
    throw ServiceError(Code::Rejected, "survey already submitted");
  }
  try {
    response.validate();
  } catch (const std::invalid_argument& e) {
    throw ServiceError(Code::Invalid, e.what());
  }
  const auto seq = append(s, actor, std::move(response)).seq;
  advance(s);
  return seq;
}

void SessionManager::advance(Live& s) {
  for (;;) {
    s.refresh_phase();
    auto& session = s.session;
    if (s.phase == Phase::WaitingForPlayers) {
      if (!s.all_joined()) break;
      append(s, Actor::System, events::RoundStart{1});
      continue;
    }
    if (s.phase != Phase::Playing) break;

    auto& round = session.current_round();
    const int k = round.round_index;
    if (round.submitted && !feedback_logged(session, k)) {
      append(s, Actor::System, events::RoundFeedback{k, *round.result});
      continue;
    }
    if (!round.finished()) {
      const bool all_agents = human_roles(session.config).empty();
      if (all_agents && s.chat_count_in_round() >= session.config.turn_cap) {
        if (game::can_submit(round)) {
          append(s, Actor::System, events::Submit{});
        } else {
          append(s, Actor::System, events::Abort{k, "turn cap reached with an incomplete sequence"});
        }
        continue;
      }
      break;
    }
    if (k >= session.config.n_rounds) break;
    bool progressed = false;
    bool all_acked = true;
    for (Role r : {Role::Director, Role::Matcher}) {
      const Actor a = events::actor_for(r);
      if (logged<events::AttentionAck>(session, a, k)) continue;
      if (s.agents[slot(r)]) {
        append(s, a, events::AttentionAck{k});
        progressed = true;
      } else {
        all_acked = false;
      }
    }
    if (all_acked) {
      append(s, Actor::System, events::RoundStart{k + 1});
      progressed = true;
    }
    if (!progressed) break;
  }
  schedule_agents(s);
}

void SessionManager::schedule_agents(Live& s) {
  for (int i = 0; i < kRoles; ++i) {
    const Role role = role_at(i);
    if (s.agent_scheduled[i] || !s.agent_turn_due(role)) continue;
    {
      std::lock_guard lock(pending_mutex_);
      if (stopping_) return;
      ++pending_agent_turns_;
    }
    s.agent_scheduled[i] = true;
    boost::asio::post(s.strand, [this, id = s.session.id, role] { run_agent_turn(id, role); });
  }
}

void SessionManager::run_agent_turn(const std::string& session_id, Role role) {
  struct Done {
    SessionManager* self;
    ~Done() {
      std::lock_guard lock(self->pending_mutex_);
      --self->pending_agent_turns_;
      self->pending_cv_.notify_all();
    }
  } done{this};

  Live& s = live(session_id);
  game::Session snapshot;
  agents::Participant* agent;
  {
    std::lock_guard lock(s.mutex);
    s.agent_scheduled[slot(role)] = false;
    if (!s.agent_turn_due(role)) return;
    snapshot = s.session;
    agent = s.agents[slot(role)].get();
  }
  const int k = snapshot.current_round().round_index;
  const Actor actor = events::actor_for(role);

  std::optional<agents::Action> action;
  std::string failure;
  try {
    action = agent->act(agents::Observation{snapshot, role});
  } catch (const agents::RetriesExhausted& e) {
    failure = e.what();
  } catch (const agents::ProviderError& e) {
    failure = std::string("provider failure: ") + e.what();
  }

  std::lock_guard lock(s.mutex);
  if (!s.session.has_current_round() || s.session.current_round().round_index != k ||
      s.session.current_round().finished() || s.phase != Phase::Playing) {
    return;
  }
  if (!action) {
    append(s, Actor::System, events::Abort{k, failure});
    advance(s);
    return;
  }
  append(s, actor, events::ChatMessage{action->utterance, action->tags});
  if (action->placement) {
    try {
      append(s, actor, events::Placement{action->placement->tile.index, action->placement->position.index});
    } catch (const GameError&) {
      // placement no longer applicable; the chat message stands
    }
  }
  if (action->submit && game::can_submit(s.session.current_round())) append(s, actor, events::Submit{});
  advance(s);
}

std::vector<events::TranscriptEvent> SessionManager::replay(const std::string& session_id,
                                                            std::int64_t after_seq) const {
  Live& s = live(session_id);
  std::lock_guard lock(s.mutex);
  std::vector<events::TranscriptEvent> out;
  for (const auto& e : s.session.log) {
    if (e.seq > after_seq) out.push_back(e);
  }
  return out;
}

game::Session SessionManager::snapshot(const std::string& session_id) const {
  Live& s = live(session_id);
  std::lock_guard lock(s.mutex);
  return s.session;
}

Phase SessionManager::phase(const std::string& session_id) const {
  Live& s = live(session_id);
  std::lock_guard lock(s.mutex);
  return s.phase;
}

std::vector<std::string> SessionManager::session_ids() const {
  std::lock_guard lock(registry_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::vector<std::string> SessionManager::expire_stale() {
  std::vector<std::string> expired;
  const auto now = clock_.now_ms();
  const auto window = std::chrono::duration_cast<std::chrono::milliseconds>(options_.session_expiry).count();
  for (const auto& id : session_ids()) {
    Live& s = live(id);
    std::lock_guard lock(s.mutex);
    if (s.phase != Phase::WaitingForPlayers || now - s.created_ms < window) continue;
    append(s, Actor::System, events::Abort{0, "expired: not every participant joined"});
    s.refresh_phase();
    expired.push_back(id);
  }
  return expired;
}

void SessionManager::drain() {
  std::unique_lock lock(pending_mutex_);
  pending_cv_.wait(lock, [&] { return pending_agent_turns_ == 0; });
}

void SessionManager::shutdown() {
  {
    std::lock_guard lock(pending_mutex_);
    if (stopping_) return;
    stopping_ = true;
  }
  drain();
  agent_pool_.join();
  for (const auto& id : session_ids()) {
    Live& s = live(id);
    std::lock_guard lock(s.mutex);
    s.log.flush();
    s.log.close();
  }
}

void SessionManager::recover() {
  for (const auto& entry : std::filesystem::directory_iterator(data_dir_)) {
    const auto meta_path = entry.path() / "session.json";
    if (!entry.is_directory() || !std::filesystem::exists(meta_path)) continue;
    std::ifstream meta_in(meta_path, std::ios::binary);
    const auto meta = json::parse(meta_in);
    const auto config = meta.at("config").get<game::SessionConfig>();
    const std::string id = entry.path().filename().string();

    std::vector<events::TranscriptEvent> log;
    std::ifstream in(entry.path() / "events.jsonl", std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        log.push_back(events::deserialize(line));
      } catch (const std::exception&) {
        break;  // torn final write
      }
    }

    auto s = std::make_unique<Live>(agent_pool_);
    s->session = events::rebuild(config, id, log);
    s->created_ms = meta.value("created", std::int64_t{0});
    for (const auto& [role_name, token] : meta.at("tokens").items()) {
      s->tokens[parse_role(role_name)] = token.get<std::string>();
    }
    if (!s->session.rounds.empty()) {
      for (const auto& [role, _] : s->tokens) s->joined.insert(role);
    }
    const auto factory = options_.providers ? options_.providers : agents::mock_providers(config);
    for (int i = 0; i < kRoles; ++i) {
      if (!refgame::is_human(config.condition, role_at(i))) {
        s->agents[i] = agents::make_participant(config, role_at(i), factory);
      }
    }
    // rewrite the log without a torn tail
    {
      std::ofstream out(entry.path() / "events.jsonl", std::ios::binary | std::ios::trunc);
      for (const auto& e : s->session.log) out << events::serialize(e) << '\n';
    }
    s->log.open(entry.path() / "events.jsonl", std::ios::binary | std::ios::app);
    Live* raw = s.get();
    {
      std::lock_guard lock(registry_mutex_);
      for (const auto& [role, token] : s->tokens) tokens_[token] = {id, role};
      sessions_[id] = std::move(s);
    }
    std::lock_guard lock(raw->mutex);
    advance(*raw);
  }
}

}  // namespace refgame::server
