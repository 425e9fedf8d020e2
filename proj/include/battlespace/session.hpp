#pragma once

// Game sessions and the message protocol, independent of the transport.
// Every message is {type, sessionID, payload}; handlers return the messages
// to deliver, addressed by connection.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "battlespace/agents.hpp"
#include "battlespace/analysis.hpp"
#include "battlespace/engine.hpp"
#include "battlespace/snapshot.hpp"

namespace battlespace {

using ConnectionId = std::uint64_t;

struct Outbound {
  ConnectionId to = 0;
  json message;
};

struct ProtocolError : Error {
  std::string code;
  ProtocolError(std::string c, const std::string& what) : Error(what), code(std::move(c)) {}
};

inline json make_message(const std::string& type, const std::string& sessionID, json payload) {
  return {{"type", type}, {"sessionID", sessionID}, {"payload", std::move(payload)}};
}

inline json error_message(const std::string& sessionID, const std::string& code, const std::string& text,
                          const std::string& inReplyTo) {
  return make_message("error", sessionID, {{"code", code}, {"message", text}, {"inReplyTo", inReplyTo}});
}

// Checks one player's complete turn against the current state.
inline void validate_turn(const GameState& s, int playerID, const TurnMove& turn) {
  for (const auto& [id, a] : turn) {
    const Unit* u = s.find(id);
    if (u == nullptr || !u->playable() || u->playerID != playerID)
      throw ProtocolError("illegal_turn", "unit " + std::to_string(id) + " is not yours to command");
    if (!(legal_mask(s.config, *u) & bit(a)))
      throw ProtocolError("illegal_turn", "action " + std::string(to_string(a)) + " is illegal for unit " + std::to_string(id));
  }
  for (int id : playable_units(s, playerID))
    if (!turn.count(id)) throw ProtocolError("illegal_turn", "missing action for unit " + std::to_string(id));
}

// Full state consistent with what `playerID` sees: every enemy roster unit
// that is out of sight is placed uniformly on a free square of its layer that
// the player cannot see, with a uniform orientation. Unseen projectiles are
// dropped.
inline GameState determinize(const GameState& truth, int playerID, std::uint64_t seed) {
  const Observation obs = observe(truth, playerID);
  const GameConfig& cfg = truth.config;
  GameState s = truth;
  s.units = obs.units;
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(cfg.squares_per_layer() * cfg.height), 0);
  for (const Unit& u : s.units)
    if (!u.projectile()) taken[static_cast<std::size_t>(detail::cell_index(cfg, u.position))] = 1;
  Rng rng(seed);
  std::vector<Vec3> free;
  const int team = cfg.team_of(playerID);
  for (int p = 0; p < cfg.num_players(); ++p) {
    if (cfg.team_of(p) == team) continue;
    for (int slot = 0; slot < cfg.roster_size(); ++slot) {
      const int id = cfg.slot_unit_id(p, slot);
      if (obs.find(id) != nullptr) continue;
      const UnitClass c = cfg.unitsPerPlayer[static_cast<std::size_t>(slot)];
      const int z = cfg.layer_of(c);
      free.clear();
      for (int x = 0; x < cfg.width; ++x)
        for (int y = 0; y < cfg.length; ++y) {
          const Vec3 v{x, y, z};
          if (!taken[static_cast<std::size_t>(detail::cell_index(cfg, v))] && !obs.is_visible(v)) free.push_back(v);
        }
      if (free.empty()) continue;
      Unit u;
      u.unitID = id;
      u.ownerID = cfg.team_of(p);
      u.playerID = p;
      u.unitClass = c;
      u.position = free[static_cast<std::size_t>(rng.below(static_cast<int>(free.size())))];
      u.orientation = orientation_from_index(rng.below(kPlanarOrientations));
      u.visibleRange = cfg.visibleRangeDefault;
      taken[static_cast<std::size_t>(detail::cell_index(cfg, u.position))] = 1;
      s.units.push_back(u);
    }
  }
  std::sort(s.units.begin(), s.units.end(), [](const Unit& a, const Unit& b) { return a.unitID < b.unitID; });
  return s;
}

struct Seat {
  bool human = true;
  std::string agent;                 // descriptor when not human
  std::optional<ConnectionId> conn;  // bound human connection
  bool everJoined = false;
};

struct Session {
  std::string id;
  GameState state;
  std::map<int, Seat> seats;
  std::map<int, std::unique_ptr<Agent>> agents;
  std::map<int, TurnMove> pending;
  GameLog log;
  bool paused = false;
  std::uint64_t seed = 0;
};

struct ServerOptions {
  long defaultHintRollouts = 200;
  long maxHintRollouts = 20000;
  std::string logDir;  // completed games are written here when set
};

class SessionManager {
 public:
  explicit SessionManager(ServerOptions opt = {}, std::uint64_t seed = 1) : opt_(std::move(opt)), seed_(seed) {}

  // seats: playerID -> "human" or an agent descriptor. Agents deploy at once.
  std::string create_session(const GameConfig& cfg, const std::map<int, std::string>& seats) {
    std::lock_guard lock(mu_);
    validate(cfg);
    if (cfg.numTeams != 2) throw ConfigError("sessions support exactly two teams");
    auto s = std::make_unique<Session>();
    s->seed = derive_seed(seed_, ++counter_);
    s->id = "s" + hex_hash(s->seed).substr(0, 12);
    s->state = new_game(cfg);
    s->state.seed = s->seed;
    for (int p = 0; p < cfg.num_players(); ++p) {
      auto it = seats.find(p);
      const std::string kind = it == seats.end() ? "human" : it->second;
      Seat seat;
      if (kind != "human") {
        seat.human = false;
        seat.agent = kind;
        s->agents[p] = make_agent(kind);
      }
      s->seats[p] = seat;
    }
    for (const auto& [p, seat] : s->seats) {
      if (seat.human) continue;
      s->state = deploy(s->state, p, random_deployment(s->state, p, derive_seed(s->seed, 100 + static_cast<std::uint64_t>(p))));
    }
    s->log.config = cfg;
    s->log.seed = s->seed;
    for (const auto& [p, seat] : s->seats) s->log.agents[p] = seat.human ? "human" : seat.agent;
    const std::string id = s->id;
    maybe_start(*s, Phase::Deployment);
    sessions_[id] = std::move(s);
    return id;
  }

  std::vector<Outbound> handle(ConnectionId conn, const json& msg) {
    std::string type, sid;
    try {
      type = msg.at("type").get<std::string>();
      sid = msg.value("sessionID", "");
    } catch (const json::exception&) {
      return {{conn, error_message("", "bad_message", "message needs a string 'type'", "")}};
    }
    const json payload = msg.value("payload", json::object());
    try {
      if (type == "create_session") return on_create(conn, payload);
      if (type == "request_hint") return on_hint(conn, sid, payload);
      std::lock_guard lock(mu_);
      if (type == "join") return on_join(conn, sid, payload);
      if (type == "deploy") return on_deploy(conn, sid, payload);
      if (type == "submit_turn") return on_submit(conn, sid, payload);
      if (type == "resign") return on_resign(conn, sid);
      throw ProtocolError("unknown_type", "unknown message type '" + type + "'");
    } catch (const ProtocolError& e) {
      return {{conn, error_message(sid, e.code, e.what(), type)}};
    } catch (const json::exception& e) {
      return {{conn, error_message(sid, "bad_message", e.what(), type)}};
    } catch (const Error& e) {
      return {{conn, error_message(sid, "rejected", e.what(), type)}};
    }
  }

  std::vector<Outbound> disconnect(ConnectionId conn) {
    std::lock_guard lock(mu_);
    std::vector<Outbound> out;
    for (auto& [id, s] : sessions_) {
      for (auto& [p, seat] : s->seats) {
        if (seat.conn != conn) continue;
        seat.conn.reset();
        if (s->state.phase != Phase::Finished) s->paused = true;
        broadcast_info(*s, out);
      }
    }
    return out;
  }

  // Read-only views for tests and tooling.
  std::optional<GameState> state(const std::string& sid) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return std::nullopt;
    return it->second->state;
  }

  std::optional<std::map<int, TurnMove>> pending(const std::string& sid) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return std::nullopt;
    return it->second->pending;
  }

  bool paused(const std::string& sid) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(sid);
    return it != sessions_.end() && it->second->paused;
  }

 private:
  Session& find(const std::string& sid) {
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) throw ProtocolError("unknown_session", "no session '" + sid + "'");
    return *it->second;
  }

  // The seat bound to `conn` in session `s`.
  int seat_of(Session& s, ConnectionId conn) {
    for (const auto& [p, seat] : s.seats)
      if (seat.conn == conn) return p;
    throw ProtocolError("not_joined", "join the session first");
  }

  std::vector<Outbound> on_create(ConnectionId conn, const json& payload) {
    const GameConfig cfg = config_from_json(payload.value("config", json::object()));
    std::map<int, std::string> seats;
    if (payload.contains("seats"))
      for (const auto& [p, kind] : payload["seats"].items()) seats[std::stoi(p)] = kind.get<std::string>();
    const std::string id = create_session(cfg, seats);
    std::lock_guard lock(mu_);
    Session& s = find(id);
    return {{conn, make_message("session_created", id, {{"config", to_json(cfg)}, {"seats", seats_json(s)}})}};
  }

  std::vector<Outbound> on_join(ConnectionId conn, const std::string& sid, const json& payload) {
    Session& s = find(sid);
    int player = -1;
    if (payload.contains("playerID")) {
      player = payload["playerID"].get<int>();
    } else {
      for (const auto& [p, seat] : s.seats)
        if (seat.human && !seat.conn && !seat.everJoined) {
          player = p;
          break;
        }
    }
    auto it = s.seats.find(player);
    if (it == s.seats.end() || !it->second.human) throw ProtocolError("no_seat", "no open human seat");
    Seat& seat = it->second;
    if (seat.conn) throw ProtocolError("seat_taken", "seat " + std::to_string(player) + " is occupied");
    if (!seat.everJoined && s.state.phase != Phase::Deployment)
      throw ProtocolError("late_join", "the game has left the deployment phase");
    for (const auto& [p, other] : s.seats)
      if (other.conn == conn) throw ProtocolError("already_joined", "connection already holds a seat");
    seat.conn = conn;
    seat.everJoined = true;
    s.paused = std::any_of(s.seats.begin(), s.seats.end(),
                           [](const auto& kv) { return kv.second.human && kv.second.everJoined && !kv.second.conn; });
    std::vector<Outbound> out;
    broadcast_info(s, out);
    send_phase_view(s, player, out);
    if (s.state.phase == Phase::Playing) try_resolve(s, out);
    return out;
  }

  std::vector<Outbound> on_deploy(ConnectionId conn, const std::string& sid, const json& payload) {
    Session& s = find(sid);
    const int player = seat_of(s, conn);
    if (s.state.phase != Phase::Deployment) throw ProtocolError("wrong_phase", "deployment is over");
    const Phase before = s.state.phase;
    std::vector<Placement> placements;
    for (const auto& p : payload.at("placements"))
      placements.push_back({unit_class_from_json(p.at("unitClass")), vec3_from_json(p.at("position")),
                            vec3_from_json(p.at("orientation"))});
    try {
      s.state = deploy(s.state, player, placements);
    } catch (const Error& e) {
      throw ProtocolError("illegal_deployment", e.what());
    }
    std::vector<Outbound> out;
    out.push_back({conn, make_message("deployment_accepted", s.id, {{"playerID", player}})});
    const bool started = maybe_start(s, before);
    for (const auto& [p, seat] : s.seats) {
      if (!seat.conn) continue;
      if (started) send_observation(s, p, out);
      else if (s.state.phase == Phase::Deployment && cfg_team(s, p) == cfg_team(s, player) && p != player)
        send_phase_view(s, p, out);
    }
    return out;
  }

  std::vector<Outbound> on_submit(ConnectionId conn, const std::string& sid, const json& payload) {
    Session& s = find(sid);
    const int player = seat_of(s, conn);
    if (s.state.phase != Phase::Playing) throw ProtocolError("wrong_phase", "the game is not in play");
    const TurnMove turn = turn_from_json(payload.at("turn"));
    validate_turn(s.state, player, turn);
    s.pending[player] = turn;
    std::vector<Outbound> out;
    out.push_back({conn, make_message("turn_accepted", s.id, {{"playerID", player}, {"round", s.state.round}})});
    try_resolve(s, out);
    return out;
  }

  std::vector<Outbound> on_resign(ConnectionId conn, const std::string& sid) {
    Session& s = find(sid);
    const int player = seat_of(s, conn);
    if (s.state.phase == Phase::Finished) throw ProtocolError("wrong_phase", "the game is over");
    s.state.result = Result::Winner(1 - s.state.config.team_of(player));
    s.state.phase = Phase::Finished;
    std::vector<Outbound> out;
    finish(s, out);
    return out;
  }

  // Snapshot under the lock, search without it.
  std::vector<Outbound> on_hint(ConnectionId conn, const std::string& sid, const json& payload) {
    GameState snapshot;
    int player = -1;
    std::uint64_t seed = 0;
    long rollouts = payload.value("rollouts", opt_.defaultHintRollouts);
    {
      std::lock_guard lock(mu_);
      Session& s = find(sid);
      player = seat_of(s, conn);
      if (s.state.phase != Phase::Playing) throw ProtocolError("wrong_phase", "hints are available during play");
      if (rollouts < 1 || rollouts > opt_.maxHintRollouts)
        throw ProtocolError("bad_rollouts", "rollouts must lie in [1, " + std::to_string(opt_.maxHintRollouts) + "]");
      snapshot = s.state;
      seed = derive_seed(s.seed, 0x4000000 + static_cast<std::uint64_t>(s.state.round) * 64 + static_cast<std::uint64_t>(player));
    }
    const GameState world = determinize(snapshot, player, seed);
    MctsOptions o;
    o.rollouts = rollouts;
    o.seed = derive_seed(seed, 1);
    const RootStats stats = mcts_root(world, player, o);
    json payloadOut = to_json(stats);
    payloadOut["round"] = snapshot.round;
    payloadOut["rollouts"] = rollouts;
    payloadOut["determinized"] = true;
    return {{conn, make_message("hint_response", sid, payloadOut)}};
  }

  static int cfg_team(const Session& s, int p) { return s.state.config.team_of(p); }

  json seats_json(const Session& s) const {
    json seats = json::object();
    for (const auto& [p, seat] : s.seats)
      seats[std::to_string(p)] = {{"kind", seat.human ? "human" : seat.agent}, {"connected", seat.human ? seat.conn.has_value() : true}};
    return seats;
  }

  void broadcast_info(Session& s, std::vector<Outbound>& out) {
    for (const auto& [p, seat] : s.seats) {
      if (!seat.conn) continue;
      out.push_back({*seat.conn, make_message("session_info", s.id,
                                              {{"playerID", p},
                                               {"config", to_json(s.state.config)},
                                               {"seats", seats_json(s)},
                                               {"phase", std::string(to_string(s.state.phase))},
                                               {"round", s.state.round},
                                               {"paused", s.paused}})});
    }
  }

  void send_phase_view(Session& s, int p, std::vector<Outbound>& out) {
    if (s.state.phase == Phase::Deployment) {
      const Region r = deployment_region(s.state.config, p);
      json roster = json::array();
      for (UnitClass c : s.state.config.unitsPerPlayer) roster.push_back(std::string(to_string(c)));
      json placed = json::array();
      for (const Unit& u : s.state.units)
        if (u.ownerID == cfg_team(s, p) && u.playerID != kNoOwner) placed.push_back(to_json(u));
      out.push_back({*s.seats[p].conn, make_message("deployment_prompt", s.id,
                                                    {{"playerID", p},
                                                     {"region", {{"xMin", r.xMin}, {"xMax", r.xMax}, {"yMin", r.yMin}, {"yMax", r.yMax}}},
                                                     {"roster", roster},
                                                     {"deployed", s.state.deployed[static_cast<std::size_t>(p)] != 0},
                                                     {"teamUnits", placed}})});
    } else if (s.state.phase == Phase::Playing) {
      send_observation(s, p, out);
    } else {
      send_game_over(s, p, out);
    }
  }

  void send_observation(Session& s, int p, std::vector<Outbound>& out) {
    const Observation obs = observe(s.state, p);
    json legal = json::object();
    for (int id : playable_units(s.state, p)) {
      json acts = json::array();
      for (Action a : legal_actions(s.state, id)) acts.push_back(std::string(to_string(a)));
      legal[std::to_string(id)] = acts;
    }
    out.push_back({*s.seats[p].conn, make_message("observation", s.id, {{"observation", to_json(obs)}, {"legalActions", legal}})});
  }

  void send_game_over(Session& s, int p, std::vector<Outbound>& out) {
    out.push_back({*s.seats[p].conn,
                   make_message("game_over", s.id,
                                {{"result", to_json(s.state.result)},
                                 {"reward", reward(s.state, cfg_team(s, p))},
                                 {"round", s.state.round},
                                 {"observation", to_json(observe(s.state, p))}})});
  }

  // Records the opening position once deployment completes.
  bool maybe_start(Session& s, Phase before) {
    if (before != Phase::Deployment || s.state.phase != Phase::Playing) return false;
    s.log.initialHash = state_hash(s.state);
    s.log.initialState = to_json(s.state);
    return true;
  }

  // Resolves once every living human player has a pending turn.
  void try_resolve(Session& s, std::vector<Outbound>& out) {
    if (s.paused) return;
    for (const auto& [p, seat] : s.seats)
      if (seat.human && !playable_units(s.state, p).empty() && !s.pending.count(p)) return;
    JointMove jm;
    for (const auto& [p, seat] : s.seats) {
      if (playable_units(s.state, p).empty()) continue;
      if (seat.human) {
        jm[p] = s.pending[p];
      } else {
        const auto moveSeed = derive_seed(s.seed, static_cast<std::uint64_t>(s.state.round * s.state.config.num_players() + p + 1));
        jm[p] = s.agents[p]->decide(s.state, p, moveSeed);
      }
    }
    s.state = resolve_round(s.state, jm);
    s.pending.clear();
    s.log.rounds.push_back({s.state.round, jm, state_hash(s.state)});
    if (s.state.phase == Phase::Finished) {
      finish(s, out);
      return;
    }
    for (const auto& [p, seat] : s.seats)
      if (seat.conn) send_observation(s, p, out);
  }

  void finish(Session& s, std::vector<Outbound>& out) {
    s.pending.clear();
    s.paused = false;
    s.log.result = s.state.result;
    for (const auto& [p, seat] : s.seats)
      if (seat.conn) send_game_over(s, p, out);
    if (!opt_.logDir.empty()) {
      std::filesystem::create_directories(opt_.logDir);
      std::ofstream f(std::filesystem::path(opt_.logDir) / (s.id + ".jsonl"));
      f << to_jsonl(s.log);
    }
  }

  ServerOptions opt_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
};

}  // namespace battlespace
