#pragma once

// JSON forms of configs, units, states and moves. The board snapshot file is
// {config, units:[...], round, phase} plus bookkeeping fields.

#include <fstream>
#include <string>

#include "battlespace/config.hpp"
#include "battlespace/core.hpp"
#include "battlespace/state.hpp"
#include "json.hpp"

namespace battlespace {

using json = nlohmann::json;

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected [x, y, z]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

inline UnitClass unit_class_from_json(const json& j) {
  const auto c = parse_unit_class(j.get<std::string>());
  if (!c) throw Error("unknown unit class '" + j.get<std::string>() + "'");
  return *c;
}

inline Action action_from_json(const json& j) {
  const auto a = parse_action(j.get<std::string>());
  if (!a) throw Error("unknown action '" + j.get<std::string>() + "'");
  return *a;
}

inline json to_json(const GameConfig& c) {
  json roster = json::array();
  for (UnitClass u : c.unitsPerPlayer) roster.push_back(std::string(to_string(u)));
  return {{"width", c.width},
          {"length", c.length},
          {"height", c.height},
          {"numTeams", c.numTeams},
          {"playersPerTeam", c.playersPerTeam},
          {"unitsPerPlayer", roster},
          {"wallCount", c.wallCount},
          {"maxRounds", c.maxRounds},
          {"missileSpeed", c.missileSpeed},
          {"mode", std::string(to_string(c.mode))},
          {"visibleRangeDefault", c.visibleRangeDefault},
          {"seed", c.seed}};
}

// Missing keys keep their defaults, so partial config files are accepted.
inline GameConfig config_from_json(const json& j) {
  GameConfig c;
  if (j.contains("preset") && j["preset"] == "classic") c = GameConfig::classic();
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
  };
  get("width", c.width);
  get("length", c.length);
  get("height", c.height);
  get("numTeams", c.numTeams);
  get("playersPerTeam", c.playersPerTeam);
  get("wallCount", c.wallCount);
  get("maxRounds", c.maxRounds);
  get("missileSpeed", c.missileSpeed);
  get("visibleRangeDefault", c.visibleRangeDefault);
  get("seed", c.seed);
  if (j.contains("unitsPerPlayer")) {
    c.unitsPerPlayer.clear();
    for (const auto& u : j["unitsPerPlayer"]) c.unitsPerPlayer.push_back(unit_class_from_json(u));
  }
  if (j.contains("mode")) {
    const auto m = parse_mode(j["mode"].get<std::string>());
    if (!m) throw ConfigError("invalid config field 'mode'");
    c.mode = *m;
  }
  return c;
}

inline json to_json(const Unit& u) {
  return {{"unitID", u.unitID},
          {"ownerID", u.ownerID},
          {"playerID", u.playerID},
          {"unitClass", std::string(to_string(u.unitClass))},
          {"position", to_json(u.position)},
          {"orientation", to_json(u.orientation)},
          {"health", u.health},
          {"visibleRange", u.visibleRange}};
}

inline Unit unit_from_json(const json& j) {
  Unit u;
  u.unitID = j.at("unitID").get<int>();
  u.ownerID = j.value("ownerID", kNoOwner);
  u.playerID = j.value("playerID", kNoOwner);
  u.unitClass = unit_class_from_json(j.at("unitClass"));
  u.position = vec3_from_json(j.at("position"));
  u.orientation = vec3_from_json(j.at("orientation"));
  u.health = j.value("health", 1);
  u.visibleRange = j.value("visibleRange", 1);
  return u;
}

inline json to_json(const std::optional<Result>& r) {
  if (!r) return nullptr;
  if (r->draw) return {{"draw", true}};
  return {{"draw", false}, {"winnerTeam", r->winnerTeam}};
}

inline std::optional<Result> result_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.at("draw").get<bool>()) return Result::Draw();
  return Result::Winner(j.at("winnerTeam").get<int>());
}

inline Phase phase_from_json(const json& j) {
  const auto s = j.get<std::string>();
  for (Phase p : {Phase::Deployment, Phase::Playing, Phase::Finished})
    if (to_string(p) == s) return p;
  throw Error("unknown phase '" + s + "'");
}

inline json units_to_json(const std::vector<Unit>& units) {
  json arr = json::array();
  for (const Unit& u : units) arr.push_back(to_json(u));
  return arr;
}

inline json to_json(const GameState& s) {
  json deployed = json::array();
  for (auto d : s.deployed) deployed.push_back(d != 0);
  return {{"config", to_json(s.config)},
          {"units", units_to_json(s.units)},
          {"round", s.round},
          {"phase", std::string(to_string(s.phase))},
          {"result", to_json(s.result)},
          {"nextUnitID", s.nextUnitID},
          {"seed", s.seed},
          {"deployed", deployed}};
}

inline GameState state_from_json(const json& j) {
  GameState s;
  s.config = config_from_json(j.at("config"));
  validate(s.config);
  for (const auto& u : j.at("units")) s.units.push_back(unit_from_json(u));
  std::sort(s.units.begin(), s.units.end(), [](const Unit& a, const Unit& b) { return a.unitID < b.unitID; });
  s.round = j.value("round", 0);
  s.phase = j.contains("phase") ? phase_from_json(j["phase"]) : Phase::Playing;
  s.result = j.contains("result") ? result_from_json(j["result"]) : std::nullopt;
  int next = s.config.first_wall_id() + s.config.wallCount;
  for (const Unit& u : s.units) next = std::max(next, u.unitID + 1);
  s.nextUnitID = std::max(next, j.value("nextUnitID", 0));
  s.seed = j.value("seed", s.config.seed);
  s.deployed.assign(static_cast<std::size_t>(s.config.num_players()), s.phase != Phase::Deployment);
  if (j.contains("deployed")) {
    const auto& d = j["deployed"];
    for (std::size_t i = 0; i < d.size() && i < s.deployed.size(); ++i) s.deployed[i] = d[i].get<bool>();
  }
  return s;
}

inline json to_json(const Observation& o) {
  json squares = json::array();
  for (const Vec3& v : o.visibleSquares) squares.push_back(to_json(v));
  return {{"forPlayer", o.forPlayer},
          {"config", to_json(o.config)},
          {"visibleSquares", squares},
          {"units", units_to_json(o.units)},
          {"round", o.round},
          {"phase", std::string(to_string(o.phase))},
          {"result", to_json(o.result)}};
}

inline Observation observation_from_json(const json& j) {
  Observation o;
  o.forPlayer = j.at("forPlayer").get<int>();
  o.config = config_from_json(j.at("config"));
  for (const auto& v : j.at("visibleSquares")) o.visibleSquares.push_back(vec3_from_json(v));
  std::sort(o.visibleSquares.begin(), o.visibleSquares.end());
  for (const auto& u : j.at("units")) o.units.push_back(unit_from_json(u));
  o.round = j.value("round", 0);
  o.phase = phase_from_json(j.at("phase"));
  o.result = j.contains("result") ? result_from_json(j["result"]) : std::nullopt;
  return o;
}

inline json to_json(const TurnMove& t) {
  json j = json::object();
  for (const auto& [id, a] : t) j[std::to_string(id)] = std::string(to_string(a));
  return j;
}

inline TurnMove turn_from_json(const json& j) {
  TurnMove t;
  for (const auto& [k, v] : j.items()) t[std::stoi(k)] = action_from_json(v);
  return t;
}

inline json to_json(const JointMove& jm) {
  json j = json::object();
  for (const auto& [p, t] : jm) j[std::to_string(p)] = to_json(t);
  return j;
}

inline JointMove joint_from_json(const json& j) {
  JointMove jm;
  for (const auto& [k, v] : j.items()) jm[std::stoi(k)] = turn_from_json(v);
  return jm;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return json::parse(in);
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace battlespace
