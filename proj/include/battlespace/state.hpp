#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "battlespace/config.hpp"
#include "battlespace/core.hpp"

namespace battlespace {

inline constexpr int kNoOwner = -1;

struct Unit {
  int unitID = 0;
  int ownerID = kNoOwner;  // team
  int playerID = kNoOwner;
  UnitClass unitClass = UnitClass::Soldier;
  Vec3 position;
  Vec3 orientation{0, 1, 0};
  int health = 1;
  int visibleRange = 1;

  bool playable() const { return is_playable(unitClass); }
  bool projectile() const { return is_projectile(unitClass); }

  bool operator==(const Unit&) const = default;
};

enum class Phase : std::uint8_t { Deployment, Playing, Finished };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Deployment: return "deployment";
    case Phase::Playing: return "playing";
    case Phase::Finished: return "finished";
  }
  return "?";
}

struct Result {
  bool draw = true;
  int winnerTeam = kNoOwner;

  static Result Draw() { return {}; }
  static Result Winner(int team) { return {false, team}; }
  bool operator==(const Result&) const = default;
};

// One player's turn: unitID -> action.
using TurnMove = std::map<int, Action>;
// A round: playerID -> turn.
using JointMove = std::map<int, TurnMove>;

struct GameState {
  GameConfig config;
  std::vector<Unit> units;  // living units, ascending unitID
  int round = 0;
  Phase phase = Phase::Deployment;
  std::optional<Result> result;
  int nextUnitID = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> deployed;  // per player

  const Unit* find(int unitID) const {
    auto it = std::lower_bound(units.begin(), units.end(), unitID,
                               [](const Unit& u, int id) { return u.unitID < id; });
    return it != units.end() && it->unitID == unitID ? &*it : nullptr;
  }

  bool operator==(const GameState&) const = default;
};

// What one player is allowed to know about a GameState.
struct Observation {
  int forPlayer = 0;
  GameConfig config;
  std::vector<Vec3> visibleSquares;  // sorted
  std::vector<Unit> units;           // ascending unitID
  int round = 0;
  Phase phase = Phase::Deployment;
  std::optional<Result> result;

  bool is_visible(const Vec3& p) const {
    return std::binary_search(visibleSquares.begin(), visibleSquares.end(), p);
  }
  const Unit* find(int unitID) const {
    for (const Unit& u : units)
      if (u.unitID == unitID) return &u;
    return nullptr;
  }
};

// Anything with a board config and a unit roster: GameState or Observation.
template <typename B>
concept BoardLike = requires(const B& b) {
  { b.config } -> std::convertible_to<GameConfig>;
  { b.units } -> std::convertible_to<std::vector<Unit>>;
};

}  // namespace battlespace
