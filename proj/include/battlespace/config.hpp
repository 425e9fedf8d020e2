#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "battlespace/core.hpp"

namespace battlespace {

struct GameConfig {
  int width = 5;
  int length = 5;
  int height = 1;
  int numTeams = 2;
  int playersPerTeam = 1;
  std::vector<UnitClass> unitsPerPlayer{UnitClass::Soldier};
  // Slots of the centre wall line. The middle slot is left open as the breach.
  int wallCount = 0;
  int maxRounds = 100;
  int missileSpeed = 2;
  Mode mode = Mode::Annihilation;
  int visibleRangeDefault = 1;
  std::uint64_t seed = 0;

  int num_players() const { return numTeams * playersPerTeam; }
  int team_of(int playerID) const { return playerID / playersPerTeam; }
  int roster_size() const { return static_cast<int>(unitsPerPlayer.size()); }
  int squares_per_layer() const { return width * length; }
  int layer_of(UnitClass c) const { return is_air(c) ? height - 1 : 0; }

  bool in_bounds(const Vec3& p) const {
    return p.x >= 0 && p.x < width && p.y >= 0 && p.y < length && p.z >= 0 && p.z < height;
  }

  // Stable id of a player's roster slot; walls follow the player block.
  int slot_unit_id(int playerID, int slot) const { return playerID * roster_size() + slot; }
  int first_wall_id() const { return num_players() * roster_size(); }

  bool operator==(const GameConfig&) const = default;

  // 10x11x2 board, four players in two teams, full roster, ten-slot wall line.
  static GameConfig classic() {
    GameConfig c;
    c.width = 10;
    c.length = 11;
    c.height = 2;
    c.playersPerTeam = 2;
    c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank, UnitClass::Truck, UnitClass::Airplane,
                        UnitClass::Flag};
    c.wallCount = 10;
    c.mode = Mode::CaptureTheFlag;
    return c;
  }
};

inline void validate(const GameConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("invalid config field '" + field + "': " + why);
  };
  if (c.width < 2) fail("width", "must be >= 2");
  if (c.length < 2) fail("length", "must be >= 2");
  if (c.height != 1 && c.height != 2) fail("height", "must be 1 or 2");
  if (c.numTeams != 2) fail("numTeams", "only two-team games are supported");
  if (c.playersPerTeam < 1 || c.playersPerTeam > 2) fail("playersPerTeam", "must be 1 or 2");
  if (c.maxRounds < 1) fail("maxRounds", "must be >= 1");
  if (c.missileSpeed < 1) fail("missileSpeed", "must be >= 1");
  if (c.visibleRangeDefault < 0) fail("visibleRangeDefault", "must be >= 0");
  if (c.wallCount < 0) fail("wallCount", "must be >= 0");
  if (c.wallCount >= c.width * c.length) fail("wallCount", "must be < width*length");
  if (c.wallCount > c.width) fail("wallCount", "wall line cannot exceed the board width");
  if (c.unitsPerPlayer.empty()) fail("unitsPerPlayer", "roster is empty");
  bool playable = false;
  for (UnitClass u : c.unitsPerPlayer) {
    if (!is_deployable(u)) fail("unitsPerPlayer", "class '" + std::string(to_string(u)) + "' is not deployable");
    if (is_air(u) && c.height < 2) fail("unitsPerPlayer", "airplane requires height 2");
    playable = playable || is_playable(u);
  }
  if (!playable) fail("unitsPerPlayer", "roster needs at least one playable unit");
  const int perTeamHalf = (c.length / 2) * c.width / c.playersPerTeam;
  if (c.roster_size() > perTeamHalf) fail("unitsPerPlayer", "roster does not fit in the deployment region");
}

}  // namespace battlespace
