#pragma once

// Rules engine: setup, deployment, move generation, simultaneous resolution,
// visibility and terminal detection. GameState values are never mutated in
// place by the public operations; each returns a successor.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "battlespace/config.hpp"
#include "battlespace/core.hpp"
#include "battlespace/rng.hpp"
#include "battlespace/state.hpp"

namespace battlespace {

using ActionMask = std::uint32_t;

constexpr ActionMask bit(Action a) { return ActionMask{1} << index_of(a); }

inline constexpr ActionMask kLandMask = (ActionMask{1} << kLandActionCount) - 1;
inline constexpr ActionMask kAirMask = ((ActionMask{1} << kNumActions) - 1) & ~(bit(Action::Ram) | bit(Action::Advance1));

struct Placement {
  UnitClass unitClass = UnitClass::Soldier;
  Vec3 position;
  Vec3 orientation{0, 1, 0};
};

// Ground squares (x, y) where a player may deploy; half-open ranges.
struct Region {
  int xMin = 0, xMax = 0;
  int yMin = 0, yMax = 0;

  bool contains(const Vec3& p) const { return p.x >= xMin && p.x < xMax && p.y >= yMin && p.y < yMax; }
  int area() const { return (xMax - xMin) * (yMax - yMin); }
};

// Team halves split along the length axis, each half split along the width
// into one strip per teammate.
inline Region deployment_region(const GameConfig& cfg, int playerID) {
  const int team = cfg.team_of(playerID);
  const int k = playerID % cfg.playersPerTeam;
  const int half = cfg.length / 2;
  Region r;
  r.yMin = team == 0 ? 0 : cfg.length - half;
  r.yMax = team == 0 ? half : cfg.length;
  r.xMin = k * cfg.width / cfg.playersPerTeam;
  r.xMax = (k + 1) * cfg.width / cfg.playersPerTeam;
  return r;
}

namespace detail {

inline int cell_index(const GameConfig& cfg, const Vec3& p) {
  return (p.z * cfg.width + p.x) * cfg.length + p.y;
}

inline void require_player(const GameConfig& cfg, int playerID) {
  if (playerID < 0 || playerID >= cfg.num_players())
    throw RuleError("unknown player " + std::to_string(playerID));
}

}  // namespace detail

inline GameState new_game(const GameConfig& cfg) {
  validate(cfg);
  GameState s;
  s.config = cfg;
  s.seed = cfg.seed;
  s.deployed.assign(static_cast<std::size_t>(cfg.num_players()), 0);
  const int base = cfg.first_wall_id();
  if (cfg.wallCount > 0) {
    const int x0 = (cfg.width - cfg.wallCount) / 2;
    const int gap = (cfg.wallCount - 1) / 2;
    const int y = cfg.length / 2;
    for (int slot = 0; slot < cfg.wallCount; ++slot) {
      if (slot == gap) continue;
      Unit w;
      w.unitID = base + slot;
      w.unitClass = UnitClass::Wall;
      w.position = {x0 + slot, y, 0};
      w.orientation = {0, -1, 0};
      w.visibleRange = 0;
      s.units.push_back(w);
    }
  }
  s.nextUnitID = base + cfg.wallCount;
  return s;
}

inline ActionMask legal_mask(const GameConfig& cfg, const Unit& u) {
  if (!u.playable()) return 0;
  if (!is_air(u.unitClass)) {
    ActionMask m = kLandMask;
    if (!cfg.in_bounds(u.position + u.orientation)) m &= ~(bit(Action::Ram) | bit(Action::Advance1));
    return m;
  }
  ActionMask m = kAirMask;
  for (int i = index_of(Action::Advance0m2); i < kNumActions; ++i) {
    const auto off = air_offset(action_at(i));
    if (!cfg.in_bounds(u.position + Vec3{off->first, off->second, 0})) m &= ~(ActionMask{1} << i);
  }
  if (u.position.z == 0) m &= ~bit(Action::Bomb);
  return m;
}

inline std::vector<Action> actions_in(ActionMask m) {
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(std::popcount(m)));
  for (int i = 0; i < kNumActions; ++i)
    if (m & (ActionMask{1} << i)) out.push_back(action_at(i));
  return out;
}

template <BoardLike Board>
std::vector<Action> legal_actions(const Board& board, int unitID) {
  const Unit* u = board.find(unitID);
  if (u == nullptr) throw RuleError("unknown unit " + std::to_string(unitID));
  if (!u->playable())
    throw RuleError("unit " + std::to_string(unitID) + " (" + std::string(to_string(u->unitClass)) +
                    ") takes no actions");
  return actions_in(legal_mask(board.config, *u));
}

inline GameState deploy(const GameState& state, int playerID, const std::vector<Placement>& placements) {
  const GameConfig& cfg = state.config;
  if (state.phase != Phase::Deployment) throw RuleError("deploy: game is not in the deployment phase");
  detail::require_player(cfg, playerID);
  if (state.deployed[static_cast<std::size_t>(playerID)])
    throw RuleError("deploy: player " + std::to_string(playerID) + " has already deployed");
  if (static_cast<int>(placements.size()) != cfg.roster_size())
    throw RuleError("deploy: expected " + std::to_string(cfg.roster_size()) + " placements, got " +
                    std::to_string(placements.size()));

  const Region region = deployment_region(cfg, playerID);
  std::vector<int> occupied(static_cast<std::size_t>(cfg.squares_per_layer() * cfg.height), 0);
  for (const Unit& u : state.units)
    if (!u.projectile()) occupied[static_cast<std::size_t>(detail::cell_index(cfg, u.position))] = 1;

  std::vector<std::uint8_t> slotUsed(static_cast<std::size_t>(cfg.roster_size()), 0);
  GameState next = state;
  for (const Placement& p : placements) {
    const std::string what = std::string(to_string(p.unitClass)) + " at (" + std::to_string(p.position.x) + "," +
                             std::to_string(p.position.y) + "," + std::to_string(p.position.z) + ")";
    int slot = -1;
    for (int k = 0; k < cfg.roster_size(); ++k) {
      if (!slotUsed[static_cast<std::size_t>(k)] && cfg.unitsPerPlayer[static_cast<std::size_t>(k)] == p.unitClass) {
        slot = k;
        break;
      }
    }
    if (slot < 0) throw RuleError("deploy: " + what + " does not match the roster");
    if (!cfg.in_bounds(p.position)) throw RuleError("deploy: " + what + " is off the board");
    if (p.position.z != cfg.layer_of(p.unitClass)) throw RuleError("deploy: " + what + " is on the wrong layer");
    if (!region.contains(p.position)) throw RuleError("deploy: " + what + " is outside the deployment region");
    auto& occ = occupied[static_cast<std::size_t>(detail::cell_index(cfg, p.position))];
    if (occ) throw RuleError("deploy: " + what + " is already occupied");
    const auto oi = orientation_index(p.orientation);
    if (!oi || *oi >= kPlanarOrientations) throw RuleError("deploy: " + what + " has an invalid orientation");
    occ = 1;
    slotUsed[static_cast<std::size_t>(slot)] = 1;

    Unit u;
    u.unitID = cfg.slot_unit_id(playerID, slot);
    u.ownerID = cfg.team_of(playerID);
    u.playerID = playerID;
    u.unitClass = p.unitClass;
    u.position = p.position;
    u.orientation = p.orientation;
    u.visibleRange = cfg.visibleRangeDefault;
    next.units.push_back(u);
  }
  std::sort(next.units.begin(), next.units.end(), [](const Unit& a, const Unit& b) { return a.unitID < b.unitID; });
  next.deployed[static_cast<std::size_t>(playerID)] = 1;
  if (std::all_of(next.deployed.begin(), next.deployed.end(), [](std::uint8_t d) { return d != 0; }))
    next.phase = Phase::Playing;
  return next;
}

// Uniform placement of a player's roster on free squares of its region.
inline std::vector<Placement> random_deployment(const GameState& state, int playerID, std::uint64_t seed) {
  const GameConfig& cfg = state.config;
  detail::require_player(cfg, playerID);
  const Region region = deployment_region(cfg, playerID);
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(cfg.squares_per_layer() * cfg.height), 0);
  for (const Unit& u : state.units) occupied[static_cast<std::size_t>(detail::cell_index(cfg, u.position))] = 1;
  Rng rng(seed);
  std::vector<Placement> out;
  for (UnitClass c : cfg.unitsPerPlayer) {
    std::vector<Vec3> free;
    const int z = cfg.layer_of(c);
    for (int x = region.xMin; x < region.xMax; ++x)
      for (int y = region.yMin; y < region.yMax; ++y)
        if (!occupied[static_cast<std::size_t>(detail::cell_index(cfg, {x, y, z}))]) free.push_back({x, y, z});
    if (free.empty()) throw RuleError("deployment region is full");
    const Vec3 p = free[static_cast<std::size_t>(rng.below(static_cast<int>(free.size())))];
    occupied[static_cast<std::size_t>(detail::cell_index(cfg, p))] = 1;
    out.push_back({c, p, orientation_from_index(rng.below(kPlanarOrientations))});
  }
  return out;
}

namespace detail {

inline void check_terminal(GameState& s) {
  const GameConfig& cfg = s.config;
  std::vector<int> alive(static_cast<std::size_t>(cfg.numTeams), 0);
  std::vector<int> captured(static_cast<std::size_t>(cfg.numTeams), 0);
  for (const Unit& u : s.units) {
    if (!u.playable()) continue;
    alive[static_cast<std::size_t>(u.ownerID)]++;
    if (cfg.mode != Mode::CaptureTheFlag || u.position.z != 0) continue;
    for (const Unit& f : s.units) {
      if (f.unitClass == UnitClass::Flag && f.ownerID != u.ownerID && f.position == u.position)
        captured[static_cast<std::size_t>(u.ownerID)] = 1;
    }
  }
  auto single = [](const std::vector<int>& v) {
    int team = -1, count = 0;
    for (int t = 0; t < static_cast<int>(v.size()); ++t)
      if (v[static_cast<std::size_t>(t)] > 0) ++count, team = t;
    return std::pair{count, team};
  };
  if (auto [n, team] = single(captured); n > 0) {
    s.result = n == 1 ? Result::Winner(team) : Result::Draw();
  } else if (auto [m, survivor] = single(alive); m <= 1) {
    s.result = m == 1 ? Result::Winner(survivor) : Result::Draw();
  } else if (s.round >= cfg.maxRounds) {
    s.result = Result::Draw();
  }
  if (s.result) s.phase = Phase::Finished;
}

// Resolves one round in place. acts[i] is the action of units[i]; entries for
// non-playable units are ignored. Actions are assumed legal.
inline void apply_round(GameState& s, std::span<const Action> acts) {
  const GameConfig& cfg = s.config;
  std::vector<Unit>& units = s.units;
  const std::size_t n0 = units.size();

  // 1. orientation changes
  for (std::size_t i = 0; i < n0; ++i) {
    if (!units[i].playable()) continue;
    if (const auto k = turn_steps(acts[i])) {
      const int oi = *orientation_index(units[i].orientation);
      units[i].orientation = orientation_from_index(((oi + *k) % 8 + 8) % 8);
    }
  }

  // 2. projectile spawns; missiles start at the shooter and enter the
  // adjacent square on their first step
  std::vector<std::uint8_t> fresh(n0, 0);
  for (std::size_t i = 0; i < n0; ++i) {
    const Unit& shooter = units[i];
    if (!shooter.playable()) continue;
    if (acts[i] == Action::Shoot || acts[i] == Action::Bomb) {
      Unit p;
      p.unitID = s.nextUnitID++;
      p.ownerID = shooter.ownerID;
      p.playerID = shooter.playerID;
      p.visibleRange = 0;
      if (acts[i] == Action::Shoot) {
        p.unitClass = UnitClass::Missile;
        p.position = shooter.position;
        p.orientation = shooter.orientation;
      } else {
        p.unitClass = UnitClass::Bomb;
        p.position = {shooter.position.x, shooter.position.y, shooter.position.z - 1};
        p.orientation = kOrientations[kBombOrientation];
      }
      units.push_back(p);
      fresh.push_back(1);
    }
  }
  const std::size_t n = units.size();
  std::vector<std::uint8_t> dead(n, 0);

  std::vector<int> occ(static_cast<std::size_t>(cfg.squares_per_layer() * cfg.height), -1);
  for (std::size_t i = 0; i < n; ++i)
    if (!units[i].projectile()) occ[static_cast<std::size_t>(cell_index(cfg, units[i].position))] = static_cast<int>(i);
  auto occupant = [&](const Vec3& p) -> int {
    const int o = occ[static_cast<std::size_t>(cell_index(cfg, p))];
    return o >= 0 && !dead[static_cast<std::size_t>(o)] ? o : -1;
  };
  auto indestructible = [&](int i) {
    const UnitClass c = units[static_cast<std::size_t>(i)].unitClass;
    return c == UnitClass::Wall || c == UnitClass::Flag;
  };

  // 3. projectiles
  std::vector<int> missiles;
  for (std::size_t i = 0; i < n; ++i)
    if (units[i].unitClass == UnitClass::Missile) missiles.push_back(static_cast<int>(i));
  std::vector<int> kills;
  auto strike = [&](bool includeFresh) {
    kills.clear();
    for (int m : missiles) {
      const auto mi = static_cast<std::size_t>(m);
      if (dead[mi] || (!includeFresh && fresh[mi])) continue;
      const int o = occupant(units[mi].position);
      if (o < 0) continue;
      dead[mi] = 1;
      if (!indestructible(o)) kills.push_back(o);
    }
    for (int k : kills) dead[static_cast<std::size_t>(k)] = 1;
  };
  strike(false);  // units that walked onto a resting missile
  for (int step = 0; step < cfg.missileSpeed; ++step) {
    for (int m : missiles) {
      Unit& mu = units[static_cast<std::size_t>(m)];
      if (dead[static_cast<std::size_t>(m)]) continue;
      mu.position = mu.position + mu.orientation;
      if (!cfg.in_bounds(mu.position)) dead[static_cast<std::size_t>(m)] = 1;
    }
    strike(true);
  }
  kills.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (units[i].unitClass != UnitClass::Bomb) continue;
    dead[i] = 1;
    const int o = occupant({units[i].position.x, units[i].position.y, 0});
    if (o >= 0 && !indestructible(o)) kills.push_back(o);
  }
  for (int k : kills) dead[static_cast<std::size_t>(k)] = 1;

  // 4. unit movement
  enum : std::uint8_t { kNone, kMoving, kStay };
  std::vector<std::uint8_t> mv(n, kNone);
  std::vector<Vec3> dest(n);
  for (std::size_t i = 0; i < n0; ++i) {
    const Unit& u = units[i];
    if (dead[i] || !u.playable()) continue;
    Vec3 d = u.position;
    if (acts[i] == Action::Advance1 || acts[i] == Action::Ram) {
      d = u.position + u.orientation;
    } else if (const auto off = air_offset(acts[i])) {
      d = u.position + Vec3{off->first, off->second, 0};
    }
    if (d == u.position || !cfg.in_bounds(d)) continue;
    dest[i] = d;
    mv[i] = kMoving;
    const int o = occupant(d);
    if (o >= 0 && units[static_cast<std::size_t>(o)].unitClass == UnitClass::Wall) {
      mv[i] = kStay;
      if (acts[i] == Action::Ram) dead[i] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mv[i] != kMoving) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mv[j] == kNone || dead[j] || !(dest[j] == dest[i])) continue;
      mv[i] = kStay;
      mv[j] = kStay;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mv[i] != kMoving) continue;
    const int o = occupant(dest[i]);
    if (o < 0) continue;
    const auto oi = static_cast<std::size_t>(o);
    if (mv[oi] == kMoving && dest[oi] == units[i].position) {
      mv[i] = kStay;
      mv[oi] = kStay;
    }
  }
  std::vector<std::uint8_t> rammed(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (mv[i] != kMoving) continue;
      const int o = occupant(dest[i]);
      if (o < 0) continue;
      const auto oi = static_cast<std::size_t>(o);
      const Unit& occu = units[oi];
      if (occu.unitClass == UnitClass::Flag) {
        const bool capture = cfg.mode == Mode::CaptureTheFlag && occu.ownerID != units[i].ownerID && dest[i].z == 0;
        if (!capture) mv[i] = kStay, changed = true;
      } else if (mv[oi] != kMoving && !rammed[oi]) {
        if (acts[i] == Action::Ram && occu.playable() && occu.ownerID != units[i].ownerID) {
          rammed[oi] = 1;
        } else {
          mv[i] = kStay;
        }
        changed = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rammed[i]) dead[i] = 1;
    if (mv[i] == kMoving && !dead[i]) units[i].position = dest[i];
  }

  // 5. cleanup and terminal check
  std::size_t w = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!dead[i]) units[w++] = units[i];
  units.resize(w);
  s.round += 1;
  check_terminal(s);
}

}  // namespace detail

inline GameState resolve_round(const GameState& state, const JointMove& joint) {
  if (state.phase != Phase::Playing)
    throw RuleError("resolve_round: game is in the " + std::string(to_string(state.phase)) + " phase");
  for (const auto& [player, turn] : joint) {
    detail::require_player(state.config, player);
    for (const auto& [unitID, action] : turn) {
      const Unit* u = state.find(unitID);
      if (u == nullptr || !u->playable() || u->playerID != player)
        throw RuleError("resolve_round: player " + std::to_string(player) + " cannot command unit " +
                        std::to_string(unitID));
    }
  }
  std::vector<Action> acts(state.units.size(), Action::DoNothing);
  for (std::size_t i = 0; i < state.units.size(); ++i) {
    const Unit& u = state.units[i];
    if (!u.playable()) continue;
    const std::string who = "unit " + std::to_string(u.unitID);
    auto pit = joint.find(u.playerID);
    if (pit == joint.end()) throw RuleError("resolve_round: missing turn for player " + std::to_string(u.playerID));
    auto ait = pit->second.find(u.unitID);
    if (ait == pit->second.end()) throw RuleError("resolve_round: missing action for " + who);
    if (!(legal_mask(state.config, u) & bit(ait->second)))
      throw RuleError("resolve_round: illegal action " + std::string(to_string(ait->second)) + " for " + who);
    acts[i] = ait->second;
  }
  GameState next = state;
  detail::apply_round(next, acts);
  return next;
}

inline int reward(const GameState& state, int teamID) {
  if (state.phase != Phase::Finished || !state.result) throw RuleError("reward: game is not finished");
  if (state.result->draw) return 0;
  return state.result->winnerTeam == teamID ? 1 : -1;
}

inline std::vector<Vec3> visible_squares(const GameConfig& cfg, const std::vector<Unit>& units, int team) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(cfg.squares_per_layer()), 0);
  for (const Unit& u : units) {
    if (u.ownerID != team || u.projectile()) continue;
    seen[static_cast<std::size_t>(u.position.x * cfg.length + u.position.y)] = 1;
    for (int d = 0; d < kPlanarOrientations; ++d) {
      const Vec3 dir = kOrientations[static_cast<std::size_t>(d)];
      for (int k = 1; k <= u.visibleRange; ++k) {
        const Vec3 p{u.position.x + dir.x * k, u.position.y + dir.y * k, 0};
        if (!cfg.in_bounds(p)) break;
        seen[static_cast<std::size_t>(p.x * cfg.length + p.y)] = 1;
      }
    }
  }
  std::vector<Vec3> out;
  for (int z = 0; z < cfg.height; ++z)
    for (int x = 0; x < cfg.width; ++x)
      for (int y = 0; y < cfg.length; ++y)
        if (seen[static_cast<std::size_t>(x * cfg.length + y)]) out.push_back({x, y, z});
  std::sort(out.begin(), out.end());
  return out;
}

inline Observation observe(const GameState& state, int playerID) {
  detail::require_player(state.config, playerID);
  const int team = state.config.team_of(playerID);
  Observation obs;
  obs.forPlayer = playerID;
  obs.config = state.config;
  obs.visibleSquares = visible_squares(state.config, state.units, team);
  for (const Unit& u : state.units) {
    if (u.ownerID == team || u.ownerID == kNoOwner || obs.is_visible(u.position)) obs.units.push_back(u);
  }
  obs.round = state.round;
  obs.phase = state.phase;
  obs.result = state.result;
  return obs;
}

// Mid-game style board: every roster unit on a uniformly chosen free square of
// its layer, anywhere on the board, with a uniform planar orientation.
inline GameState random_board(const GameConfig& cfg, std::uint64_t seed) {
  GameState s = new_game(cfg);
  s.seed = seed;
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(cfg.squares_per_layer() * cfg.height), 0);
  for (const Unit& u : s.units) occupied[static_cast<std::size_t>(detail::cell_index(cfg, u.position))] = 1;
  Rng rng(seed);
  std::vector<Vec3> free;
  for (int p = 0; p < cfg.num_players(); ++p) {
    for (int slot = 0; slot < cfg.roster_size(); ++slot) {
      const UnitClass c = cfg.unitsPerPlayer[static_cast<std::size_t>(slot)];
      const int z = cfg.layer_of(c);
      free.clear();
      for (int x = 0; x < cfg.width; ++x)
        for (int y = 0; y < cfg.length; ++y)
          if (!occupied[static_cast<std::size_t>(detail::cell_index(cfg, {x, y, z}))]) free.push_back({x, y, z});
      if (free.empty()) throw RuleError("random_board: roster larger than the free squares");
      Unit u;
      u.unitID = cfg.slot_unit_id(p, slot);
      u.ownerID = cfg.team_of(p);
      u.playerID = p;
      u.unitClass = c;
      u.position = free[static_cast<std::size_t>(rng.below(static_cast<int>(free.size())))];
      u.orientation = orientation_from_index(rng.below(kPlanarOrientations));
      u.visibleRange = cfg.visibleRangeDefault;
      occupied[static_cast<std::size_t>(detail::cell_index(cfg, u.position))] = 1;
      s.units.push_back(u);
    }
  }
  std::sort(s.units.begin(), s.units.end(), [](const Unit& a, const Unit& b) { return a.unitID < b.unitID; });
  std::fill(s.deployed.begin(), s.deployed.end(), 1);
  s.phase = Phase::Playing;
  return s;
}

// Living units a player commands, ascending unitID.
template <BoardLike Board>
std::vector<int> playable_units(const Board& board, int playerID) {
  std::vector<int> ids;
  for (const Unit& u : board.units)
    if (u.playable() && u.playerID == playerID) ids.push_back(u.unitID);
  return ids;
}

// FNV-1a over the observable parts of a state.
inline std::uint64_t state_hash(const GameState& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(s.round);
  feed(static_cast<int>(s.phase));
  feed(s.result ? (s.result->draw ? -2 : s.result->winnerTeam) : -3);
  for (const Unit& u : s.units) {
    feed(u.unitID);
    feed(u.ownerID);
    feed(u.playerID);
    feed(static_cast<int>(u.unitClass));
    feed(u.position.x), feed(u.position.y), feed(u.position.z);
    feed(u.orientation.x), feed(u.orientation.y), feed(u.orientation.z);
    feed(u.health);
  }
  return h;
}

}  // namespace battlespace
