#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "battlespace/engine.hpp"
#include "test_util.hpp"

namespace battlespace {
namespace {

using namespace battlespace::testing;

TEST(NewGame, ClassicBoardHasWallLineWithMiddleOpening) {
  const GameState s = new_game(GameConfig::classic());
  EXPECT_EQ(s.phase, Phase::Deployment);
  EXPECT_EQ(s.round, 0);
  std::set<int> wallRows;
  for (const Unit& u : s.units) {
    ASSERT_EQ(u.unitClass, UnitClass::Wall);
    EXPECT_EQ(u.position.y, 5);
    EXPECT_EQ(u.position.z, 0);
    EXPECT_EQ(u.unitID, 20 + u.position.x);
    wallRows.insert(u.position.x);
  }
  EXPECT_EQ(wallRows, (std::set<int>{0, 1, 2, 3, 5, 6, 7, 8, 9}));
  EXPECT_EQ(s.nextUnitID, 30);
}

TEST(NewGame, NoWallsMeansEmptyBoard) {
  const GameState s = new_game(small_config());
  EXPECT_TRUE(s.units.empty());
  EXPECT_EQ(s.phase, Phase::Deployment);
  EXPECT_EQ(s.config.squares_per_layer() * s.config.height, 25);
  EXPECT_EQ(s.config.height - 1, 0);  // no air layer
}

TEST(NewGame, InvalidConfigNamesTheField) {
  GameConfig c = small_config();
  c.width = 1;
  try {
    new_game(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos);
  }
  c = small_config();
  c.maxRounds = 0;
  EXPECT_THROW(new_game(c), ConfigError);
  c = small_config();
  c.unitsPerPlayer = {UnitClass::Airplane};
  EXPECT_THROW(new_game(c), ConfigError);
  c = small_config();
  c.unitsPerPlayer = {UnitClass::Missile};
  EXPECT_THROW(new_game(c), ConfigError);
}

std::vector<Placement> classic_roster_p0() {
  return {{UnitClass::Soldier, {0, 2, 0}, {0, 1, 0}},
          {UnitClass::Tank, {2, 1, 0}, {0, 1, 0}},
          {UnitClass::Truck, {3, 4, 0}, {1, 0, 0}},
          {UnitClass::Airplane, {0, 3, 1}, {0, 1, 0}},
          {UnitClass::Flag, {2, 0, 0}, {0, -1, 0}}};
}

TEST(Deploy, ClassicRosterInOwnRegionIsAccepted) {
  const GameState s0 = new_game(GameConfig::classic());
  const GameState s1 = deploy(s0, 0, classic_roster_p0());
  EXPECT_EQ(s1.phase, Phase::Deployment);
  ASSERT_NE(s1.find(0), nullptr);
  EXPECT_EQ(s1.find(0)->unitClass, UnitClass::Soldier);
  EXPECT_EQ(s1.find(3)->unitClass, UnitClass::Airplane);
  EXPECT_EQ(s1.find(4)->unitClass, UnitClass::Flag);
  EXPECT_EQ(s1.find(4)->position, (Vec3{2, 0, 0}));  // flag on the far edge is legal
  EXPECT_THROW(deploy(s1, 0, classic_roster_p0()), RuleError);
}

TEST(Deploy, AllPlayersDeployedStartsPlay) {
  GameConfig c = small_config();
  GameState s = new_game(c);
  s = deploy(s, 0, {{UnitClass::Soldier, {1, 0, 0}, N}});
  EXPECT_EQ(s.phase, Phase::Deployment);
  s = deploy(s, 1, {{UnitClass::Soldier, {1, 4, 0}, S}});
  EXPECT_EQ(s.phase, Phase::Playing);
  EXPECT_EQ(s.find(0)->playerID, 0);
  EXPECT_EQ(s.find(1)->playerID, 1);
  EXPECT_EQ(s.find(1)->ownerID, 1);
}

TEST(Deploy, RejectsWallSquareOutsideRegionDuplicateAndWrongRoster) {
  GameConfig c = small_config();
  c.wallCount = 5;
  const GameState s = new_game(c);
  // y = 2 is the wall line and not part of any region
  EXPECT_THROW(deploy(s, 0, {{UnitClass::Soldier, {0, 2, 0}, N}}), RuleError);
  EXPECT_THROW(deploy(s, 0, {{UnitClass::Soldier, {0, 4, 0}, N}}), RuleError);
  EXPECT_THROW(deploy(s, 0, {{UnitClass::Tank, {0, 0, 0}, N}}), RuleError);
  EXPECT_THROW(deploy(s, 0, {{UnitClass::Soldier, {0, 0, 0}, {0, 0, 0}}}), RuleError);
  c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank};
  const GameState s2 = new_game(c);
  EXPECT_THROW(deploy(s2, 0, {{UnitClass::Soldier, {0, 0, 0}, N}, {UnitClass::Tank, {0, 0, 0}, N}}), RuleError);
  EXPECT_NO_THROW(deploy(s2, 0, {{UnitClass::Tank, {0, 0, 0}, N}, {UnitClass::Soldier, {1, 0, 0}, N}}));
}

TEST(Deploy, RegionsSplitHalvesAndQuadrants) {
  const GameConfig c = GameConfig::classic();
  const Region r0 = deployment_region(c, 0), r1 = deployment_region(c, 1);
  const Region r2 = deployment_region(c, 2), r3 = deployment_region(c, 3);
  EXPECT_EQ(r0.yMin, 0);
  EXPECT_EQ(r0.yMax, 5);
  EXPECT_EQ(r2.yMin, 6);
  EXPECT_EQ(r2.yMax, 11);
  EXPECT_EQ(r0.xMax, 5);
  EXPECT_EQ(r1.xMin, 5);
  EXPECT_EQ(r3.xMin, 5);
}

TEST(LegalActions, LandUnitInCentreHasAllTwelve) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 2, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {0, 0, 0}, N, c)});
  const auto acts = legal_actions(s, 0);
  ASSERT_EQ(acts.size(), 12u);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(acts[static_cast<std::size_t>(i)], action_at(i));
}

TEST(LegalActions, LandUnitFacingOffBoardLosesRamAndAdvance) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 4, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {0, 0, 0}, SW, c)});
  const auto a0 = legal_actions(s, 0);
  EXPECT_EQ(a0.size(), 10u);
  EXPECT_EQ(std::count(a0.begin(), a0.end(), Action::Ram), 0);
  EXPECT_EQ(std::count(a0.begin(), a0.end(), Action::Advance1), 0);
  EXPECT_EQ(std::count(a0.begin(), a0.end(), Action::Shoot), 1);
  EXPECT_EQ(legal_actions(s, 1).size(), 10u);  // corner, facing diagonally out
}

TEST(LegalActions, AirplaneInCentreHasAllTwentyFour) {
  GameConfig c = small_config();
  c.height = 2;
  c.unitsPerPlayer = {UnitClass::Airplane};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Airplane, {2, 2, 1}, N, c),
                                     make_unit(1, 1, UnitClass::Airplane, {0, 0, 1}, N, c)});
  EXPECT_EQ(legal_actions(s, 0).size(), 24u);
  // Corner: offsets with a negative component leave the board.
  // Hand count over the 13 offsets: (0,0),(1,0),(2,0),(0,1),(1,1),(0,2) stay on board.
  EXPECT_EQ(legal_actions(s, 1).size(), 11u + 6u);
}

TEST(LegalActions, RejectsUnknownAndImmovableUnits) {
  GameConfig c = small_config();
  c.wallCount = 5;
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 0, 0}, N, c)});
  EXPECT_THROW(legal_actions(s, 99), RuleError);
  EXPECT_THROW(legal_actions(s, c.first_wall_id()), RuleError);
}

JointMove moves(std::initializer_list<std::tuple<int, int, Action>> entries) {
  JointMove jm;
  for (auto [player, unit, action] : entries) jm[player][unit] = action;
  return jm;
}

TEST(Resolve, RamDestroysEnemyAndRammerEntersSquare) {
  GameConfig c = small_config();
  c.unitsPerPlayer = {UnitClass::Tank, UnitClass::Soldier};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Tank, {2, 1, 0}, N, c),
                                     make_unit(1, 0, UnitClass::Soldier, {0, 0, 0}, N, c),
                                     make_unit(2, 1, UnitClass::Soldier, {2, 2, 0}, E, c),
                                     make_unit(3, 1, UnitClass::Tank, {4, 4, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Ram}, {0, 1, Action::DoNothing},
                                              {1, 2, Action::DoNothing}, {1, 3, Action::DoNothing}}));
  EXPECT_EQ(t.find(2), nullptr);
  EXPECT_EQ(t.find(0)->position, (Vec3{2, 2, 0}));
  EXPECT_EQ(t.phase, Phase::Playing);
}

TEST(Resolve, AllDoNothingOnlyAdvancesRound) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {1, 1, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {3, 3, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::DoNothing}, {1, 1, Action::DoNothing}}));
  EXPECT_EQ(t.units, s.units);
  EXPECT_EQ(t.round, s.round + 1);
  EXPECT_EQ(t.nextUnitID, s.nextUnitID);
}

TEST(Resolve, GroundMissileIsStoppedByWall) {
  GameConfig c = small_config();
  c.wallCount = 5;  // walls along y = 2 except x = 2
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 1, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {0, 3, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Shoot}, {1, 1, Action::Turn90}}));
  EXPECT_NE(t.find(1), nullptr);
  EXPECT_NE(t.find(c.first_wall_id()), nullptr);
  for (const Unit& u : t.units) EXPECT_NE(u.unitClass, UnitClass::Missile);
}

TEST(Resolve, AirMissilePassesOverWalls) {
  GameConfig c = small_config();
  c.height = 2;
  c.wallCount = 5;
  c.unitsPerPlayer = {UnitClass::Airplane};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Airplane, {0, 1, 1}, N, c),
                                     make_unit(1, 1, UnitClass::Airplane, {0, 3, 1}, E, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Shoot}, {1, 1, Action::DoNothing}}));
  EXPECT_EQ(t.find(1), nullptr);
  ASSERT_TRUE(t.result);
  EXPECT_EQ(*t.result, Result::Winner(0));
}

TEST(Resolve, MissileTravelsSpeedSquaresPerRound) {
  const GameConfig c = small_config();
  // enemy three squares ahead: missile enters (2,1), (2,2) this round and hits
  // (2,3) on the first step of the next round
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 0, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {2, 3, 0}, E, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Shoot}, {1, 1, Action::DoNothing}}));
  ASSERT_NE(t.find(1), nullptr);
  const Unit* missile = t.find(2);
  ASSERT_NE(missile, nullptr);
  EXPECT_EQ(missile->unitClass, UnitClass::Missile);
  EXPECT_EQ(missile->position, (Vec3{2, 2, 0}));
  EXPECT_EQ(missile->ownerID, 0);
  const GameState u = resolve_round(t, moves({{0, 0, Action::DoNothing}, {1, 1, Action::DoNothing}}));
  EXPECT_EQ(u.find(1), nullptr);
  EXPECT_EQ(u.find(2), nullptr);
  EXPECT_EQ(*u.result, Result::Winner(0));
}

TEST(Resolve, MissileHitsBeforeTargetMoves) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 0, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {2, 2, 0}, E, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Shoot}, {1, 1, Action::Advance1}}));
  EXPECT_EQ(t.find(1), nullptr);
  EXPECT_EQ(*t.result, Result::Winner(0));
}

TEST(Resolve, OffBoardMissileIsRemoved) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 3, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {0, 0, 0}, N, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Shoot}, {1, 1, Action::DoNothing}}));
  EXPECT_EQ(t.units.size(), 2u);
}

TEST(Resolve, MutualDestructionIsADraw) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 1, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {2, 3, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Shoot}, {1, 1, Action::Shoot}}));
  EXPECT_TRUE(t.units.empty());
  ASSERT_EQ(t.phase, Phase::Finished);
  EXPECT_EQ(*t.result, Result::Draw());
  EXPECT_EQ(reward(t, 0), 0);
  EXPECT_EQ(reward(t, 1), 0);
}

TEST(Resolve, SameTargetSquareBouncesBoth) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {1, 2, 0}, E, c),
                                     make_unit(1, 1, UnitClass::Soldier, {3, 2, 0}, W, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Advance1}, {1, 1, Action::Advance1}}));
  EXPECT_EQ(t.find(0)->position, (Vec3{1, 2, 0}));
  EXPECT_EQ(t.find(1)->position, (Vec3{3, 2, 0}));
}

TEST(Resolve, SwapBouncesBothEvenWhenRamming) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {1, 2, 0}, E, c),
                                     make_unit(1, 1, UnitClass::Soldier, {2, 2, 0}, W, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Ram}, {1, 1, Action::Advance1}}));
  EXPECT_EQ(t.find(0)->position, (Vec3{1, 2, 0}));
  EXPECT_EQ(t.find(1)->position, (Vec3{2, 2, 0}));
}

TEST(Resolve, FollowerEntersVacatedSquareAndBlockedChainStays) {
  GameConfig c = small_config();
  c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank};
  // 0 follows 1 east; 1 moves into an empty square.
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 2, 0}, E, c),
                                     make_unit(1, 0, UnitClass::Tank, {1, 2, 0}, E, c),
                                     make_unit(2, 1, UnitClass::Soldier, {4, 4, 0}, S, c),
                                     make_unit(3, 1, UnitClass::Tank, {3, 2, 0}, N, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Advance1}, {0, 1, Action::Advance1},
                                              {1, 2, Action::DoNothing}, {1, 3, Action::DoNothing}}));
  EXPECT_EQ(t.find(0)->position, (Vec3{1, 2, 0}));
  EXPECT_EQ(t.find(1)->position, (Vec3{2, 2, 0}));
  // next round 1 is blocked by the enemy tank at (3,2), so 0 is blocked too
  const GameState u = resolve_round(t, moves({{0, 0, Action::Advance1}, {0, 1, Action::Advance1},
                                              {1, 2, Action::DoNothing}, {1, 3, Action::DoNothing}}));
  EXPECT_EQ(u.find(0)->position, (Vec3{1, 2, 0}));
  EXPECT_EQ(u.find(1)->position, (Vec3{2, 2, 0}));
  EXPECT_NE(u.find(3), nullptr);
}

TEST(Resolve, RamIntoWallDestroysRammer) {
  GameConfig c = small_config();
  c.wallCount = 5;
  c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 1, 0}, N, c),
                                     make_unit(1, 0, UnitClass::Tank, {1, 1, 0}, N, c),
                                     make_unit(2, 1, UnitClass::Soldier, {4, 4, 0}, S, c),
                                     make_unit(3, 1, UnitClass::Tank, {3, 4, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Ram}, {0, 1, Action::Advance1},
                                              {1, 2, Action::DoNothing}, {1, 3, Action::DoNothing}}));
  EXPECT_EQ(t.find(0), nullptr);
  EXPECT_EQ(t.find(1)->position, (Vec3{1, 1, 0}));  // advancing into a wall just blocks
  EXPECT_NE(t.find(c.first_wall_id()), nullptr);
}

TEST(Resolve, RamIntoFriendBlocksWithoutDamage) {
  GameConfig c = small_config();
  c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 1, 0}, E, c),
                                     make_unit(1, 0, UnitClass::Tank, {1, 1, 0}, N, c),
                                     make_unit(2, 1, UnitClass::Soldier, {4, 4, 0}, S, c),
                                     make_unit(3, 1, UnitClass::Tank, {3, 4, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Ram}, {0, 1, Action::DoNothing},
                                              {1, 2, Action::DoNothing}, {1, 3, Action::DoNothing}}));
  EXPECT_EQ(t.find(0)->position, (Vec3{0, 1, 0}));
  EXPECT_NE(t.find(1), nullptr);
}

TEST(Resolve, BombDestroysGroundUnitBelow) {
  GameConfig c = small_config();
  c.height = 2;
  c.unitsPerPlayer = {UnitClass::Airplane, UnitClass::Soldier};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Airplane, {2, 2, 1}, N, c),
                                     make_unit(1, 0, UnitClass::Soldier, {0, 0, 0}, N, c),
                                     make_unit(2, 1, UnitClass::Airplane, {4, 4, 1}, S, c),
                                     make_unit(3, 1, UnitClass::Soldier, {2, 2, 0}, N, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Bomb}, {0, 1, Action::DoNothing},
                                              {1, 2, Action::DoNothing}, {1, 3, Action::DoNothing}}));
  EXPECT_EQ(t.find(3), nullptr);
  EXPECT_NE(t.find(0), nullptr);
  for (const Unit& u : t.units) EXPECT_NE(u.unitClass, UnitClass::Bomb);
  EXPECT_EQ(t.nextUnitID, s.nextUnitID + 1);
}

TEST(Resolve, AirAdvanceFliesOverWalls) {
  GameConfig c = small_config();
  c.height = 2;
  c.wallCount = 5;
  c.unitsPerPlayer = {UnitClass::Airplane};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Airplane, {0, 1, 1}, N, c),
                                     make_unit(1, 1, UnitClass::Airplane, {4, 4, 1}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Advance0p2}, {1, 1, Action::DoNothing}}));
  EXPECT_EQ(t.find(0)->position, (Vec3{0, 3, 1}));
  EXPECT_EQ(t.find(0)->orientation, N);
}

TEST(Resolve, TurnsRotateClockwise) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {1, 1, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {3, 3, 0}, N, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Turn90}, {1, 1, Action::TurnM135}}));
  EXPECT_EQ(t.find(0)->orientation, E);
  EXPECT_EQ(t.find(1)->orientation, SW);
}

TEST(Resolve, CaptureTheFlagByGroundUnit) {
  GameConfig c = small_config();
  c.mode = Mode::CaptureTheFlag;
  c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Flag};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 3, 0}, N, c),
                                     make_unit(1, 0, UnitClass::Flag, {0, 0, 0}, S, c),
                                     make_unit(2, 1, UnitClass::Soldier, {4, 0, 0}, S, c),
                                     make_unit(3, 1, UnitClass::Flag, {2, 4, 0}, S, c)});
  const GameState t = resolve_round(s, moves({{0, 0, Action::Advance1}, {1, 2, Action::DoNothing}}));
  ASSERT_EQ(t.phase, Phase::Finished);
  EXPECT_EQ(*t.result, Result::Winner(0));
  EXPECT_EQ(reward(t, 0), 1);
  EXPECT_EQ(reward(t, 1), -1);

  c.mode = Mode::Annihilation;
  const GameState s2 = make_state(c, s.units);
  const GameState t2 = resolve_round(s2, moves({{0, 0, Action::Ram}, {1, 2, Action::DoNothing}}));
  EXPECT_EQ(t2.find(0)->position, (Vec3{2, 3, 0}));
  EXPECT_EQ(t2.phase, Phase::Playing);
}

TEST(Resolve, RoundLimitIsADraw) {
  GameConfig c = small_config();
  c.maxRounds = 2;
  GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {1, 1, 0}, N, c),
                               make_unit(1, 1, UnitClass::Soldier, {3, 3, 0}, S, c)});
  const JointMove idle = moves({{0, 0, Action::DoNothing}, {1, 1, Action::DoNothing}});
  s = resolve_round(s, idle);
  EXPECT_EQ(s.phase, Phase::Playing);
  EXPECT_THROW(reward(s, 0), RuleError);
  s = resolve_round(s, idle);
  EXPECT_EQ(s.phase, Phase::Finished);
  EXPECT_EQ(*s.result, Result::Draw());
  EXPECT_THROW(resolve_round(s, idle), RuleError);
}

TEST(Resolve, RejectsIllegalMissingAndForeignActions) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 4, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {3, 3, 0}, S, c)});
  try {
    resolve_round(s, moves({{0, 0, Action::Advance1}, {1, 1, Action::DoNothing}}));
    FAIL();
  } catch (const RuleError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("unit 0"), std::string::npos);
    EXPECT_NE(msg.find("advance1"), std::string::npos);
  }
  EXPECT_THROW(resolve_round(s, moves({{0, 0, Action::DoNothing}})), RuleError);
  EXPECT_THROW(resolve_round(s, moves({{0, 0, Action::Bomb}, {1, 1, Action::DoNothing}})), RuleError);
  EXPECT_THROW(resolve_round(s, moves({{0, 1, Action::DoNothing}, {1, 1, Action::DoNothing}})), RuleError);
  EXPECT_THROW(resolve_round(new_game(c), {}), RuleError);
}

TEST(Observe, DiagonalNeighbourVisibleDistantEnemyHidden) {
  const GameConfig c = small_config();
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 2, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {3, 3, 0}, S, c)});
  const Observation o = observe(s, 0);
  EXPECT_NE(o.find(1), nullptr);
  EXPECT_EQ(o.visibleSquares.size(), 9u);

  const GameState far = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 0, 0}, N, c),
                                       make_unit(1, 1, UnitClass::Soldier, {3, 0, 0}, S, c)});
  const Observation o2 = observe(far, 0);
  EXPECT_EQ(o2.find(1), nullptr);
  EXPECT_NE(o2.find(0), nullptr);
  EXPECT_THROW(observe(far, 5), RuleError);
}

TEST(Observe, RaysFollowOrdinalDirectionsOnly) {
  GameConfig c = small_config();
  c.visibleRangeDefault = 2;
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {2, 2, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {3, 4, 0}, S, c)});
  // (3,4) is a knight's move away: not on any of the eight rays
  EXPECT_EQ(observe(s, 0).find(1), nullptr);
  EXPECT_EQ(observe(s, 0).visibleSquares.size(), 17u);
}

TEST(Observe, TeammatesAlwaysVisible) {
  GameConfig c = GameConfig::classic();
  c.mode = Mode::Annihilation;
  c.unitsPerPlayer = {UnitClass::Soldier};
  const GameState s = make_state(c, {make_unit(0, 0, UnitClass::Soldier, {0, 0, 0}, N, c),
                                     make_unit(1, 1, UnitClass::Soldier, {9, 10, 0}, N, c),
                                     make_unit(2, 2, UnitClass::Soldier, {9, 0, 0}, N, c),
                                     make_unit(3, 3, UnitClass::Soldier, {5, 8, 0}, N, c)});
  const Observation o = observe(s, 0);
  EXPECT_NE(o.find(1), nullptr);
  EXPECT_EQ(o.find(2), nullptr);
  EXPECT_EQ(o.find(3), nullptr);
  // walls are neutral terrain and always shown
  EXPECT_NE(o.find(c.first_wall_id()), nullptr);
}

TEST(RandomBoard, DeterministicAndDistinct) {
  const GameConfig c = small_config();
  const GameState a = random_board(c, 42), b = random_board(c, 42);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.phase, Phase::Playing);
  ASSERT_EQ(a.units.size(), 2u);
  EXPECT_NE(a.units[0].position, a.units[1].position);
  bool differs = false;
  for (std::uint64_t seed = 1; seed < 10; ++seed) differs = differs || !(random_board(c, seed) == a);
  EXPECT_TRUE(differs);
}

TEST(RandomBoard, RejectsOverfullRoster) {
  GameConfig c = small_config(2, 2);
  c.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank, UnitClass::Truck};
  EXPECT_THROW(random_board(c, 1), Error);
}

TEST(RandomBoard, PositionsAreUniform) {
  // Chi-square over the 25 squares for player 0's soldier; 24 dof, the 0.999
  // quantile is 51.18.
  const GameConfig c = small_config();
  constexpr int kSamples = 10000;
  std::vector<int> counts(25, 0), orientCounts(8, 0);
  for (int i = 0; i < kSamples; ++i) {
    const GameState s = random_board(c, static_cast<std::uint64_t>(i));
    const Unit& u = *s.find(0);
    counts[static_cast<std::size_t>(u.position.x * 5 + u.position.y)]++;
    orientCounts[static_cast<std::size_t>(*orientation_index(u.orientation))]++;
  }
  double chi2 = 0;
  const double expected = kSamples / 25.0;
  for (int n : counts) chi2 += (n - expected) * (n - expected) / expected;
  EXPECT_LT(chi2, 51.18);
  double chi2o = 0;  // 7 dof, 0.999 quantile 24.32
  for (int n : orientCounts) chi2o += (n - kSamples / 8.0) * (n - kSamples / 8.0) / (kSamples / 8.0);
  EXPECT_LT(chi2o, 24.32);
}

// ---- property tests over random play ----

JointMove random_joint(const GameState& s, Rng& rng) {
  JointMove jm;
  for (const Unit& u : s.units) {
    if (!u.playable()) continue;
    const auto acts = actions_in(legal_mask(s.config, u));
    jm[u.playerID][u.unitID] = acts[static_cast<std::size_t>(rng.below(static_cast<int>(acts.size())))];
  }
  return jm;
}

std::vector<GameConfig> property_configs() {
  std::vector<GameConfig> out;
  GameConfig a = small_config();
  a.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank, UnitClass::Truck};
  out.push_back(a);
  GameConfig b = small_config();
  b.height = 2;
  b.wallCount = 5;
  b.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Airplane, UnitClass::Flag};
  b.mode = Mode::CaptureTheFlag;
  out.push_back(b);
  GameConfig cl = GameConfig::classic();
  cl.maxRounds = 60;
  out.push_back(cl);
  return out;
}

TEST(EngineProperties, OccupancyConservationTerminationLegality) {
  for (const GameConfig& cfg : property_configs()) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      GameState s = random_board(cfg, seed);
      Rng rng(seed + 1000);
      std::set<int> seen;
      for (const Unit& u : s.units) seen.insert(u.unitID);
      int rounds = 0;
      while (s.phase == Phase::Playing) {
        const JointMove jm = random_joint(s, rng);
        GameState t = resolve_round(s, jm);
        EXPECT_EQ(t, resolve_round(s, jm));  // determinism
        ++rounds;
        std::set<std::tuple<int, int, int>> squares;
        int flagOverlaps = 0;
        for (const Unit& u : t.units) {
          EXPECT_EQ(u.health, 1);
          EXPECT_TRUE(cfg.in_bounds(u.position));
          if (!seen.count(u.unitID)) {
            EXPECT_TRUE(u.projectile());  // only spawns appear
            EXPECT_GE(u.unitID, s.nextUnitID);
          }
          if (u.projectile()) continue;
          if (!squares.insert({u.position.x, u.position.y, u.position.z}).second) ++flagOverlaps;
        }
        // the only permitted overlap is a capture, which ends the game
        if (flagOverlaps) {
          EXPECT_EQ(t.phase, Phase::Finished);
        }
        for (int id : seen)
          if (!s.find(id)) {
            EXPECT_EQ(t.find(id), nullptr);  // no resurrection
          }
        for (const Unit& u : t.units) seen.insert(u.unitID);
        for (const Unit& u : t.units) EXPECT_LT(u.unitID, t.nextUnitID);
        s = std::move(t);
      }
      EXPECT_LE(rounds, cfg.maxRounds);
      EXPECT_LE(s.round, cfg.maxRounds);
      EXPECT_TRUE(s.result.has_value());
    }
  }
}

TEST(EngineProperties, EveryExcludedActionIsRejected) {
  GameConfig cfg = small_config();
  cfg.height = 2;
  cfg.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Airplane};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GameState s = random_board(cfg, seed);
    for (const Unit& u : s.units) {
      const ActionMask legal = legal_mask(cfg, u);
      for (int a = 0; a < kNumActions; ++a) {
        JointMove jm;
        for (const Unit& v : s.units)
          if (v.playable()) jm[v.playerID][v.unitID] = Action::DoNothing;
        jm[u.playerID][u.unitID] = action_at(a);
        if (legal & (ActionMask{1} << a)) {
          EXPECT_NO_THROW(resolve_round(s, jm));
        } else {
          EXPECT_THROW(resolve_round(s, jm), RuleError);
        }
      }
    }
  }
}

// Point reflection through the board centre with the teams swapped. Turning
// is handedness-preserving under a rotation, so turn actions map to
// themselves and air offsets negate.
Unit reflect(const Unit& u, const GameConfig& c) {
  Unit r = u;
  r.position = {c.width - 1 - u.position.x, c.length - 1 - u.position.y, u.position.z};
  if (u.unitClass != UnitClass::Bomb) r.orientation = {-u.orientation.x, -u.orientation.y, 0};
  if (u.ownerID != kNoOwner) {
    r.ownerID = 1 - u.ownerID;
    r.playerID = 1 - u.playerID;
  }
  return r;
}

Action reflect(Action a) {
  if (const auto off = air_offset(a)) {
    for (int i = index_of(Action::Advance0m2); i < kNumActions; ++i) {
      const auto o = air_offset(action_at(i));
      if (o->first == -off->first && o->second == -off->second) return action_at(i);
    }
  }
  return a;
}

std::multiset<std::tuple<int, int, int, int, int, int, int, int, int>> canonical(const GameState& s) {
  std::multiset<std::tuple<int, int, int, int, int, int, int, int, int>> out;
  for (const Unit& u : s.units)
    out.insert({static_cast<int>(u.unitClass), u.ownerID, u.playerID, u.position.x, u.position.y, u.position.z,
                u.orientation.x, u.orientation.y, u.orientation.z});
  return out;
}

TEST(EngineProperties, PointReflectionSymmetry) {
  GameConfig cfg = small_config();
  cfg.height = 2;
  cfg.wallCount = 5;  // symmetric: line y=2 with the opening at x=2
  cfg.mode = Mode::CaptureTheFlag;
  cfg.unitsPerPlayer = {UnitClass::Soldier, UnitClass::Tank, UnitClass::Airplane, UnitClass::Flag};
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    GameState s = random_board(cfg, seed);
    GameState r = s;
    for (Unit& u : r.units) u = reflect(u, cfg);
    Rng rng(seed);
    while (s.phase == Phase::Playing) {
      const JointMove jm = random_joint(s, rng);
      JointMove rj;
      for (const auto& [p, turn] : jm)
        for (const auto& [id, a] : turn) rj[1 - p][id] = reflect(a);
      s = resolve_round(s, jm);
      r = resolve_round(r, rj);
      GameState expect = s;
      for (Unit& u : expect.units) u = reflect(u, cfg);
      ASSERT_EQ(canonical(r), canonical(expect)) << "seed " << seed << " round " << s.round;
      ASSERT_EQ(r.phase, s.phase);
      if (s.result && !s.result->draw) {
        EXPECT_EQ(r.result->winnerTeam, 1 - s.result->winnerTeam);
      }
    }
  }
}

TEST(StateHash, ChangesWithStateAndIsStable) {
  const GameConfig c = small_config();
  const GameState a = random_board(c, 3);
  EXPECT_EQ(state_hash(a), state_hash(random_board(c, 3)));
  GameState b = a;
  b.units[0].orientation = b.units[0].orientation == N ? S : N;
  EXPECT_NE(state_hash(a), state_hash(b));
}

}  // namespace
}  // namespace battlespace
