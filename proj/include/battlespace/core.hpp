#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace battlespace {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid GameConfig; the message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

// A request the rules do not allow (wrong phase, illegal action, bad placement).
struct RuleError : Error {
  using Error::Error;
};

// Tensor or network dimensions that do not line up.
struct ShapeError : Error {
  using Error::Error;
};

struct Vec3 {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const Vec3&) const = default;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator*(int k) const { return {x * k, y * k, z * k}; }
};

enum class UnitClass : std::uint8_t { Soldier, Tank, Truck, Airplane, Flag, Wall, Missile, Bomb };

inline constexpr std::array<UnitClass, 8> kAllUnitClasses = {
    UnitClass::Soldier, UnitClass::Tank, UnitClass::Truck,   UnitClass::Airplane,
    UnitClass::Flag,    UnitClass::Wall, UnitClass::Missile, UnitClass::Bomb};

constexpr bool is_playable(UnitClass c) {
  return c == UnitClass::Soldier || c == UnitClass::Tank || c == UnitClass::Truck ||
         c == UnitClass::Airplane;
}
constexpr bool is_projectile(UnitClass c) {
  return c == UnitClass::Missile || c == UnitClass::Bomb;
}
constexpr bool is_air(UnitClass c) { return c == UnitClass::Airplane; }
// Classes a player places during deployment.
constexpr bool is_deployable(UnitClass c) { return is_playable(c) || c == UnitClass::Flag; }

inline std::string_view to_string(UnitClass c) {
  switch (c) {
    case UnitClass::Soldier: return "soldier";
    case UnitClass::Tank: return "tank";
    case UnitClass::Truck: return "truck";
    case UnitClass::Airplane: return "airplane";
    case UnitClass::Flag: return "flag";
    case UnitClass::Wall: return "wall";
    case UnitClass::Missile: return "missile";
    case UnitClass::Bomb: return "bomb";
  }
  return "?";
}

inline std::optional<UnitClass> parse_unit_class(std::string_view s) {
  for (UnitClass c : kAllUnitClasses) {
    if (to_string(c) == s) return c;
  }
  if (s == "plane") return UnitClass::Airplane;
  return std::nullopt;
}

// Orientation dictionary, clockwise from north (+y). Index 8 is reserved for bombs.
inline constexpr std::array<Vec3, 9> kOrientations = {{
    {0, 1, 0}, {1, 1, 0}, {1, 0, 0}, {1, -1, 0}, {0, -1, 0},
    {-1, -1, 0}, {-1, 0, 0}, {-1, 1, 0}, {0, 0, -1},
}};
inline constexpr int kPlanarOrientations = 8;
inline constexpr int kBombOrientation = 8;

constexpr std::optional<int> orientation_index(const Vec3& o) {
  for (int i = 0; i < static_cast<int>(kOrientations.size()); ++i) {
    if (kOrientations[i] == o) return i;
  }
  return std::nullopt;
}

constexpr Vec3 orientation_from_index(int i) { return kOrientations.at(static_cast<std::size_t>(i)); }

// Every distinct action of the rule set, in table order. Land units use the
// first twelve, air units use Shoot..Advance0p2 (24 values).
enum class Action : std::uint8_t {
  Ram,
  Advance1,
  Shoot,
  DoNothing,
  TurnM135,
  TurnM90,
  TurnM45,
  Turn0,
  Turn45,
  Turn90,
  Turn135,
  Turn180,
  Bomb,
  Advance0m2,
  AdvanceM1m1,
  Advance0m1,
  Advance1m1,
  AdvanceM2_0,
  AdvanceM1_0,
  Advance0_0,
  Advance1_0,
  Advance2_0,
  AdvanceM1p1,
  Advance0p1,
  Advance1p1,
  Advance0p2,
};

inline constexpr int kNumActions = 26;
inline constexpr int kLandActionCount = 12;
inline constexpr int kAirActionCount = 24;
inline constexpr int kAirFirstAction = static_cast<int>(Action::Shoot);

constexpr int index_of(Action a) { return static_cast<int>(a); }
constexpr Action action_at(int i) { return static_cast<Action>(i); }

enum class Domain : std::uint8_t { Land, Air };

constexpr Domain domain_of(UnitClass c) { return is_air(c) ? Domain::Air : Domain::Land; }
constexpr int domain_size(Domain d) { return d == Domain::Land ? kLandActionCount : kAirActionCount; }

// Position of `a` inside its domain's enumeration, or -1 when not applicable.
constexpr int domain_index(Domain d, Action a) {
  const int i = index_of(a);
  if (d == Domain::Land) return i < kLandActionCount ? i : -1;
  return i >= kAirFirstAction ? i - kAirFirstAction : -1;
}
constexpr Action domain_action(Domain d, int local) {
  return action_at(d == Domain::Land ? local : local + kAirFirstAction);
}
constexpr bool in_domain(Domain d, Action a) { return domain_index(d, a) >= 0; }

// Rotation in 45-degree steps, positive = clockwise. nullopt for non-turn actions.
constexpr std::optional<int> turn_steps(Action a) {
  switch (a) {
    case Action::TurnM135: return -3;
    case Action::TurnM90: return -2;
    case Action::TurnM45: return -1;
    case Action::Turn0: return 0;
    case Action::Turn45: return 1;
    case Action::Turn90: return 2;
    case Action::Turn135: return 3;
    case Action::Turn180: return 4;
    default: return std::nullopt;
  }
}

// Board offset (dx, dy) of an air advance.
constexpr std::optional<std::pair<int, int>> air_offset(Action a) {
  constexpr std::array<std::pair<int, int>, 13> offsets = {{
      {0, -2}, {-1, -1}, {0, -1}, {1, -1}, {-2, 0}, {-1, 0}, {0, 0},
      {1, 0}, {2, 0}, {-1, 1}, {0, 1}, {1, 1}, {0, 2},
  }};
  const int i = index_of(a) - index_of(Action::Advance0m2);
  if (i < 0 || i >= 13) return std::nullopt;
  return offsets[static_cast<std::size_t>(i)];
}

constexpr bool is_advance(Action a) { return a == Action::Advance1 || air_offset(a).has_value(); }

inline std::string_view to_string(Action a) {
  constexpr std::array<std::string_view, kNumActions> names = {
      "ram",          "advance1",     "shoot",       "doNothing",   "turn-135",
      "turn-90",      "turn-45",      "turn0",       "turn45",      "turn90",
      "turn135",      "turn180",      "bomb",        "advance0,-2", "advance-1,-1",
      "advance0,-1",  "advance1,-1",  "advance-2,0", "advance-1,0", "advance0,0",
      "advance1,0",   "advance2,0",   "advance-1,1", "advance0,1",  "advance1,1",
      "advance0,2"};
  return names[static_cast<std::size_t>(index_of(a))];
}

inline std::optional<Action> parse_action(std::string_view s) {
  for (int i = 0; i < kNumActions; ++i) {
    if (to_string(action_at(i)) == s) return action_at(i);
  }
  return std::nullopt;
}

enum class Mode : std::uint8_t { Annihilation, CaptureTheFlag };

inline std::string_view to_string(Mode m) {
  return m == Mode::Annihilation ? "annihilation" : "capture_the_flag";
}
inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "annihilation") return Mode::Annihilation;
  if (s == "capture_the_flag" || s == "ctf") return Mode::CaptureTheFlag;
  return std::nullopt;
}

}  // namespace battlespace
