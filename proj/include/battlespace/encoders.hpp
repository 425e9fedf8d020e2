#pragma once

// Numeric views of a board for function approximators:
//   BinaryPacked   - one integer per cell, unitID|orientation|health bit-packed,
//                    two channels per player (ground, air) plus walls and an
//                    all-zero action-history channel.
//   PropertyLayers - one channel per property per player (occupancy,
//                    orientation+1), plus walls and action-history channels.
//   List           - one feature vector per friendly playable unit.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "battlespace/core.hpp"
#include "battlespace/state.hpp"

namespace battlespace {

struct EncodingError : Error {
  using Error::Error;
};

enum class Layout : std::uint8_t { BinaryPacked = 0, PropertyLayers = 1, List = 2 };

inline std::string_view to_string(Layout l) {
  switch (l) {
    case Layout::BinaryPacked: return "binary";
    case Layout::PropertyLayers: return "layers";
    case Layout::List: return "list";
  }
  return "?";
}

inline std::optional<Layout> parse_layout(std::string_view s) {
  for (Layout l : {Layout::BinaryPacked, Layout::PropertyLayers, Layout::List})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

inline constexpr int kUnitIdBits = 5;
inline constexpr int kOrientationBits = 4;
inline constexpr int kHealthBits = 1;
inline constexpr int kPackedBits = kUnitIdBits + kOrientationBits + kHealthBits;

struct CellFields {
  int unitID = 0;
  int orientationIndex = 0;
  int health = 0;
  bool operator==(const CellFields&) const = default;
};

inline int pack_cell(int unitID, int orientationIndex, int health) {
  if (unitID < 0 || unitID >= (1 << kUnitIdBits))
    throw EncodingError("pack_cell: unitID " + std::to_string(unitID) + " does not fit in 5 bits");
  if (orientationIndex < 0 || orientationIndex > kBombOrientation)
    throw EncodingError("pack_cell: orientation index " + std::to_string(orientationIndex) + " out of range");
  if (health != 0 && health != 1) throw EncodingError("pack_cell: health must be 0 or 1");
  return (unitID << (kOrientationBits + kHealthBits)) | (orientationIndex << kHealthBits) | health;
}

inline CellFields unpack_cell(int value) {
  return {(value >> (kOrientationBits + kHealthBits)) & ((1 << kUnitIdBits) - 1),
          (value >> kHealthBits) & ((1 << kOrientationBits) - 1), value & 1};
}

// channels x width x length, channel-major; rows run along width.
struct GridEncoding {
  Layout layout = Layout::BinaryPacked;
  int channels = 0;
  int width = 0;
  int length = 0;
  std::vector<std::int32_t> data;

  GridEncoding() = default;
  GridEncoding(Layout l, int c, int w, int len)
      : layout(l), channels(c), width(w), length(len), data(static_cast<std::size_t>(c * w * len), 0) {}

  std::int32_t& at(int c, int x, int y) { return data[static_cast<std::size_t>((c * width + x) * length + y)]; }
  std::int32_t at(int c, int x, int y) const {
    return data[static_cast<std::size_t>((c * width + x) * length + y)];
  }
};

struct ListEncoding {
  static constexpr int kHeaderSize = 11;
  std::vector<std::vector<int>> perUnit;

  static int vector_length(int visibleRange) {
    const int side = 2 * visibleRange + 1;
    return kHeaderSize + side * side - 1;
  }
};

inline int binary_channel_count(int numPlayers) { return numPlayers * 2 + 2; }

inline int layer_channel_count(const GameConfig& cfg) {
  return cfg.num_players() * (cfg.height > 1 ? 4 : 2) + 2;
}

template <BoardLike Board>
GridEncoding encode_binary(const Board& board) {
  const GameConfig& cfg = board.config;
  const int players = cfg.num_players();
  GridEncoding g(Layout::BinaryPacked, binary_channel_count(players), cfg.width, cfg.length);
  for (const Unit& u : board.units) {
    if (u.projectile()) continue;
    int channel = 2 * players;
    if (u.unitClass != UnitClass::Wall) {
      if (u.playerID < 0 || u.playerID >= players) throw EncodingError("unit without a valid player");
      channel = 2 * u.playerID + (u.position.z > 0 ? 1 : 0);
    }
    if (u.unitID >= (1 << kUnitIdBits))
      throw EncodingError("encode_binary: unitID " + std::to_string(u.unitID) + " exceeds the 5-bit cap");
    g.at(channel, u.position.x, u.position.y) = pack_cell(u.unitID, *orientation_index(u.orientation), u.health);
  }
  return g;
}

template <BoardLike Board>
GridEncoding encode_layers(const Board& board) {
  const GameConfig& cfg = board.config;
  const int players = cfg.num_players();
  const int perPlayer = cfg.height > 1 ? 4 : 2;
  GridEncoding g(Layout::PropertyLayers, layer_channel_count(cfg), cfg.width, cfg.length);
  for (const Unit& u : board.units) {
    if (u.projectile()) continue;
    if (u.unitClass == UnitClass::Wall) {
      g.at(players * perPlayer, u.position.x, u.position.y) = 1;
      continue;
    }
    const int base = u.playerID * perPlayer + (u.position.z > 0 ? 2 : 0);
    g.at(base, u.position.x, u.position.y) = u.health;
    g.at(base + 1, u.position.x, u.position.y) = *orientation_index(u.orientation) + 1;
  }
  return g;
}

// Neighbourhood codes are scanned row-major from the north-west corner of
// the (2r+1)^2 block (north = +y), skipping the centre.
template <BoardLike Board>
ListEncoding encode_list(const Board& board, int forPlayer) {
  const GameConfig& cfg = board.config;
  if (forPlayer < 0 || forPlayer >= cfg.num_players()) throw EncodingError("encode_list: unknown player");
  const int team = cfg.team_of(forPlayer);
  std::vector<std::int8_t> code(static_cast<std::size_t>(cfg.squares_per_layer()), 0);
  for (const Unit& u : board.units) {
    if (u.projectile() || u.ownerID == kNoOwner) continue;
    auto& c = code[static_cast<std::size_t>(u.position.x * cfg.length + u.position.y)];
    c = std::max<std::int8_t>(c, u.ownerID == team ? 1 : 2);
  }
  ListEncoding out;
  for (const Unit& u : board.units) {
    if (!u.playable() || u.ownerID != team) continue;
    std::vector<int> v = {u.ownerID,      u.unitID,       u.unitClass == UnitClass::Flag ? 1 : 0,
                          u.visibleRange, u.health,       u.position.x,
                          u.position.y,   u.position.z,   u.orientation.x,
                          u.orientation.y, u.orientation.z};
    const int r = u.visibleRange;
    for (int dy = r; dy >= -r; --dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int x = u.position.x + dx, y = u.position.y + dy;
        const bool on = x >= 0 && x < cfg.width && y >= 0 && y < cfg.length;
        v.push_back(on ? code[static_cast<std::size_t>(x * cfg.length + y)] : 0);
      }
    }
    out.perUnit.push_back(std::move(v));
  }
  std::sort(out.perUnit.begin(), out.perUnit.end(), [](const auto& a, const auto& b) { return a[1] < b[1]; });
  return out;
}

// Fixed-length vector for dense networks: the first `slots` unit vectors,
// zero-padded.
inline std::vector<float> flatten(const ListEncoding& e, int slots, int vectorLength) {
  std::vector<float> out(static_cast<std::size_t>(slots * vectorLength), 0.0f);
  for (std::size_t i = 0; i < e.perUnit.size() && static_cast<int>(i) < slots; ++i)
    for (std::size_t k = 0; k < e.perUnit[i].size() && static_cast<int>(k) < vectorLength; ++k)
      out[i * static_cast<std::size_t>(vectorLength) + k] = static_cast<float>(e.perUnit[i][k]);
  return out;
}

inline std::vector<float> to_floats(const GridEncoding& g) { return {g.data.begin(), g.data.end()}; }

// ---- serialization ----

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw EncodingError("truncated encoding file");
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
}

}  // namespace detail

inline constexpr char kEncodingMagic[4] = {'B', 'S', 'E', 'N'};
inline constexpr std::uint32_t kEncodingVersion = 1;

// Header: magic, version, layout tag, rank, dims (u32 LE); then int32 LE values row-major.
inline void write_encoding(std::ostream& out, Layout layout, const std::vector<std::uint32_t>& dims,
                           const std::vector<std::int32_t>& values) {
  out.write(kEncodingMagic, 4);
  detail::put_u32(out, kEncodingVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(layout));
  detail::put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) detail::put_u32(out, d);
  for (auto v : values) detail::put_u32(out, static_cast<std::uint32_t>(v));
}

inline void write_encoding(std::ostream& out, const GridEncoding& g) {
  write_encoding(out, g.layout,
                 {static_cast<std::uint32_t>(g.channels), static_cast<std::uint32_t>(g.width),
                  static_cast<std::uint32_t>(g.length)},
                 g.data);
}

inline void write_encoding(std::ostream& out, const ListEncoding& e) {
  const std::size_t len = e.perUnit.empty() ? 0 : e.perUnit.front().size();
  std::vector<std::int32_t> values;
  for (const auto& v : e.perUnit) values.insert(values.end(), v.begin(), v.end());
  write_encoding(out, Layout::List, {static_cast<std::uint32_t>(e.perUnit.size()), static_cast<std::uint32_t>(len)},
                 values);
}

struct EncodedFile {
  Layout layout = Layout::BinaryPacked;
  std::vector<std::uint32_t> dims;
  std::vector<std::int32_t> values;
};

inline EncodedFile read_encoding(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kEncodingMagic, 4) != 0) throw EncodingError("bad encoding magic");
  if (detail::get_u32(in) != kEncodingVersion) throw EncodingError("unsupported encoding version");
  EncodedFile f;
  f.layout = static_cast<Layout>(detail::get_u32(in));
  const std::uint32_t rank = detail::get_u32(in);
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    f.dims.push_back(detail::get_u32(in));
    count *= f.dims.back();
  }
  f.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) f.values.push_back(static_cast<std::int32_t>(detail::get_u32(in)));
  return f;
}

// numpy-style float dump, one block per channel.
inline std::string dump_text(const GridEncoding& g) {
  int widest = 1;
  for (auto v : g.data) widest = std::max(widest, static_cast<int>(std::to_string(v).size()));
  const int cellWidth = widest + 1;
  std::ostringstream out;
  for (int c = 0; c < g.channels; ++c) {
    out << (c == 0 ? "[[" : " [");
    for (int x = 0; x < g.width; ++x) {
      out << (x == 0 ? "[" : "  [");
      for (int y = 0; y < g.length; ++y) {
        const std::string cell = std::to_string(g.at(c, x, y)) + ".";
        if (y > 0) out << ' ';
        out << std::string(static_cast<std::size_t>(cellWidth) - cell.size(), ' ') << cell;
      }
      out << "]";
      if (x + 1 < g.width) out << "\n";
    }
    out << "]";
    out << (c + 1 < g.channels ? "\n\n" : "]\n");
  }
  return out.str();
}

inline std::string dump_text(const ListEncoding& e) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < e.perUnit.size(); ++i) {
    out << (i == 0 ? "[" : " [");
    for (std::size_t k = 0; k < e.perUnit[i].size(); ++k) out << (k ? " " : "") << e.perUnit[i][k];
    out << "]" << (i + 1 < e.perUnit.size() ? "\n" : "");
  }
  out << "]\n";
  return out.str();
}

}  // namespace battlespace
