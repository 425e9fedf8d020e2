#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "battlespace/agents.hpp"
#include "battlespace/engine.hpp"
#include "battlespace/snapshot.hpp"

namespace battlespace {

// ---- state-space size ----

struct StateSpaceEstimate {
  long combinationsPerSquare = 0;
  double log10States = 0;
  long totalUnits = 0;

  // d.ddde+N rendering of 10^log10States
  std::string scientific(int digits = 1) const {
    const double exponent = std::floor(log10States);
    const double mantissa = std::pow(10.0, log10States - exponent);
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(digits);
    out << mantissa << "e" << static_cast<long>(exponent);
    return out.str();
  }
};

// Every square holds one of 8 orientations of the 20 deployable units or a
// missile, or one of the bombs or walls.
inline StateSpaceEstimate state_space_estimate(long missiles, long bombs, long walls, long squares) {
  if (missiles < 0 || bombs < 0 || walls < 0 || squares < 0) throw ConfigError("state space counts must be non-negative");
  constexpr long kDeployable = 20;
  StateSpaceEstimate e;
  e.combinationsPerSquare = 8 * (kDeployable + missiles) + bombs + walls;
  e.log10States = static_cast<double>(squares) * std::log10(static_cast<double>(e.combinationsPerSquare));
  e.totalUnits = kDeployable + missiles + bombs + walls;
  return e;
}

// ---- game logs ----

struct RoundRecord {
  int round = 0;
  JointMove moves;
  std::uint64_t hash = 0;  // state after the round
};

struct GameLog {
  GameConfig config;
  std::uint64_t seed = 0;
  std::map<int, std::string> agents;  // playerID -> agent name
  std::uint64_t initialHash = 0;
  json initialState;
  std::vector<RoundRecord> rounds;
  std::optional<Result> result;
  std::string fault;  // non-empty when an agent failed
};

inline std::string hex_hash(std::uint64_t h) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

// One JSON object per line: a header, one line per round, then the result.
inline std::string to_jsonl(const GameLog& log) {
  json agents = json::object();
  for (const auto& [p, name] : log.agents) agents[std::to_string(p)] = name;
  std::string out = json{{"type", "header"},
                         {"config", to_json(log.config)},
                         {"seed", log.seed},
                         {"agents", agents},
                         {"hash", hex_hash(log.initialHash)},
                         {"state", log.initialState}}
                        .dump();
  out += '\n';
  for (const RoundRecord& r : log.rounds) {
    out += json{{"type", "round"}, {"round", r.round}, {"moves", to_json(r.moves)}, {"hash", hex_hash(r.hash)}}.dump();
    out += '\n';
  }
  json end = {{"type", "result"}, {"rounds", log.rounds.size()}, {"result", to_json(log.result)}};
  if (!log.fault.empty()) end["fault"] = log.fault;
  out += end.dump();
  out += '\n';
  return out;
}

struct LogError : Error {
  using Error::Error;
};

inline GameLog game_log_from_jsonl(std::istream& in) {
  GameLog log;
  std::string line;
  bool header = false, finished = false;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    if (finished) throw LogError("line " + std::to_string(lineNo) + ": records after the result");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw LogError("line " + std::to_string(lineNo) + ": not JSON");
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      log.config = config_from_json(j.at("config"));
      log.seed = j.value("seed", std::uint64_t{0});
      for (const auto& [p, name] : j.at("agents").items()) log.agents[std::stoi(p)] = name.get<std::string>();
      log.initialHash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
      log.initialState = j.value("state", json());
      header = true;
    } else if (type == "round") {
      if (!header) throw LogError("line " + std::to_string(lineNo) + ": round before header");
      RoundRecord r;
      r.round = j.at("round").get<int>();
      if (r.round != static_cast<int>(log.rounds.size()) + 1)
        throw LogError("line " + std::to_string(lineNo) + ": expected round " + std::to_string(log.rounds.size() + 1));
      r.moves = joint_from_json(j.at("moves"));
      r.hash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
      log.rounds.push_back(std::move(r));
    } else if (type == "result") {
      if (!header) throw LogError("line " + std::to_string(lineNo) + ": result before header");
      log.result = result_from_json(j.at("result"));
      log.fault = j.value("fault", "");
      finished = true;
    } else {
      throw LogError("line " + std::to_string(lineNo) + ": unknown record type '" + type + "'");
    }
  }
  if (!finished) throw LogError("truncated log: no result record");
  return log;
}

inline GameLog read_game_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return game_log_from_jsonl(in);
}

// ---- action histograms ----

enum class Impact : std::uint8_t { Impactful, NonImpactful };

inline Impact impact_of(Action a) {
  return a == Action::Shoot || a == Action::Bomb || a == Action::Ram || is_advance(a) ? Impact::Impactful
                                                                                       : Impact::NonImpactful;
}

inline std::string_view to_string(Impact i) { return i == Impact::Impactful ? "impactful" : "non_impactful"; }

struct ActionHistogram {
  std::map<Action, long> counts;
  long rounds = 0;

  long moves() const {
    long n = 0;
    for (const auto& [a, c] : counts) n += c;
    return n;
  }

  long count(Impact i) const {
    long n = 0;
    for (const auto& [a, c] : counts)
      if (impact_of(a) == i) n += c;
    return n;
  }

  double share(Impact i) const {
    const long n = moves();
    return n == 0 ? 0.0 : static_cast<double>(count(i)) / static_cast<double>(n);
  }

  ActionHistogram& operator+=(const ActionHistogram& o) {
    for (const auto& [a, c] : o.counts) counts[a] += c;
    rounds += o.rounds;
    return *this;
  }
};

// Counts the moves of `players` (every player when empty).
inline ActionHistogram action_histogram(const GameLog& log, const std::vector<int>& players = {}) {
  if (!log.result) throw LogError("action_histogram: log has no result");
  ActionHistogram h;
  h.rounds = static_cast<long>(log.rounds.size());
  for (const RoundRecord& r : log.rounds) {
    for (const auto& [p, turn] : r.moves) {
      if (!players.empty() && std::find(players.begin(), players.end(), p) == players.end()) continue;
      for (const auto& [unit, a] : turn) h.counts[a]++;
    }
  }
  return h;
}

inline void write_histogram_csv(std::ostream& out, const ActionHistogram& h) {
  out << "action,count,class\n";
  for (const auto& [a, c] : h.counts) out << to_string(a) << ',' << c << ',' << to_string(impact_of(a)) << '\n';
}

inline json histogram_summary(const ActionHistogram& h) {
  json counts = json::object();
  for (const auto& [a, c] : h.counts) counts[std::string(to_string(a))] = c;
  return {{"rounds", h.rounds},
          {"moves", h.moves()},
          {"impactful", h.count(Impact::Impactful)},
          {"nonImpactful", h.count(Impact::NonImpactful)},
          {"nonImpactfulShare", h.share(Impact::NonImpactful)},
          {"counts", counts}};
}

// ---- matches ----

struct MatchOptions {
  bool deploymentPhase = false;  // random deployment instead of a random board
};

struct MatchReport {
  std::string agentA;
  std::string agentB;
  long games = 0;  // completed games
  long winsA = 0;
  long winsB = 0;
  long draws = 0;
  long faults = 0;
  long totalRounds = 0;

  double mean_rounds() const { return games == 0 ? 0.0 : static_cast<double>(totalRounds) / static_cast<double>(games); }
};

inline json to_json(const MatchReport& r) {
  return {{"agentA", r.agentA}, {"agentB", r.agentB}, {"games", r.games},   {"winsA", r.winsA},
          {"winsB", r.winsB},   {"draws", r.draws},   {"faults", r.faults}, {"meanRounds", r.mean_rounds()}};
}

struct MatchResult {
  MatchReport report;
  std::vector<GameLog> logs;
};

inline GameState opening_state(const GameConfig& cfg, std::uint64_t gameSeed, const MatchOptions& opt) {
  if (!opt.deploymentPhase) return random_board(cfg, gameSeed);
  GameState s = new_game(cfg);
  s.seed = gameSeed;
  for (int p = 0; p < cfg.num_players(); ++p)
    s = deploy(s, p, random_deployment(s, p, derive_seed(gameSeed, 1000 + static_cast<std::uint64_t>(p))));
  return s;
}

// Plays one game; team 0 is commanded by `teamZero`, team 1 by `teamOne`.
inline GameLog play_game(Agent& teamZero, Agent& teamOne, const GameConfig& cfg, std::uint64_t gameSeed,
                         const MatchOptions& opt = {}) {
  if (cfg.numTeams != 2) throw ConfigError("matches need exactly two teams");
  GameLog log;
  log.config = cfg;
  log.seed = gameSeed;
  GameState s = opening_state(cfg, gameSeed, opt);
  for (int p = 0; p < cfg.num_players(); ++p) log.agents[p] = (cfg.team_of(p) == 0 ? teamZero : teamOne).name();
  log.initialHash = state_hash(s);
  log.initialState = to_json(s);
  try {
    while (s.phase == Phase::Playing) {
      JointMove jm;
      for (int p = 0; p < cfg.num_players(); ++p) {
        if (playable_units(s, p).empty()) continue;
        Agent& agent = cfg.team_of(p) == 0 ? teamZero : teamOne;
        const auto moveSeed = derive_seed(gameSeed, static_cast<std::uint64_t>(s.round * cfg.num_players() + p + 1));
        jm[p] = agent.decide(s, p, moveSeed);
      }
      s = resolve_round(s, jm);
      log.rounds.push_back({s.round, std::move(jm), state_hash(s)});
    }
    log.result = s.result;
  } catch (const Error& e) {
    log.fault = e.what();
  }
  return log;
}

// Game g uses seed derive_seed(seed, g); agent A holds team 0 in even games
// and team 1 in odd games.
inline MatchResult run_match(Agent& a, Agent& b, long games, const GameConfig& cfg, std::uint64_t seed,
                             const MatchOptions& opt = {}) {
  validate(cfg);
  MatchResult m;
  m.report.agentA = a.name();
  m.report.agentB = b.name();
  for (long g = 0; g < games; ++g) {
    const bool aFirst = g % 2 == 0;
    GameLog log = play_game(aFirst ? a : b, aFirst ? b : a, cfg, derive_seed(seed, static_cast<std::uint64_t>(g)), opt);
    if (!log.fault.empty() || !log.result) {
      ++m.report.faults;
    } else {
      ++m.report.games;
      m.report.totalRounds += static_cast<long>(log.rounds.size());
      if (log.result->draw) ++m.report.draws;
      else if ((log.result->winnerTeam == 0) == aFirst) ++m.report.winsA;
      else ++m.report.winsB;
    }
    m.logs.push_back(std::move(log));
  }
  return m;
}

inline void write_logs(const std::vector<GameLog>& logs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t g = 0; g < logs.size(); ++g) {
    std::ostringstream name;
    name << "game_";
    name.width(4);
    name.fill('0');
    name << g << ".jsonl";
    std::ofstream out(dir / name.str());
    if (!out) throw Error("cannot write " + (dir / name.str()).string());
    out << to_jsonl(logs[g]);
  }
}

}  // namespace battlespace
