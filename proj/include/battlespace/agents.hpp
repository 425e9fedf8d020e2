#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "battlespace/core.hpp"
#include "battlespace/encoders.hpp"
#include "battlespace/engine.hpp"
#include "battlespace/nn.hpp"
#include "battlespace/rng.hpp"
#include "battlespace/snapshot.hpp"
#include "battlespace/state.hpp"

namespace battlespace {

// ---- weighted random policy ----

class ActionWeights {
 public:
  static ActionWeights uniform() {
    ActionWeights w;
    w.land_.fill(1.0);
    w.air_.fill(1.0);
    return w;
  }

  // Projectile-creating and position-changing actions weighted `factor`
  // times higher than turns and doNothing.
  static ActionWeights offensive(double factor = 4.0) {
    ActionWeights w = uniform();
    for (int i = 0; i < kNumActions; ++i) {
      const Action a = action_at(i);
      if (is_advance(a) || a == Action::Ram || a == Action::Shoot || a == Action::Bomb) {
        w.land_[static_cast<std::size_t>(i)] = factor;
        w.air_[static_cast<std::size_t>(i)] = factor;
      }
    }
    w.validate();
    return w;
  }

  double get(Domain d, Action a) const { return table(d)[static_cast<std::size_t>(index_of(a))]; }

  ActionWeights& set(Domain d, Action a, double value) {
    if (!in_domain(d, a)) throw ConfigError("action " + std::string(to_string(a)) + " is outside the domain");
    if (!(value >= 0) || !std::isfinite(value)) throw ConfigError("weights must be finite and non-negative");
    table(d)[static_cast<std::size_t>(index_of(a))] = value;
    return *this;
  }

  ActionWeights& set_all(Domain d, double value) {
    for (int i = 0; i < kNumActions; ++i)
      if (in_domain(d, action_at(i))) set(d, action_at(i), value);
    return *this;
  }

  void validate() const {
    for (Domain d : {Domain::Land, Domain::Air}) {
      double sum = 0;
      for (int i = 0; i < kNumActions; ++i)
        if (in_domain(d, action_at(i))) sum += get(d, action_at(i));
      if (!(sum > 0)) throw ConfigError("action weights need a positive entry in every domain");
    }
  }

  // Samples from the legal set with probability proportional to weight.
  Action sample(Domain d, ActionMask legal, Rng& rng) const {
    const auto& w = table(d);
    double total = 0;
    for (int i = 0; i < kNumActions; ++i)
      if (legal & (ActionMask{1} << i)) total += w[static_cast<std::size_t>(i)];
    if (!(total > 0)) throw RuleError("all legal actions have zero weight");
    double u = rng.uniform() * total;
    int last = -1;
    for (int i = 0; i < kNumActions; ++i) {
      if (!(legal & (ActionMask{1} << i)) || w[static_cast<std::size_t>(i)] <= 0) continue;
      last = i;
      u -= w[static_cast<std::size_t>(i)];
      if (u < 0) break;
    }
    return action_at(last);
  }

 private:
  using Table = std::array<double, kNumActions>;
  Table& table(Domain d) { return d == Domain::Land ? land_ : air_; }
  const Table& table(Domain d) const { return d == Domain::Land ? land_ : air_; }

  Table land_{};
  Table air_{};
};

inline json to_json(const ActionWeights& w) {
  json j = json::object();
  for (Domain d : {Domain::Land, Domain::Air}) {
    json t = json::object();
    for (int i = 0; i < kNumActions; ++i)
      if (in_domain(d, action_at(i))) t[std::string(to_string(action_at(i)))] = w.get(d, action_at(i));
    j[d == Domain::Land ? "land" : "air"] = t;
  }
  return j;
}

// {"land": {action: weight}, "air": {...}}; unspecified actions weigh 1.
inline ActionWeights action_weights_from_json(const json& j) {
  ActionWeights w = ActionWeights::uniform();
  for (Domain d : {Domain::Land, Domain::Air}) {
    const char* key = d == Domain::Land ? "land" : "air";
    if (!j.contains(key)) continue;
    for (const auto& [name, value] : j[key].items()) w.set(d, action_from_json(name), value.get<double>());
  }
  w.validate();
  return w;
}

template <BoardLike Board>
TurnMove random_move(const Board& board, int playerID, const ActionWeights& weights, std::uint64_t seed) {
  Rng rng(seed);
  TurnMove t;
  for (const Unit& u : board.units) {
    if (!u.playable() || u.playerID != playerID) continue;
    t[u.unitID] = weights.sample(domain_of(u.unitClass), legal_mask(board.config, u), rng);
  }
  if (t.empty()) throw RuleError("player " + std::to_string(playerID) + " has no living units");
  return t;
}

// ---- joint actions ----

// A player's joint actions over its playable roster slots, indexed in mixed
// radix with the lowest unitID most significant. The space covers the full
// roster so that indices stay stable as units die; dead units only admit
// doNothing.
class JointActionSpace {
 public:
  JointActionSpace(const GameConfig& cfg, int playerID) : player_(playerID) {
    detail::require_player(cfg, playerID);
    for (int slot = 0; slot < cfg.roster_size(); ++slot) {
      const UnitClass c = cfg.unitsPerPlayer[static_cast<std::size_t>(slot)];
      if (!is_playable(c)) continue;
      unitIDs_.push_back(cfg.slot_unit_id(playerID, slot));
      domains_.push_back(domain_of(c));
    }
    size_ = 1;
    for (Domain d : domains_) size_ *= static_cast<std::size_t>(domain_size(d));
  }

  int player() const { return player_; }
  std::size_t size() const { return size_; }
  const std::vector<int>& unit_ids() const { return unitIDs_; }
  const std::vector<Domain>& domains() const { return domains_; }

  // Actions per slot for a joint index.
  std::vector<Action> decode(std::size_t index) const {
    if (index >= size_) throw RuleError("joint action index out of range");
    std::vector<Action> out(domains_.size());
    for (std::size_t k = domains_.size(); k-- > 0;) {
      const auto radix = static_cast<std::size_t>(domain_size(domains_[k]));
      out[k] = domain_action(domains_[k], static_cast<int>(index % radix));
      index /= radix;
    }
    return out;
  }

  std::size_t encode(const std::vector<Action>& actions) const {
    if (actions.size() != domains_.size()) throw RuleError("joint action has the wrong arity");
    std::size_t index = 0;
    for (std::size_t k = 0; k < domains_.size(); ++k) {
      const int local = domain_index(domains_[k], actions[k]);
      if (local < 0) throw RuleError("action " + std::string(to_string(actions[k])) + " outside the unit's domain");
      index = index * static_cast<std::size_t>(domain_size(domains_[k])) + static_cast<std::size_t>(local);
    }
    return index;
  }

  // The turn for a joint index, restricted to units alive on the board.
  template <BoardLike Board>
  TurnMove to_turn(const Board& board, std::size_t index) const {
    const std::vector<Action> acts = decode(index);
    TurnMove t;
    for (std::size_t k = 0; k < unitIDs_.size(); ++k)
      if (board.find(unitIDs_[k]) != nullptr) t[unitIDs_[k]] = acts[k];
    return t;
  }

  template <BoardLike Board>
  std::size_t index_of_turn(const Board& board, const TurnMove& turn) const {
    std::vector<Action> acts(unitIDs_.size(), Action::DoNothing);
    for (std::size_t k = 0; k < unitIDs_.size(); ++k) {
      auto it = turn.find(unitIDs_[k]);
      if (it != turn.end()) acts[k] = it->second;
      else if (board.find(unitIDs_[k]) != nullptr) throw RuleError("turn is missing unit " + std::to_string(unitIDs_[k]));
    }
    return encode(acts);
  }

  // Legal joint indices on this board, ascending.
  template <BoardLike Board>
  std::vector<std::size_t> legal(const Board& board) const {
    std::vector<std::vector<int>> choices;
    for (std::size_t k = 0; k < unitIDs_.size(); ++k) {
      std::vector<int> locals;
      const Unit* u = board.find(unitIDs_[k]);
      if (u == nullptr) {
        locals.push_back(domain_index(domains_[k], Action::DoNothing));
      } else {
        for (Action a : actions_in(legal_mask(board.config, *u))) locals.push_back(domain_index(domains_[k], a));
      }
      choices.push_back(std::move(locals));
    }
    std::vector<std::size_t> out{0};
    for (std::size_t k = 0; k < choices.size(); ++k) {
      const auto radix = static_cast<std::size_t>(domain_size(domains_[k]));
      std::vector<std::size_t> next;
      next.reserve(out.size() * choices[k].size());
      for (std::size_t prefix : out)
        for (int c : choices[k]) next.push_back(prefix * radix + static_cast<std::size_t>(c));
      out = std::move(next);
    }
    return out;
  }

 private:
  int player_;
  std::vector<int> unitIDs_;
  std::vector<Domain> domains_;
  std::size_t size_ = 1;
};

// ---- root statistics ----

struct OutcomeDistribution {
  double pWin = 1.0 / 3;
  double pLoss = 1.0 / 3;
  double pDraw = 1.0 / 3;
};

struct Tally {
  long wins = 0;
  long losses = 0;
  long draws = 0;
  long visits = 0;

  // Zero-visit actions report the uniform distribution.
  OutcomeDistribution distribution() const {
    if (visits == 0) return {};
    const auto v = static_cast<double>(visits);
    return {static_cast<double>(wins) / v, static_cast<double>(losses) / v, static_cast<double>(draws) / v};
  }

  void add(int outcome) {
    ++visits;
    if (outcome > 0) ++wins;
    else if (outcome < 0) ++losses;
    else ++draws;
  }

  Tally& operator+=(const Tally& o) {
    wins += o.wins;
    losses += o.losses;
    draws += o.draws;
    visits += o.visits;
    return *this;
  }

  bool operator==(const Tally&) const = default;
};

struct RootEntry {
  std::size_t index = 0;  // in the player's JointActionSpace
  TurnMove move;
  Tally tally;
};

struct RootStats {
  int playerID = 0;
  std::size_t spaceSize = 0;
  long totalRollouts = 0;
  std::vector<RootEntry> entries;  // legal joint actions, ascending index
};

inline json to_json(const RootStats& s) {
  json actions = json::array();
  for (const RootEntry& e : s.entries) {
    const OutcomeDistribution d = e.tally.distribution();
    actions.push_back({{"index", e.index},
                       {"action", to_json(e.move)},
                       {"wins", e.tally.wins},
                       {"losses", e.tally.losses},
                       {"draws", e.tally.draws},
                       {"visits", e.tally.visits},
                       {"pWin", d.pWin},
                       {"pLoss", d.pLoss},
                       {"pDraw", d.pDraw}});
  }
  return {{"playerID", s.playerID}, {"spaceSize", s.spaceSize}, {"totalRollouts", s.totalRollouts}, {"actions", actions}};
}

inline RootStats root_stats_from_json(const json& j) {
  RootStats s;
  s.playerID = j.at("playerID").get<int>();
  s.spaceSize = j.value("spaceSize", std::size_t{0});
  s.totalRollouts = j.at("totalRollouts").get<long>();
  for (const auto& a : j.at("actions")) {
    RootEntry e;
    e.index = a.at("index").get<std::size_t>();
    e.move = turn_from_json(a.at("action"));
    e.tally = {a.at("wins").get<long>(), a.at("losses").get<long>(), a.at("draws").get<long>(),
               a.at("visits").get<long>()};
    s.entries.push_back(std::move(e));
  }
  return s;
}

enum class Scoring : std::uint8_t { WinMinusLoss, WinOnly };

inline double score(const OutcomeDistribution& d, Scoring s) {
  return s == Scoring::WinOnly ? d.pWin : d.pWin - d.pLoss;
}

// ---- MCTS ----

enum class Selection : std::uint8_t { Uniform, UCB1 };

struct MctsOptions {
  long rollouts = 500;
  Selection selection = Selection::Uniform;
  double ucbC = std::sqrt(2.0);
  ActionWeights rolloutPolicy = ActionWeights::uniform();
  std::uint64_t seed = 0;
  int threads = 1;  // Uniform selection only
};

namespace detail {

inline int team_outcome(const GameState& s, int team) {
  if (s.result->draw) return 0;
  return s.result->winnerTeam == team ? 1 : -1;
}

// Plays one random continuation; `first` holds the root player's actions
// aligned with root.units (ignored elsewhere).
inline int rollout(const GameState& root, int playerID, const std::vector<Action>& first,
                   const ActionWeights& policy, std::uint64_t seed) {
  GameState s = root;
  Rng rng(seed);
  std::vector<Action> acts;
  bool opening = true;
  while (s.phase == Phase::Playing) {
    acts.assign(s.units.size(), Action::DoNothing);
    for (std::size_t i = 0; i < s.units.size(); ++i) {
      const Unit& u = s.units[i];
      if (!u.playable()) continue;
      if (opening && u.playerID == playerID) acts[i] = first[i];
      else acts[i] = policy.sample(domain_of(u.unitClass), legal_mask(s.config, u), rng);
    }
    apply_round(s, acts);
    opening = false;
  }
  return team_outcome(s, root.config.team_of(playerID));
}

}  // namespace detail

inline RootStats mcts_root(const GameState& state, int playerID, const MctsOptions& opt) {
  if (state.phase != Phase::Playing)
    throw RuleError("mcts_root: game is in the " + std::string(to_string(state.phase)) + " phase");
  if (opt.rollouts < 1) throw ConfigError("mcts_root: rollouts must be at least 1");
  opt.rolloutPolicy.validate();
  const JointActionSpace space(state.config, playerID);
  if (playable_units(state, playerID).empty()) throw RuleError("mcts_root: player has no living units");

  RootStats stats;
  stats.playerID = playerID;
  stats.spaceSize = space.size();
  stats.totalRollouts = opt.rollouts;
  const std::vector<std::size_t> legal = space.legal(state);
  std::vector<std::vector<Action>> firsts;
  for (std::size_t idx : legal) {
    RootEntry e;
    e.index = idx;
    e.move = space.to_turn(state, idx);
    stats.entries.push_back(std::move(e));
    std::vector<Action> aligned(state.units.size(), Action::DoNothing);
    for (std::size_t i = 0; i < state.units.size(); ++i) {
      auto it = stats.entries.back().move.find(state.units[i].unitID);
      if (it != stats.entries.back().move.end()) aligned[i] = it->second;
    }
    firsts.push_back(std::move(aligned));
  }
  const std::size_t K = legal.size();
  auto run = [&](long r, std::size_t k) {
    return detail::rollout(state, playerID, firsts[k], opt.rolloutPolicy,
                           derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
  };

  if (opt.selection == Selection::Uniform) {
    const int threads = std::max(1, opt.threads);
    std::vector<std::vector<Tally>> local(static_cast<std::size_t>(threads), std::vector<Tally>(K));
    auto work = [&](int t) {
      for (long r = t; r < opt.rollouts; r += threads) {
        const auto k = static_cast<std::size_t>(r) % K;
        local[static_cast<std::size_t>(t)][k].add(run(r, k));
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    for (const auto& l : local)
      for (std::size_t k = 0; k < K; ++k) stats.entries[k].tally += l[k];
  } else {
    for (long r = 0; r < opt.rollouts; ++r) {
      std::size_t pick = 0;
      if (static_cast<std::size_t>(r) < K) {
        pick = static_cast<std::size_t>(r);
      } else {
        double best = -std::numeric_limits<double>::infinity();
        const double logN = std::log(static_cast<double>(r));
        for (std::size_t k = 0; k < K; ++k) {
          const Tally& t = stats.entries[k].tally;
          const auto v = static_cast<double>(t.visits);
          const double ucb = static_cast<double>(t.wins) / v + opt.ucbC * std::sqrt(logN / v);
          if (ucb > best) best = ucb, pick = k;
        }
      }
      stats.entries[pick].tally.add(run(r, pick));
    }
  }
  return stats;
}

inline RootStats mcts_root(const GameState& state, int playerID, long rollouts, Selection selection,
                           const ActionWeights& rolloutPolicy, std::uint64_t seed) {
  MctsOptions opt;
  opt.rollouts = rollouts;
  opt.selection = selection;
  opt.rolloutPolicy = rolloutPolicy;
  opt.seed = seed;
  return mcts_root(state, playerID, opt);
}

inline const RootEntry& mcts_best(const RootStats& stats, Scoring scoring = Scoring::WinMinusLoss) {
  if (stats.entries.empty()) throw RuleError("mcts_select: empty statistics");
  const RootEntry* best = &stats.entries.front();
  double bestScore = -std::numeric_limits<double>::infinity();
  for (const RootEntry& e : stats.entries) {
    if (e.tally.visits == 0) continue;
    const double s = score(e.tally.distribution(), scoring);
    if (s > bestScore) bestScore = s, best = &e;
  }
  return *best;
}

inline TurnMove mcts_select(const RootStats& stats, Scoring scoring = Scoring::WinMinusLoss) {
  return mcts_best(stats, scoring).move;
}

// ---- neural pipeline ----

// Network input for one player's decision. Grid encodings rotate the
// per-player channel blocks so the deciding player's block comes first;
// packed cells are scaled into [0, 1].
template <BoardLike Board>
std::vector<float> network_input(const Board& board, int playerID, const NetworkSpec& spec) {
  const GameConfig& cfg = board.config;
  detail::require_player(cfg, playerID);
  if (spec.encoder == Layout::List) {
    const int len = ListEncoding::vector_length(cfg.visibleRangeDefault);
    const int slots = spec.inputLength / len;
    if (slots * len != spec.inputLength) throw ShapeError("dense input length is not a multiple of the unit vector");
    return flatten(encode_list(board, playerID), slots, len);
  }
  const GridEncoding g = spec.encoder == Layout::BinaryPacked ? encode_binary(board) : encode_layers(board);
  if (g.channels != spec.channels || g.width != spec.rows || g.length != spec.cols)
    throw ShapeError("board encoding does not match the network input shape");
  const int players = cfg.num_players();
  const int block = spec.encoder == Layout::BinaryPacked ? 2 : (cfg.height > 1 ? 4 : 2);
  const int plane = g.width * g.length;
  const float scale = spec.encoder == Layout::BinaryPacked ? 1.0f / ((1 << kPackedBits) - 1) : 1.0f;
  std::vector<float> out(g.data.size());
  for (int c = 0; c < g.channels; ++c) {
    int dst = c;
    if (c < players * block) dst = ((c / block - playerID + players) % players) * block + c % block;
    for (int k = 0; k < plane; ++k)
      out[static_cast<std::size_t>(dst * plane + k)] = static_cast<float>(g.data[static_cast<std::size_t>(c * plane + k)]) * scale;
  }
  return out;
}

inline NetworkSpec default_network_spec(const GameConfig& cfg, int playerID, Layout encoder, NetKind kind) {
  const auto actions = static_cast<int>(JointActionSpace(cfg, playerID).size());
  if (kind == NetKind::Dense) {
    if (encoder != Layout::List) throw ShapeError("Dense networks need the list encoding");
    int playable = 0;
    for (UnitClass c : cfg.unitsPerPlayer) playable += is_playable(c) ? 1 : 0;
    const int slots = playable * cfg.playersPerTeam;
    return NetworkSpec::dense(slots * ListEncoding::vector_length(cfg.visibleRangeDefault), actions);
  }
  const int channels = encoder == Layout::BinaryPacked ? binary_channel_count(cfg.num_players()) : layer_channel_count(cfg);
  return NetworkSpec::conv(encoder, channels, cfg.width, cfg.length, actions);
}

// Per-joint-action outcome rows for one player's decision.
template <BoardLike Board>
std::vector<float> predict_outcomes(const Board& board, int playerID, const Network<float>& net) {
  const std::vector<float> in = network_input(board, playerID, net.spec());
  return net.forward(in);
}

template <BoardLike Board>
TurnMove nn_agent_decide(const Board& board, int playerID, const Network<float>& net, double temperature,
                         std::uint64_t seed, Scoring scoring = Scoring::WinMinusLoss) {
  if (!(temperature > 0)) throw ConfigError("temperature must be positive");
  const JointActionSpace space(board.config, playerID);
  if (static_cast<std::size_t>(net.spec().outputActions) != space.size())
    throw ShapeError("network has " + std::to_string(net.spec().outputActions) + " action rows, player has " +
                     std::to_string(space.size()) + " joint actions");
  const std::vector<float> p = predict_outcomes(board, playerID, net);
  const std::vector<std::size_t> legal = space.legal(board);
  if (legal.empty()) throw RuleError("nn_agent_decide: no legal joint action");
  std::vector<double> logits(legal.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < legal.size(); ++k) {
    const std::size_t r = legal[k] * kOutcomes;
    const OutcomeDistribution d{p[r], p[r + 1], p[r + 2]};
    logits[k] = score(d, scoring) / temperature;
    top = std::max(top, logits[k]);
  }
  double total = 0;
  for (double& l : logits) total += l = std::exp(l - top);
  Rng rng(seed);
  double u = rng.uniform() * total;
  std::size_t pick = legal.size() - 1;
  for (std::size_t k = 0; k < legal.size(); ++k) {
    u -= logits[k];
    if (u < 0) {
      pick = k;
      break;
    }
  }
  return space.to_turn(board, legal[pick]);
}

// ---- agents ----

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual TurnMove decide(const GameState& state, int playerID, std::uint64_t seed) = 0;
};

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(ActionWeights weights = ActionWeights::uniform(), std::string label = "random")
      : weights_(weights), label_(std::move(label)) {
    weights_.validate();
  }
  std::string name() const override { return label_; }
  TurnMove decide(const GameState& state, int playerID, std::uint64_t seed) override {
    return random_move(observe(state, playerID), playerID, weights_, seed);
  }

 private:
  ActionWeights weights_;
  std::string label_;
};

class MctsAgent : public Agent {
 public:
  explicit MctsAgent(MctsOptions opt, Scoring scoring = Scoring::WinMinusLoss) : opt_(std::move(opt)), scoring_(scoring) {}
  std::string name() const override {
    return std::string(opt_.selection == Selection::UCB1 ? "mcts-ucb:" : "mcts:") + std::to_string(opt_.rollouts);
  }
  TurnMove decide(const GameState& state, int playerID, std::uint64_t seed) override {
    MctsOptions o = opt_;
    o.seed = seed;
    return mcts_select(mcts_root(state, playerID, o), scoring_);
  }

 private:
  MctsOptions opt_;
  Scoring scoring_;
};

// Decides from the full state, the same view its training targets came from.
class NeuralAgent : public Agent {
 public:
  NeuralAgent(Network<float> net, double temperature, Scoring scoring = Scoring::WinMinusLoss)
      : net_(std::move(net)), temperature_(temperature), scoring_(scoring) {}
  std::string name() const override { return "nn"; }
  TurnMove decide(const GameState& state, int playerID, std::uint64_t seed) override {
    return nn_agent_decide(state, playerID, net_, temperature_, seed, scoring_);
  }
  const Network<float>& network() const { return net_; }

 private:
  Network<float> net_;
  double temperature_;
  Scoring scoring_;
};

inline constexpr double kDefaultTemperature = 0.25;

// Agent descriptors: random, offensive, mcts[:N], mcts-ucb[:N], nn:<checkpoint>[:T].
inline std::unique_ptr<Agent> make_agent(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string kind = descriptor.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : descriptor.substr(colon + 1);
  if (kind == "random") return std::make_unique<RandomAgent>();
  if (kind == "offensive") return std::make_unique<RandomAgent>(ActionWeights::offensive(), "offensive");
  if (kind == "mcts" || kind == "mcts-ucb") {
    MctsOptions o;
    if (!arg.empty()) o.rollouts = std::stol(arg);
    o.selection = kind == "mcts" ? Selection::Uniform : Selection::UCB1;
    return std::make_unique<MctsAgent>(o);
  }
  if (kind == "nn") {
    std::string path = arg;
    double temperature = kDefaultTemperature;
    if (const auto c = arg.rfind(':'); c != std::string::npos) {
      path = arg.substr(0, c);
      temperature = std::stod(arg.substr(c + 1));
    }
    if (path.empty()) throw ConfigError("nn agent needs a checkpoint path");
    return std::make_unique<NeuralAgent>(load_checkpoint<float>(path), temperature);
  }
  throw ConfigError("unknown agent '" + descriptor + "'");
}

}  // namespace battlespace
