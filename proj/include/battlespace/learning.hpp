#pragma once

// Supervised training of outcome networks on MCTS root statistics gathered
// from independent random boards.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "battlespace/agents.hpp"
#include "battlespace/engine.hpp"
#include "battlespace/nn.hpp"
#include "battlespace/rng.hpp"

namespace battlespace {

struct DivergenceError : Error {
  long step;
  DivergenceError(long s, const std::string& what) : Error(what), step(s) {}
};

struct TrainingSample {
  std::vector<float> input;
  std::vector<double> target;  // A x 3, rows sum to 1
  std::uint64_t boardSeed = 0;
};

// Per-joint-action outcome rows; actions without visits (or illegal here)
// get the uniform row.
inline std::vector<double> target_from_stats(const RootStats& stats) {
  std::vector<double> t(stats.spaceSize * kOutcomes, 1.0 / 3);
  for (const RootEntry& e : stats.entries) {
    if (e.tally.visits == 0) continue;
    const OutcomeDistribution d = e.tally.distribution();
    t[e.index * kOutcomes] = d.pWin;
    t[e.index * kOutcomes + 1] = d.pLoss;
    t[e.index * kOutcomes + 2] = d.pDraw;
  }
  return t;
}

enum class UpdateMode : std::uint8_t { PerBoard, MiniBatch };

struct TrainConfig {
  GameConfig game;
  int playerID = 0;
  int epochs = 20;
  int batchSize = 4;
  long rolloutsPerBoard = 500;
  double learningRate = 1e-2;
  double momentum = 0.9;
  int boardsPerEpoch = 64;
  UpdateMode mode = UpdateMode::MiniBatch;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const {
    battlespace::validate(game);
    if (epochs < 0) throw ConfigError("invalid train field 'epochs'");
    if (batchSize < 1 || batchSize > 64) throw ConfigError("invalid train field 'batchSize'");
    if (boardsPerEpoch < 1) throw ConfigError("invalid train field 'boardsPerEpoch'");
    if (!(learningRate >= 0)) throw ConfigError("invalid train field 'learningRate'");
    const auto actions = static_cast<long>(JointActionSpace(game, playerID).size());
    if (rolloutsPerBoard < actions) throw ConfigError("invalid train field 'rolloutsPerBoard': below the action count");
  }
};

inline json to_json(const TrainConfig& c) {
  return {{"game", to_json(c.game)},
          {"playerID", c.playerID},
          {"epochs", c.epochs},
          {"batchSize", c.batchSize},
          {"rolloutsPerBoard", c.rolloutsPerBoard},
          {"learningRate", c.learningRate},
          {"momentum", c.momentum},
          {"boardsPerEpoch", c.boardsPerEpoch},
          {"mode", c.mode == UpdateMode::PerBoard ? "per_board" : "mini_batch"},
          {"seed", c.seed},
          {"threads", c.threads}};
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  if (j.contains("game")) c.game = config_from_json(j["game"]);
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
  };
  get("playerID", c.playerID);
  get("epochs", c.epochs);
  get("batchSize", c.batchSize);
  get("rolloutsPerBoard", c.rolloutsPerBoard);
  get("learningRate", c.learningRate);
  get("momentum", c.momentum);
  get("boardsPerEpoch", c.boardsPerEpoch);
  get("seed", c.seed);
  get("threads", c.threads);
  if (j.contains("mode")) {
    const auto m = j["mode"].get<std::string>();
    if (m == "per_board") c.mode = UpdateMode::PerBoard;
    else if (m == "mini_batch") c.mode = UpdateMode::MiniBatch;
    else throw ConfigError("invalid train field 'mode'");
  }
  return c;
}

inline TrainingSample make_sample(const GameConfig& cfg, int playerID, const NetworkSpec& spec, long rollouts,
                                  std::uint64_t boardSeed, int threads = 1) {
  const GameState board = random_board(cfg, boardSeed);
  MctsOptions opt;
  opt.rollouts = rollouts;
  opt.seed = derive_seed(boardSeed, 1);
  opt.threads = threads;
  const RootStats stats = mcts_root(board, playerID, opt);
  return {network_input(board, playerID, spec), target_from_stats(stats), boardSeed};
}

// Sample i comes from its own random board seeded derive_seed(seed, i).
inline std::vector<TrainingSample> generate_samples(const GameConfig& cfg, int playerID, const NetworkSpec& spec,
                                                    int count, long rollouts, std::uint64_t seed, int threads = 1) {
  spec.validate();
  std::vector<TrainingSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(make_sample(cfg, playerID, spec, rollouts, derive_seed(seed, static_cast<std::uint64_t>(i)), threads));
  return out;
}

// Mean loss over a batch without updating anything.
template <typename T>
double evaluate_loss(const Network<T>& net, const std::vector<TrainingSample>& samples) {
  double total = 0;
  for (const TrainingSample& s : samples) {
    const std::vector<T> in(s.input.begin(), s.input.end());
    total += static_cast<double>(cross_entropy<T>(net.forward(in), s.target));
  }
  return samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
}

// One SGD step on the mean batch loss; returns the loss before the update.
template <typename T>
double backward_and_step(Network<T>& net, Sgd<T>& opt, const TrainingSample* batch, std::size_t n, long step = 0) {
  if (n == 0) throw ShapeError("empty batch");
  std::vector<T> grad(net.parameter_count(), T{0});
  const T scale = T{1} / static_cast<T>(n);
  double loss = 0;
  std::vector<T> in;
  for (std::size_t i = 0; i < n; ++i) {
    in.assign(batch[i].input.begin(), batch[i].input.end());
    loss += static_cast<double>(net.accumulate_gradient(in, batch[i].target, grad, scale));
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss)) throw DivergenceError(step, "training diverged at step " + std::to_string(step));
  opt.step(net.parameters(), grad);
  return loss;
}

template <typename T>
double backward_and_step(Network<T>& net, Sgd<T>& opt, const std::vector<TrainingSample>& batch, long step = 0) {
  return backward_and_step(net, opt, batch.data(), batch.size(), step);
}

struct StepLoss {
  long step = 0;
  int epoch = 0;
  double loss = 0;
};

struct TrainResult {
  Network<float> network;
  std::vector<StepLoss> steps;
  std::vector<double> epochMeans;
};

using EpochCallback = std::function<void(int epoch, double meanLoss)>;

// Steps over `samples` in order, batchSize at a time (the last batch may be
// short). Returns the per-step losses.
template <typename T>
std::vector<double> train_epoch(Network<T>& net, Sgd<T>& opt, const std::vector<TrainingSample>& samples,
                                int batchSize, long firstStep = 0) {
  std::vector<double> losses;
  for (std::size_t i = 0; i < samples.size(); i += static_cast<std::size_t>(batchSize)) {
    const std::size_t n = std::min(static_cast<std::size_t>(batchSize), samples.size() - i);
    losses.push_back(backward_and_step(net, opt, samples.data() + i, n, firstStep + static_cast<long>(losses.size())));
  }
  return losses;
}

// Every epoch draws boardsPerEpoch fresh boards, labels them with MCTS and
// steps through them (batch size 1 under PerBoard).
inline TrainResult train(const TrainConfig& cfg, const NetworkSpec& spec, const EpochCallback& onEpoch = {}) {
  cfg.validate();
  spec.validate();
  if (static_cast<std::size_t>(spec.outputActions) != JointActionSpace(cfg.game, cfg.playerID).size())
    throw ShapeError("network action rows do not match the player's joint actions");
  TrainResult r{Network<float>(spec, derive_seed(cfg.seed, 0x6e6e)), {}, {}};
  Sgd<float> opt(static_cast<float>(cfg.learningRate), static_cast<float>(cfg.momentum));
  const int batch = cfg.mode == UpdateMode::PerBoard ? 1 : cfg.batchSize;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto samples = generate_samples(cfg.game, cfg.playerID, spec, cfg.boardsPerEpoch, cfg.rolloutsPerBoard,
                                          derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch) + 1), cfg.threads);
    const std::vector<double> losses = train_epoch(r.network, opt, samples, batch, step);
    double sum = 0;
    for (double l : losses) {
      r.steps.push_back({step++, epoch, l});
      sum += l;
    }
    r.epochMeans.push_back(sum / static_cast<double>(losses.size()));
    if (onEpoch) onEpoch(epoch, r.epochMeans.back());
  }
  return r;
}

inline void write_loss_csv(std::ostream& out, const std::vector<StepLoss>& steps) {
  out << "step,loss\n";
  out.precision(9);
  for (const StepLoss& s : steps) out << s.step << ',' << s.loss << '\n';
}

inline void write_loss_csv(const std::string& path, const std::vector<StepLoss>& steps) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_loss_csv(out, steps);
}

// Largest relative gap between analytic and central-difference gradients
// of the single-sample loss, over every parameter.
inline double gradient_check(Network<double>& net, const std::vector<double>& input, const std::vector<double>& target,
                             double eps = 1e-6) {
  std::vector<double> grad(net.parameter_count(), 0.0);
  net.accumulate_gradient(input, target, grad);
  auto loss = [&] { return cross_entropy<double>(net.forward(input), target); };
  double worst = 0;
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double up = loss();
    params[i] = saved - eps;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2 * eps);
    const double denom = std::max(std::abs(numeric) + std::abs(grad[i]), 1e-8);
    worst = std::max(worst, std::abs(numeric - grad[i]) / denom);
  }
  return worst;
}

}  // namespace battlespace
