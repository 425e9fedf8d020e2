#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "battlespace/battlespace.hpp"
#include "battlespace/ws_server.hpp"

using namespace battlespace;

namespace {

GameConfig load_config(const std::string& path) {
  if (path.empty()) return GameConfig{};
  GameConfig c = config_from_json(read_json_file(path));
  validate(c);
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::pair<std::string, unsigned short> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw ConfigError("bind address must look like host:port");
  const int port = std::stoi(bind.substr(colon + 1));
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  return {bind.substr(0, colon), static_cast<unsigned short>(port)};
}

int run_serve(const std::string& bindFlag, const std::string& logDir, int hintThreads, std::uint64_t seed) {
  std::string bind = bindFlag;
  if (bind.empty()) {
    const char* env = std::getenv("BATTLESPACE_BIND");
    bind = env != nullptr ? env : "127.0.0.1:8765";
  }
  const auto [host, port] = split_bind(bind);
  ServerOptions opt;
  opt.logDir = logDir;
  SessionManager manager(opt, seed);
  WsServer server(manager, host, port, hintThreads);
  std::cout << "listening on ws://" << server.address() << ':' << server.port() << std::endl;
  server.run();
  return 0;
}

int run_headless(const std::string& agentA, const std::string& agentB, long games, const std::string& config,
                 std::uint64_t seed, const std::string& out, bool deployment) {
  const GameConfig cfg = load_config(config);
  auto a = make_agent(agentA);
  auto b = make_agent(agentB);
  const MatchResult m = run_match(*a, *b, games, cfg, seed, MatchOptions{deployment});
  if (!out.empty()) write_logs(m.logs, out);
  std::cout << to_json(m.report).dump() << '\n';
  return m.report.faults == 0 ? 0 : 3;
}

int run_train(const std::string& config, const std::string& out, const std::string& lossCsv, const std::string& layout,
              const std::string& kind, int epochs) {
  TrainConfig tc = config.empty() ? TrainConfig{} : train_config_from_json(read_json_file(config));
  if (epochs >= 0) tc.epochs = epochs;
  const NetworkSpec spec =
      default_network_spec(tc.game, tc.playerID, *parse_layout(layout), kind == "dense" ? NetKind::Dense : NetKind::Conv);
  std::cout << "training " << to_json(tc).dump() << '\n';
  const TrainResult r = train(tc, spec, [](int epoch, double loss) {
    std::cout << "epoch " << epoch + 1 << " mean_loss " << std::fixed << std::setprecision(6) << loss << std::endl;
  });
  save_checkpoint(r.network, out);
  if (!lossCsv.empty()) write_loss_csv(lossCsv, r.steps);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int run_eval(const std::string& checkpoint, double temperature, const std::string& opponent, long games,
             const std::string& config, std::uint64_t seed, const std::string& out) {
  const GameConfig cfg = load_config(config);
  NeuralAgent nn(load_checkpoint<float>(checkpoint), temperature);
  auto opp = make_agent(opponent);
  const MatchResult m = run_match(nn, *opp, games, cfg, seed);
  ActionHistogram h;
  for (std::size_t g = 0; g < m.logs.size(); ++g) {
    if (!m.logs[g].result) continue;
    std::vector<int> nnPlayers;
    for (int p = 0; p < cfg.num_players(); ++p)
      if ((cfg.team_of(p) == 0) == (g % 2 == 0)) nnPlayers.push_back(p);
    h += action_histogram(m.logs[g], nnPlayers);
  }
  if (!out.empty()) write_logs(m.logs, out);
  std::cout << json{{"report", to_json(m.report)}, {"nnMoves", histogram_summary(h)}}.dump(2) << '\n';
  return m.report.faults == 0 ? 0 : 3;
}

int run_encode(const std::string& board, const std::string& layoutName, int player, const std::string& format,
               const std::string& out) {
  const GameState s = state_from_json(read_json_file(board));
  const Layout layout = *parse_layout(layoutName);
  const bool text = format == "text";
  std::ostringstream buf;
  if (layout == Layout::List) {
    const ListEncoding e = encode_list(s, player);
    if (text) buf << dump_text(e);
    else write_encoding(buf, e);
  } else {
    const GridEncoding g = layout == Layout::BinaryPacked ? encode_binary(s) : encode_layers(s);
    if (text) buf << dump_text(g);
    else write_encoding(buf, g);
  }
  if (!text && (out.empty() || out == "-")) throw ConfigError("binary output needs --out <file>");
  if (text) {
    write_text(out, buf.str());
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot write " + out);
    f << buf.str();
  }
  return 0;
}

int run_statespace(long missiles, long bombs, long walls, long width, long length, long height) {
  const StateSpaceEstimate e = state_space_estimate(missiles, bombs, walls, width * length * height);
  std::cout << "cps=" << e.combinationsPerSquare << '\n'
            << "log10_states=" << std::fixed << std::setprecision(3) << e.log10States << '\n'
            << "states~" << e.scientific(0) << " (" << e.scientific(2) << ")\n"
            << "total_units=" << e.totalUnits << '\n';
  return 0;
}

int run_analyze(const std::string& logPath, const std::vector<int>& players, const std::string& csv) {
  const GameLog log = read_game_log(logPath);
  const ActionHistogram h = action_histogram(log, players);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw Error("cannot write " + csv);
    write_histogram_csv(out, h);
  }
  json summary = histogram_summary(h);
  summary["result"] = to_json(log.result);
  if (!log.fault.empty()) summary["fault"] = log.fault;
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int run_board(const std::string& config, std::uint64_t seed, const std::string& out) {
  write_text(out, to_json(random_board(load_config(config), seed)).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"battlespace: grid wargame engine, agents and game server"};
  app.require_subcommand(1);

  std::string bind, logDir;
  int hintThreads = 1;
  std::uint64_t serveSeed = 1;
  auto* serve = app.add_subcommand("serve", "Run the websocket game server (address from --bind or BATTLESPACE_BIND)");
  serve->add_option("--bind", bind, "host:port, port 0 picks a free one");
  serve->add_option("--log-dir", logDir, "Write finished games here as JSONL");
  serve->add_option("--hint-threads", hintThreads, "Worker threads for hint searches")->check(CLI::PositiveNumber);
  serve->add_option("--seed", serveSeed, "Seed for session ids, agent deployment and hints");

  std::string agentA = "random", agentB = "random", config, out;
  long games = 10;
  std::uint64_t seed = 0;
  bool deployment = false;
  auto* headless = app.add_subcommand("headless", "Play agent A against agent B and write JSONL logs");
  headless->add_option("--agent-a", agentA, "random | offensive | mcts[:N] | mcts-ucb[:N] | nn:<checkpoint>[:T]");
  headless->add_option("--agent-b", agentB, "Same forms as --agent-a");
  headless->add_option("--games", games)->check(CLI::NonNegativeNumber);
  headless->add_option("--config", config, "Game config JSON (default 5x5, one soldier each)");
  headless->add_option("--seed", seed);
  headless->add_option("--out", out, "Directory for game_NNNN.jsonl");
  headless->add_flag("--deployment", deployment, "Start from random deployment instead of a random board");

  std::string trainConfig, checkpointOut = "model.bsnn", lossCsv, layout = "layers", kind = "conv";
  int epochs = -1;
  auto* trainCmd = app.add_subcommand("train", "Train an outcome network on MCTS-labelled boards");
  trainCmd->add_option("--config", trainConfig, "Training config JSON");
  trainCmd->add_option("--out", checkpointOut, "Checkpoint path");
  trainCmd->add_option("--loss-csv", lossCsv, "Per-step loss curve");
  trainCmd->add_option("--layout", layout)->check(CLI::IsMember({"binary", "layers", "list"}));
  trainCmd->add_option("--net", kind)->check(CLI::IsMember({"conv", "dense"}));
  trainCmd->add_option("--epochs", epochs, "Override the config's epoch count");

  std::string checkpoint, opponent = "random";
  double temperature = kDefaultTemperature;
  auto* evalCmd = app.add_subcommand("eval", "Play a trained network against an opponent");
  evalCmd->add_option("--checkpoint", checkpoint)->required();
  evalCmd->add_option("--opponent", opponent);
  evalCmd->add_option("--games", games)->check(CLI::NonNegativeNumber);
  evalCmd->add_option("--temperature", temperature)->check(CLI::PositiveNumber);
  evalCmd->add_option("--config", config);
  evalCmd->add_option("--seed", seed);
  evalCmd->add_option("--out", out, "Directory for game logs");

  std::string boardPath, layoutName = "binary", format = "text";
  int player = 0;
  auto* encode = app.add_subcommand("encode", "Encode a board snapshot");
  encode->add_option("--board", boardPath, "Board snapshot JSON")->required();
  encode->add_option("--layout", layoutName)->check(CLI::IsMember({"binary", "layers", "list"}));
  encode->add_option("--player", player, "Perspective for the list layout");
  encode->add_option("--format", format)->check(CLI::IsMember({"text", "binary"}));
  encode->add_option("--out", out, "Output file (text goes to stdout when omitted)");

  long missiles = 0, bombs = 0, walls = 0, width = 10, length = 11, height = 2;
  auto* statespace = app.add_subcommand("statespace", "Estimate the number of board states");
  statespace->add_option("--missiles", missiles)->check(CLI::NonNegativeNumber);
  statespace->add_option("--bombs", bombs)->check(CLI::NonNegativeNumber);
  statespace->add_option("--walls", walls)->check(CLI::NonNegativeNumber);
  statespace->add_option("--width", width)->check(CLI::PositiveNumber);
  statespace->add_option("--length", length)->check(CLI::PositiveNumber);
  statespace->add_option("--height", height)->check(CLI::PositiveNumber);

  std::string logPath, csv;
  std::vector<int> players;
  auto* analyze = app.add_subcommand("analyze", "Action histogram of a game log");
  analyze->add_option("--log", logPath)->required();
  analyze->add_option("--player", players, "Restrict to these players");
  analyze->add_option("--csv", csv, "Write action,count,class rows");

  auto* board = app.add_subcommand("board", "Write a random board snapshot");
  board->add_option("--config", config);
  board->add_option("--seed", seed);
  board->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(bind, logDir, hintThreads, serveSeed);
    if (*headless) return run_headless(agentA, agentB, games, config, seed, out, deployment);
    if (*trainCmd) return run_train(trainConfig, checkpointOut, lossCsv, layout, kind, epochs);
    if (*evalCmd) return run_eval(checkpoint, temperature, opponent, games, config, seed, out);
    if (*encode) return run_encode(boardPath, layoutName, player, format, out);
    if (*statespace) return run_statespace(missiles, bombs, walls, width, length, height);
    if (*analyze) return run_analyze(logPath, players, csv);
    if (*board) return run_board(config, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
