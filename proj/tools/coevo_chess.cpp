#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "coevo/config_io.hpp"
#include "coevo/harness.hpp"
#include "coevo/http_server.hpp"
#include "coevo/service.hpp"

using namespace coevo;
namespace fs = std::filesystem;

namespace {

const ScoreTables& tables_from(const std::string& path) {
  static ScoreTables loaded;
  if (path.empty()) return ScoreTables::defaults();
  loaded = ScoreTables::load(path);
  return loaded;
}

Color color_arg(const std::string& s) { return s == "black" ? Color::Black : Color::White; }

int play(const std::string& human_text, const std::string& config_path, std::optional<std::uint64_t> seed,
         const std::string& tables_path, const std::string& fen, bool verbose) {
  EngineConfig cfg = config_path.empty() ? EngineConfig{} : load_config(config_path);
  if (seed) cfg.rng_seed = *seed;
  cfg.validate();
  const ScoreTables& t = tables_from(tables_path);
  const Color human = color_arg(human_text);
  Engine engine(cfg, t);
  Board board = fen.empty() ? Board::initial() : parse_fen(fen);
  const RulesOptions rules{cfg.fide_stalemate};

  std::cout << ascii_board(board) << "\n";
  while (true) {
    Termination term = detect_termination(board, rules);
    if (term.terminal()) {
      std::cout << "game over: " << describe(term) << "\n";
      return 0;
    }
    if (board.side_to_move() == human) {
      std::cout << color_name(human) << " to move (coordinate notation, 'moves', 'resign'): "
                << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) return 0;
      if (line == "resign" || line == "quit") {
        std::cout << "resigned\n";
        return 0;
      }
      if (line == "moves") {
        for (const Move& m : legal_moves(board)) std::cout << to_text(m) << ' ';
        std::cout << "\n";
        continue;
      }
      try {
        board.play(parse_move(board, line));
      } catch (const Error& e) {
        std::cout << e.what() << "\n";
        continue;
      }
    } else {
      MoveChoice c = engine.choose_move(board);
      board.play(c.move);
      std::cout << "engine plays " << to_text(c.move) << "\n";
      if (verbose) std::cout << c.diagnostics.to_text();
      std::cout << format_breakdown(evaluate_board(board, opposite(human), t, rules));
    }
    std::cout << ascii_board(board) << "\n";
  }
}

int eval(const std::string& fen, const std::string& tables_path, const std::string& perspective) {
  Board b = parse_fen(fen);
  Color side = perspective.empty() ? b.side_to_move() : color_arg(perspective);
  std::cout << format_breakdown(evaluate_board(b, side, tables_from(tables_path)));
  return 0;
}

int bench(const std::string& preset_name, int games, std::uint64_t seed, const std::string& out,
          int threads, const std::string& format, const std::string& tables_path) {
  const ScoreTables& t = tables_from(tables_path);
  std::vector<Experiment> experiments = preset(preset_name, games, seed);
  std::vector<SeriesResult> results;
  results.reserve(experiments.size());
  for (auto& e : experiments) {
    e.spec.threads = threads;
    std::cerr << "running " << e.id << " (" << e.label_a << " vs " << e.label_b << ", "
              << e.spec.games << " games)\n";
    results.push_back(run_series(e.spec, t));
    std::cerr << "  " << results.back().wall_s << " s\n";
  }
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i) rows.push_back({&experiments[i], &results[i]});
  std::cout << report(rows, format);

  if (!out.empty()) {
    fs::create_directories(out);
    for (const auto& r : results) {
      std::ofstream(fs::path(out) / (r.spec.name + ".json")) << r.to_json() << "\n";
      std::ofstream log(fs::path(out) / (r.spec.name + ".games.log"));
      for (const auto& g : r.games) log << g.to_log_line() << "\n";
    }
    std::ofstream(fs::path(out) / "summary.csv") << report(rows, "csv");
    std::ofstream(fs::path(out) / "summary.md") << report(rows, "markdown");
  }
  return 0;
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int serve(const std::string& host, int port, const std::string& log_dir, const std::string& static_dir,
          const std::string& tables_path) {
  GameService service({log_dir, &tables_from(tables_path)});
  std::size_t recovered = service.recover();
  HttpServer server(service, static_dir);
  int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  std::cout << "listening on http://" << host << ":" << bound << " (" << recovered
            << " sessions recovered)\n"
            << std::flush;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-evolutionary chess player"};
  app.require_subcommand(1);

  auto* play_cmd = app.add_subcommand("play", "Play against the engine in the terminal");
  std::string human = "white", config_path, tables_path, fen;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  play_cmd->add_option("--human", human, "Human color")->check(CLI::IsMember({"white", "black"}));
  play_cmd->add_option("--config", config_path, "Engine config JSON")->check(CLI::ExistingFile);
  play_cmd->add_option("--seed", seed, "Engine RNG seed");
  play_cmd->add_option("--tables", tables_path, "Score tables JSON")->check(CLI::ExistingFile);
  play_cmd->add_option("--fen", fen, "Start position");
  play_cmd->add_flag("--verbose", verbose, "Print engine diagnostics");

  auto* eval_cmd = app.add_subcommand("eval", "Score breakdown of a position");
  std::string eval_fen, perspective;
  eval_cmd->add_option("--fen", eval_fen, "Position")->required();
  eval_cmd->add_option("--tables", tables_path, "Score tables JSON")->check(CLI::ExistingFile);
  eval_cmd->add_option("--perspective", perspective, "Scoring side (default: side to move)")
      ->check(CLI::IsMember({"white", "black"}));

  auto* bench_cmd = app.add_subcommand("bench", "Engine-versus-engine series");
  std::string preset_name = "suite", out, format = "text";
  int games = 0, threads = 0;
  std::uint64_t bench_seed = 0;
  bench_cmd->add_option("--preset", preset_name, "Preset")->check(CLI::IsMember(preset_names()));
  bench_cmd->add_option("--games", games, "Games per series (default: preset)")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", bench_seed, "Seed base (default: preset)");
  bench_cmd->add_option("--out", out, "Directory for results and game logs");
  bench_cmd->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "csv", "markdown"}));
  bench_cmd->add_option("--tables", tables_path, "Score tables JSON")->check(CLI::ExistingFile);

  auto* serve_cmd = app.add_subcommand("serve", "Local JSON service for the browser client");
  std::string host = "127.0.0.1", log_dir = "sessions", static_dir;
  int port = 8080;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port (0: ephemeral)");
  serve_cmd->add_option("--log-dir", log_dir, "Session log directory");
  serve_cmd->add_option("--static", static_dir, "Directory served at /")->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--tables", tables_path, "Score tables JSON")->check(CLI::ExistingFile);

  auto* config_cmd = app.add_subcommand("config", "Print the default engine config");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*play_cmd) return play(human, config_path, seed, tables_path, fen, verbose);
    if (*eval_cmd) return eval(eval_fen, tables_path, perspective);
    if (*bench_cmd) return bench(preset_name, games, bench_seed, out, threads, format, tables_path);
    if (*serve_cmd) return serve(host, port, log_dir, static_dir, tables_path);
    if (*config_cmd) {
      std::cout << config_to_json(EngineConfig{}).dump(2) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
