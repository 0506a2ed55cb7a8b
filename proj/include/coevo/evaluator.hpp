#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "coevo/board.hpp"
#include "coevo/genome.hpp"

namespace coevo {

using Matrix8 = std::array<std::array<int, 8>, 8>;

struct RpConstants {
  int pawn_protected = 0;
  int pawn_doubled = 0;
  int pawn_isolated = 0;
  int pawn_open_file = 0;
  int pawn_passed = 0;
  int pawn_passed_protected = 0;
  int pawn_blocked_by_knight = 0;
  int pawn_blocked_by_bishop = 0;
  int rook_seventh_rank = 0;
  int rook_doubled_file = 0;
  int rook_attacks_pawn = 0;
  int rook_no_enemy_pawn_file = 0;
  int rook_kings_rook_first = 0;
  int rook_queens_rook_first = 0;
  int knight_protected = 0;
  int knight_protection_max_proximity = 0;
  int bishop_pair = 0;
  int bishop_adjacent_pawn = 0;
  int queen_bishop_diagonal = 0;
  int queen_moved_early = 0;
  int queen_seventh_rank = 0;
  int queen_pawnless_file = 0;
  int king_defeated = 0;
  int king_castled = 0;
  int king_walked = 0;
  int king_surround = 0;
  int king_surround_queen_count = 0;
  int king_shield_move = 0;

  bool operator==(const RpConstants&) const = default;
};

// All scoring data. Matrices are written from White's side: row 0 is rank 8,
// column 0 is file a. Black reads them rank-mirrored. Proximity arrays start
// at distance 1; mobility arrays at count 0.
struct ScoreTables {
  std::array<int, kPieceKindCount> piece_weights{};
  Matrix8 pawn_ap_begin{};
  Matrix8 pawn_ap_end{};
  Matrix8 pawn_ap_castled_left{};   // after the King-side castle
  Matrix8 pawn_ap_castled_right{};  // after the Queen-side castle
  Matrix8 knight_ap{};
  Matrix8 bishop_ap{};
  Matrix8 king_ap_begin{};
  Matrix8 king_ap_end{};
  std::array<int, 13> rook_mobility{};
  std::array<int, 7> rook_proximity_axis{};
  std::array<int, 9> knight_mobility{};
  std::array<int, 14> knight_proximity{};
  std::array<int, 14> bishop_mobility{};
  std::array<int, 29> queen_mobility_begin{};
  std::array<int, 29> queen_mobility_end{};
  std::array<int, 14> queen_proximity{};
  RpConstants rp;

  int weight(PieceKind k) const { return piece_weights[static_cast<int>(k)]; }

  // Embedded copy of data/score_tables.json.
  static const ScoreTables& defaults();
  static ScoreTables parse(std::string_view json_text);
  static ScoreTables load(const std::string& path);

  // Canonical JSON (sorted keys, compact).
  std::string to_json() const;
  // FNV-1a 64 over to_json().
  std::uint64_t checksum() const;

  bool operator==(const ScoreTables&) const = default;
};

std::string_view embedded_score_tables_json();

enum class GameStage : std::uint8_t { Beginning, End };

GameStage stage(const Board& board);
int minor_piece_count(const Board& board);

// Per-piece terms. The piece must be on the board.
int ap_score(const Board& board, PieceId piece, const ScoreTables& t, GameStage st);
int mobility_count(const Board& board, PieceId piece);
int mobility_score(const Board& board, PieceId piece, const ScoreTables& t, GameStage st);
int proximity_score(const Board& board, PieceId piece, const ScoreTables& t);
int rp_score(const Board& board, PieceId piece, const ScoreTables& t);

// Exchange score of the piece on `target` for its owner, never positive.
int mp_score(const Board& board, Square target, const ScoreTables& t);

struct SideScores {
  int material = 0;
  int ap = 0;
  int rp = 0;
  int mobility = 0;
  int proximity = 0;
  int mp = 0;

  int sum() const { return material + ap + rp + mobility + proximity + mp; }
  bool operator==(const SideScores&) const = default;
};

struct ScoreBreakdown {
  Color perspective = Color::White;
  std::array<SideScores, 2> sides{};  // indexed by Color
  Termination termination;
  int total = 0;

  const SideScores& own() const { return sides[static_cast<int>(perspective)]; }
  const SideScores& opponent() const { return sides[static_cast<int>(opposite(perspective))]; }
  bool operator==(const ScoreBreakdown&) const = default;
};

// A technical tie scores zero in every category. The MP term is taken for the
// piece on the last-moved square and credited to its owner.
ScoreBreakdown evaluate_board(const Board& board, Color perspective,
                              const ScoreTables& t = ScoreTables::defaults(),
                              const RulesOptions& rules = {});

std::string format_breakdown(const ScoreBreakdown& b);

enum class FitnessMode : std::uint8_t { Sum, LastMove };

struct FitnessOptions {
  FitnessMode mode = FitnessMode::Sum;
  int skip_penalty = -50;
  RulesOptions rules;
};

// Playout of a mixed chromosome from `start`, scored for `root`. A gene that
// does not decode becomes a pass and costs skip_penalty. In Sum mode a
// terminal position is counted for every remaining ply.
double evaluate_mixed(const MixedChromosome& mixed, const Board& start, Color root,
                      const ScoreTables& t = ScoreTables::defaults(),
                      const FitnessOptions& opts = {});

// Playout of one chromosome with every opponent ply passed.
double evaluate_solo(const Chromosome& c, const Board& start,
                     const ScoreTables& t = ScoreTables::defaults(),
                     const FitnessOptions& opts = {});

}  // namespace coevo
