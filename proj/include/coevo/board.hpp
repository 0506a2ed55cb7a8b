#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/types.hpp"

namespace coevo {

enum class KingHistory : std::uint8_t {
  Home,          // never moved
  CastledShort,
  CastledLong,
  Walked,        // first King move was not a castle
};

// Per-side bookkeeping consumed by the relative positional scoring.
struct SideState {
  KingHistory king = KingHistory::Home;
  bool kings_rook_moved_first = false;   // h-side rook moved while King at home
  bool queens_rook_moved_first = false;  // a-side rook moved while King at home
  bool queen_moved_early = false;        // Queen moved before two minor pieces
  std::uint8_t minors_moved_mask = 0;    // bit i: minor slot 10+i has moved
  int shield_moves = 0;                  // shield pawn moves after castling

  bool castled() const {
    return king == KingHistory::CastledShort || king == KingHistory::CastledLong;
  }
  bool operator==(const SideState&) const = default;
};

struct CastlingRights {
  bool white_short = false;
  bool white_long = false;
  bool black_short = false;
  bool black_long = false;

  bool short_side(Color c) const {
    return c == Color::White ? white_short : black_short;
  }
  bool long_side(Color c) const {
    return c == Color::White ? white_long : black_long;
  }
  std::uint8_t mask() const {
    return static_cast<std::uint8_t>(white_short | white_long << 1 |
                                     black_short << 2 | black_long << 3);
  }
  static CastlingRights from_mask(std::uint8_t m) {
    return {(m & 1) != 0, (m & 2) != 0, (m & 4) != 0, (m & 8) != 0};
  }
  bool operator==(const CastlingRights&) const = default;
};

struct HistoryEntry {
  Move move;
  std::uint64_t hash_after = 0;

  // undo information
  std::int8_t captured = -1;  // piece index, -1 if none
  PieceKind captured_kind = PieceKind::Pawn;
  std::int8_t captured_square = -1;
  std::uint8_t prior_castling = 0;
  std::int8_t prior_en_passant = -1;
  std::int8_t prior_last_moved = -1;
  int prior_halfmove_clock = 0;
  SideState prior_side_state;
};

// Full game state. Cheap to copy apart from the move history.
class Board {
 public:
  static constexpr std::uint8_t kEmpty = 0xFF;
  static constexpr int kPieces = 32;

  Board();  // empty board, White to move
  static Board initial();

  // --- queries -------------------------------------------------------------
  std::optional<PieceId> at(Square s) const {
    auto v = squares_[s.index()];
    if (v == kEmpty) return std::nullopt;
    return PieceId::from_index(v);
  }
  bool empty(Square s) const { return squares_[s.index()] == kEmpty; }
  std::optional<Square> square_of(PieceId id) const {
    auto v = piece_square_[id.index()];
    if (v < 0) return std::nullopt;
    return Square::from_index(v);
  }
  bool on_board(PieceId id) const { return piece_square_[id.index()] >= 0; }
  PieceKind kind_of(PieceId id) const { return piece_kind_[id.index()]; }
  std::optional<PieceKind> kind_at(Square s) const {
    auto v = squares_[s.index()];
    if (v == kEmpty) return std::nullopt;
    return piece_kind_[v];
  }

  Color side_to_move() const { return side_to_move_; }
  CastlingRights castling() const { return CastlingRights::from_mask(castling_); }
  std::optional<Square> en_passant() const {
    if (en_passant_ < 0) return std::nullopt;
    return Square::from_index(en_passant_);
  }
  std::optional<Square> last_moved() const {
    if (last_moved_ < 0) return std::nullopt;
    return Square::from_index(last_moved_);
  }
  const SideState& side_state(Color c) const {
    return side_state_[static_cast<int>(c)];
  }
  std::uint64_t occupancy() const { return occupancy_; }
  std::uint64_t hash() const { return hash_; }
  // Hash of the position after `ply` plies of recorded history (0 = start).
  std::uint64_t position_hash(std::size_t ply) const {
    return ply == 0 ? start_hash_ : history_[ply - 1].hash_after;
  }
  std::span<const HistoryEntry> history() const { return history_; }
  std::size_t ply_count() const { return history_.size(); }
  int halfmove_clock() const { return halfmove_clock_; }
  int fullmove_number() const { return fullmove_number_; }

  Square king_square(Color c) const {
    return *square_of(PieceId{c, PieceId::kKingSlot});
  }
  // Pieces of `c` currently on the board, by ascending slot.
  std::vector<PieceId> pieces(Color c) const;
  std::vector<PieceId> captured() const;

  bool is_attacked(Square s, Color by) const { return is_attacked(s, by, occupancy_); }
  bool is_attacked(Square s, Color by, std::uint64_t occupancy) const;

  // --- mutation ------------------------------------------------------------
  // Plays a move assumed legal; no validation. Use apply_move() for checked play.
  void play(const Move& m);
  // Passes the turn (look-ahead simulations only).
  void play_null();
  // Reverts the last play()/play_null().
  void undo();

  // Setup helpers used by position parsing and tests.
  void put(PieceId id, PieceKind kind, Square s);
  void remove(Square s);
  void set_side_to_move(Color c);
  void set_castling(CastlingRights r);
  void set_en_passant(std::optional<Square> s);
  void set_side_state(Color c, const SideState& st) {
    side_state_[static_cast<int>(c)] = st;
  }
  void set_last_moved(std::optional<Square> s) {
    last_moved_ = s ? static_cast<std::int8_t>(s->index()) : -1;
  }
  void set_move_counters(int halfmove, int fullmove) {
    halfmove_clock_ = halfmove;
    fullmove_number_ = fullmove;
  }
  // Drops history and re-anchors the repetition window at the current position.
  void reset_history();
  // Copy of the current position with an empty history.
  Board detached() const;

  // Compares placement, kinds, side to move, rights, counters and history.
  bool operator==(const Board& other) const;

 private:
  std::uint64_t compute_hash() const;
  void xor_piece(PieceKind kind, Color c, int sq);

  std::array<std::uint8_t, 64> squares_;
  std::array<std::int8_t, kPieces> piece_square_;
  std::array<PieceKind, kPieces> piece_kind_;
  std::uint64_t occupancy_ = 0;
  Color side_to_move_ = Color::White;
  std::uint8_t castling_ = 0;
  std::int8_t en_passant_ = -1;
  std::int8_t last_moved_ = -1;
  std::array<SideState, 2> side_state_{};
  int halfmove_clock_ = 0;
  int fullmove_number_ = 1;
  std::uint64_t hash_ = 0;
  std::uint64_t start_hash_ = 0;
  std::vector<HistoryEntry> history_;
};

// --- rules ---------------------------------------------------------------

std::vector<Move> pseudo_legal_moves(const Board& board);
std::vector<Move> legal_moves(const Board& board);
// Legal moves of a single piece (used by gene decoding).
std::vector<Move> legal_moves_of(const Board& board, PieceId piece);
bool has_legal_move(const Board& board);
bool is_legal(const Board& board, const Move& m);

bool in_check(const Board& board, Color c);

// Checked successor: throws IllegalMove unless m is legal on board.
Board apply_move(const Board& board, const Move& m);

struct Termination {
  enum class Outcome : std::uint8_t {
    Ongoing,
    Checkmate,        // winner set
    TechnicalTie,
    FullBlockDefeat,  // loser set: no pseudo-legal move at all
    StalemateDefeat,  // loser set: every pseudo-legal move exposes the King
    StalemateDraw,    // only with fide_stalemate
  };
  Outcome outcome = Outcome::Ongoing;
  std::optional<Color> winner;
  std::optional<Color> loser;

  bool terminal() const { return outcome != Outcome::Ongoing; }
  bool decisive() const { return winner.has_value(); }
  bool operator==(const Termination&) const = default;
};

std::string_view outcome_name(Termination::Outcome o);
std::string describe(const Termination& t);

struct RulesOptions {
  bool fide_stalemate = false;
};

Termination detect_termination(const Board& board, const RulesOptions& opts = {});
bool is_technical_tie(const Board& board);
bool insufficient_material_tie(const Board& board);
bool repetition_tie(const Board& board);

// --- text formats -------------------------------------------------------------

// FEN plus an optional extension token carrying the scoring counters. See
// docs/position-format.md.
Board parse_fen(std::string_view fen);
std::string to_fen(const Board& board, bool with_extension = true);
inline constexpr std::string_view kStartFen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

// Resolves coordinate notation against the legal moves of board.
// Throws ParseError on malformed text, IllegalMove if no legal move matches.
Move parse_move(const Board& board, std::string_view text);

std::string ascii_board(const Board& board);

}  // namespace coevo
