#include <array>

#include "coevo/board.hpp"

namespace coevo {

namespace {

struct MaterialCount {
  int knights = 0;
  int bishops = 0;
  bool heavy_or_pawn = false;  // any Queen, Rook or Pawn
};

MaterialCount count_material(const Board& board, Color c) {
  MaterialCount m;
  for (PieceId id : board.pieces(c)) {
    switch (board.kind_of(id)) {
      case PieceKind::Knight: ++m.knights; break;
      case PieceKind::Bishop: ++m.bishops; break;
      case PieceKind::King: break;
      default: m.heavy_or_pawn = true; break;
    }
  }
  return m;
}

// No Queen, Rook or Pawn and at most two minor pieces in total.
bool tie_material_gate(const MaterialCount& w, const MaterialCount& b) {
  if (w.heavy_or_pawn || b.heavy_or_pawn) return false;
  return w.knights + w.bishops + b.knights + b.bishops <= 2;
}

bool listed_pattern(const MaterialCount& strong, const MaterialCount& weak) {
  const int sn = strong.knights, sb = strong.bishops;
  const int wn = weak.knights, wb = weak.bishops;
  const bool weak_bare = wn == 0 && wb == 0;
  if (sn == 0 && sb == 0 && weak_bare) return true;      // K v K
  if (sn == 1 && sb == 0 && weak_bare) return true;      // K+N v K
  if (sn == 0 && sb == 1 && weak_bare) return true;      // K+B v K
  if (sn == 0 && sb == 1 && wn == 0 && wb == 1) return true;  // K+B v K+B
  if (sn == 0 && sb == 1 && wn == 1 && wb == 0) return true;  // K+B v K+N
  if (sn == 2 && sb == 0 && weak_bare) return true;      // K+2N v K
  return false;
}

}  // namespace

std::string_view outcome_name(Termination::Outcome o) {
  using O = Termination::Outcome;
  switch (o) {
    case O::Ongoing: return "ongoing";
    case O::Checkmate: return "checkmate";
    case O::TechnicalTie: return "technical_tie";
    case O::FullBlockDefeat: return "full_block_defeat";
    case O::StalemateDefeat: return "stalemate_defeat";
    case O::StalemateDraw: return "stalemate_draw";
  }
  return "unknown";
}

std::string describe(const Termination& t) {
  std::string s(outcome_name(t.outcome));
  if (t.winner) s += " winner=" + std::string(color_name(*t.winner));
  return s;
}

bool insufficient_material_tie(const Board& board) {
  const auto w = count_material(board, Color::White);
  const auto b = count_material(board, Color::Black);
  if (!tie_material_gate(w, b)) return false;
  return listed_pattern(w, b) || listed_pattern(b, w);
}

// Each side alternated the same moves over the last six plies: the position
// sequence has period four across the window.
bool repetition_tie(const Board& board) {
  const std::size_t n = board.ply_count();
  if (n < 6) return false;
  for (std::size_t back = 0; back < 3; ++back) {
    if (board.position_hash(n - back) != board.position_hash(n - back - 4)) return false;
  }
  return true;
}

bool is_technical_tie(const Board& board) {
  const auto w = count_material(board, Color::White);
  const auto b = count_material(board, Color::Black);
  if (!tie_material_gate(w, b)) return false;
  return listed_pattern(w, b) || listed_pattern(b, w) || repetition_tie(board);
}

Termination detect_termination(const Board& board, const RulesOptions& opts) {
  using O = Termination::Outcome;
  const Color us = board.side_to_move();
  if (!has_legal_move(board)) {
    Termination t;
    if (in_check(board, us)) {
      t.outcome = O::Checkmate;
    } else if (opts.fide_stalemate) {
      t.outcome = O::StalemateDraw;
      return t;
    } else if (pseudo_legal_moves(board).empty()) {
      t.outcome = O::FullBlockDefeat;
    } else {
      t.outcome = O::StalemateDefeat;
    }
    t.winner = opposite(us);
    t.loser = us;
    return t;
  }
  if (is_technical_tie(board)) return Termination{O::TechnicalTie, {}, {}};
  return {};
}

}  // namespace coevo
