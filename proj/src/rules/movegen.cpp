#include <algorithm>

#include "coevo/board.hpp"
#include "rules/geometry.hpp"

namespace coevo {

namespace {

constexpr PieceKind kPromotionKinds[] = {PieceKind::Queen, PieceKind::Rook,
                                         PieceKind::Bishop, PieceKind::Knight};

// Kings are never captured; a move onto a King square is not generated.
bool enemy_target(const Board& b, Square s, Color us) {
  auto id = b.at(s);
  return id && id->color != us && b.kind_of(*id) != PieceKind::King;
}

void add_pawn_moves(const Board& b, PieceId id, Square from, std::vector<Move>& out) {
  const Color us = id.color;
  const int dir = geometry::forward(us);
  const int f = from.file(), r = from.rank();
  auto push = [&](Square to, MoveKind kind) {
    if (to.rank() == geometry::promotion_rank(us)) {
      for (auto k : kPromotionKinds) out.push_back({id, from, to, MoveKind::Promotion, k});
    } else {
      out.push_back({id, from, to, kind, PieceKind::Pawn});
    }
  };
  if (Square::on_board(f, r + dir) && b.empty(Square(f, r + dir))) {
    push(Square(f, r + dir), MoveKind::Normal);
    if (r == geometry::pawn_start_rank(us) && b.empty(Square(f, r + 2 * dir)))
      out.push_back({id, from, Square(f, r + 2 * dir), MoveKind::Normal, PieceKind::Pawn});
  }
  for (int df : {-1, 1}) {
    if (!Square::on_board(f + df, r + dir)) continue;
    Square to(f + df, r + dir);
    if (enemy_target(b, to, us))
      push(to, MoveKind::Capture);
    else if (b.en_passant() == to)
      out.push_back({id, from, to, MoveKind::EnPassant, PieceKind::Pawn});
  }
}

void add_step_moves(const Board& b, PieceId id, Square from, std::span<const int> targets,
                    std::vector<Move>& out) {
  for (int sq : targets) {
    Square to = Square::from_index(sq);
    if (b.empty(to))
      out.push_back({id, from, to, MoveKind::Normal, PieceKind::Pawn});
    else if (enemy_target(b, to, id.color))
      out.push_back({id, from, to, MoveKind::Capture, PieceKind::Pawn});
  }
}

void add_ray_moves(const Board& b, PieceId id, Square from, int direction,
                   std::vector<Move>& out) {
  const auto [df, dr] = geometry::kCompass[direction];
  for (int f = from.file() + df, r = from.rank() + dr; Square::on_board(f, r);
       f += df, r += dr) {
    Square to(f, r);
    if (b.empty(to)) {
      out.push_back({id, from, to, MoveKind::Normal, PieceKind::Pawn});
      continue;
    }
    if (enemy_target(b, to, id.color))
      out.push_back({id, from, to, MoveKind::Capture, PieceKind::Pawn});
    break;
  }
}

void add_castles(const Board& b, PieceId id, Square from, std::vector<Move>& out) {
  const Color us = id.color;
  const int rank = geometry::home_rank(us);
  if (from != Square(4, rank)) return;
  const auto rights = b.castling();
  const Color them = opposite(us);
  auto rook_home = [&](int file) {
    auto r = b.at(Square(file, rank));
    return r && r->color == us && b.kind_of(*r) == PieceKind::Rook;
  };
  const bool short_ok = rights.short_side(us) && rook_home(7) &&
                        b.empty(Square(5, rank)) && b.empty(Square(6, rank));
  const bool long_ok = rights.long_side(us) && rook_home(0) &&
                       b.empty(Square(3, rank)) && b.empty(Square(2, rank)) &&
                       b.empty(Square(1, rank));
  if (!short_ok && !long_ok) return;
  if (b.is_attacked(from, them)) return;
  if (short_ok && !b.is_attacked(Square(5, rank), them))
    out.push_back({id, from, Square(6, rank), MoveKind::CastleShort, PieceKind::Pawn});
  if (long_ok && !b.is_attacked(Square(3, rank), them))
    out.push_back({id, from, Square(2, rank), MoveKind::CastleLong, PieceKind::Pawn});
}

void add_piece_moves(const Board& b, PieceId id, std::vector<Move>& out) {
  auto from_opt = b.square_of(id);
  if (!from_opt) return;
  const Square from = *from_opt;
  switch (b.kind_of(id)) {
    case PieceKind::Pawn: add_pawn_moves(b, id, from, out); break;
    case PieceKind::Knight: add_step_moves(b, id, from, geometry::knight_targets(from), out); break;
    case PieceKind::Bishop:
      for (int d : geometry::kBishopRays) add_ray_moves(b, id, from, d, out);
      break;
    case PieceKind::Rook:
      for (int d : geometry::kRookRays) add_ray_moves(b, id, from, d, out);
      break;
    case PieceKind::Queen:
      for (int d = 0; d < 8; ++d) add_ray_moves(b, id, from, d, out);
      break;
    case PieceKind::King:
      add_step_moves(b, id, from, geometry::king_targets(from), out);
      add_castles(b, id, from, out);
      break;
  }
}

// Copy without the move history; legality probing never needs it.
Board scratch_copy(const Board& b) { return b.detached(); }

void filter_legal(const Board& board, std::vector<Move>& moves) {
  if (moves.empty()) return;
  Board scratch = scratch_copy(board);
  const Color us = board.side_to_move();
  std::erase_if(moves, [&](const Move& m) {
    scratch.play(m);
    const bool exposed = in_check(scratch, us);
    scratch.undo();
    return exposed;
  });
}

}  // namespace

std::vector<Move> pseudo_legal_moves(const Board& board) {
  std::vector<Move> out;
  out.reserve(48);
  for (std::uint8_t slot = 0; slot < PieceId::kSlots; ++slot)
    add_piece_moves(board, PieceId{board.side_to_move(), slot}, out);
  return out;
}

std::vector<Move> legal_moves(const Board& board) {
  auto moves = pseudo_legal_moves(board);
  filter_legal(board, moves);
  return moves;
}

std::vector<Move> legal_moves_of(const Board& board, PieceId piece) {
  std::vector<Move> out;
  if (piece.color != board.side_to_move()) return out;
  add_piece_moves(board, piece, out);
  filter_legal(board, out);
  return out;
}

bool has_legal_move(const Board& board) {
  Board scratch = scratch_copy(board);
  const Color us = board.side_to_move();
  std::vector<Move> moves;
  for (std::uint8_t slot = PieceId::kSlots; slot-- > 0;) {
    moves.clear();
    add_piece_moves(board, PieceId{us, slot}, moves);
    for (const Move& m : moves) {
      scratch.play(m);
      const bool exposed = in_check(scratch, us);
      scratch.undo();
      if (!exposed) return true;
    }
  }
  return false;
}

bool is_legal(const Board& board, const Move& m) {
  if (m.kind == MoveKind::Null) return false;
  if (m.piece.color != board.side_to_move() || board.square_of(m.piece) != m.from)
    return false;
  auto moves = legal_moves_of(board, m.piece);
  return std::find(moves.begin(), moves.end(), m) != moves.end();
}

bool in_check(const Board& board, Color c) {
  return board.is_attacked(board.king_square(c), opposite(c));
}

Board apply_move(const Board& board, const Move& m) {
  if (!is_legal(board, m)) throw IllegalMove("illegal move: " + to_text(m));
  Board next = board;
  next.play(m);
  return next;
}

}  // namespace coevo
