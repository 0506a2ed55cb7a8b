#include <algorithm>
#include <sstream>

#include "coevo/evaluator.hpp"
#include "rules/geometry.hpp"

namespace coevo {

namespace {

using geometry::kCompass;

int relative_rank(Color c, int rank) { return c == Color::White ? rank : 7 - rank; }

int lookup(const Matrix8& m, Color c, Square s) {
  const int row = c == Color::White ? 7 - s.rank() : s.rank();
  return m[row][s.file()];
}

std::uint64_t pawn_mask(const Board& b, Color c) {
  std::uint64_t mask = 0;
  for (std::uint8_t slot = 0; slot < 8; ++slot) {
    const PieceId id{c, slot};
    if (b.on_board(id) && b.kind_of(id) == PieceKind::Pawn) mask |= b.square_of(id)->bit();
  }
  return mask;
}

bool has(std::uint64_t mask, int file, int rank) {
  return Square::on_board(file, rank) && (mask & Square(file, rank).bit());
}

std::uint64_t file_mask(int file) { return 0x0101010101010101ULL << file; }

bool is_kind_at(const Board& b, Square s, Color c, PieceKind k) {
  auto id = b.at(s);
  return id && id->color == c && b.kind_of(*id) == k;
}

// First piece met walking from `from` along compass direction `dir`.
std::optional<Square> first_on_ray(const Board& b, Square from, int dir) {
  const auto [df, dr] = kCompass[dir];
  for (int f = from.file() + df, r = from.rank() + dr; Square::on_board(f, r); f += df, r += dr) {
    if (!b.empty(Square(f, r))) return Square(f, r);
  }
  return std::nullopt;
}

int protecting_pawns(Square s, Color c, std::uint64_t own_pawns) {
  const int back = s.rank() - geometry::forward(c);
  return has(own_pawns, s.file() - 1, back) + has(own_pawns, s.file() + 1, back);
}

int manhattan(Square a, Square b) {
  return std::abs(a.file() - b.file()) + std::abs(a.rank() - b.rank());
}

bool lowest_slot_of_kind(const Board& b, PieceId id, PieceKind kind, std::optional<int> file) {
  for (std::uint8_t slot = 0; slot < id.slot; ++slot) {
    const PieceId other{id.color, slot};
    if (!b.on_board(other) || b.kind_of(other) != kind) continue;
    if (!file || b.square_of(other)->file() == *file) return false;
  }
  return true;
}

int pawn_rp(const Board& b, PieceId id, const RpConstants& rp) {
  const Color c = id.color;
  const Square s = *b.square_of(id);
  const int f = s.file(), rel = relative_rank(c, s.rank());
  const std::uint64_t own = pawn_mask(b, c), foe = pawn_mask(b, opposite(c));
  int score = 0;

  const int protectors = protecting_pawns(s, c, own);
  score += protectors * rp.pawn_protected;

  bool doubled = false;
  for (int r = 0; r < 8; ++r)
    if (has(own, f, r) && relative_rank(c, r) > rel) doubled = true;
  if (doubled) score += rp.pawn_doubled;

  const bool left = f > 0 && (own & file_mask(f - 1));
  const bool right = f < 7 && (own & file_mask(f + 1));
  if (!left && !right) score += rp.pawn_isolated;

  if (!(foe & file_mask(f))) score += rp.pawn_open_file;

  bool passed = true;
  for (int df = -1; df <= 1 && passed; ++df) {
    for (int r = 0; r < 8; ++r)
      if (has(foe, f + df, r) && relative_rank(c, r) > rel) passed = false;
  }
  if (passed) {
    score += rp.pawn_passed;
    if (protectors > 0) score += rp.pawn_passed_protected;
    const int ahead = s.rank() + geometry::forward(c);
    if (Square::on_board(f, ahead)) {
      const Square front(f, ahead);
      if (is_kind_at(b, front, opposite(c), PieceKind::Knight)) score += rp.pawn_blocked_by_knight;
      if (is_kind_at(b, front, opposite(c), PieceKind::Bishop)) score += rp.pawn_blocked_by_bishop;
    }
  }
  return score;
}

int rook_rp(const Board& b, PieceId id, const RpConstants& rp) {
  const Color c = id.color;
  const Square s = *b.square_of(id);
  int score = 0;
  if (relative_rank(c, s.rank()) == 6) score += rp.rook_seventh_rank;

  bool partner = false;
  for (PieceId other : b.pieces(c)) {
    if (other.slot != id.slot && b.kind_of(other) == PieceKind::Rook &&
        b.square_of(other)->file() == s.file())
      partner = true;
  }
  if (partner && lowest_slot_of_kind(b, id, PieceKind::Rook, s.file())) score += rp.rook_doubled_file;

  for (int dir : geometry::kRookRays) {
    if (auto hit = first_on_ray(b, s, dir); hit && is_kind_at(b, *hit, opposite(c), PieceKind::Pawn))
      score += rp.rook_attacks_pawn;
  }
  if (!(pawn_mask(b, opposite(c)) & file_mask(s.file()))) score += rp.rook_no_enemy_pawn_file;

  const SideState& st = b.side_state(c);
  if (id.slot == 9 && st.kings_rook_moved_first) score += rp.rook_kings_rook_first;
  if (id.slot == 8 && st.queens_rook_moved_first) score += rp.rook_queens_rook_first;
  return score;
}

int knight_rp(const Board& b, PieceId id, const RpConstants& rp) {
  const Square s = *b.square_of(id);
  if (manhattan(s, b.king_square(opposite(id.color))) > rp.knight_protection_max_proximity) return 0;
  return protecting_pawns(s, id.color, pawn_mask(b, id.color)) * rp.knight_protected;
}

int bishop_rp(const Board& b, PieceId id, const RpConstants& rp) {
  const Square s = *b.square_of(id);
  int score = 0;
  int bishops = 0;
  for (PieceId other : b.pieces(id.color))
    if (b.kind_of(other) == PieceKind::Bishop) ++bishops;
  if (bishops >= 2 && lowest_slot_of_kind(b, id, PieceKind::Bishop, std::nullopt))
    score += rp.bishop_pair;
  for (int dir : geometry::kBishopRays) {
    const auto [df, dr] = kCompass[dir];
    if (!Square::on_board(s.file() + df, s.rank() + dr)) continue;
    auto k = b.kind_at(Square(s.file() + df, s.rank() + dr));
    if (k == PieceKind::Pawn) score += rp.bishop_adjacent_pawn;
  }
  return score;
}

int queen_rp(const Board& b, PieceId id, const RpConstants& rp) {
  const Color c = id.color;
  const Square s = *b.square_of(id);
  int score = 0;
  for (int dir : geometry::kBishopRays) {
    if (auto hit = first_on_ray(b, s, dir); hit && is_kind_at(b, *hit, c, PieceKind::Bishop))
      score += rp.queen_bishop_diagonal;
  }
  if (id.slot == PieceId::kQueenSlot && b.side_state(c).queen_moved_early) score += rp.queen_moved_early;
  if (relative_rank(c, s.rank()) == 6) score += rp.queen_seventh_rank;
  const std::uint64_t pawns = pawn_mask(b, Color::White) | pawn_mask(b, Color::Black);
  if (!(pawns & file_mask(s.file()))) score += rp.queen_pawnless_file;
  return score;
}

int king_rp(const Board& b, PieceId id, const RpConstants& rp, bool defeated) {
  const Color c = id.color;
  const SideState& st = b.side_state(c);
  int score = defeated ? rp.king_defeated : 0;
  if (st.castled()) score += rp.king_castled;
  if (st.king == KingHistory::Walked) score += rp.king_walked;
  int balance = 0;
  for (int sq : geometry::king_targets(b.king_square(c))) {
    auto other = b.at(Square::from_index(sq));
    if (!other) continue;
    const int weight = b.kind_of(*other) == PieceKind::Queen ? rp.king_surround_queen_count : 1;
    balance += other->color == c ? weight : -weight;
  }
  score += balance * rp.king_surround;
  score += st.shield_moves * rp.king_shield_move;
  return score;
}

int rp_with(const Board& b, PieceId id, const ScoreTables& t, bool king_defeated) {
  switch (b.kind_of(id)) {
    case PieceKind::Pawn: return pawn_rp(b, id, t.rp);
    case PieceKind::Rook: return rook_rp(b, id, t.rp);
    case PieceKind::Knight: return knight_rp(b, id, t.rp);
    case PieceKind::Bishop: return bishop_rp(b, id, t.rp);
    case PieceKind::Queen: return queen_rp(b, id, t.rp);
    case PieceKind::King: return king_rp(b, id, t.rp, king_defeated);
  }
  return 0;
}

bool attacks(const Board& b, PieceId id, Square from, Square to, std::uint64_t occ) {
  const int df = to.file() - from.file(), dr = to.rank() - from.rank();
  const int adf = std::abs(df), adr = std::abs(dr);
  auto clear = [&] {
    const int sf = (df > 0) - (df < 0), sr = (dr > 0) - (dr < 0);
    for (int f = from.file() + sf, r = from.rank() + sr; Square(f, r) != to; f += sf, r += sr)
      if (occ & Square(f, r).bit()) return false;
    return true;
  };
  switch (b.kind_of(id)) {
    case PieceKind::Pawn: return adf == 1 && dr == geometry::forward(id.color);
    case PieceKind::Knight: return (adf == 1 && adr == 2) || (adf == 2 && adr == 1);
    case PieceKind::King: return std::max(adf, adr) == 1;
    case PieceKind::Bishop: return adf == adr && adf > 0 && clear();
    case PieceKind::Rook: return (adf == 0) != (adr == 0) && clear();
    case PieceKind::Queen:
      return (adf == adr || adf == 0 || adr == 0) && (adf | adr) != 0 && clear();
  }
  return false;
}

// Least valuable piece of `c` attacking `to` through `occ`.
std::optional<PieceId> least_attacker(const Board& b, Color c, Square to, std::uint64_t occ,
                                      const ScoreTables& t) {
  std::optional<PieceId> best;
  int best_weight = 0;
  for (PieceId id : b.pieces(c)) {
    const Square from = *b.square_of(id);
    if (from == to || !(occ & from.bit()) || !attacks(b, id, from, to, occ)) continue;
    const int w = t.weight(b.kind_of(id));
    if (!best || w < best_weight) {
      best = id;
      best_weight = w;
    }
  }
  return best;
}

}  // namespace

int minor_piece_count(const Board& board) {
  int n = 0;
  for (Color c : {Color::White, Color::Black}) {
    for (PieceId id : board.pieces(c)) {
      const PieceKind k = board.kind_of(id);
      if (k == PieceKind::Knight || k == PieceKind::Bishop) ++n;
    }
  }
  return n;
}

GameStage stage(const Board& board) {
  return minor_piece_count(board) < 6 ? GameStage::End : GameStage::Beginning;
}

int ap_score(const Board& board, PieceId piece, const ScoreTables& t, GameStage st) {
  const Square s = *board.square_of(piece);
  const Color c = piece.color;
  switch (board.kind_of(piece)) {
    case PieceKind::Pawn: {
      if (st == GameStage::End) return lookup(t.pawn_ap_end, c, s);
      switch (board.side_state(c).king) {
        case KingHistory::CastledShort: return lookup(t.pawn_ap_castled_left, c, s);
        case KingHistory::CastledLong: return lookup(t.pawn_ap_castled_right, c, s);
        default: return lookup(t.pawn_ap_begin, c, s);
      }
    }
    case PieceKind::Knight: return lookup(t.knight_ap, c, s);
    case PieceKind::Bishop: return lookup(t.bishop_ap, c, s);
    case PieceKind::King:
      return lookup(st == GameStage::End ? t.king_ap_end : t.king_ap_begin, c, s);
    case PieceKind::Rook:
    case PieceKind::Queen: return 0;
  }
  return 0;
}

int mobility_count(const Board& board, PieceId piece) {
  const Square s = *board.square_of(piece);
  const PieceKind kind = board.kind_of(piece);
  int n = 0;
  if (kind == PieceKind::Knight) {
    for (int sq : geometry::knight_targets(s)) n += board.empty(Square::from_index(sq));
    return n;
  }
  const bool orth = kind == PieceKind::Rook || kind == PieceKind::Queen;
  const bool diag = kind == PieceKind::Bishop || kind == PieceKind::Queen;
  for (int dir = 0; dir < 8; ++dir) {
    if (dir % 2 == 0 ? !orth : !diag) continue;
    const auto [df, dr] = kCompass[dir];
    for (int f = s.file() + df, r = s.rank() + dr; Square::on_board(f, r); f += df, r += dr) {
      auto other = board.at(Square(f, r));
      if (!other) {
        ++n;
        continue;
      }
      if (other->color != piece.color && board.kind_of(*other) != PieceKind::King) ++n;
      break;
    }
  }
  return n;
}

int mobility_score(const Board& board, PieceId piece, const ScoreTables& t, GameStage st) {
  const PieceKind kind = board.kind_of(piece);
  if (kind == PieceKind::Pawn || kind == PieceKind::King) return 0;
  const int n = mobility_count(board, piece);
  switch (kind) {
    case PieceKind::Rook: return t.rook_mobility[std::min(n, 12)];
    case PieceKind::Knight: return t.knight_mobility[std::min(n, 8)];
    case PieceKind::Bishop: return t.bishop_mobility[std::min(n, 13)];
    default:
      return (st == GameStage::End ? t.queen_mobility_end : t.queen_mobility_begin)[std::min(n, 28)];
  }
}

int proximity_score(const Board& board, PieceId piece, const ScoreTables& t) {
  const Square s = *board.square_of(piece);
  const Square k = board.king_square(opposite(piece.color));
  const int rows = std::abs(s.rank() - k.rank()), cols = std::abs(s.file() - k.file());
  switch (board.kind_of(piece)) {
    case PieceKind::Rook: {
      auto axis = [&](int d) { return d == 0 ? 0 : t.rook_proximity_axis[d - 1]; };
      return axis(rows) + axis(cols);
    }
    case PieceKind::Knight: return t.knight_proximity[rows + cols - 1];
    case PieceKind::Queen: return t.queen_proximity[rows + cols - 1];
    default: return 0;
  }
}

int rp_score(const Board& board, PieceId piece, const ScoreTables& t) {
  bool defeated = false;
  if (board.kind_of(piece) == PieceKind::King && piece.color == board.side_to_move())
    defeated = detect_termination(board).loser == piece.color;
  return rp_with(board, piece, t, defeated);
}

// Alternating capture sequence on `target`: the owner loses each piece that is
// taken there and wins back each capturer that is retaken. Attackers are
// revealed behind removed pieces. A King only captures when nothing can
// retake. The owner's result is clamped at zero from above.
int mp_score(const Board& board, Square target, const ScoreTables& t) {
  const auto victim = board.at(target);
  if (!victim) return 0;
  const Color owner = victim->color;
  std::uint64_t occ = board.occupancy();
  int on_square = t.weight(board.kind_of(*victim));
  Color side = opposite(owner);
  int total = 0;
  while (auto capturer = least_attacker(board, side, target, occ, t)) {
    const Square from = *board.square_of(*capturer);
    if (board.kind_of(*capturer) == PieceKind::King &&
        least_attacker(board, opposite(side), target, occ & ~from.bit(), t))
      break;
    total += side == owner ? on_square : -on_square;
    on_square = t.weight(board.kind_of(*capturer));
    occ &= ~from.bit();
    side = opposite(side);
  }
  return std::min(0, total);
}

ScoreBreakdown evaluate_board(const Board& board, Color perspective, const ScoreTables& t,
                              const RulesOptions& rules) {
  ScoreBreakdown out;
  out.perspective = perspective;
  out.termination = detect_termination(board, rules);
  if (out.termination.terminal() && !out.termination.decisive()) return out;

  const GameStage st = stage(board);
  for (Color c : {Color::White, Color::Black}) {
    SideScores& s = out.sides[static_cast<int>(c)];
    const bool defeated = out.termination.loser == c;
    for (PieceId id : board.pieces(c)) {
      s.material += t.weight(board.kind_of(id));
      s.ap += ap_score(board, id, t, st);
      s.rp += rp_with(board, id, t, defeated);
      s.mobility += mobility_score(board, id, t, st);
      s.proximity += proximity_score(board, id, t);
    }
  }
  if (auto last = board.last_moved()) {
    if (auto id = board.at(*last)) out.sides[static_cast<int>(id->color)].mp = mp_score(board, *last, t);
  }
  out.total = out.own().sum() - out.opponent().sum();
  return out;
}

std::string format_breakdown(const ScoreBreakdown& b) {
  std::ostringstream os;
  const SideScores& w = b.sides[0];
  const SideScores& k = b.sides[1];
  os << "perspective " << color_name(b.perspective) << '\n';
  os << "termination " << describe(b.termination) << '\n';
  os << "category white black\n";
  os << "material " << w.material << ' ' << k.material << '\n';
  os << "ap " << w.ap << ' ' << k.ap << '\n';
  os << "rp " << w.rp << ' ' << k.rp << '\n';
  os << "mobility " << w.mobility << ' ' << k.mobility << '\n';
  os << "proximity " << w.proximity << ' ' << k.proximity << '\n';
  os << "mp " << w.mp << ' ' << k.mp << '\n';
  os << "sum " << w.sum() << ' ' << k.sum() << '\n';
  os << "total " << b.total << '\n';
  return os.str();
}

namespace {

// Shared playout loop. `color_at(i)` is the mover of ply i; `gene_at(i)` is
// the gene to play or nullopt for a forced pass.
template <class ColorAt, class GeneAt>
double playout(std::size_t plies, const Board& start, Color root, const ScoreTables& t,
               const FitnessOptions& opts, ColorAt color_at, GeneAt gene_at) {
  Board sim = start;
  double sum = 0;
  double penalties = 0;
  double last = 0;
  for (std::size_t i = 0; i < plies; ++i) {
    const Color mover = color_at(i);
    const std::optional<Gene> gene = gene_at(i);
    if (!gene) {
      sim.play_null();
      continue;
    }
    std::optional<Move> m;
    if (sim.side_to_move() == mover) m = decode(*gene, mover, sim);
    if (!m) {
      penalties += opts.skip_penalty;
      if (sim.side_to_move() == mover) sim.play_null();
      continue;
    }
    sim.play(*m);
    const ScoreBreakdown b = evaluate_board(sim, root, t, opts.rules);
    last = b.total;
    sum += last;
    if (b.termination.terminal()) {
      sum += last * static_cast<double>(plies - i - 1);
      break;
    }
  }
  return (opts.mode == FitnessMode::Sum ? sum : last) + penalties;
}

}  // namespace

double evaluate_mixed(const MixedChromosome& mixed, const Board& start, Color root,
                      const ScoreTables& t, const FitnessOptions& opts) {
  return playout(
      mixed.genes.size(), start, root, t, opts, [&](std::size_t i) { return mixed.color_of(i); },
      [&](std::size_t i) { return std::optional<Gene>(mixed.genes[i]); });
}

double evaluate_solo(const Chromosome& c, const Board& start, const ScoreTables& t,
                     const FitnessOptions& opts) {
  // Own genes at even plies when the chromosome's side is to move, passes between.
  const bool own_first = start.side_to_move() == c.color;
  const std::size_t plies = 2 * c.genes.size() - (own_first ? 1 : 0);
  return playout(
      plies, start, c.color, t, opts,
      [&](std::size_t i) { return (i % 2 == 0) == own_first ? c.color : opposite(c.color); },
      [&](std::size_t i) -> std::optional<Gene> {
        if ((i % 2 == 0) != own_first) return std::nullopt;
        return c.genes[own_first ? i / 2 : (i - 1) / 2];
      });
}

}  // namespace coevo
