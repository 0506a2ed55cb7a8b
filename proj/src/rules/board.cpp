#include "coevo/board.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "rules/geometry.hpp"

namespace coevo {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct ZobristKeys {
  std::uint64_t piece[2][kPieceKindCount][64];
  std::uint64_t castling[16];
  std::uint64_t en_passant_file[8];
  std::uint64_t black_to_move;
};

constexpr ZobristKeys make_keys() {
  ZobristKeys k{};
  std::uint64_t state = 0xC0E70C4E55ULL;
  for (auto& by_color : k.piece)
    for (auto& by_kind : by_color)
      for (auto& key : by_kind) key = splitmix(state);
  for (auto& key : k.castling) key = splitmix(state);
  for (auto& key : k.en_passant_file) key = splitmix(state);
  k.black_to_move = splitmix(state);
  return k;
}

constexpr ZobristKeys kKeys = make_keys();

constexpr int kCornerA1 = 0, kCornerH1 = 7, kCornerA8 = 56, kCornerH8 = 63;

std::uint8_t rights_cleared_by_square(int sq) {
  switch (sq) {
    case kCornerH1: return 1;
    case kCornerA1: return 2;
    case kCornerH8: return 4;
    case kCornerA8: return 8;
    case 4: return 3;    // e1
    case 60: return 12;  // e8
    default: return 0;
  }
}

}  // namespace

std::string_view color_name(Color c) {
  return c == Color::White ? "white" : "black";
}

char piece_letter(PieceKind kind) {
  static constexpr char kLetters[] = {'P', 'N', 'B', 'R', 'Q', 'K'};
  return kLetters[static_cast<int>(kind)];
}

std::optional<Square> Square::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  int file = text[0] - 'a';
  int rank = text[1] - '1';
  if (!on_board(file, rank)) return std::nullopt;
  return Square(file, rank);
}

std::string Square::to_string() const {
  return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::string to_text(const Move& m) {
  switch (m.kind) {
    case MoveKind::CastleShort: return "O-O";
    case MoveKind::CastleLong: return "O-O-O";
    case MoveKind::Null: return "--";
    default: break;
  }
  std::string s = m.from.to_string() + m.to.to_string();
  if (m.kind == MoveKind::Promotion)
    s += static_cast<char>(piece_letter(m.promotion) - 'A' + 'a');
  return s;
}

Board::Board() {
  squares_.fill(kEmpty);
  piece_square_.fill(-1);
  for (int i = 0; i < kPieces; ++i)
    piece_kind_[i] = PieceId::from_index(i).nominal_kind();
  hash_ = start_hash_ = compute_hash();
}

Board Board::initial() { return parse_fen(kStartFen); }

std::vector<PieceId> Board::pieces(Color c) const {
  std::vector<PieceId> out;
  out.reserve(16);
  for (std::uint8_t slot = 0; slot < PieceId::kSlots; ++slot) {
    PieceId id{c, slot};
    if (on_board(id)) out.push_back(id);
  }
  return out;
}

std::vector<PieceId> Board::captured() const {
  std::vector<PieceId> out;
  for (int i = 0; i < kPieces; ++i)
    if (piece_square_[i] < 0) out.push_back(PieceId::from_index(i));
  return out;
}

void Board::xor_piece(PieceKind kind, Color c, int sq) {
  hash_ ^= kKeys.piece[static_cast<int>(c)][static_cast<int>(kind)][sq];
}

std::uint64_t Board::compute_hash() const {
  std::uint64_t h = 0;
  for (int sq = 0; sq < 64; ++sq) {
    if (squares_[sq] == kEmpty) continue;
    auto id = PieceId::from_index(squares_[sq]);
    h ^= kKeys.piece[static_cast<int>(id.color)]
                    [static_cast<int>(piece_kind_[squares_[sq]])][sq];
  }
  h ^= kKeys.castling[castling_];
  if (en_passant_ >= 0) h ^= kKeys.en_passant_file[en_passant_ & 7];
  if (side_to_move_ == Color::Black) h ^= kKeys.black_to_move;
  return h;
}

void Board::put(PieceId id, PieceKind kind, Square s) {
  if (!empty(s)) remove(s);
  if (auto old = square_of(id)) remove(*old);
  squares_[s.index()] = static_cast<std::uint8_t>(id.index());
  piece_square_[id.index()] = static_cast<std::int8_t>(s.index());
  piece_kind_[id.index()] = kind;
  occupancy_ |= s.bit();
  hash_ = start_hash_ = compute_hash();
}

void Board::remove(Square s) {
  auto v = squares_[s.index()];
  if (v == kEmpty) return;
  piece_square_[v] = -1;
  piece_kind_[v] = PieceId::from_index(v).nominal_kind();
  squares_[s.index()] = kEmpty;
  occupancy_ &= ~s.bit();
  hash_ = start_hash_ = compute_hash();
}

void Board::set_side_to_move(Color c) {
  side_to_move_ = c;
  hash_ = start_hash_ = compute_hash();
}

void Board::set_castling(CastlingRights r) {
  castling_ = r.mask();
  hash_ = start_hash_ = compute_hash();
}

void Board::set_en_passant(std::optional<Square> s) {
  en_passant_ = s ? static_cast<std::int8_t>(s->index()) : -1;
  hash_ = start_hash_ = compute_hash();
}

void Board::reset_history() {
  history_.clear();
  start_hash_ = hash_;
}

Board Board::detached() const {
  Board b;
  b.squares_ = squares_;
  b.piece_square_ = piece_square_;
  b.piece_kind_ = piece_kind_;
  b.occupancy_ = occupancy_;
  b.side_to_move_ = side_to_move_;
  b.castling_ = castling_;
  b.en_passant_ = en_passant_;
  b.last_moved_ = last_moved_;
  b.side_state_ = side_state_;
  b.halfmove_clock_ = halfmove_clock_;
  b.fullmove_number_ = fullmove_number_;
  b.hash_ = b.start_hash_ = hash_;
  return b;
}

bool Board::operator==(const Board& other) const {
  if (squares_ != other.squares_ || piece_kind_ != other.piece_kind_ ||
      side_to_move_ != other.side_to_move_ || castling_ != other.castling_ ||
      en_passant_ != other.en_passant_ || last_moved_ != other.last_moved_ ||
      side_state_ != other.side_state_ ||
      halfmove_clock_ != other.halfmove_clock_ ||
      fullmove_number_ != other.fullmove_number_ || hash_ != other.hash_ ||
      start_hash_ != other.start_hash_ ||
      history_.size() != other.history_.size())
    return false;
  for (std::size_t i = 0; i < history_.size(); ++i) {
    if (!(history_[i].move == other.history_[i].move) ||
        history_[i].hash_after != other.history_[i].hash_after)
      return false;
  }
  return true;
}

bool Board::is_attacked(Square s, Color by, std::uint64_t occ) const {
  const int file = s.file(), rank = s.rank();
  auto holds = [&](int sq, PieceKind a, PieceKind b) {
    if (!(occ & (std::uint64_t{1} << sq))) return false;
    auto v = squares_[sq];
    if (v == kEmpty) return false;
    if (PieceId::from_index(v).color != by) return false;
    auto k = piece_kind_[v];
    return k == a || k == b;
  };
  // Pawns attack diagonally forward, so look backward from the target.
  const int pawn_rank = rank + (by == Color::White ? -1 : 1);
  for (int df : {-1, 1}) {
    if (Square::on_board(file + df, pawn_rank) &&
        holds(Square(file + df, pawn_rank).index(), PieceKind::Pawn, PieceKind::Pawn))
      return true;
  }
  for (int sq : geometry::knight_targets(s))
    if (holds(sq, PieceKind::Knight, PieceKind::Knight)) return true;
  for (int sq : geometry::king_targets(s))
    if (holds(sq, PieceKind::King, PieceKind::King)) return true;
  for (int d = 0; d < 8; ++d) {
    const auto [df, dr] = geometry::kCompass[d];
    const bool diagonal = df != 0 && dr != 0;
    for (int f = file + df, r = rank + dr; Square::on_board(f, r); f += df, r += dr) {
      int sq = r * 8 + f;
      if (!(occ & (std::uint64_t{1} << sq))) continue;
      if (diagonal ? holds(sq, PieceKind::Bishop, PieceKind::Queen)
                   : holds(sq, PieceKind::Rook, PieceKind::Queen))
        return true;
      break;
    }
  }
  return false;
}

void Board::play(const Move& m) {
  HistoryEntry e;
  e.move = m;
  e.prior_castling = castling_;
  e.prior_en_passant = en_passant_;
  e.prior_last_moved = last_moved_;
  e.prior_halfmove_clock = halfmove_clock_;
  const Color c = m.piece.color;
  const int ci = static_cast<int>(c);
  e.prior_side_state = side_state_[ci];

  if (m.kind == MoveKind::Null) {
    hash_ ^= kKeys.castling[castling_];
    if (en_passant_ >= 0) hash_ ^= kKeys.en_passant_file[en_passant_ & 7];
    en_passant_ = -1;
    last_moved_ = -1;
    hash_ ^= kKeys.castling[castling_];
    side_to_move_ = opposite(side_to_move_);
    hash_ ^= kKeys.black_to_move;
    e.hash_after = hash_;
    history_.push_back(e);
    return;
  }

  const int mover = m.piece.index();
  const PieceKind moving_kind = piece_kind_[mover];
  const int from = m.from.index(), to = m.to.index();

  hash_ ^= kKeys.castling[castling_];
  if (en_passant_ >= 0) hash_ ^= kKeys.en_passant_file[en_passant_ & 7];

  // capture
  int victim_sq = -1;
  if (m.kind == MoveKind::EnPassant)
    victim_sq = Square(m.to.file(), m.from.rank()).index();
  else if (squares_[to] != kEmpty)
    victim_sq = to;
  if (victim_sq >= 0) {
    const int victim = squares_[victim_sq];
    e.captured = static_cast<std::int8_t>(victim);
    e.captured_kind = piece_kind_[victim];
    e.captured_square = static_cast<std::int8_t>(victim_sq);
    xor_piece(piece_kind_[victim], PieceId::from_index(victim).color, victim_sq);
    squares_[victim_sq] = kEmpty;
    piece_square_[victim] = -1;
    occupancy_ &= ~(std::uint64_t{1} << victim_sq);
    castling_ &= ~rights_cleared_by_square(victim_sq);
  }

  // move
  xor_piece(moving_kind, c, from);
  squares_[from] = kEmpty;
  occupancy_ &= ~(std::uint64_t{1} << from);
  const PieceKind landed_kind =
      m.kind == MoveKind::Promotion ? m.promotion : moving_kind;
  piece_kind_[mover] = landed_kind;
  squares_[to] = static_cast<std::uint8_t>(mover);
  piece_square_[mover] = static_cast<std::int8_t>(to);
  occupancy_ |= std::uint64_t{1} << to;
  xor_piece(landed_kind, c, to);

  if (m.is_castle()) {
    const int rank = m.from.rank();
    const bool short_side = m.kind == MoveKind::CastleShort;
    const int rook_from = rank * 8 + (short_side ? 7 : 0);
    const int rook_to = rank * 8 + (short_side ? 5 : 3);
    const int rook = squares_[rook_from];
    xor_piece(PieceKind::Rook, c, rook_from);
    squares_[rook_from] = kEmpty;
    occupancy_ &= ~(std::uint64_t{1} << rook_from);
    squares_[rook_to] = static_cast<std::uint8_t>(rook);
    piece_square_[rook] = static_cast<std::int8_t>(rook_to);
    occupancy_ |= std::uint64_t{1} << rook_to;
    xor_piece(PieceKind::Rook, c, rook_to);
  }

  castling_ &= ~rights_cleared_by_square(from);
  castling_ &= ~rights_cleared_by_square(to);

  en_passant_ = -1;
  if (moving_kind == PieceKind::Pawn && std::abs(to - from) == 16)
    en_passant_ = static_cast<std::int8_t>((from + to) / 2);

  SideState& st = side_state_[ci];
  const auto slot = m.piece.slot;
  switch (moving_kind) {
    case PieceKind::King:
      if (st.king == KingHistory::Home) {
        st.king = m.kind == MoveKind::CastleShort  ? KingHistory::CastledShort
                  : m.kind == MoveKind::CastleLong ? KingHistory::CastledLong
                                                   : KingHistory::Walked;
      }
      break;
    case PieceKind::Rook:
      if (st.king == KingHistory::Home) {
        if (slot == 9) st.kings_rook_moved_first = true;
        if (slot == 8) st.queens_rook_moved_first = true;
      }
      break;
    case PieceKind::Queen:
      if (slot == PieceId::kQueenSlot && std::popcount(st.minors_moved_mask) < 2)
        st.queen_moved_early = true;
      break;
    case PieceKind::Knight:
    case PieceKind::Bishop:
      if (slot >= 10 && slot <= 13)
        st.minors_moved_mask |= static_cast<std::uint8_t>(1u << (slot - 10));
      break;
    case PieceKind::Pawn: {
      const int f = m.from.file();
      if ((st.king == KingHistory::CastledShort && f >= 5) ||
          (st.king == KingHistory::CastledLong && f <= 2))
        ++st.shield_moves;
      break;
    }
  }

  last_moved_ = static_cast<std::int8_t>(to);
  if (moving_kind == PieceKind::Pawn || victim_sq >= 0)
    halfmove_clock_ = 0;
  else
    ++halfmove_clock_;
  if (c == Color::Black) ++fullmove_number_;
  side_to_move_ = opposite(side_to_move_);

  hash_ ^= kKeys.castling[castling_];
  if (en_passant_ >= 0) hash_ ^= kKeys.en_passant_file[en_passant_ & 7];
  hash_ ^= kKeys.black_to_move;
  e.hash_after = hash_;
  history_.push_back(e);
}

void Board::play_null() {
  Move m;
  m.piece = PieceId{side_to_move_, PieceId::kKingSlot};
  m.kind = MoveKind::Null;
  m.from = m.to = king_square(side_to_move_);
  play(m);
}

void Board::undo() {
  const HistoryEntry e = history_.back();
  history_.pop_back();
  const Move& m = e.move;
  const Color c = m.piece.color;

  side_to_move_ = c;
  castling_ = e.prior_castling;
  en_passant_ = e.prior_en_passant;
  last_moved_ = e.prior_last_moved;
  halfmove_clock_ = e.prior_halfmove_clock;
  side_state_[static_cast<int>(c)] = e.prior_side_state;
  hash_ = history_.empty() ? start_hash_ : history_.back().hash_after;

  if (m.kind == MoveKind::Null) return;
  if (c == Color::Black) --fullmove_number_;

  const int mover = m.piece.index();
  const int from = m.from.index(), to = m.to.index();
  squares_[to] = kEmpty;
  occupancy_ &= ~(std::uint64_t{1} << to);
  if (m.kind == MoveKind::Promotion) piece_kind_[mover] = PieceKind::Pawn;
  squares_[from] = static_cast<std::uint8_t>(mover);
  piece_square_[mover] = static_cast<std::int8_t>(from);
  occupancy_ |= std::uint64_t{1} << from;

  if (m.is_castle()) {
    const int rank = m.from.rank();
    const bool short_side = m.kind == MoveKind::CastleShort;
    const int rook_from = rank * 8 + (short_side ? 7 : 0);
    const int rook_to = rank * 8 + (short_side ? 5 : 3);
    const int rook = squares_[rook_to];
    squares_[rook_to] = kEmpty;
    occupancy_ &= ~(std::uint64_t{1} << rook_to);
    squares_[rook_from] = static_cast<std::uint8_t>(rook);
    piece_square_[rook] = static_cast<std::int8_t>(rook_from);
    occupancy_ |= std::uint64_t{1} << rook_from;
  }

  if (e.captured >= 0) {
    squares_[e.captured_square] = static_cast<std::uint8_t>(e.captured);
    piece_square_[e.captured] = e.captured_square;
    piece_kind_[e.captured] = e.captured_kind;
    occupancy_ |= std::uint64_t{1} << e.captured_square;
  }
}

std::string ascii_board(const Board& board) {
  std::ostringstream os;
  for (int rank = 7; rank >= 0; --rank) {
    os << rank + 1 << ' ';
    for (int file = 0; file < 8; ++file) {
      Square s(file, rank);
      char ch = '.';
      if (auto id = board.at(s)) {
        ch = piece_letter(board.kind_of(*id));
        if (id->color == Color::Black) ch = static_cast<char>(ch - 'A' + 'a');
      }
      os << ch << (file < 7 ? " " : "");
    }
    os << '\n';
  }
  os << "  a b c d e f g h\n";
  return os.str();
}

}  // namespace coevo
