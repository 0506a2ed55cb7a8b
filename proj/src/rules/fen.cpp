#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>
#include <vector>

#include "coevo/board.hpp"

namespace coevo {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw ParseError("bad " + std::string(what) + ": " + std::string(s));
  return v;
}

std::optional<PieceKind> kind_from_letter(char ch) {
  switch (ch) {
    case 'p': return PieceKind::Pawn;
    case 'n': return PieceKind::Knight;
    case 'b': return PieceKind::Bishop;
    case 'r': return PieceKind::Rook;
    case 'q': return PieceKind::Queen;
    case 'k': return PieceKind::King;
    default: return std::nullopt;
  }
}

struct Placed {
  PieceKind kind;
  Square square;
};

// Assigns piece identities: pawns by file, paired pieces by board side,
// surplus pieces into free pawn slots as promoted pieces.
void assign_identities(Board& board, Color c, std::vector<Placed> placed) {
  std::array<bool, PieceId::kSlots> used{};
  std::vector<Placed> surplus;
  std::sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) {
    return a.square.file() != b.square.file() ? a.square.file() < b.square.file()
                                              : a.square.rank() < b.square.rank();
  });
  auto take = [&](std::uint8_t slot, const Placed& p) {
    used[slot] = true;
    board.put(PieceId{c, slot}, p.kind, p.square);
  };
  std::vector<Placed> pawns;
  int kings = 0;
  for (const Placed& p : placed) {
    switch (p.kind) {
      case PieceKind::Pawn: pawns.push_back(p); break;
      case PieceKind::King:
        if (++kings > 1) throw ParseError("more than one king per side");
        take(PieceId::kKingSlot, p);
        break;
      case PieceKind::Queen:
        if (!used[PieceId::kQueenSlot]) take(PieceId::kQueenSlot, p);
        else surplus.push_back(p);
        break;
      default: {
        const std::uint8_t base = p.kind == PieceKind::Rook     ? 8
                                  : p.kind == PieceKind::Knight ? 10
                                                                : 12;
        const std::uint8_t preferred = base + (p.square.file() >= 4 ? 1 : 0);
        const std::uint8_t other = preferred == base ? base + 1 : base;
        if (!used[preferred]) take(preferred, p);
        else if (!used[other]) take(other, p);
        else surplus.push_back(p);
      }
    }
  }
  if (kings != 1) throw ParseError("each side needs exactly one king");
  std::vector<Placed> unplaced_pawns;
  for (const Placed& p : pawns) {
    auto slot = static_cast<std::uint8_t>(p.square.file());
    if (!used[slot]) take(slot, p);
    else unplaced_pawns.push_back(p);
  }
  unplaced_pawns.insert(unplaced_pawns.end(), surplus.begin(), surplus.end());
  for (const Placed& p : unplaced_pawns) {
    std::uint8_t slot = 0;
    while (slot < 8 && used[slot]) ++slot;
    if (slot == 8) throw ParseError("too many pieces for one side");
    take(slot, p);
  }
}

SideState parse_side_state(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 3 || parts[0].size() != 4)
    throw ParseError("bad side state: " + std::string(text));
  SideState st;
  switch (parts[0][0]) {
    case '-': st.king = KingHistory::Home; break;
    case 'S': st.king = KingHistory::CastledShort; break;
    case 'L': st.king = KingHistory::CastledLong; break;
    case 'W': st.king = KingHistory::Walked; break;
    default: throw ParseError("bad king state: " + std::string(text));
  }
  auto flag = [&](char ch, char set) {
    if (ch == set) return true;
    if (ch == '.') return false;
    throw ParseError("bad side flags: " + std::string(text));
  };
  st.kings_rook_moved_first = flag(parts[0][1], 'h');
  st.queens_rook_moved_first = flag(parts[0][2], 'a');
  st.queen_moved_early = flag(parts[0][3], 'q');
  if (parts[1].size() != 1) throw ParseError("bad minor mask: " + std::string(text));
  const char m = parts[1][0];
  int mask = m >= '0' && m <= '9' ? m - '0' : m >= 'a' && m <= 'f' ? m - 'a' + 10 : -1;
  if (mask < 0) throw ParseError("bad minor mask: " + std::string(text));
  st.minors_moved_mask = static_cast<std::uint8_t>(mask);
  st.shield_moves = parse_int(parts[2], "shield move count");
  return st;
}

std::string format_side_state(const SideState& st) {
  std::string s;
  switch (st.king) {
    case KingHistory::Home: s += '-'; break;
    case KingHistory::CastledShort: s += 'S'; break;
    case KingHistory::CastledLong: s += 'L'; break;
    case KingHistory::Walked: s += 'W'; break;
  }
  s += st.kings_rook_moved_first ? 'h' : '.';
  s += st.queens_rook_moved_first ? 'a' : '.';
  s += st.queen_moved_early ? 'q' : '.';
  s += ':';
  s += "0123456789abcdef"[st.minors_moved_mask & 15];
  s += ':';
  s += std::to_string(st.shield_moves);
  return s;
}

}  // namespace

Board parse_fen(std::string_view fen) {
  auto fields = split(fen, ' ');
  if (fields.size() < 4) throw ParseError("FEN needs at least 4 fields");

  std::array<std::vector<Placed>, 2> placed;
  auto rows = split(fields[0], '/');
  if (rows.size() != 8) throw ParseError("FEN placement needs 8 ranks");
  for (int row = 0; row < 8; ++row) {
    const int rank = 7 - row;
    int file = 0;
    for (char ch : rows[row]) {
      if (ch >= '1' && ch <= '8') {
        file += ch - '0';
        continue;
      }
      const bool white = ch >= 'A' && ch <= 'Z';
      auto kind = kind_from_letter(white ? static_cast<char>(ch - 'A' + 'a') : ch);
      if (!kind || file > 7) throw ParseError("bad FEN placement: " + std::string(rows[row]));
      if (*kind == PieceKind::Pawn && (rank == 0 || rank == 7))
        throw ParseError("pawn on first or last rank");
      placed[white ? 0 : 1].push_back({*kind, Square(file, rank)});
      ++file;
    }
    if (file != 8) throw ParseError("FEN rank does not have 8 files: " + std::string(rows[row]));
  }

  Board board;
  assign_identities(board, Color::White, placed[0]);
  assign_identities(board, Color::Black, placed[1]);

  if (fields[1] == "w") board.set_side_to_move(Color::White);
  else if (fields[1] == "b") board.set_side_to_move(Color::Black);
  else throw ParseError("bad side to move: " + std::string(fields[1]));

  CastlingRights rights;
  if (fields[2] != "-") {
    for (char ch : fields[2]) {
      switch (ch) {
        case 'K': rights.white_short = true; break;
        case 'Q': rights.white_long = true; break;
        case 'k': rights.black_short = true; break;
        case 'q': rights.black_long = true; break;
        default: throw ParseError("bad castling field: " + std::string(fields[2]));
      }
    }
  }
  board.set_castling(rights);

  if (fields[3] != "-") {
    auto ep = Square::parse(fields[3]);
    if (!ep || (ep->rank() != 2 && ep->rank() != 5))
      throw ParseError("bad en passant square: " + std::string(fields[3]));
    board.set_en_passant(ep);
  }

  std::size_t next = 4;
  int halfmove = 0, fullmove = 1;
  if (next < fields.size() && fields[next][0] != '+') halfmove = parse_int(fields[next++], "halfmove clock");
  if (next < fields.size() && fields[next][0] != '+') fullmove = parse_int(fields[next++], "fullmove number");
  board.set_move_counters(halfmove, fullmove);

  if (next < fields.size()) {
    std::string_view ext = fields[next++];
    ext.remove_prefix(1);
    if (auto at = ext.find('@'); at != std::string_view::npos) {
      auto sq = Square::parse(ext.substr(at + 1));
      if (!sq) throw ParseError("bad last-moved square in extension");
      board.set_last_moved(sq);
      ext = ext.substr(0, at);
    }
    auto sides = split(ext, '/');
    if (sides.size() != 2) throw ParseError("extension needs white/black side states");
    board.set_side_state(Color::White, parse_side_state(sides[0]));
    board.set_side_state(Color::Black, parse_side_state(sides[1]));
  }
  if (next != fields.size()) throw ParseError("trailing FEN fields");

  if (in_check(board, opposite(board.side_to_move())))
    throw ParseError("side not to move is in check");
  board.reset_history();
  return board;
}

std::string to_fen(const Board& board, bool with_extension) {
  std::ostringstream os;
  for (int rank = 7; rank >= 0; --rank) {
    int gap = 0;
    for (int file = 0; file < 8; ++file) {
      auto id = board.at(Square(file, rank));
      if (!id) {
        ++gap;
        continue;
      }
      if (gap) os << gap;
      gap = 0;
      char ch = piece_letter(board.kind_of(*id));
      if (id->color == Color::Black) ch = static_cast<char>(ch - 'A' + 'a');
      os << ch;
    }
    if (gap) os << gap;
    if (rank) os << '/';
  }
  os << (board.side_to_move() == Color::White ? " w " : " b ");
  const auto r = board.castling();
  std::string c;
  if (r.white_short) c += 'K';
  if (r.white_long) c += 'Q';
  if (r.black_short) c += 'k';
  if (r.black_long) c += 'q';
  os << (c.empty() ? "-" : c) << ' ';
  os << (board.en_passant() ? board.en_passant()->to_string() : "-");
  os << ' ' << board.halfmove_clock() << ' ' << board.fullmove_number();
  const bool default_state = board.side_state(Color::White) == SideState{} &&
                             board.side_state(Color::Black) == SideState{} &&
                             !board.last_moved();
  if (with_extension && !default_state) {
    os << " +" << format_side_state(board.side_state(Color::White)) << '/'
       << format_side_state(board.side_state(Color::Black));
    if (board.last_moved()) os << '@' << board.last_moved()->to_string();
  }
  return os.str();
}

Move parse_move(const Board& board, std::string_view text) {
  const auto moves = legal_moves(board);
  auto find_kind = [&](MoveKind kind) -> Move {
    for (const Move& m : moves)
      if (m.kind == kind) return m;
    throw IllegalMove("castling not legal here: " + std::string(text));
  };
  if (text == "O-O" || text == "0-0") return find_kind(MoveKind::CastleShort);
  if (text == "O-O-O" || text == "0-0-0") return find_kind(MoveKind::CastleLong);
  if (text.size() != 4 && text.size() != 5) throw ParseError("bad move text: " + std::string(text));
  auto from = Square::parse(text.substr(0, 2));
  auto to = Square::parse(text.substr(2, 2));
  if (!from || !to) throw ParseError("bad move text: " + std::string(text));
  std::optional<PieceKind> promo;
  if (text.size() == 5) {
    promo = kind_from_letter(text[4]);
    if (!promo || *promo == PieceKind::Pawn || *promo == PieceKind::King)
      throw ParseError("bad promotion piece: " + std::string(text));
  }
  for (const Move& m : moves) {
    if (m.from != *from || m.to != *to) continue;
    if (m.kind == MoveKind::Promotion) {
      if (m.promotion == promo.value_or(PieceKind::Queen)) return m;
      continue;
    }
    if (promo) continue;
    return m;
  }
  throw IllegalMove("illegal move: " + std::string(text));
}

}  // namespace coevo
