#include "oracle/move_oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace oracle {

namespace {

bool is_white(char c) { return c >= 'A' && c <= 'Z'; }
bool is_black(char c) { return c >= 'a' && c <= 'z'; }
bool own(char c, bool white) { return white ? is_white(c) : is_black(c); }
bool foe(char c, bool white) { return white ? is_black(c) : is_white(c); }

std::string name(int sq) {
  return {static_cast<char>('a' + sq % 8), static_cast<char>('1' + sq / 8)};
}

// Whether the piece on `from` attacks `to` by its movement pattern.
bool attacks(const Position& p, int from, int to) {
  const char piece = p.sq[from];
  if (piece == '.' || from == to) return false;
  const int ff = from % 8, fr = from / 8, tf = to % 8, tr = to / 8;
  const int df = tf - ff, dr = tr - fr;
  const char kind = static_cast<char>(std::tolower(piece));
  auto path_clear = [&](int sf, int sr) {
    int f = ff + sf, r = fr + sr;
    while (f != tf || r != tr) {
      if (p.sq[r * 8 + f] != '.') return false;
      f += sf;
      r += sr;
    }
    return true;
  };
  auto sgn = [](int v) { return (v > 0) - (v < 0); };
  switch (kind) {
    case 'p': return std::abs(df) == 1 && dr == (is_white(piece) ? 1 : -1);
    case 'n': return (std::abs(df) == 1 && std::abs(dr) == 2) || (std::abs(df) == 2 && std::abs(dr) == 1);
    case 'k': return std::abs(df) <= 1 && std::abs(dr) <= 1;
    case 'r': return (df == 0 || dr == 0) && path_clear(sgn(df), sgn(dr));
    case 'b': return std::abs(df) == std::abs(dr) && path_clear(sgn(df), sgn(dr));
    case 'q':
      return (df == 0 || dr == 0 || std::abs(df) == std::abs(dr)) && path_clear(sgn(df), sgn(dr));
  }
  return false;
}

bool square_attacked(const Position& p, int sq, bool by_white) {
  for (int i = 0; i < 64; ++i)
    if (own(p.sq[i], by_white) && attacks(p, i, sq)) return true;
  return false;
}

}  // namespace

Position parse(const std::string& fen) {
  Position p;
  std::fill(std::begin(p.sq), std::end(p.sq), '.');
  std::istringstream in(fen);
  std::string placement, side, castling, ep;
  in >> placement >> side >> castling >> ep;
  int rank = 7, file = 0;
  for (char c : placement) {
    if (c == '/') {
      --rank;
      file = 0;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      file += c - '0';
    } else {
      p.sq[rank * 8 + file++] = c;
    }
  }
  p.white_to_move = side == "w";
  for (char c : castling) {
    if (c == 'K') p.castle[0] = true;
    if (c == 'Q') p.castle[1] = true;
    if (c == 'k') p.castle[2] = true;
    if (c == 'q') p.castle[3] = true;
  }
  if (ep != "-") p.ep = (ep[1] - '1') * 8 + (ep[0] - 'a');
  return p;
}

bool king_attacked(const Position& p, bool white_king) {
  const char king = white_king ? 'K' : 'k';
  for (int i = 0; i < 64; ++i)
    if (p.sq[i] == king) return square_attacked(p, i, !white_king);
  return false;
}

std::vector<std::string> legal_moves(const Position& p) {
  const bool white = p.white_to_move;
  std::vector<std::string> out;
  auto try_move = [&](int from, int to, char promo, bool ep_capture) {
    if (std::tolower(p.sq[to]) == 'k') return;
    Position q = p;
    q.sq[to] = promo ? (white ? static_cast<char>(std::toupper(promo)) : promo) : q.sq[from];
    q.sq[from] = '.';
    if (ep_capture) q.sq[(from / 8) * 8 + to % 8] = '.';
    if (king_attacked(q, white)) return;
    std::string text = name(from) + name(to);
    if (promo) text += promo;
    out.push_back(text);
  };
  for (int from = 0; from < 64; ++from) {
    const char piece = p.sq[from];
    if (!own(piece, white)) continue;
    const char kind = static_cast<char>(std::tolower(piece));
    if (kind == 'p') {
      const int dir = white ? 8 : -8;
      const int last = white ? 7 : 0;
      const int start = white ? 1 : 6;
      auto pawn_to = [&](int to, bool ep_capture) {
        if (to / 8 == last) {
          for (char promo : {'q', 'r', 'b', 'n'}) try_move(from, to, promo, false);
        } else {
          try_move(from, to, 0, ep_capture);
        }
      };
      const int one = from + dir;
      if (one >= 0 && one < 64 && p.sq[one] == '.') {
        pawn_to(one, false);
        const int two = one + dir;
        if (from / 8 == start && p.sq[two] == '.') try_move(from, two, 0, false);
      }
      for (int df : {-1, 1}) {
        const int f = from % 8 + df;
        if (f < 0 || f > 7 || one < 0 || one >= 64) continue;
        const int to = (one / 8) * 8 + f;
        if (foe(p.sq[to], white)) pawn_to(to, false);
        else if (to == p.ep) try_move(from, to, 0, true);
      }
      continue;
    }
    for (int to = 0; to < 64; ++to) {
      if (own(p.sq[to], white)) continue;
      if (attacks(p, from, to)) try_move(from, to, 0, false);
    }
    if (kind == 'k') {
      const int home = white ? 4 : 60;
      const char rook = white ? 'R' : 'r';
      if (from != home || square_attacked(p, home, !white)) continue;
      const bool short_right = p.castle[white ? 0 : 2];
      const bool long_right = p.castle[white ? 1 : 3];
      if (short_right && p.sq[home + 3] == rook && p.sq[home + 1] == '.' && p.sq[home + 2] == '.' &&
          !square_attacked(p, home + 1, !white) && !square_attacked(p, home + 2, !white))
        out.push_back("O-O");
      if (long_right && p.sq[home - 4] == rook && p.sq[home - 1] == '.' && p.sq[home - 2] == '.' &&
          p.sq[home - 3] == '.' && !square_attacked(p, home - 1, !white) &&
          !square_attacked(p, home - 2, !white))
        out.push_back("O-O-O");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
