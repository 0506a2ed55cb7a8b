#pragma once

#include <array>
#include <span>
#include <utility>

#include "coevo/types.hpp"

namespace coevo::geometry {

// Clockwise from north: N NE E SE S SW W NW. North is towards rank 8.
inline constexpr std::array<std::pair<int, int>, 8> kCompass = {{
    {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
}};

// Clockwise from north-north-east.
inline constexpr std::array<std::pair<int, int>, 8> kKnightJumps = {{
    {1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2},
}};

// Rook rays N E S W and bishop rays NE SE SW NW, as indices into kCompass.
inline constexpr std::array<int, 4> kRookRays = {0, 2, 4, 6};
inline constexpr std::array<int, 4> kBishopRays = {1, 3, 5, 7};

struct TargetTable {
  std::array<std::array<int, 8>, 64> squares{};
  std::array<int, 64> count{};
};

constexpr TargetTable make_targets(const std::array<std::pair<int, int>, 8>& deltas) {
  TargetTable t;
  for (int sq = 0; sq < 64; ++sq) {
    const int f = sq & 7, r = sq >> 3;
    for (auto [df, dr] : deltas) {
      if (Square::on_board(f + df, r + dr))
        t.squares[sq][t.count[sq]++] = (r + dr) * 8 + f + df;
    }
  }
  return t;
}

inline constexpr TargetTable kKnightTable = make_targets(kKnightJumps);
inline constexpr TargetTable kKingTable = make_targets(kCompass);

inline std::span<const int> knight_targets(Square s) {
  return {kKnightTable.squares[s.index()].data(),
          static_cast<std::size_t>(kKnightTable.count[s.index()])};
}
inline std::span<const int> king_targets(Square s) {
  return {kKingTable.squares[s.index()].data(),
          static_cast<std::size_t>(kKingTable.count[s.index()])};
}

inline int forward(Color c) { return c == Color::White ? 1 : -1; }
inline int home_rank(Color c) { return c == Color::White ? 0 : 7; }
inline int promotion_rank(Color c) { return c == Color::White ? 7 : 0; }
inline int pawn_start_rank(Color c) { return c == Color::White ? 1 : 6; }

}  // namespace coevo::geometry
