#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coevo {

enum class Color : std::uint8_t { White = 0, Black = 1 };

constexpr Color opposite(Color c) {
  return c == Color::White ? Color::Black : Color::White;
}

std::string_view color_name(Color c);

enum class PieceKind : std::uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };

inline constexpr int kPieceKindCount = 6;

char piece_letter(PieceKind kind);  // upper-case: P N B R Q K

class Square {
 public:
  constexpr Square() = default;
  constexpr Square(int file, int rank)
      : index_(static_cast<std::uint8_t>(rank * 8 + file)) {}

  static constexpr Square from_index(int index) {
    Square s;
    s.index_ = static_cast<std::uint8_t>(index);
    return s;
  }
  static constexpr bool on_board(int file, int rank) {
    return file >= 0 && file < 8 && rank >= 0 && rank < 8;
  }
  // "e4" style; nullopt on malformed text.
  static std::optional<Square> parse(std::string_view text);

  constexpr int file() const { return index_ & 7; }
  constexpr int rank() const { return index_ >> 3; }
  constexpr int index() const { return index_; }
  constexpr std::uint64_t bit() const { return std::uint64_t{1} << index_; }
  constexpr Square mirrored() const { return Square(file(), 7 - rank()); }

  std::string to_string() const;

  constexpr auto operator<=>(const Square&) const = default;

 private:
  std::uint8_t index_ = 0;
};

// Identity of one of the 16 pieces a side starts with. The slot layout follows
// the gene piece coding: pawns 1..8 in slots 0..7, rooks 8..9, knights 10..11,
// bishops 12..13, queen 14, king 15. A promoted pawn keeps its slot.
struct PieceId {
  Color color = Color::White;
  std::uint8_t slot = 0;

  static constexpr int kSlots = 16;
  static constexpr std::uint8_t kQueenSlot = 14;
  static constexpr std::uint8_t kKingSlot = 15;

  static constexpr PieceId from_index(int index) {
    return PieceId{static_cast<Color>(index >> 4),
                   static_cast<std::uint8_t>(index & 15)};
  }
  constexpr int index() const { return static_cast<int>(color) * 16 + slot; }

  constexpr PieceKind nominal_kind() const {
    if (slot < 8) return PieceKind::Pawn;
    if (slot < 10) return PieceKind::Rook;
    if (slot < 12) return PieceKind::Knight;
    if (slot < 14) return PieceKind::Bishop;
    if (slot == kQueenSlot) return PieceKind::Queen;
    return PieceKind::King;
  }
  // 1-based ordinal among pieces of the same nominal kind.
  constexpr int ordinal() const {
    if (slot < 8) return slot + 1;
    if (slot < 14) return (slot - 8) % 2 + 1;
    return 1;
  }

  constexpr auto operator<=>(const PieceId&) const = default;
};

enum class MoveKind : std::uint8_t {
  Normal,
  Capture,
  EnPassant,
  CastleShort,
  CastleLong,
  Promotion,
  Null,  // pass; only used inside look-ahead simulations
};

struct Move {
  PieceId piece;
  Square from;
  Square to;
  MoveKind kind = MoveKind::Normal;
  PieceKind promotion = PieceKind::Pawn;  // meaningful only for Promotion

  bool is_castle() const {
    return kind == MoveKind::CastleShort || kind == MoveKind::CastleLong;
  }
  bool operator==(const Move&) const = default;
};

// Coordinate notation: e2e4, e7e8q, O-O, O-O-O.
std::string to_text(const Move& m);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalMove : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class NoLegalMove : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class WrongTurn : public Error {
 public:
  using Error::Error;
};
class UnknownFormat : public Error {
 public:
  using Error::Error;
};

}  // namespace coevo
