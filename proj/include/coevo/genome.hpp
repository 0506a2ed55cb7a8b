#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coevo/board.hpp"
#include "coevo/random.hpp"

namespace coevo {

// 4-bit piece codes. Pawns use a reflected Gray sequence.
std::uint8_t piece_code_for_slot(std::uint8_t slot);
std::uint8_t slot_for_piece_code(std::uint8_t code);

// Compact field widths of a gene for a piece kind.
struct GeneLayout {
  int piece_bits = 4;
  int direction_bits = 0;
  int displacement_bits = 0;
  int direction_count = 0;

  int total_bits() const { return piece_bits + direction_bits + displacement_bits; }
};
GeneLayout layout_for(PieceKind kind);

// One move of a chromosome, stored in a fixed 11-bit slot: piece code in bits
// 0..3, direction in bits 4..7, displacement in bits 8..10. Only the leading
// bits of each field that the piece's layout uses are interpreted; keeping the
// slot width fixed keeps bit-level operators aligned on gene boundaries.
class Gene {
 public:
  static constexpr int kBits = 11;
  static constexpr std::uint16_t kMask = (1u << kBits) - 1;

  constexpr Gene() = default;
  constexpr Gene(std::uint8_t piece_code, std::uint8_t direction, std::uint8_t displacement)
      : bits_(static_cast<std::uint16_t>((piece_code & 15) | (direction & 15) << 4 |
                                         (displacement & 7) << 8)) {}
  static constexpr Gene from_bits(std::uint64_t bits) {
    Gene g;
    g.bits_ = static_cast<std::uint16_t>(bits & kMask);
    return g;
  }

  constexpr std::uint16_t bits() const { return bits_; }
  constexpr std::uint8_t piece_code() const { return bits_ & 15; }
  constexpr std::uint8_t direction_field() const { return (bits_ >> 4) & 15; }
  constexpr std::uint8_t displacement_field() const { return (bits_ >> 8) & 7; }

  std::uint8_t slot() const { return slot_for_piece_code(piece_code()); }
  PieceKind coded_kind() const { return PieceId{Color::White, slot()}.nominal_kind(); }
  // Direction index in [0, direction_count(kind)); King codes 10..15 wrap.
  int direction(PieceKind kind) const;
  // Ray length 1..7.
  int distance() const { return displacement_field() % 7 + 1; }

  constexpr bool bit(int i) const { return (bits_ >> i) & 1; }
  constexpr void flip(int i) { bits_ ^= static_cast<std::uint16_t>(1u << i); }
  constexpr void set(int i, bool v) {
    bits_ = static_cast<std::uint16_t>(v ? bits_ | 1u << i : bits_ & ~(1u << i));
  }

  constexpr bool operator==(const Gene&) const = default;

 private:
  std::uint16_t bits_ = 0;
};

struct Chromosome {
  Color color = Color::White;
  std::vector<Gene> genes;

  std::size_t bit_length() const { return genes.size() * Gene::kBits; }
  bool bit(std::size_t i) const { return genes[i / Gene::kBits].bit(static_cast<int>(i % Gene::kBits)); }
  void flip(std::size_t i) { genes[i / Gene::kBits].flip(static_cast<int>(i % Gene::kBits)); }
  void set(std::size_t i, bool v) { genes[i / Gene::kBits].set(static_cast<int>(i % Gene::kBits), v); }

  bool operator==(const Chromosome&) const = default;
};

struct VariationConfig {
  double crossover_prob = 0.7;
  double uniform_level = 0.2;
  double mutation_prob_per_bit = 0.04;
  bool inversion_enabled = false;

  void validate() const;
};

// Draws all 11 slot bits from a single generator output, so every field is
// uniform over its width.
template <class Urbg>
Gene random_gene(Urbg& gen) {
  return Gene::from_bits(static_cast<std::uint64_t>(gen()));
}

Chromosome random_chromosome(Color color, std::size_t length, Rng& rng);

// Move the gene encodes for `color` on `board`, or nullopt when the piece is
// gone, the geometry leaves the board, or the move is illegal. Promotions are
// always to a Queen.
std::optional<Move> decode(const Gene& gene, Color color, const Board& board);

// Gene that decodes back to `m` on `board`; nullopt for moves no gene can
// express (under-promotions, null moves).
std::optional<Gene> encode(const Move& m, const Board& board);

inline constexpr int kRepairRetryBudget = 32;

// Makes every gene decode to a legal move along the chromosome's own forward
// simulation; opponent plies are passes. Valid genes are left untouched and
// consume no randomness. Throws NoLegalMove when the chromosome's side is to
// move on `board` and has no legal move.
Chromosome repair(Chromosome c, const Board& board, Rng& rng,
                  int retry_budget = kRepairRetryBudget);

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                    const VariationConfig& cfg, Rng& rng);

// Bit-flip mutation plus, when enabled, segment inversion.
Chromosome mutate(Chromosome c, const VariationConfig& cfg, Rng& rng);

// Interleaved white/black genes used for look-ahead evaluation.
struct MixedChromosome {
  std::vector<Gene> genes;
  Color first = Color::White;
  std::size_t white_index = 0;
  std::size_t black_index = 0;

  Color color_of(std::size_t i) const { return i % 2 == 0 ? first : opposite(first); }
};

MixedChromosome mix(const Chromosome& white, const Chromosome& black, Color first,
                    std::size_t white_index = 0, std::size_t black_index = 0);

// Hex of the compact variable-width bitstring.
std::string compact_hex(const Chromosome& c);
// Hex bitstring plus a decoded annotation per gene along the forward simulation.
std::string debug_string(const Chromosome& c, const Board& board);

}  // namespace coevo
