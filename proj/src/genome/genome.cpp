#include "coevo/genome.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "rules/geometry.hpp"

namespace coevo {

namespace {

constexpr std::array<std::uint8_t, 16> kCodeForSlot = {
    0b0000, 0b0001, 0b0011, 0b0010, 0b0110, 0b0111, 0b0101, 0b0100,
    0b1000, 0b1001, 0b1010, 0b1011, 0b1100, 0b1101, 0b1110, 0b1111,
};

constexpr std::array<std::uint8_t, 16> make_slot_table() {
  std::array<std::uint8_t, 16> t{};
  for (std::uint8_t s = 0; s < 16; ++s) t[kCodeForSlot[s]] = s;
  return t;
}
constexpr std::array<std::uint8_t, 16> kSlotForCode = make_slot_table();

constexpr int kCastleShortCode = 8;
constexpr int kCastleLongCode = 9;

int sign(int v) { return (v > 0) - (v < 0); }

// Compass index for a queen or king direction code.
int compass_index(PieceKind kind, int dir) {
  switch (kind) {
    case PieceKind::Rook: return geometry::kRookRays[dir];
    case PieceKind::Bishop: return geometry::kBishopRays[dir];
    default: return dir;
  }
}

std::optional<Square> target_of(const Gene& gene, PieceKind kind, Color color, Square from) {
  const int dir = gene.direction(kind);
  int df = 0, dr = 0;
  switch (kind) {
    case PieceKind::Pawn: {
      const int fwd = geometry::forward(color);
      dr = dir == 3 ? 2 * fwd : fwd;
      df = dir == 1 ? -1 : dir == 2 ? 1 : 0;
      break;
    }
    case PieceKind::Knight:
      std::tie(df, dr) = geometry::kKnightJumps[dir];
      break;
    case PieceKind::King: {
      const auto [cf, cr] = geometry::kCompass[dir];
      df = cf;
      dr = cr;
      break;
    }
    default: {
      const auto [cf, cr] = geometry::kCompass[compass_index(kind, dir)];
      df = cf * gene.distance();
      dr = cr * gene.distance();
    }
  }
  if (!Square::on_board(from.file() + df, from.rank() + dr)) return std::nullopt;
  return Square(from.file() + df, from.rank() + dr);
}

// Fast geometric screen before the legality check: sliders need a clear path
// and a target not holding a friendly piece.
bool plausible(const Board& board, PieceKind kind, Color color, Square from, Square to) {
  if (auto occ = board.at(to); occ && occ->color == color) return false;
  if (kind == PieceKind::Knight || kind == PieceKind::King || kind == PieceKind::Pawn) return true;
  const int df = sign(to.file() - from.file()), dr = sign(to.rank() - from.rank());
  for (int f = from.file() + df, r = from.rank() + dr; Square(f, r) != to; f += df, r += dr) {
    if (!board.empty(Square(f, r))) return false;
  }
  return true;
}

void append_bits(std::vector<bool>& out, unsigned value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back((value >> i) & 1);
}

std::string to_hex(const std::vector<bool>& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j)
      nibble = nibble << 1 | (i + j < bits.size() && bits[i + j] ? 1u : 0u);
    s += kDigits[nibble];
  }
  return s;
}

}  // namespace

std::uint8_t piece_code_for_slot(std::uint8_t slot) { return kCodeForSlot[slot & 15]; }
std::uint8_t slot_for_piece_code(std::uint8_t code) { return kSlotForCode[code & 15]; }

GeneLayout layout_for(PieceKind kind) {
  switch (kind) {
    case PieceKind::Pawn: return {4, 2, 0, 4};
    case PieceKind::Knight: return {4, 3, 0, 8};
    case PieceKind::Bishop: return {4, 2, 3, 4};
    case PieceKind::Rook: return {4, 2, 3, 4};
    case PieceKind::Queen: return {4, 3, 3, 8};
    case PieceKind::King: return {4, 4, 0, 10};
  }
  return {};
}

int Gene::direction(PieceKind kind) const {
  const auto layout = layout_for(kind);
  const int raw = direction_field() & ((1 << layout.direction_bits) - 1);
  return raw % layout.direction_count;
}

void VariationConfig::validate() const {
  auto check = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ConfigError(std::string(name) + " must be in [0, 1]");
  };
  check(crossover_prob, "crossover_prob");
  check(uniform_level, "uniform_level");
  check(mutation_prob_per_bit, "mutation_prob_per_bit");
}

Chromosome random_chromosome(Color color, std::size_t length, Rng& rng) {
  Chromosome c{color, {}};
  c.genes.reserve(length);
  for (std::size_t i = 0; i < length; ++i) c.genes.push_back(random_gene(rng));
  return c;
}

std::optional<Move> decode(const Gene& gene, Color color, const Board& board) {
  if (board.side_to_move() != color) return std::nullopt;
  const PieceId piece{color, gene.slot()};
  const auto from = board.square_of(piece);
  if (!from) return std::nullopt;
  const PieceKind kind = board.kind_of(piece);

  if (kind == PieceKind::King && gene.direction(kind) >= kCastleShortCode) {
    const MoveKind want =
        gene.direction(kind) == kCastleShortCode ? MoveKind::CastleShort : MoveKind::CastleLong;
    for (const Move& m : legal_moves_of(board, piece))
      if (m.kind == want) return m;
    return std::nullopt;
  }

  const auto to = target_of(gene, kind, color, *from);
  if (!to || !plausible(board, kind, color, *from, *to)) return std::nullopt;
  for (const Move& m : legal_moves_of(board, piece)) {
    if (m.to != *to || m.kind == MoveKind::CastleShort || m.kind == MoveKind::CastleLong) continue;
    if (m.kind == MoveKind::Promotion && m.promotion != PieceKind::Queen) continue;
    return m;
  }
  return std::nullopt;
}

std::optional<Gene> encode(const Move& m, const Board& board) {
  if (m.kind == MoveKind::Null) return std::nullopt;
  if (m.kind == MoveKind::Promotion && m.promotion != PieceKind::Queen) return std::nullopt;
  const std::uint8_t code = piece_code_for_slot(m.piece.slot);
  const PieceKind kind = board.kind_of(m.piece);
  if (m.kind == MoveKind::CastleShort) return Gene(code, kCastleShortCode, 0);
  if (m.kind == MoveKind::CastleLong) return Gene(code, kCastleLongCode, 0);

  const int df = m.to.file() - m.from.file();
  const int dr = m.to.rank() - m.from.rank();
  switch (kind) {
    case PieceKind::Pawn: {
      const int dir = df < 0 ? 1 : df > 0 ? 2 : std::abs(dr) == 2 ? 3 : 0;
      return Gene(code, static_cast<std::uint8_t>(dir), 0);
    }
    case PieceKind::Knight:
      for (std::size_t i = 0; i < geometry::kKnightJumps.size(); ++i) {
        if (geometry::kKnightJumps[i] == std::pair{df, dr})
          return Gene(code, static_cast<std::uint8_t>(i), 0);
      }
      return std::nullopt;
    default: {
      const std::pair unit{sign(df), sign(dr)};
      const int dist = std::max(std::abs(df), std::abs(dr));
      const int count = layout_for(kind).direction_count;
      for (int dir = 0; dir < std::min(count, 8); ++dir) {
        if (geometry::kCompass[compass_index(kind, dir)] != unit) continue;
        const int disp = kind == PieceKind::King ? 0 : dist - 1;
        return Gene(code, static_cast<std::uint8_t>(dir), static_cast<std::uint8_t>(disp));
      }
      return std::nullopt;
    }
  }
}

Chromosome repair(Chromosome c, const Board& board, Rng& rng, int retry_budget) {
  Board sim = board.detached();
  for (std::size_t k = 0; k < c.genes.size(); ++k) {
    if (sim.side_to_move() != c.color) sim.play_null();
    if (auto m = decode(c.genes[k], c.color, sim)) {
      sim.play(*m);
      continue;
    }
    auto moves = legal_moves(sim);
    std::erase_if(moves, [](const Move& m) {
      return m.kind == MoveKind::Promotion && m.promotion != PieceKind::Queen;
    });
    if (moves.empty()) {
      if (k == 0 && board.side_to_move() == c.color)
        throw NoLegalMove("no legal move for " + std::string(color_name(c.color)));
      break;  // the simulated line ended; later genes stay as they are
    }
    std::optional<Move> chosen;
    for (int attempt = 0; attempt < retry_budget && !chosen; ++attempt) {
      const Gene g = random_gene(rng);
      if ((chosen = decode(g, c.color, sim))) c.genes[k] = g;
    }
    if (!chosen) {
      chosen = moves[below(rng, moves.size())];
      c.genes[k] = *encode(*chosen, sim);
    }
    sim.play(*chosen);
  }
  return c;
}

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                    const VariationConfig& cfg, Rng& rng) {
  if (a.genes.size() != b.genes.size() || a.color != b.color)
    throw LengthMismatch("crossover parents differ in length or color");
  std::pair<Chromosome, Chromosome> kids{a, b};
  if (!chance(rng, cfg.crossover_prob)) return kids;
  for (std::size_t i = 0; i < a.bit_length(); ++i) {
    if (!chance(rng, cfg.uniform_level)) continue;
    const bool x = kids.first.bit(i);
    kids.first.set(i, kids.second.bit(i));
    kids.second.set(i, x);
  }
  return kids;
}

Chromosome mutate(Chromosome c, const VariationConfig& cfg, Rng& rng) {
  const std::size_t n = c.bit_length();
  for (std::size_t i = 0; i < n; ++i)
    if (chance(rng, cfg.mutation_prob_per_bit)) c.flip(i);
  if (cfg.inversion_enabled && n > 1 &&
      chance(rng, std::min(1.0, cfg.mutation_prob_per_bit * static_cast<double>(n)))) {
    std::size_t lo = below(rng, n), hi = below(rng, n);
    if (lo > hi) std::swap(lo, hi);
    for (; lo < hi; ++lo, --hi) {
      const bool x = c.bit(lo);
      c.set(lo, c.bit(hi));
      c.set(hi, x);
    }
  }
  return c;
}

MixedChromosome mix(const Chromosome& white, const Chromosome& black, Color first,
                    std::size_t white_index, std::size_t black_index) {
  if (white.genes.size() != black.genes.size())
    throw LengthMismatch("mixed parents differ in length");
  MixedChromosome m;
  m.first = first;
  m.white_index = white_index;
  m.black_index = black_index;
  const Chromosome& lead = first == Color::White ? white : black;
  const Chromosome& follow = first == Color::White ? black : white;
  m.genes.reserve(2 * lead.genes.size());
  for (std::size_t i = 0; i < lead.genes.size(); ++i) {
    m.genes.push_back(lead.genes[i]);
    m.genes.push_back(follow.genes[i]);
  }
  return m;
}

std::string compact_hex(const Chromosome& c) {
  std::vector<bool> bits;
  for (const Gene& g : c.genes) {
    const auto layout = layout_for(g.coded_kind());
    append_bits(bits, g.piece_code(), layout.piece_bits);
    append_bits(bits, g.direction_field() & ((1u << layout.direction_bits) - 1),
                layout.direction_bits);
    append_bits(bits, g.displacement_field(), layout.displacement_bits);
  }
  return to_hex(bits);
}

std::string debug_string(const Chromosome& c, const Board& board) {
  std::vector<bool> bits;
  for (const Gene& g : c.genes) append_bits(bits, g.bits(), Gene::kBits);
  std::ostringstream os;
  os << color_name(c.color) << ' ' << to_hex(bits);
  Board sim = board.detached();
  bool live = true;
  for (std::size_t k = 0; k < c.genes.size(); ++k) {
    const Gene& g = c.genes[k];
    os << "\n  " << k << ": code=" << int(g.piece_code()) << " dir=" << int(g.direction_field())
       << " disp=" << int(g.displacement_field()) << ' ';
    if (!live) {
      os << "-";
      continue;
    }
    if (sim.side_to_move() != c.color) sim.play_null();
    if (auto m = decode(g, c.color, sim)) {
      os << to_text(*m);
      sim.play(*m);
    } else {
      os << "invalid";
      live = false;
    }
  }
  return os.str();
}

}  // namespace coevo
