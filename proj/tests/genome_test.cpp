#include <array>
#include <cmath>
#include <ostream>
#include <random>

#include "coevo/genome.hpp"
#include "doctest.h"

using namespace coevo;

namespace {

// Generator that replays a fixed word.
struct FixedBits {
  using result_type = std::uint64_t;
  std::uint64_t word;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return word; }
};

Chromosome of(Color c, std::initializer_list<Gene> genes) { return Chromosome{c, genes}; }

int popcount(const Chromosome& c) {
  int n = 0;
  for (std::size_t i = 0; i < c.bit_length(); ++i) n += c.bit(i);
  return n;
}

}  // namespace

TEST_CASE("piece codes follow the table and are a bijection") {
  const std::array<std::uint8_t, 16> expected = {0b0000, 0b0001, 0b0011, 0b0010, 0b0110, 0b0111,
                                                 0b0101, 0b0100, 0b1000, 0b1001, 0b1010, 0b1011,
                                                 0b1100, 0b1101, 0b1110, 0b1111};
  for (std::uint8_t slot = 0; slot < 16; ++slot) {
    CHECK(piece_code_for_slot(slot) == expected[slot]);
    CHECK(slot_for_piece_code(expected[slot]) == slot);
  }
  CHECK(Gene(0b1110, 0, 0).coded_kind() == PieceKind::Queen);
  CHECK(Gene(0b1111, 0, 0).coded_kind() == PieceKind::King);
  CHECK(Gene(0b0100, 0, 0).slot() == 7);
}

TEST_CASE("layouts give the expected gene widths") {
  CHECK(layout_for(PieceKind::Pawn).total_bits() == 6);
  CHECK(layout_for(PieceKind::Knight).total_bits() == 7);
  CHECK(layout_for(PieceKind::Bishop).total_bits() == 9);
  CHECK(layout_for(PieceKind::Rook).total_bits() == 9);
  CHECK(layout_for(PieceKind::Queen).total_bits() == 10);
  CHECK(layout_for(PieceKind::King).total_bits() == 8);
  CHECK(Gene(0b1111, 12, 0).direction(PieceKind::King) == 2);
  CHECK(Gene(0, 0, 7).distance() == 1);
  CHECK(Gene(0, 0, 6).distance() == 7);
}

TEST_CASE("random_gene with forced bits") {
  FixedBits zeros{0};
  const Gene g = random_gene(zeros);
  CHECK(g.slot() == 0);
  CHECK(g.coded_kind() == PieceKind::Pawn);
  CHECK(g.direction(PieceKind::Pawn) == 0);
  CHECK(compact_hex(Chromosome{Color::White, {g}}) == "00");

  FixedBits queen{0b011'0101'1110};
  const Gene q = random_gene(queen);
  CHECK(q.coded_kind() == PieceKind::Queen);
  CHECK(q.direction(PieceKind::Queen) == 5);
  CHECK(q.distance() == 4);
  // 1110 101 011
  CHECK(compact_hex(Chromosome{Color::White, {q}}) == "eac");
}

TEST_CASE("random_gene piece codes are uniform") {
  Rng rng(12345);
  std::array<int, 16> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[random_gene(rng).piece_code()];
  const double mean = n / 16.0;
  const double sigma = std::sqrt(n * (1.0 / 16) * (15.0 / 16));
  double chi2 = 0;
  for (int c : counts) {
    CHECK(std::abs(c - mean) <= 3 * sigma);
    chi2 += (c - mean) * (c - mean) / mean;
  }
  // 15 degrees of freedom, 0.999 quantile
  CHECK(chi2 < 37.7);
}

TEST_CASE("decode walks rays from the piece's square") {
  const Board b = parse_fen("4k3/8/8/8/8/8/8/3QK3 w - - 0 1");
  auto m = decode(Gene(0b1110, 0, 2), Color::White, b);
  REQUIRE(m);
  CHECK(to_text(*m) == "d1d4");
  CHECK(decode(Gene(0b1110, 0, 7), Color::White, b).value().to == *Square::parse("d2"));
  // West from d1 by 4 leaves the board.
  CHECK_FALSE(decode(Gene(0b1110, 6, 3), Color::White, b));
  // East by 1 is the own King.
  CHECK_FALSE(decode(Gene(0b1110, 2, 0), Color::White, b));
  // Wrong side to move.
  CHECK_FALSE(decode(Gene(0b1110, 0, 2), Color::Black, b));
}

TEST_CASE("decode rejects captured pieces and blocked rays") {
  const Board b = Board::initial();
  CHECK_FALSE(decode(Gene(0b1110, 0, 2), Color::White, b));  // queen blocked by d2
  auto e4 = decode(Gene(piece_code_for_slot(4), 3, 0), Color::White, b);
  REQUIRE(e4);
  CHECK(to_text(*e4) == "e2e4");
  auto nf3 = decode(Gene(piece_code_for_slot(11), 7, 0), Color::White, b);
  REQUIRE(nf3);
  CHECK(to_text(*nf3) == "g1f3");

  // Slot 10 knight (b8 side) is gone.
  const Board missing = parse_fen("r1bqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq - 0 1");
  CHECK_FALSE(decode(Gene(0b1010, 0, 0), Color::Black, missing));
}

TEST_CASE("king genes castle") {
  const Board b = parse_fen("4k3/8/8/8/8/8/8/R3K2R w KQ - 0 1");
  auto s = decode(Gene(0b1111, 8, 0), Color::White, b);
  auto l = decode(Gene(0b1111, 9, 0), Color::White, b);
  REQUIRE(s);
  REQUIRE(l);
  CHECK(s->kind == MoveKind::CastleShort);
  CHECK(l->kind == MoveKind::CastleLong);
  CHECK(decode(Gene(0b1111, 2, 0), Color::White, b)->kind == MoveKind::Normal);
  const Board no_rights = parse_fen("4k3/8/8/8/8/8/8/R3K2R w - - 0 1");
  CHECK_FALSE(decode(Gene(0b1111, 8, 0), Color::White, no_rights));
}

TEST_CASE("promotion genes always queen") {
  const Board b = parse_fen("4k3/1P6/8/8/8/8/8/4K3 w - - 0 1");
  auto m = decode(Gene(piece_code_for_slot(1), 0, 0), Color::White, b);
  REQUIRE(m);
  CHECK(m->kind == MoveKind::Promotion);
  CHECK(m->promotion == PieceKind::Queen);
}

TEST_CASE("encode and decode round-trip every expressible legal move") {
  Rng rng(7);
  int checked = 0;
  for (int game = 0; game < 40; ++game) {
    Board b = Board::initial();
    for (int ply = 0; ply < 120; ++ply) {
      const auto moves = legal_moves(b);
      if (moves.empty()) break;
      for (const Move& m : moves) {
        auto g = encode(m, b);
        if (m.kind == MoveKind::Promotion && m.promotion != PieceKind::Queen) {
          CHECK_FALSE(g);
          continue;
        }
        REQUIRE(g);
        auto back = decode(*g, b.side_to_move(), b);
        REQUIRE(back);
        CHECK(*back == m);
        ++checked;
      }
      b.play(moves[below(rng, moves.size())]);
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("repair leaves valid chromosomes untouched and consumes no randomness") {
  const Board b = Board::initial();
  // e2e4, then g1f3 after a pass.
  const Chromosome c = of(Color::White, {Gene(piece_code_for_slot(4), 3, 0),
                                         Gene(piece_code_for_slot(11), 7, 0)});
  Rng rng(99);
  const Rng before = rng;
  const Chromosome r = repair(c, b, rng);
  CHECK(r == c);
  CHECK(rng == before);
  CHECK(repair(r, b, rng) == r);
}

TEST_CASE("repair replaces a gene for a captured piece and keeps valid ones") {
  const Board b = parse_fen("r1bqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq - 0 1");
  const Gene dead(0b1010, 0, 0);                       // b8 knight, captured
  const Gene e5(piece_code_for_slot(4), 3, 0);         // e7e5
  const Chromosome c = of(Color::Black, {dead, e5});
  Rng rng(5);
  const Chromosome r = repair(c, b, rng);
  CHECK(r.genes[0] != dead);
  REQUIRE(decode(r.genes[0], Color::Black, b));
  Board sim = b.detached();
  sim.play(*decode(r.genes[0], Color::Black, sim));
  sim.play_null();
  auto second = decode(r.genes[1], Color::Black, sim);
  REQUIRE(second);
  if (r.genes[0].slot() != 4) CHECK(r.genes[1] == e5);
}

TEST_CASE("repair on a single-move position") {
  const Board b = parse_fen("k7/8/8/1Q6/8/8/8/K7 b - - 0 1");
  REQUIRE(legal_moves(b).size() == 1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto r = repair(random_chromosome(Color::Black, 3, rng), b, rng);
    auto m = decode(r.genes[0], Color::Black, b);
    REQUIRE(m);
    CHECK(to_text(*m) == "a8a7");
  }
}

TEST_CASE("repair throws when the side to move has no move") {
  const Board mated = parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3");
  Rng rng(1);
  CHECK_THROWS_AS(repair(random_chromosome(Color::White, 2, rng), mated, rng), NoLegalMove);
  // The opponent's population is unaffected: its first ply comes after a pass.
  CHECK_NOTHROW(repair(random_chromosome(Color::Black, 2, rng), mated, rng));
}

TEST_CASE("repaired random chromosomes decode along the forward simulation") {
  Rng rng(2024);
  Board b = Board::initial();
  for (int ply = 0; ply < 30; ++ply) {
    for (Color c : {Color::White, Color::Black}) {
      const auto r = repair(random_chromosome(c, 5, rng), b, rng);
      Board sim = b.detached();
      for (const Gene& g : r.genes) {
        if (sim.side_to_move() != c) sim.play_null();
        auto m = decode(g, c, sim);
        if (!m) {
          CHECK_FALSE(has_legal_move(sim));
          break;
        }
        sim.play(*m);
      }
    }
    const auto moves = legal_moves(b);
    b.play(moves[below(rng, moves.size())]);
  }
}

TEST_CASE("uniform crossover edge cases") {
  Rng rng(3);
  const auto a = random_chromosome(Color::White, 4, rng);
  const auto b = random_chromosome(Color::White, 4, rng);
  VariationConfig cfg;
  cfg.crossover_prob = 1.0;

  cfg.uniform_level = 0.0;
  auto [a0, b0] = uniform_crossover(a, b, cfg, rng);
  CHECK(a0 == a);
  CHECK(b0 == b);

  cfg.uniform_level = 1.0;
  auto [a1, b1] = uniform_crossover(a, b, cfg, rng);
  CHECK(a1 == b);
  CHECK(b1 == a);

  cfg.uniform_level = 0.5;
  auto [s0, s1] = uniform_crossover(a, a, cfg, rng);
  CHECK(s0 == a);
  CHECK(s1 == a);

  cfg.crossover_prob = 0.0;
  auto [n0, n1] = uniform_crossover(a, b, cfg, rng);
  CHECK(n0 == a);
  CHECK(n1 == b);

  CHECK_THROWS_AS(uniform_crossover(a, random_chromosome(Color::White, 3, rng), cfg, rng),
                  LengthMismatch);
  CHECK_THROWS_AS(uniform_crossover(a, random_chromosome(Color::Black, 4, rng), cfg, rng),
                  LengthMismatch);
}

TEST_CASE("uniform crossover exchange rate") {
  Chromosome zeros{Color::White, std::vector<Gene>(4, Gene::from_bits(0))};
  Chromosome ones{Color::White, std::vector<Gene>(4, Gene::from_bits(Gene::kMask))};
  const double bitlen = static_cast<double>(zeros.bit_length());
  VariationConfig cfg;
  cfg.crossover_prob = 1.0;
  cfg.uniform_level = 0.2;
  Rng rng(11);
  const int trials = 10000;
  double sum = 0;
  for (int i = 0; i < trials; ++i) {
    auto [x, y] = uniform_crossover(zeros, ones, cfg, rng);
    CHECK(popcount(x) + popcount(y) == static_cast<int>(bitlen));
    sum += popcount(x);
  }
  const double mean = sum / trials;
  const double sigma = std::sqrt(bitlen * 0.2 * 0.8 / trials);
  CHECK(std::abs(mean - 0.2 * bitlen) <= 3 * sigma);
}

TEST_CASE("mutation edge cases and rate") {
  Rng rng(4);
  const auto c = random_chromosome(Color::Black, 5, rng);
  VariationConfig cfg;
  cfg.mutation_prob_per_bit = 0.0;
  CHECK(mutate(c, cfg, rng) == c);

  cfg.mutation_prob_per_bit = 1.0;
  const auto flipped = mutate(c, cfg, rng);
  for (std::size_t i = 0; i < c.bit_length(); ++i) CHECK(flipped.bit(i) != c.bit(i));

  cfg.mutation_prob_per_bit = 0.04;
  Chromosome zeros{Color::White, std::vector<Gene>(4, Gene::from_bits(0))};
  const double bitlen = static_cast<double>(zeros.bit_length());
  const int trials = 10000;
  double sum = 0;
  for (int i = 0; i < trials; ++i) sum += popcount(mutate(zeros, cfg, rng));
  const double sigma = std::sqrt(bitlen * 0.04 * 0.96 / trials);
  CHECK(std::abs(sum / trials - 0.04 * bitlen) <= 3 * sigma);
}

TEST_CASE("inversion keeps the bit multiset of an unmutated chromosome") {
  // With a rate of 1/bitlen the inversion fires every time; flips are rare
  // enough that most trials keep the popcount, and those that do not differ
  // from the flip count alone.
  Rng rng(8);
  VariationConfig cfg;
  cfg.inversion_enabled = true;
  Chromosome c{Color::White, {Gene::from_bits(0x7FF), Gene::from_bits(0)}};
  cfg.mutation_prob_per_bit = 1.0 / static_cast<double>(c.bit_length());
  int reordered = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto m = mutate(c, cfg, rng);
    CHECK(m.bit_length() == c.bit_length());
    CHECK(m.color == c.color);
    if (popcount(m) == popcount(c) && m != c) ++reordered;
  }
  CHECK(reordered > 500);
}

TEST_CASE("operators are deterministic in the seed") {
  VariationConfig cfg;
  cfg.inversion_enabled = true;
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    auto a = random_chromosome(Color::White, 5, rng);
    auto b = random_chromosome(Color::White, 5, rng);
    auto [x, y] = uniform_crossover(a, b, cfg, rng);
    return std::pair{mutate(x, cfg, rng), repair(y, Board::initial(), rng)};
  };
  CHECK(run(42) == run(42));
  CHECK(run(42) != run(43));
}

TEST_CASE("mixing interleaves from the side to move") {
  const auto w = of(Color::White, {Gene::from_bits(1), Gene::from_bits(2)});
  const auto b = of(Color::Black, {Gene::from_bits(3), Gene::from_bits(4)});
  const auto m = mix(w, b, Color::Black, 5, 6);
  REQUIRE(m.genes.size() == 4);
  CHECK(m.genes[0].bits() == 3);
  CHECK(m.genes[1].bits() == 1);
  CHECK(m.genes[2].bits() == 4);
  CHECK(m.color_of(1) == Color::White);
  CHECK(m.white_index == 5);
}

TEST_CASE("debug string annotates each gene") {
  const Board b = Board::initial();
  const auto c = of(Color::White, {Gene(piece_code_for_slot(4), 3, 0), Gene(0b1110, 0, 2)});
  const std::string s = debug_string(c, b);
  CHECK(s.find("e2e4") != std::string::npos);
  CHECK(s.find("invalid") != std::string::npos);
}
