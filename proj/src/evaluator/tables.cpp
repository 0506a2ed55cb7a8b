#include <fstream>
#include <sstream>

#include "coevo/evaluator.hpp"
#include "json.hpp"

namespace coevo {

namespace {

using nlohmann::json;

constexpr std::array<const char*, kPieceKindCount> kWeightKeys = {
    "pawn", "knight", "bishop", "rook", "queen", "king"};

// Field list shared by reading and writing the rp block.
template <class Rp, class F>
void for_each_rp(Rp& rp, F&& f) {
  f("pawn_protected", rp.pawn_protected);
  f("pawn_doubled", rp.pawn_doubled);
  f("pawn_isolated", rp.pawn_isolated);
  f("pawn_open_file", rp.pawn_open_file);
  f("pawn_passed", rp.pawn_passed);
  f("pawn_passed_protected", rp.pawn_passed_protected);
  f("pawn_blocked_by_knight", rp.pawn_blocked_by_knight);
  f("pawn_blocked_by_bishop", rp.pawn_blocked_by_bishop);
  f("rook_seventh_rank", rp.rook_seventh_rank);
  f("rook_doubled_file", rp.rook_doubled_file);
  f("rook_attacks_pawn", rp.rook_attacks_pawn);
  f("rook_no_enemy_pawn_file", rp.rook_no_enemy_pawn_file);
  f("rook_kings_rook_first", rp.rook_kings_rook_first);
  f("rook_queens_rook_first", rp.rook_queens_rook_first);
  f("knight_protected", rp.knight_protected);
  f("knight_protection_max_proximity", rp.knight_protection_max_proximity);
  f("bishop_pair", rp.bishop_pair);
  f("bishop_adjacent_pawn", rp.bishop_adjacent_pawn);
  f("queen_bishop_diagonal", rp.queen_bishop_diagonal);
  f("queen_moved_early", rp.queen_moved_early);
  f("queen_seventh_rank", rp.queen_seventh_rank);
  f("queen_pawnless_file", rp.queen_pawnless_file);
  f("king_defeated", rp.king_defeated);
  f("king_castled", rp.king_castled);
  f("king_walked", rp.king_walked);
  f("king_surround", rp.king_surround);
  f("king_surround_queen_count", rp.king_surround_queen_count);
  f("king_shield_move", rp.king_shield_move);
}

template <class Tables, class F>
void for_each_table(Tables& t, F&& f) {
  f("pawn_ap_begin", t.pawn_ap_begin);
  f("pawn_ap_end", t.pawn_ap_end);
  f("pawn_ap_castled_left", t.pawn_ap_castled_left);
  f("pawn_ap_castled_right", t.pawn_ap_castled_right);
  f("knight_ap", t.knight_ap);
  f("bishop_ap", t.bishop_ap);
  f("king_ap_begin", t.king_ap_begin);
  f("king_ap_end", t.king_ap_end);
  f("rook_mobility", t.rook_mobility);
  f("rook_proximity_axis", t.rook_proximity_axis);
  f("knight_mobility", t.knight_mobility);
  f("knight_proximity", t.knight_proximity);
  f("bishop_mobility", t.bishop_mobility);
  f("queen_mobility_begin", t.queen_mobility_begin);
  f("queen_mobility_end", t.queen_mobility_end);
  f("queen_proximity", t.queen_proximity);
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(std::string("score tables: missing \"") + key + "\"");
  return *it;
}

int read_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError("score tables: " + where + " is not an integer");
  return v.get<int>();
}

template <std::size_t N>
void read_array(const json& v, std::array<int, N>& out, const std::string& where) {
  if (!v.is_array() || v.size() != N)
    throw ConfigError("score tables: " + where + " needs " + std::to_string(N) + " entries");
  for (std::size_t i = 0; i < N; ++i) out[i] = read_int(v[i], where);
}

template <std::size_t N>
void read_array(const json& v, std::array<std::array<int, N>, N>& out, const std::string& where) {
  if (!v.is_array() || v.size() != N)
    throw ConfigError("score tables: " + where + " needs " + std::to_string(N) + " rows");
  for (std::size_t i = 0; i < N; ++i) read_array(v[i], out[i], where);
}

json to_json_object(const ScoreTables& t) {
  json j;
  j["schema_version"] = 1;
  for (int k = 0; k < kPieceKindCount; ++k) j["piece_weights"][kWeightKeys[k]] = t.piece_weights[k];
  for_each_table(t, [&](const char* key, const auto& arr) { j[key] = arr; });
  for_each_rp(t.rp, [&](const char* key, int v) { j["rp"][key] = v; });
  return j;
}

}  // namespace

ScoreTables ScoreTables::parse(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("score tables: ") + e.what());
  }
  if (read_int(require(j, "schema_version"), "schema_version") != 1)
    throw ConfigError("score tables: unsupported schema_version");
  ScoreTables t;
  const json& w = require(j, "piece_weights");
  for (int k = 0; k < kPieceKindCount; ++k)
    t.piece_weights[k] = read_int(require(w, kWeightKeys[k]), kWeightKeys[k]);
  for_each_table(t, [&](const char* key, auto& arr) { read_array(require(j, key), arr, key); });
  const json& rp = require(j, "rp");
  for_each_rp(t.rp, [&](const char* key, int& v) { v = read_int(require(rp, key), key); });
  return t;
}

ScoreTables ScoreTables::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open score tables: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ScoreTables& ScoreTables::defaults() {
  static const ScoreTables t = parse(embedded_score_tables_json());
  return t;
}

std::string ScoreTables::to_json() const { return to_json_object(*this).dump(); }

std::uint64_t ScoreTables::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace coevo
