#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace aqss {

using PlayerId = std::string;
using PlayerMask = std::uint64_t;

inline constexpr std::size_t kMaxPlayers = 64;

// Anyone who can hold a share: a named player, the dealer (home shares) or
// the environment (purification sites that no coalition ever holds).
struct Party {
  enum class Kind : std::uint8_t { player, dealer, environment };

  Kind kind = Kind::player;
  std::string name;

  static Party player(std::string name) { return {Kind::player, std::move(name)}; }
  static Party dealer() { return {Kind::dealer, {}}; }
  static Party environment() { return {Kind::environment, {}}; }

  bool is_player() const { return kind == Kind::player; }
  bool is_dealer() const { return kind == Kind::dealer; }
  bool is_environment() const { return kind == Kind::environment; }

  // "A", "dealer", "env"
  std::string to_string() const;
  // Accepts "dealer"/"env" (any case) or a player name.
  static Party parse(std::string_view text);

  auto operator<=>(const Party&) const = default;
};

using Coalition = std::set<Party>;

// Parses "A,B,dealer" (whitespace tolerated). An empty string is the empty coalition.
Coalition parse_coalition(std::string_view text);
std::string to_string(const Coalition& coalition);

// A monotone family of authorized sets, stored by its minimal elements.
//
// Players are kept sorted; each authorized set is a bitmask over player
// indices. Construction canonicalizes: supersets are dropped and the
// remaining sets are ordered lexicographically by their sorted member lists.
class AccessStructure {
public:
  AccessStructure(std::vector<PlayerId> players, const std::vector<std::vector<PlayerId>>& sets);
  AccessStructure(std::vector<PlayerId> players, std::vector<PlayerMask> sets);

  const std::vector<PlayerId>& players() const { return players_; }
  const std::vector<PlayerMask>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  std::size_t player_count() const { return players_.size(); }
  PlayerMask universe() const;

  std::vector<PlayerId> members(std::size_t set_index) const;
  std::vector<PlayerId> members_of(PlayerMask mask) const;
  std::optional<std::size_t> index_of(std::string_view player) const;
  // Throws std::invalid_argument for names outside the universe.
  PlayerMask mask_of(std::span<const PlayerId> names) const;
  // Players of the coalition that belong to this universe; dealer/env ignored.
  PlayerMask mask_of(const Coalition& coalition) const;

  bool is_authorized(PlayerMask coalition) const;

  // Compact form "{ABC, BD}" when every name is one uppercase letter, JSON otherwise.
  std::string to_string() const;
  nlohmann::json to_json() const;

  bool operator==(const AccessStructure&) const = default;

private:
  void canonicalize();

  std::vector<PlayerId> players_;
  std::vector<PlayerMask> sets_;
};

// Lexicographic order on the sorted member lists of two masks.
bool lex_less(PlayerMask a, PlayerMask b);

// Accepts the compact grammar  '{' set (',' set)* '}'  with set = 1+ uppercase
// letters, a JSON list of lists, or {"players": [...], "sets": [[...], ...]}.
AccessStructure parse_access_structure(std::string_view text);

// Every pair of authorized sets overlaps.
bool check_no_cloning(const AccessStructure& gamma);

// Vertices are authorized-set indices; edge iff the two sets overlap.
class ASGraph {
public:
  explicit ASGraph(std::size_t vertex_count = 0);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const;
  bool adjacent(std::size_t a, std::size_t b) const { return adjacency_[a][b]; }
  void add_edge(std::size_t a, std::size_t b);
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  bool is_complete() const;
  std::size_t component_count() const;

  nlohmann::json to_json() const;

private:
  std::vector<std::vector<bool>> adjacency_;
};

ASGraph build_as_graph(const AccessStructure& gamma);

struct CliquePartition {
  std::vector<std::vector<std::size_t>> classes;
  bool exact = true;

  std::size_t size() const { return classes.size(); }
  // Classes are cliques, pairwise disjoint, and cover every vertex once.
  bool is_valid_for(const ASGraph& graph) const;
  nlohmann::json to_json() const;
};

struct PartitionOptions {
  std::size_t max_exact = 20;
  bool allow_heuristic = false;
};

// Minimum partition of the vertices into cliques. Exact search returns the
// partition whose restricted-growth labelling (vertex order) is lexicographically
// least among all minimum ones. Graphs above max_exact vertices need
// allow_heuristic, which switches to greedy first-fit and marks the result.
CliquePartition min_clique_partition(const ASGraph& graph, const PartitionOptions& options = {});
CliquePartition greedy_clique_partition(const ASGraph& graph);

struct MaximalStructure {
  AccessStructure gamma_max;
  std::string selection_rule;
  std::vector<PlayerMask> added_sets;
};

inline constexpr std::size_t kMaxMaximalizePlayers = 20;

// Extends gamma to a maximal structure over its player universe: every
// unauthorized set has an authorized complement, and no two authorized sets
// are disjoint. Candidates are visited by ascending size, then lexicographically;
// a candidate is added when neither it nor its complement is authorized yet.
// Throws std::invalid_argument if gamma already has two disjoint sets.
MaximalStructure maximalize(const AccessStructure& gamma);

}  // namespace aqss
