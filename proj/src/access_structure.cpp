#include "aqss/access_structure.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>

#include "aqss/errors.hpp"

namespace aqss {

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_reserved_name(std::string_view name) {
  const auto lower = lowercase(name);
  return lower == "dealer" || lower == "env";
}

}  // namespace

std::string Party::to_string() const {
  switch (kind) {
    case Kind::player: return name;
    case Kind::dealer: return "dealer";
    case Kind::environment: return "env";
  }
  return name;
}

Party Party::parse(std::string_view text) {
  text = trim(text);
  const auto lower = lowercase(text);
  if (lower == "dealer") return dealer();
  if (lower == "env") return environment();
  if (text.empty()) throw std::invalid_argument("empty party name");
  return player(std::string(text));
}

Coalition parse_coalition(std::string_view text) {
  Coalition out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    out.insert(Party::parse(token));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string to_string(const Coalition& coalition) {
  std::string out;
  for (const auto& p : coalition) {
    if (!out.empty()) out += ',';
    out += p.to_string();
  }
  return out;
}

bool lex_less(PlayerMask a, PlayerMask b) {
  const PlayerMask diff = a ^ b;
  if (diff == 0) return false;
  const int low = std::countr_zero(diff);
  // Both lists agree below `low` and exactly one contains it. The other one is
  // smaller only if it has no further elements (it is a proper prefix).
  if ((a >> low) & 1U) return (b >> low) != 0;
  return (a >> low) == 0;
}

namespace {

std::vector<PlayerId> checked_universe(std::vector<PlayerId> players) {
  std::sort(players.begin(), players.end());
  if (std::adjacent_find(players.begin(), players.end()) != players.end())
    throw std::invalid_argument("duplicate player in universe");
  if (players.size() > kMaxPlayers)
    throw std::invalid_argument("more than 64 players are not supported");
  for (const auto& p : players) {
    if (p.empty()) throw std::invalid_argument("empty player name");
    if (is_reserved_name(p)) throw std::invalid_argument("player name '" + p + "' is reserved");
  }
  return players;
}

}  // namespace

AccessStructure::AccessStructure(std::vector<PlayerId> players,
                                 const std::vector<std::vector<PlayerId>>& sets)
    : players_(checked_universe(std::move(players))) {
  for (const auto& set : sets) {
    if (set.empty()) throw std::invalid_argument("empty authorized set");
    sets_.push_back(mask_of(set));
  }
  canonicalize();
}

AccessStructure::AccessStructure(std::vector<PlayerId> players, std::vector<PlayerMask> sets)
    : players_(checked_universe(std::move(players))), sets_(std::move(sets)) {
  const PlayerMask all = universe();
  for (PlayerMask m : sets_) {
    if (m == 0) throw std::invalid_argument("empty authorized set");
    if ((m & ~all) != 0) throw std::invalid_argument("authorized set outside player universe");
  }
  canonicalize();
}

void AccessStructure::canonicalize() {
  if (sets_.empty()) throw std::invalid_argument("empty access structure");
  std::sort(sets_.begin(), sets_.end(), [](PlayerMask a, PlayerMask b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  sets_.erase(std::unique(sets_.begin(), sets_.end()), sets_.end());
  std::vector<PlayerMask> minimal;
  for (PlayerMask m : sets_) {
    const bool absorbed = std::any_of(minimal.begin(), minimal.end(),
                                      [m](PlayerMask k) { return (k & m) == k; });
    if (!absorbed) minimal.push_back(m);
  }
  std::sort(minimal.begin(), minimal.end(), lex_less);
  sets_ = std::move(minimal);
}

PlayerMask AccessStructure::universe() const {
  return players_.size() == 64 ? ~PlayerMask{0} : ((PlayerMask{1} << players_.size()) - 1);
}

std::vector<PlayerId> AccessStructure::members(std::size_t set_index) const {
  return members_of(sets_.at(set_index));
}

std::vector<PlayerId> AccessStructure::members_of(PlayerMask mask) const {
  std::vector<PlayerId> out;
  for (std::size_t i = 0; i < players_.size(); ++i)
    if ((mask >> i) & 1U) out.push_back(players_[i]);
  return out;
}

std::optional<std::size_t> AccessStructure::index_of(std::string_view player) const {
  const auto it = std::lower_bound(players_.begin(), players_.end(), player);
  if (it == players_.end() || *it != player) return std::nullopt;
  return static_cast<std::size_t>(it - players_.begin());
}

PlayerMask AccessStructure::mask_of(std::span<const PlayerId> names) const {
  PlayerMask m = 0;
  for (const auto& name : names) {
    const auto idx = index_of(name);
    if (!idx) throw std::invalid_argument("player '" + name + "' not in universe");
    m |= PlayerMask{1} << *idx;
  }
  return m;
}

PlayerMask AccessStructure::mask_of(const Coalition& coalition) const {
  PlayerMask m = 0;
  for (const auto& p : coalition) {
    if (!p.is_player()) continue;
    if (const auto idx = index_of(p.name)) m |= PlayerMask{1} << *idx;
  }
  return m;
}

bool AccessStructure::is_authorized(PlayerMask coalition) const {
  return std::any_of(sets_.begin(), sets_.end(),
                     [coalition](PlayerMask s) { return (s & coalition) == s; });
}

std::string AccessStructure::to_string() const {
  const bool compact = std::all_of(players_.begin(), players_.end(), [](const PlayerId& p) {
    return p.size() == 1 && std::isupper(static_cast<unsigned char>(p[0]));
  });
  if (!compact) return to_json().dump();
  std::string out = "{";
  for (std::size_t j = 0; j < sets_.size(); ++j) {
    if (j) out += ", ";
    for (const auto& p : members(j)) out += p;
  }
  return out + "}";
}

nlohmann::json AccessStructure::to_json() const {
  nlohmann::json sets = nlohmann::json::array();
  for (std::size_t j = 0; j < sets_.size(); ++j) sets.push_back(members(j));
  return {{"players", players_}, {"sets", std::move(sets)}};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class CompactParser {
public:
  explicit CompactParser(std::string_view text) : text_(text) {}

  AccessStructure parse() {
    skip_ws();
    expect('{');
    skip_ws();
    if (peek() == '}') throw ParseError("empty access structure", pos_);
    std::vector<std::vector<PlayerId>> sets;
    while (true) {
      skip_ws();
      sets.push_back(parse_set());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      break;
    }
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing characters", pos_);

    std::vector<PlayerId> universe;
    for (const auto& s : sets) universe.insert(universe.end(), s.begin(), s.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    return AccessStructure(std::move(universe), sets);
  }

private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) {
      if (pos_ >= text_.size())
        throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "' but found '" + peek() + "'", pos_);
    }
    ++pos_;
  }

  std::vector<PlayerId> parse_set() {
    const std::size_t start = pos_;
    std::vector<PlayerId> members;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      const char c = text_[pos_];
      if (!std::isupper(static_cast<unsigned char>(c)))
        throw ParseError(std::string("player names are uppercase letters, found '") + c + "'", pos_);
      PlayerId id(1, c);
      if (std::find(members.begin(), members.end(), id) != members.end())
        throw ParseError(std::string("player '") + c + "' repeated in set", pos_);
      members.push_back(std::move(id));
      ++pos_;
    }
    if (members.empty()) {
      if (peek() == ',' || peek() == '}') throw ParseError("empty set inside structure", start);
      if (pos_ >= text_.size()) throw ParseError("unterminated structure", pos_);
      throw ParseError(std::string("unexpected character '") + peek() + "'", pos_);
    }
    return members;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

AccessStructure from_json_sets(std::vector<PlayerId> universe, const nlohmann::json& sets_json) {
  if (!sets_json.is_array()) throw ParseError("\"sets\" must be an array of arrays", 0);
  if (sets_json.empty()) throw ParseError("empty access structure", 0);
  std::vector<std::vector<PlayerId>> sets;
  for (const auto& s : sets_json) {
    if (!s.is_array()) throw ParseError("each authorized set must be an array of names", 0);
    if (s.empty()) throw ParseError("empty set inside structure", 0);
    std::vector<PlayerId> members;
    for (const auto& name : s) {
      if (!name.is_string()) throw ParseError("player names must be strings", 0);
      members.push_back(name.get<std::string>());
    }
    sets.push_back(std::move(members));
  }
  if (universe.empty()) {
    for (const auto& s : sets) universe.insert(universe.end(), s.begin(), s.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  }
  try {
    return AccessStructure(std::move(universe), sets);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace

AccessStructure parse_access_structure(std::string_view text) {
  const auto body = trim(text);
  if (body.empty()) throw ParseError("empty input", 0);

  bool is_json = body.front() == '[';
  if (body.front() == '{') {
    const auto after = body.find_first_not_of(" \t\r\n", 1);
    is_json = after != std::string_view::npos && body[after] == '"';
  }
  if (!is_json) return CompactParser(text).parse();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
  }
  if (doc.is_array()) return from_json_sets({}, doc);
  if (!doc.contains("sets")) throw ParseError("JSON access structure needs a \"sets\" field", 0);
  std::vector<PlayerId> universe;
  if (doc.contains("players")) {
    if (!doc["players"].is_array()) throw ParseError("\"players\" must be an array", 0);
    for (const auto& p : doc["players"]) {
      if (!p.is_string()) throw ParseError("player names must be strings", 0);
      universe.push_back(p.get<std::string>());
    }
  }
  return from_json_sets(std::move(universe), doc["sets"]);
}

// ---------------------------------------------------------------------------
// Graph

bool check_no_cloning(const AccessStructure& gamma) {
  const auto& sets = gamma.sets();
  for (std::size_t j = 0; j < sets.size(); ++j)
    for (std::size_t k = j + 1; k < sets.size(); ++k)
      if ((sets[j] & sets[k]) == 0) return false;
  return true;
}

ASGraph::ASGraph(std::size_t vertex_count)
    : adjacency_(vertex_count, std::vector<bool>(vertex_count, false)) {}

void ASGraph::add_edge(std::size_t a, std::size_t b) {
  if (a >= vertex_count() || b >= vertex_count()) throw std::out_of_range("vertex out of range");
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  adjacency_[a][b] = adjacency_[b][a] = true;
}

std::size_t ASGraph::edge_count() const { return edges().size(); }

std::vector<std::pair<std::size_t, std::size_t>> ASGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < vertex_count(); ++a)
    for (std::size_t b = a + 1; b < vertex_count(); ++b)
      if (adjacency_[a][b]) out.emplace_back(a, b);
  return out;
}

bool ASGraph::is_complete() const {
  for (std::size_t a = 0; a < vertex_count(); ++a)
    for (std::size_t b = a + 1; b < vertex_count(); ++b)
      if (!adjacency_[a][b]) return false;
  return true;
}

std::size_t ASGraph::component_count() const {
  std::vector<bool> seen(vertex_count(), false);
  std::size_t components = 0;
  for (std::size_t start = 0; start < vertex_count(); ++start) {
    if (seen[start]) continue;
    ++components;
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (std::size_t u = 0; u < vertex_count(); ++u)
        if (adjacency_[v][u] && !seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
    }
  }
  return components;
}

nlohmann::json ASGraph::to_json() const {
  nlohmann::json edges_json = nlohmann::json::array();
  for (const auto& [a, b] : edges()) edges_json.push_back({a, b});
  return {{"vertices", vertex_count()}, {"edges", std::move(edges_json)}};
}

ASGraph build_as_graph(const AccessStructure& gamma) {
  const auto& sets = gamma.sets();
  ASGraph g(sets.size());
  for (std::size_t j = 0; j < sets.size(); ++j)
    for (std::size_t k = j + 1; k < sets.size(); ++k)
      if ((sets[j] & sets[k]) != 0) g.add_edge(j, k);
  return g;
}

// ---------------------------------------------------------------------------
// Maximal structures

namespace {

// Calls visit(mask) for every k-subset of n players, in lexicographic order of
// the sorted member lists. Stops early when visit returns false.
template <typename Visit>
void for_each_combination(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    PlayerMask m = 0;
    for (auto i : idx) m |= PlayerMask{1} << i;
    visit(m);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

MaximalStructure maximalize(const AccessStructure& gamma) {
  if (!check_no_cloning(gamma))
    throw std::invalid_argument("access structure has disjoint authorized sets; no maximal extension exists");
  const std::size_t n = gamma.player_count();
  if (n > kMaxMaximalizePlayers)
    throw std::invalid_argument("maximalize supports at most 20 players");

  const PlayerMask all = gamma.universe();
  std::vector<PlayerMask> family(gamma.sets().begin(), gamma.sets().end());
  std::vector<PlayerMask> added;
  auto authorized = [&family](PlayerMask u) {
    return std::any_of(family.begin(), family.end(), [u](PlayerMask s) { return (s & u) == s; });
  };

  for (std::size_t size = 0; size <= n; ++size) {
    for_each_combination(n, size, [&](PlayerMask u) {
      if (authorized(u) || authorized(all & ~u)) return;
      family.push_back(u);
      added.push_back(u);
    });
  }

  return MaximalStructure{AccessStructure(gamma.players(), family),
                          "greedy over candidate sets by ascending size, then lexicographic member order",
                          std::move(added)};
}

}  // namespace aqss
