#include "aqss/classical_sharing.hpp"

#include <set>
#include <stdexcept>

#include "aqss/errors.hpp"

namespace aqss {

nlohmann::json KeyPiece::to_json() const {
  return {{"set", set_index}, {"of", share_count}, {"position", position}, {"pad", bits_to_string(pad)}};
}

KeyPiece KeyPiece::from_json(const nlohmann::json& doc) {
  return {doc.at("set").get<std::size_t>(), doc.at("of").get<std::size_t>(), doc.at("position").get<std::size_t>(),
          bits_from_string(doc.at("pad").get<std::string>())};
}

KeyBundles classical_monotone_share(const AccessStructure& gamma, std::span<const std::uint8_t> key, Rng& rng) {
  KeyBundles bundles;
  for (const auto& p : gamma.players()) bundles[p];
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const auto members = gamma.members(j);
    Bits last(key.begin(), key.end());
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      Bits pad(key.size());
      for (auto& b : pad) b = static_cast<std::uint8_t>(rng.next() & 1U);
      for (std::size_t t = 0; t < pad.size(); ++t) last[t] ^= pad[t];
      bundles[members[i]].push_back({j, members.size(), i, std::move(pad)});
    }
    bundles[members.back()].push_back({j, members.size(), members.size() - 1, std::move(last)});
  }
  return bundles;
}

Bits classical_monotone_reconstruct(const KeyBundles& bundles, std::span<const PlayerId> coalition) {
  std::map<std::size_t, std::map<std::size_t, const KeyPiece*>> pooled;
  for (const auto& player : coalition) {
    auto it = bundles.find(player);
    if (it == bundles.end()) continue;
    for (const auto& piece : it->second) pooled[piece.set_index][piece.position] = &piece;
  }
  for (const auto& [set_index, pieces] : pooled) {
    const std::size_t count = pieces.begin()->second->share_count;
    if (pieces.size() != count) continue;
    Bits key(pieces.begin()->second->pad.size(), 0);
    for (const auto& [pos, piece] : pieces) {
      if (piece->pad.size() != key.size()) throw std::invalid_argument("key pieces have different lengths");
      for (std::size_t t = 0; t < key.size(); ++t) key[t] ^= piece->pad[t];
    }
    return key;
  }
  throw AuthorizationError("coalition holds no complete authorized set of key pieces");
}

nlohmann::json to_json(const KeyBundles& bundles) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [player, pieces] : bundles) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& piece : pieces) arr.push_back(piece.to_json());
    j[player] = std::move(arr);
  }
  return j;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string s;
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

Bits bits_from_string(std::string_view text) {
  Bits bits;
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain 0 and 1");
    bits.push_back(c == '1');
  }
  return bits;
}

}  // namespace aqss
