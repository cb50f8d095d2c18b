#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "aqss/access_structure.hpp"
#include "aqss/rng.hpp"
#include "json.hpp"

namespace aqss {

using Bits = std::vector<std::uint8_t>;

// One XOR piece of the key for authorized set `set_index`, which is split
// into `share_count` pieces; this is piece `position`.
struct KeyPiece {
  std::size_t set_index = 0;
  std::size_t share_count = 0;
  std::size_t position = 0;
  Bits pad;

  nlohmann::json to_json() const;
  static KeyPiece from_json(const nlohmann::json& doc);
  bool operator==(const KeyPiece&) const = default;
};

using KeyBundles = std::map<PlayerId, std::vector<KeyPiece>>;

// Normal-form sharing: an OR over minimal sets (replication) of ANDs (XOR
// splits). Every player of gamma gets a bundle, possibly empty.
KeyBundles classical_monotone_share(const AccessStructure& gamma, std::span<const std::uint8_t> key, Rng& rng);

// Pools the coalition's bundles and XORs the pieces of the first complete set.
// Throws AuthorizationError when no set is complete.
Bits classical_monotone_reconstruct(const KeyBundles& bundles, std::span<const PlayerId> coalition);

nlohmann::json to_json(const KeyBundles& bundles);
std::string bits_to_string(std::span<const std::uint8_t> bits);
Bits bits_from_string(std::string_view text);

}  // namespace aqss
