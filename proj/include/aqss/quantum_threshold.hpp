#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "aqss/qudit_register.hpp"
#include "json.hpp"

namespace aqss {

struct QtsParams {
  int k = 1;
  int n = 1;
  std::uint64_t q = 2;

  // 1 <= k <= n <= 2k-1, q prime, and q >= 2k-1 unless the scheme is an
  // ((m,m)) realized as a chain (then q >= 3). Throws std::invalid_argument.
  void validate() const;
  // ((m,m)) with m >= 3 and a field too small for one ((m, 2m-1)) block.
  bool chained() const { return k == n && k >= 3 && q < static_cast<std::uint64_t>(2 * k - 1); }

  nlohmann::json to_json() const { return {{"k", k}, {"n", n}, {"q", q}}; }
};

// One polynomial ((k, 2k-1)) block: sites[x] carries f(x) for x = 0..2k-2,
// where deg f < k and the x^{k-1} coefficient is the secret.
struct QtsBlock {
  int k = 1;
  std::vector<std::size_t> sites;
};

struct QtsEncoding {
  QtsParams params;
  std::size_t input_site = 0;
  // A direct scheme has one block. A chain of ((2,2)) blocks encodes share
  // j at blocks[j].sites[0] and passes the remainder on via sites[1].
  std::vector<QtsBlock> blocks;
  std::vector<std::size_t> share_sites;  // n entries
  std::vector<std::size_t> environment_sites;

  nlohmann::json to_json() const;
};

// Encodes the basis value of `site` (dimension q) in place. The site becomes
// share 0 and the other shares and environment sites are appended to the
// register. Environment sites are labelled "env".
std::pair<QtsEncoding, QuditRegister> qts_encode(QuditRegister reg, std::size_t site, const QtsParams& params);

// A share of an encoding and the site currently carrying its value. The site
// differs from the original share site once a nested scheme has been undone.
struct HeldShare {
  int share = 0;
  std::size_t site = 0;
};

// Undoes the encoding with a basis permutation on held sites only: the
// returned site carries the secret, disentangled from everything else.
// Uses the k lowest-numbered held shares. Throws std::invalid_argument for
// fewer than k shares, repeated shares, or shares outside the encoding.
std::pair<std::size_t, QuditRegister> qts_reconstruct(QuditRegister reg, const QtsEncoding& encoding,
                                                      std::span<const HeldShare> held);

// Building blocks, exposed for tests. `positions` are evaluation points of
// the held sites within the block.
QtsBlock encode_block(QuditRegister& reg, std::size_t site, int k, std::uint64_t q);
std::size_t reconstruct_block(QuditRegister& reg, int k, std::uint64_t q, std::span<const int> positions,
                              std::span<const std::size_t> sites);

}  // namespace aqss
