#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aqss/access_structure.hpp"
#include "aqss/classical_sharing.hpp"
#include "aqss/quantum_threshold.hpp"
#include "aqss/qudit_register.hpp"
#include "aqss/share_plan.hpp"

namespace aqss {

// A plan node together with the encoding that realized it.
struct RealizedNode {
  std::size_t site = 0;  // site that held this node's input before encoding
  std::optional<QtsEncoding> encoding;  // threshold nodes only
  std::vector<RealizedNode> children;
};

struct ShareAllocation {
  QuditRegister state;
  std::vector<Party> ownership;  // per site; environment for purification sites
  SharePlan plan;
  std::uint64_t q = 2;
  std::vector<std::uint32_t> secret_dims;
  RealizedNode realization;

  // Sites held by the coalition's members (never environment sites).
  std::vector<std::size_t> sites_of(const Coalition& coalition) const;
  std::size_t environment_site_count() const;
  // Ownership table, field, plan and register size; no amplitudes.
  nlohmann::json manifest() const;
};

// Recursively encodes the secret (one site of dimension d <= plan field) down
// the plan tree. Deterministic: the scheme's randomness lives in superposition.
ShareAllocation quantum_share(const SharePlan& plan, const QuditRegister& secret);

struct Reconstruction {
  QuditRegister state;
  std::size_t output_site = 0;
  std::uint64_t q = 2;
  std::vector<std::uint32_t> secret_dims;

  // Output site's reduced state, restricted back to the secret dimension.
  DensityView output() const;
  double fidelity(const QuditRegister& secret) const;
};

// Undoes the tree bottom-up with permutations on the coalition's sites only.
// Throws AuthorizationError, before touching the state, if the coalition
// does not satisfy the plan.
Reconstruction quantum_reconstruct(const ShareAllocation& allocation, const Coalition& coalition);

struct LeakageReport {
  double trace_distance = 0.0;
  std::size_t coalition_sites = 0;

  nlohmann::json to_json() const {
    return {{"trace_distance", trace_distance}, {"coalition_sites", coalition_sites}};
  }
};

// Distance between what the coalition holds under two secrets. Throws
// AuthorizationError for an authorized coalition.
LeakageReport leakage_report(const SharePlan& plan, const Coalition& coalition, const QuditRegister& secret_a,
                             const QuditRegister& secret_b);
// Same from two allocations of one plan.
LeakageReport leakage_between(const ShareAllocation& a, const ShareAllocation& b, const Coalition& coalition);

struct EncryptedAllocation {
  QuditRegister ciphertext;  // the dealer's single home share
  AccessStructure gamma;
  KeyBundles key_bundles;
  std::size_t key_bits = 0;

  nlohmann::json manifest() const;
};

// Pads every site with a fresh uniform Pauli key and shares the key bits
// classically over gamma. No-cloning is not required of gamma.
EncryptedAllocation encrypted_share(const AccessStructure& gamma, const QuditRegister& secret, Rng& rng);
// Test hook: a caller-chosen key; rng only drives the classical sharing.
EncryptedAllocation encrypted_share_with_key(const AccessStructure& gamma, const QuditRegister& secret,
                                             const PauliKey& key, Rng& rng);

// The dealer supplies the ciphertext; the coalition's players must jointly
// hold an authorized set. Dealer/environment members are ignored.
QuditRegister encrypted_reconstruct(const EncryptedAllocation& enc, const Coalition& coalition);

}  // namespace aqss
