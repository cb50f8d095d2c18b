#include "aqss/engine.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "aqss/errors.hpp"

namespace aqss {

namespace {

RealizedNode realize(const PlanNode& node, std::size_t site, ShareAllocation& alloc) {
  RealizedNode out;
  out.site = site;
  if (node.is_leaf()) {
    alloc.ownership[site] = node.owner;
    alloc.state.set_label(site, node.owner.to_string());
    return out;
  }
  auto [encoding, state] = qts_encode(std::move(alloc.state), site, QtsParams{node.k, node.n, alloc.q});
  alloc.state = std::move(state);
  alloc.ownership.resize(alloc.state.site_count(), Party::environment());
  for (std::size_t i = 0; i < node.children.size(); ++i)
    out.children.push_back(realize(node.children[i], encoding.share_sites[i], alloc));
  out.encoding = std::move(encoding);
  return out;
}

std::size_t undo(const PlanNode& node, const RealizedNode& realized, const Coalition& coalition,
                 QuditRegister& state) {
  if (node.is_leaf()) return realized.site;
  std::vector<HeldShare> held;
  for (std::size_t i = 0; i < node.children.size() && static_cast<int>(held.size()) < node.k; ++i) {
    if (!evaluate_coalition(node.children[i], coalition)) continue;
    held.push_back({static_cast<int>(i), undo(node.children[i], realized.children[i], coalition, state)});
  }
  auto [site, next] = qts_reconstruct(std::move(state), *realized.encoding, held);
  state = std::move(next);
  return site;
}

}  // namespace

std::vector<std::size_t> ShareAllocation::sites_of(const Coalition& coalition) const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < ownership.size(); ++s)
    if (!ownership[s].is_environment() && coalition.count(ownership[s])) out.push_back(s);
  return out;
}

std::size_t ShareAllocation::environment_site_count() const {
  return static_cast<std::size_t>(
      std::count_if(ownership.begin(), ownership.end(), [](const Party& p) { return p.is_environment(); }));
}

nlohmann::json ShareAllocation::manifest() const {
  std::map<std::string, std::vector<std::size_t>> holdings;
  nlohmann::json owners = nlohmann::json::array();
  for (std::size_t s = 0; s < ownership.size(); ++s) {
    owners.push_back(ownership[s].to_string());
    holdings[ownership[s].to_string()].push_back(s);
  }
  return {{"q", q},
          {"secret_dims", secret_dims},
          {"sites", state.site_count()},
          {"support", state.support()},
          {"environment_sites", environment_site_count()},
          {"ownership", std::move(owners)},
          {"holdings", holdings},
          {"plan", to_json(plan)}};
}

ShareAllocation quantum_share(const SharePlan& plan, const QuditRegister& secret) {
  if (secret.site_count() != 1) throw std::invalid_argument("quantum sharing takes a single-site secret");
  ShareAllocation alloc;
  alloc.plan = plan;
  alloc.secret_dims = secret.dims();
  alloc.q = plan_field(plan.root, secret.dim(0));
  std::vector<QuditRegister::Entry> entries = secret.entries();
  alloc.state = QuditRegister::from_entries({static_cast<std::uint32_t>(alloc.q)}, std::move(entries));
  alloc.state.set_support_cap(secret.support_cap());
  alloc.ownership.assign(1, Party::environment());
  alloc.realization = realize(plan.root, 0, alloc);
  return alloc;
}

DensityView Reconstruction::output() const {
  const std::size_t site = output_site;
  auto full = reduced_density(state, std::span<const std::size_t>(&site, 1));
  const auto d = static_cast<Eigen::Index>(secret_dims.at(0));
  DensityView view;
  view.sites = {output_site};
  view.dims = secret_dims;
  view.matrix = full.matrix.topLeftCorner(d, d);
  return view;
}

double Reconstruction::fidelity(const QuditRegister& secret) const { return fidelity_to_pure(output(), secret); }

Reconstruction quantum_reconstruct(const ShareAllocation& allocation, const Coalition& coalition) {
  if (!evaluate_coalition(allocation.plan, coalition))
    throw AuthorizationError("coalition " + to_string(coalition) + " is not authorized by the plan");
  Reconstruction out;
  out.state = allocation.state;
  out.q = allocation.q;
  out.secret_dims = allocation.secret_dims;
  out.output_site = undo(allocation.plan.root, allocation.realization, coalition, out.state);
  return out;
}

LeakageReport leakage_between(const ShareAllocation& a, const ShareAllocation& b, const Coalition& coalition) {
  if (evaluate_coalition(a.plan, coalition))
    throw AuthorizationError("coalition " + to_string(coalition) + " is authorized; leakage is not defined");
  if (a.ownership != b.ownership) throw std::invalid_argument("allocations come from different plans");
  const auto sites = a.sites_of(coalition);
  return {subsystem_trace_distance(a.state, b.state, sites), sites.size()};
}

LeakageReport leakage_report(const SharePlan& plan, const Coalition& coalition, const QuditRegister& secret_a,
                             const QuditRegister& secret_b) {
  if (evaluate_coalition(plan, coalition))
    throw AuthorizationError("coalition " + to_string(coalition) + " is authorized; leakage is not defined");
  if (secret_a.dims() != secret_b.dims()) throw std::invalid_argument("secrets have different dimensions");
  return leakage_between(quantum_share(plan, secret_a), quantum_share(plan, secret_b), coalition);
}

// ---------------------------------------------------------------------------

nlohmann::json EncryptedAllocation::manifest() const {
  return {{"ciphertext_sites", ciphertext.site_count()},
          {"ciphertext_dims", ciphertext.dims()},
          {"key_bits", key_bits},
          {"gamma", gamma.to_json()},
          {"key_bundles", to_json(key_bundles)}};
}

EncryptedAllocation encrypted_share_with_key(const AccessStructure& gamma, const QuditRegister& secret,
                                             const PauliKey& key, Rng& rng) {
  std::vector<std::size_t> sites(secret.site_count());
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  const auto bits = pauli_key_bits(key, secret.dims());
  EncryptedAllocation enc{qotp_encrypt(secret, sites, key), gamma, classical_monotone_share(gamma, bits, rng),
                          bits.size()};
  for (auto s : sites) enc.ciphertext.set_label(s, "dealer");
  return enc;
}

EncryptedAllocation encrypted_share(const AccessStructure& gamma, const QuditRegister& secret, Rng& rng) {
  Rng key_stream = rng.split("qotp-key");
  Rng share_stream = rng.split("key-sharing");
  return encrypted_share_with_key(gamma, secret, random_pauli_key(secret.dims(), key_stream), share_stream);
}

QuditRegister encrypted_reconstruct(const EncryptedAllocation& enc, const Coalition& coalition) {
  std::vector<PlayerId> players;
  for (const auto& p : coalition)
    if (p.is_player()) players.push_back(p.name);
  const auto bits = classical_monotone_reconstruct(enc.key_bundles, players);
  const auto key = pauli_key_from_bits(bits, enc.ciphertext.dims());
  std::vector<std::size_t> sites(enc.ciphertext.site_count());
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  return qotp_decrypt(enc.ciphertext, sites, key);
}

}  // namespace aqss
