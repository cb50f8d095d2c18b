#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "aqss/access_structure.hpp"
#include "aqss/qudit_register.hpp"
#include "aqss/rng.hpp"
#include "aqss/share_plan.hpp"

namespace testing {

inline aqss::AccessStructure gamma(const std::string& text) { return aqss::parse_access_structure(text); }

inline aqss::SharePlan plan_of(const std::string& text, aqss::PlanMode mode = aqss::PlanMode::strict) {
  return aqss::build_aqss_plan(gamma(text), aqss::PlanOptions{mode, {}});
}

// Every subset of the players, optionally also with the dealer added.
inline std::vector<aqss::Coalition> all_coalitions(const aqss::AccessStructure& g, bool with_dealer) {
  std::vector<aqss::Coalition> out;
  const std::size_t n = g.player_count();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    aqss::Coalition c;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) c.insert(aqss::Party::player(g.players()[i]));
    out.push_back(c);
    if (with_dealer) {
      c.insert(aqss::Party::dealer());
      out.push_back(c);
    }
  }
  return out;
}

// Number of partition classes holding an authorized set inside `c`.
inline std::size_t classes_covered(const aqss::AccessStructure& g, const aqss::CliquePartition& partition,
                                   const aqss::Coalition& c) {
  const aqss::PlayerMask have = g.mask_of(c);
  std::size_t covered = 0;
  for (const auto& cls : partition.classes) {
    bool hit = false;
    for (auto v : cls) hit = hit || (g.sets()[v] & ~have) == 0;
    covered += hit ? 1 : 0;
  }
  return covered;
}

// Random access structure over the first `players` uppercase letters.
inline aqss::AccessStructure random_gamma(std::size_t players, std::size_t sets, aqss::Rng& rng) {
  std::vector<aqss::PlayerId> names;
  for (std::size_t i = 0; i < players; ++i) names.emplace_back(1, static_cast<char>('A' + i));
  std::vector<aqss::PlayerMask> masks;
  for (std::size_t s = 0; s < sets; ++s) {
    aqss::PlayerMask m = 0;
    while (m == 0) m = rng.below(aqss::PlayerMask{1} << players);
    masks.push_back(m);
  }
  return aqss::AccessStructure(names, masks);
}

inline aqss::QuditRegister random_qudit(std::uint32_t d, aqss::Rng& rng) {
  std::vector<aqss::Complex> amps(d);
  double norm = 0;
  for (auto& a : amps) {
    a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return aqss::QuditRegister::prepare({d}, amps);
}

inline aqss::QuditRegister basis(std::uint32_t d, std::uint32_t v) {
  const std::uint32_t digits[] = {v};
  return aqss::QuditRegister::basis_state({d}, digits);
}

}  // namespace testing
