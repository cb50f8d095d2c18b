#include "aqss/quantum_threshold.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "aqss/field.hpp"

namespace aqss {

void QtsParams::validate() const {
  if (k < 1 || k > n) throw std::invalid_argument("threshold scheme needs 1 <= k <= n");
  if (n > 2 * k - 1)
    throw std::invalid_argument("((" + std::to_string(k) + "," + std::to_string(n) +
                                ")) violates no-cloning: need n <= 2k-1");
  if (!is_prime(q)) throw std::invalid_argument("field size " + std::to_string(q) + " is not prime");
  if (k == 1) return;
  const auto block = static_cast<std::uint64_t>(2 * k - 1);
  if (q >= block) return;
  if (k == n && q >= 3) return;
  throw std::invalid_argument("field size " + std::to_string(q) + " too small for ((" + std::to_string(k) + "," +
                              std::to_string(n) + "))");
}

nlohmann::json QtsEncoding::to_json() const {
  nlohmann::json blocks_json = nlohmann::json::array();
  for (const auto& b : blocks) blocks_json.push_back({{"k", b.k}, {"sites", b.sites}});
  return {{"params", params.to_json()},
          {"input_site", input_site},
          {"blocks", std::move(blocks_json)},
          {"share_sites", share_sites},
          {"environment_sites", environment_sites}};
}

QtsBlock encode_block(QuditRegister& reg, std::size_t site, int k, std::uint64_t q) {
  if (reg.dim(site) != q) throw std::invalid_argument("secret site dimension does not match the field");
  QtsBlock block{k, {site}};
  if (k == 1) return block;

  const auto extra = static_cast<std::size_t>(2 * k - 2);
  const std::size_t first = reg.site_count();
  std::vector<std::uint32_t> dims(extra, static_cast<std::uint32_t>(q));
  reg = append_sites(std::move(reg), dims);
  for (std::size_t i = 0; i < extra; ++i) block.sites.push_back(first + i);
  // Randomness for the k-1 low coefficients.
  for (int j = 0; j < k - 1; ++j) reg = apply_fourier(std::move(reg), first + static_cast<std::size_t>(j));

  const int points = 2 * k - 1;
  std::vector<std::vector<std::uint64_t>> power(static_cast<std::size_t>(points),
                                                std::vector<std::uint64_t>(static_cast<std::size_t>(k)));
  for (int x = 0; x < points; ++x)
    for (int j = 0; j < k; ++j) power[x][j] = mod_pow(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(j), q);

  // (s, c_0..c_{k-2}, z_1..z_{k-1}) -> (f(0), ..., f(k-1), f(k)+z_1, ..., f(2k-2)+z_{k-1}).
  // The first k values fix f (Vandermonde), the z shift the rest: a bijection.
  reg = apply_digit_map(std::move(reg), block.sites, [&](std::span<std::uint32_t> d) {
    std::vector<std::uint64_t> in(d.begin(), d.end());
    for (int x = 0; x < points; ++x) {
      std::uint64_t f = mod_mul(in[0], power[x][k - 1], q);
      for (int j = 0; j < k - 1; ++j) f = (f + mod_mul(in[1 + j], power[x][j], q)) % q;
      if (x >= k) f = (f + in[static_cast<std::size_t>(x)]) % q;
      d[static_cast<std::size_t>(x)] = static_cast<std::uint32_t>(f);
    }
  });
  return block;
}

std::size_t reconstruct_block(QuditRegister& reg, int k, std::uint64_t q, std::span<const int> positions,
                              std::span<const std::size_t> sites) {
  if (static_cast<int>(positions.size()) != k || sites.size() != positions.size())
    throw std::invalid_argument("block reconstruction needs exactly k held shares");
  if (k == 1) return sites[0];

  const int points = 2 * k - 1;
  std::vector<int> unheld;
  for (int x = 0; x < points; ++x)
    if (std::find(positions.begin(), positions.end(), x) == positions.end()) unheld.push_back(x);
  if (static_cast<int>(unheld.size()) != k - 1) throw std::invalid_argument("held positions are not distinct");

  auto sub = [q](std::uint64_t a, std::uint64_t b) { return (a + q - b % q) % q; };
  // Row 0: leading coefficient of the interpolant. Row i: its value at unheld[i-1].
  std::vector<std::vector<std::uint64_t>> m(static_cast<std::size_t>(k), std::vector<std::uint64_t>(static_cast<std::size_t>(k)));
  for (int h = 0; h < k; ++h) {
    std::uint64_t denom = 1;
    for (int g = 0; g < k; ++g)
      if (g != h) denom = mod_mul(denom, sub(positions[h], positions[g]), q);
    const std::uint64_t inv = mod_inverse(denom, q);
    m[0][h] = inv;
    for (int i = 1; i < k; ++i) {
      std::uint64_t num = 1;
      for (int g = 0; g < k; ++g)
        if (g != h) num = mod_mul(num, sub(unheld[i - 1], positions[g]), q);
      m[i][h] = mod_mul(num, inv, q);
    }
  }

  reg = apply_digit_map(std::move(reg), sites, [&](std::span<std::uint32_t> d) {
    std::vector<std::uint64_t> y(d.begin(), d.end());
    for (int i = 0; i < k; ++i) {
      std::uint64_t acc = 0;
      for (int h = 0; h < k; ++h) acc = (acc + mod_mul(m[i][h], y[h], q)) % q;
      d[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(acc);
    }
  });
  return sites[0];
}

std::pair<QtsEncoding, QuditRegister> qts_encode(QuditRegister reg, std::size_t site, const QtsParams& params) {
  params.validate();
  QtsEncoding enc;
  enc.params = params;
  enc.input_site = site;
  if (params.chained()) {
    std::size_t carrier = site;
    for (int j = 0; j + 1 < params.n; ++j) {
      auto block = encode_block(reg, carrier, 2, params.q);
      enc.share_sites.push_back(block.sites[0]);
      enc.environment_sites.push_back(block.sites[2]);
      carrier = block.sites[1];
      enc.blocks.push_back(std::move(block));
    }
    enc.share_sites.push_back(carrier);
  } else {
    auto block = encode_block(reg, site, params.k, params.q);
    for (std::size_t x = 0; x < block.sites.size(); ++x)
      (static_cast<int>(x) < params.n ? enc.share_sites : enc.environment_sites).push_back(block.sites[x]);
    enc.blocks.push_back(std::move(block));
  }
  for (auto s : enc.environment_sites) reg.set_label(s, "env");
  return {std::move(enc), std::move(reg)};
}

std::pair<std::size_t, QuditRegister> qts_reconstruct(QuditRegister reg, const QtsEncoding& encoding,
                                                      std::span<const HeldShare> held) {
  const auto& p = encoding.params;
  std::vector<HeldShare> sorted(held.begin(), held.end());
  std::sort(sorted.begin(), sorted.end(), [](const HeldShare& a, const HeldShare& b) { return a.share < b.share; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].share < 0 || sorted[i].share >= p.n)
      throw std::invalid_argument("share " + std::to_string(sorted[i].share) + " is not part of this encoding");
    if (i > 0 && sorted[i].share == sorted[i - 1].share) throw std::invalid_argument("repeated share");
    if (sorted[i].site >= reg.site_count()) throw std::invalid_argument("share site out of range");
  }
  if (static_cast<int>(sorted.size()) < p.k)
    throw std::invalid_argument("need " + std::to_string(p.k) + " shares, got " + std::to_string(sorted.size()));
  sorted.resize(static_cast<std::size_t>(p.k));

  if (!p.chained()) {
    std::vector<int> positions;
    std::vector<std::size_t> sites;
    for (const auto& h : sorted) {
      positions.push_back(h.share);
      sites.push_back(h.site);
    }
    const auto out = reconstruct_block(reg, p.k, p.q, positions, sites);
    return {out, std::move(reg)};
  }
  // Chain: undo the last block first, then feed its output into the one before.
  std::size_t carrier = sorted.back().site;
  const int positions[2] = {0, 1};
  for (std::size_t j = encoding.blocks.size(); j-- > 0;) {
    const std::size_t sites[2] = {sorted[j].site, carrier};
    carrier = reconstruct_block(reg, 2, p.q, positions, sites);
  }
  return {carrier, std::move(reg)};
}

}  // namespace aqss
