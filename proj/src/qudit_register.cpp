#include "aqss/qudit_register.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

#include "aqss/errors.hpp"
#include "aqss/field.hpp"

namespace aqss {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kDropTolerance = 1e-14;

using Entry = QuditRegister::Entry;
using Index = QuditRegister::Index;

// Sorts, sums duplicates and drops numerically zero amplitudes.
std::vector<Entry> canonical(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().index == e.index)
      out.back().amplitude += e.amplitude;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const Entry& e) { return std::abs(e.amplitude) < kDropTolerance; });
  return out;
}

std::vector<Complex> roots_of_unity(std::uint32_t d, int sign) {
  std::vector<Complex> w(d);
  for (std::uint32_t j = 0; j < d; ++j)
    w[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi * j / d);
  return w;
}

void check_site(const QuditRegister& reg, std::size_t site) {
  if (site >= reg.site_count())
    throw std::out_of_range("site " + std::to_string(site) + " out of range (" +
                            std::to_string(reg.site_count()) + " sites)");
}

void check_distinct_sites(const QuditRegister& reg, std::span<const std::size_t> sites) {
  std::vector<std::size_t> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("repeated site");
  for (auto s : sorted) check_site(reg, s);
}

Index local_value(const QuditRegister& reg, Index index, std::span<const std::size_t> sites) {
  Index v = 0;
  for (auto s : sites) v = v * reg.dim(s) + reg.digit(index, s);
  return v;
}

}  // namespace

std::size_t support_cap_from_env() {
  if (const char* text = std::getenv("AQSS_SUPPORT_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text, &end, 10);
    if (end != text && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultSupportCap;
}

std::string to_string(Basis basis) { return basis == Basis::computational ? "computational" : "diagonal"; }

void QuditRegister::assign_layout(std::vector<std::uint32_t> dims, std::vector<std::string> labels) {
  for (auto d : dims)
    if (!is_prime(d)) throw std::invalid_argument("site dimension " + std::to_string(d) + " is not prime");
  if (labels.empty()) labels.assign(dims.size(), "unassigned");
  if (labels.size() != dims.size()) throw std::invalid_argument("label count does not match site count");
  dims_ = std::move(dims);
  labels_ = std::move(labels);
  rebuild_strides();
}

void QuditRegister::rebuild_strides() {
  strides_.assign(dims_.size(), 1);
  Index acc = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    strides_[i] = acc;
    if (__builtin_mul_overflow(acc, Index{dims_[i]}, &acc))
      throw CapacityError("register dimension exceeds the 64-bit index range");
  }
}

void QuditRegister::assign_entries(std::vector<Entry> entries) {
  if (entries.size() > cap_)
    throw CapacityError("register support " + std::to_string(entries.size()) + " exceeds cap " +
                        std::to_string(cap_) + " (raise with AQSS_SUPPORT_CAP)");
  entries_ = std::move(entries);
}

QuditRegister::Index QuditRegister::total_dimension() const {
  Index acc = 1;
  for (auto d : dims_)
    if (__builtin_mul_overflow(acc, Index{d}, &acc)) return UINT64_MAX;
  return acc;
}

QuditRegister::Index QuditRegister::index_of(std::span<const std::uint32_t> digits) const {
  if (digits.size() != dims_.size()) throw std::invalid_argument("digit count does not match site count");
  Index idx = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= dims_[i]) throw std::invalid_argument("digit out of range");
    idx += digits[i] * strides_[i];
  }
  return idx;
}

QuditRegister QuditRegister::from_entries(std::vector<std::uint32_t> dims, std::vector<Entry> entries) {
  QuditRegister reg;
  reg.assign_layout(std::move(dims), {});
  const Index total = reg.total_dimension();
  for (const auto& e : entries)
    if (e.index >= total) throw std::invalid_argument("basis index out of range");
  reg.assign_entries(canonical(std::move(entries)));
  if (std::abs(reg.norm() - 1.0) > kNormTolerance)
    throw std::invalid_argument("state is not normalized (norm " + std::to_string(reg.norm()) + ")");
  return reg;
}

QuditRegister QuditRegister::prepare(std::vector<std::uint32_t> dims, std::span<const Complex> amplitudes) {
  QuditRegister probe;
  probe.assign_layout(dims, {});
  if (probe.total_dimension() != amplitudes.size())
    throw std::invalid_argument("expected " + std::to_string(probe.total_dimension()) + " amplitudes, got " +
                                std::to_string(amplitudes.size()));
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    if (amplitudes[i] != Complex{}) entries.push_back({i, amplitudes[i]});
  return from_entries(std::move(dims), std::move(entries));
}

QuditRegister QuditRegister::basis_state(std::vector<std::uint32_t> dims, std::span<const std::uint32_t> digits) {
  QuditRegister reg;
  reg.assign_layout(std::move(dims), {});
  reg.assign_entries({{reg.index_of(digits), Complex{1.0, 0.0}}});
  return reg;
}

Complex QuditRegister::amplitude(std::span<const std::uint32_t> digits) const {
  const Index idx = index_of(digits);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), idx,
                             [](const Entry& e, Index i) { return e.index < i; });
  return it != entries_.end() && it->index == idx ? it->amplitude : Complex{};
}

std::vector<Complex> QuditRegister::dense() const {
  const Index total = total_dimension();
  if (total > cap_) throw CapacityError("dense form of dimension " + std::to_string(total) + " exceeds cap");
  std::vector<Complex> out(total);
  for (const auto& e : entries_) out[e.index] = e.amplitude;
  return out;
}

Eigen::VectorXcd QuditRegister::dense_vector() const {
  const auto v = dense();
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double QuditRegister::norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e.amplitude);
  return std::sqrt(s);
}

nlohmann::json QuditRegister::to_json() const {
  nlohmann::json j{{"dims", dims_}, {"labels", labels_}};
  if (total_dimension() <= 4096) {
    nlohmann::json amps = nlohmann::json::array();
    for (const auto& a : dense()) amps.push_back({a.real(), a.imag()});
    j["amplitudes"] = std::move(amps);
  } else {
    nlohmann::json support = nlohmann::json::array();
    for (const auto& e : entries_) support.push_back({e.index, e.amplitude.real(), e.amplitude.imag()});
    j["support"] = std::move(support);
  }
  return j;
}

QuditRegister QuditRegister::from_json(const nlohmann::json& doc) {
  auto dims = doc.at("dims").get<std::vector<std::uint32_t>>();
  QuditRegister reg;
  if (doc.contains("amplitudes")) {
    std::vector<Complex> amps;
    for (const auto& a : doc.at("amplitudes")) {
      if (a.is_number())
        amps.emplace_back(a.get<double>(), 0.0);
      else
        amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    }
    reg = prepare(dims, amps);
  } else {
    std::vector<Entry> entries;
    for (const auto& e : doc.at("support"))
      entries.push_back({e.at(0).get<Index>(), Complex{e.at(1).get<double>(), e.at(2).get<double>()}});
    reg = from_entries(dims, std::move(entries));
  }
  if (doc.contains("labels")) reg.assign_layout(dims, doc.at("labels").get<std::vector<std::string>>());
  return reg;
}

Complex inner_product(const QuditRegister& a, const QuditRegister& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("inner product of registers with different dims");
  Complex acc{};
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      acc += std::conj(ia->amplitude) * ib->amplitude;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

QuditRegister apply_basis_permutation(QuditRegister reg, std::span<const std::size_t> sites,
                                      std::span<const std::uint64_t> table) {
  check_distinct_sites(reg, sites);
  std::uint64_t local = 1;
  for (auto s : sites) local *= reg.dim(s);
  if (table.size() != local)
    throw std::invalid_argument("permutation table has " + std::to_string(table.size()) + " entries, expected " +
                                std::to_string(local));
  std::vector<bool> hit(local, false);
  for (auto t : table) {
    if (t >= local || hit[t]) throw std::invalid_argument("permutation table is not a bijection");
    hit[t] = true;
  }
  std::vector<std::uint32_t> radix;
  for (auto s : sites) radix.push_back(reg.dim(s));
  return apply_digit_map(std::move(reg), sites, [&](std::span<std::uint32_t> digits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) v = v * radix[i] + digits[i];
    v = table[v];
    for (std::size_t i = digits.size(); i-- > 0;) {
      digits[i] = static_cast<std::uint32_t>(v % radix[i]);
      v /= radix[i];
    }
  });
}

QuditRegister apply_digit_map(QuditRegister reg, std::span<const std::size_t> sites, const DigitMap& map) {
  check_distinct_sites(reg, sites);
  std::vector<Entry> out;
  out.reserve(reg.support());
  std::vector<std::uint32_t> digits(sites.size());
  for (const auto& e : reg.entries()) {
    Index base = e.index;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      digits[i] = reg.digit(e.index, sites[i]);
      base -= digits[i] * reg.stride(sites[i]);
    }
    map(digits);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (digits[i] >= reg.dim(sites[i])) throw std::logic_error("digit map produced an out-of-range digit");
      base += digits[i] * reg.stride(sites[i]);
    }
    out.push_back({base, e.amplitude});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].index == out[i - 1].index) throw std::logic_error("digit map is not injective on the support");
  reg.assign_entries(std::move(out));
  return reg;
}

namespace {

QuditRegister fourier(QuditRegister reg, std::size_t site, int sign) {
  check_site(reg, site);
  const std::uint32_t d = reg.dim(site);
  const Index stride = reg.stride(site);
  const auto w = roots_of_unity(d, sign);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Entry> out;
  out.reserve(reg.support() * d);
  for (const auto& e : reg.entries()) {
    const std::uint32_t j = reg.digit(e.index, site);
    const Index base = e.index - j * stride;
    for (std::uint32_t k = 0; k < d; ++k)
      out.push_back({base + k * stride, e.amplitude * w[(static_cast<std::uint64_t>(j) * k) % d] * scale});
  }
  reg.assign_entries(canonical(std::move(out)));
  return reg;
}

}  // namespace

QuditRegister apply_fourier(QuditRegister reg, std::size_t site) { return fourier(std::move(reg), site, +1); }

QuditRegister apply_inverse_fourier(QuditRegister reg, std::size_t site) {
  return fourier(std::move(reg), site, -1);
}

QuditRegister apply_x(QuditRegister reg, std::size_t site, std::uint32_t power) {
  check_site(reg, site);
  const std::uint32_t d = reg.dim(site);
  power %= d;
  if (power == 0) return reg;
  return apply_digit_map(std::move(reg), std::span<const std::size_t>(&site, 1),
                         [&](std::span<std::uint32_t> digits) { digits[0] = (digits[0] + power) % d; });
}

QuditRegister apply_z(QuditRegister reg, std::size_t site, std::uint32_t power) {
  check_site(reg, site);
  const std::uint32_t d = reg.dim(site);
  power %= d;
  if (power == 0) return reg;
  const auto w = roots_of_unity(d, +1);
  auto entries = reg.entries();
  for (auto& e : entries) e.amplitude *= w[(static_cast<std::uint64_t>(reg.digit(e.index, site)) * power) % d];
  reg.assign_entries(std::move(entries));
  return reg;
}

std::vector<std::pair<std::uint64_t, double>> outcome_distribution(const QuditRegister& reg,
                                                                   std::span<const std::size_t> sites) {
  check_distinct_sites(reg, sites);
  std::vector<std::pair<std::uint64_t, double>> probs;
  probs.reserve(reg.support());
  for (const auto& e : reg.entries()) probs.emplace_back(local_value(reg, e.index, sites), std::norm(e.amplitude));
  std::sort(probs.begin(), probs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::uint64_t, double>> out;
  for (const auto& p : probs) {
    if (!out.empty() && out.back().first == p.first)
      out.back().second += p.second;
    else
      out.push_back(p);
  }
  return out;
}

std::pair<Outcome, QuditRegister> measure(QuditRegister reg, std::span<const std::size_t> sites, Basis basis,
                                          Rng& rng) {
  check_distinct_sites(reg, sites);
  if (basis == Basis::diagonal)
    for (auto s : sites) reg = apply_fourier(std::move(reg), s);

  const auto dist = outcome_distribution(reg, sites);
  double total = 0.0;
  for (const auto& p : dist) total += p.second;
  const double u = rng.uniform() * total;
  std::uint64_t chosen = dist.back().first;
  double acc = 0.0;
  for (const auto& p : dist) {
    acc += p.second;
    if (u < acc) {
      chosen = p.first;
      break;
    }
  }

  std::vector<Entry> kept;
  double weight = 0.0;
  for (const auto& e : reg.entries()) {
    if (local_value(reg, e.index, sites) != chosen) continue;
    kept.push_back(e);
    weight += std::norm(e.amplitude);
  }
  const double scale = 1.0 / std::sqrt(weight);
  for (auto& e : kept) e.amplitude *= scale;
  reg.assign_entries(std::move(kept));

  Outcome outcome;
  outcome.basis = basis;
  outcome.values.resize(sites.size());
  for (std::size_t i = sites.size(); i-- > 0;) {
    outcome.values[i] = static_cast<std::uint32_t>(chosen % reg.dim(sites[i]));
    chosen /= reg.dim(sites[i]);
  }
  if (basis == Basis::diagonal)
    for (auto s : sites) reg = apply_inverse_fourier(std::move(reg), s);
  return {std::move(outcome), std::move(reg)};
}

QuditRegister remove_site(QuditRegister reg, std::size_t site) {
  check_site(reg, site);
  const std::uint32_t value = reg.digit(reg.entries().front().index, site);
  for (const auto& e : reg.entries())
    if (reg.digit(e.index, site) != value)
      throw std::invalid_argument("site " + std::to_string(site) + " is not in a product basis state");
  const Index stride = reg.stride(site);
  const Index block = stride * reg.dim(site);
  auto entries = reg.entries();
  for (auto& e : entries) e.index = (e.index / block) * stride + e.index % stride;
  auto dims = reg.dims();
  auto labels = reg.labels();
  dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(site));
  labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(site));
  reg.assign_layout(std::move(dims), std::move(labels));
  reg.assign_entries(std::move(entries));
  return reg;
}

QuditRegister append_sites(QuditRegister reg, std::span<const std::uint32_t> dims,
                           std::span<const std::string> labels) {
  if (!labels.empty() && labels.size() != dims.size()) throw std::invalid_argument("label count mismatch");
  auto all_dims = reg.dims();
  auto all_labels = reg.labels();
  Index factor = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    all_dims.push_back(dims[i]);
    all_labels.push_back(labels.empty() ? "unassigned" : labels[i]);
    factor *= dims[i];
  }
  auto entries = reg.entries();
  reg.assign_layout(std::move(all_dims), std::move(all_labels));
  for (auto& e : entries) e.index *= factor;
  reg.assign_entries(std::move(entries));
  return reg;
}

QuditRegister reorder_sites(QuditRegister reg, std::span<const std::size_t> order) {
  if (order.size() != reg.site_count()) throw std::invalid_argument("reorder needs every site exactly once");
  check_distinct_sites(reg, order);
  std::vector<std::uint32_t> dims;
  std::vector<std::string> labels;
  for (auto s : order) {
    dims.push_back(reg.dim(s));
    labels.push_back(reg.labels()[s]);
  }
  QuditRegister out;
  out.set_support_cap(reg.support_cap());
  out.assign_layout(std::move(dims), std::move(labels));
  std::vector<Entry> entries;
  entries.reserve(reg.support());
  for (const auto& e : reg.entries()) entries.push_back({local_value(reg, e.index, order), e.amplitude});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  out.assign_entries(std::move(entries));
  return out;
}

QuditRegister tensor(const QuditRegister& a, const QuditRegister& b) {
  auto dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  auto labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  QuditRegister out;
  out.set_support_cap(std::min(a.support_cap(), b.support_cap()));
  out.assign_layout(std::move(dims), std::move(labels));
  const Index tb = b.total_dimension();
  std::vector<Entry> entries;
  entries.reserve(a.support() * b.support());
  for (const auto& x : a.entries())
    for (const auto& y : b.entries()) entries.push_back({x.index * tb + y.index, x.amplitude * y.amplitude});
  out.assign_entries(std::move(entries));
  return out;
}

// ---------------------------------------------------------------------------

PauliKey random_pauli_key(std::span<const std::uint32_t> dims, Rng& rng) {
  PauliKey key;
  for (auto d : dims)
    key.entries.emplace_back(static_cast<std::uint32_t>(rng.below(d)), static_cast<std::uint32_t>(rng.below(d)));
  return key;
}

namespace {

std::size_t bits_for(std::uint32_t d) {
  std::size_t b = 0;
  while ((std::uint64_t{1} << b) < d) ++b;
  return b;
}

}  // namespace

std::size_t pauli_key_bit_length(std::span<const std::uint32_t> dims) {
  std::size_t total = 0;
  for (auto d : dims) total += 2 * bits_for(d);
  return total;
}

std::vector<std::uint8_t> pauli_key_bits(const PauliKey& key, std::span<const std::uint32_t> dims) {
  if (key.entries.size() != dims.size()) throw std::invalid_argument("key length does not match site count");
  std::vector<std::uint8_t> bits;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::size_t w = bits_for(dims[i]);
    for (auto v : {key.entries[i].first, key.entries[i].second})
      for (std::size_t b = 0; b < w; ++b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1U));
  }
  return bits;
}

PauliKey pauli_key_from_bits(std::span<const std::uint8_t> bits, std::span<const std::uint32_t> dims) {
  if (bits.size() != pauli_key_bit_length(dims))
    throw std::invalid_argument("key has " + std::to_string(bits.size()) + " bits, expected " +
                                std::to_string(pauli_key_bit_length(dims)));
  PauliKey key;
  std::size_t pos = 0;
  for (auto d : dims) {
    const std::size_t w = bits_for(d);
    std::uint32_t v[2] = {0, 0};
    for (auto& x : v) {
      for (std::size_t b = 0; b < w; ++b) x |= static_cast<std::uint32_t>(bits[pos++] & 1U) << b;
      if (x >= d) throw std::invalid_argument("key value out of range for dimension " + std::to_string(d));
    }
    key.entries.emplace_back(v[0], v[1]);
  }
  return key;
}

QuditRegister qotp_encrypt(QuditRegister reg, std::span<const std::size_t> sites, const PauliKey& key) {
  if (key.entries.size() != sites.size()) throw std::invalid_argument("key length does not match site count");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    reg = apply_z(std::move(reg), sites[i], key.entries[i].second);
    reg = apply_x(std::move(reg), sites[i], key.entries[i].first);
  }
  return reg;
}

QuditRegister qotp_decrypt(QuditRegister reg, std::span<const std::size_t> sites, const PauliKey& key) {
  if (key.entries.size() != sites.size()) throw std::invalid_argument("key length does not match site count");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const std::uint32_t d = reg.dim(sites[i]);
    reg = apply_x(std::move(reg), sites[i], (d - key.entries[i].first % d) % d);
    reg = apply_z(std::move(reg), sites[i], (d - key.entries[i].second % d) % d);
  }
  return reg;
}

}  // namespace aqss
