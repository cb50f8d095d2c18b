#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aqss/rng.hpp"
#include "json.hpp"

namespace aqss {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 22;

// Support cap from AQSS_SUPPORT_CAP when set to a positive integer, else the default.
std::size_t support_cap_from_env();

enum class Basis { computational, diagonal };

std::string to_string(Basis basis);

// Pure state of an ordered list of qudits.
//
// Only nonzero amplitudes are stored, as (index, amplitude) pairs sorted by
// index. The index is the mixed-radix number of the basis state with site 0
// as the most significant digit, so small-support states over many sites
// (codes, GHZ states) stay cheap. Operations that would push the support past
// support_cap() throw CapacityError.
class QuditRegister {
public:
  using Index = std::uint64_t;
  struct Entry {
    Index index;
    Complex amplitude;
  };

  // Zero sites, amplitude 1.
  QuditRegister() : entries_{{0, Complex{1.0, 0.0}}} {}

  // Dense amplitudes in index order. Throws std::invalid_argument on a length
  // mismatch or a norm off by more than 1e-10.
  static QuditRegister prepare(std::vector<std::uint32_t> dims, std::span<const Complex> amplitudes);
  static QuditRegister basis_state(std::vector<std::uint32_t> dims, std::span<const std::uint32_t> digits);
  static QuditRegister from_entries(std::vector<std::uint32_t> dims, std::vector<Entry> entries);

  std::size_t site_count() const { return dims_.size(); }
  std::uint32_t dim(std::size_t site) const { return dims_.at(site); }
  const std::vector<std::uint32_t>& dims() const { return dims_; }
  // Product of all dimensions; saturates at UINT64_MAX.
  Index total_dimension() const;
  std::size_t support() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  const std::vector<std::string>& labels() const { return labels_; }
  void set_label(std::size_t site, std::string label) { labels_.at(site) = std::move(label); }

  std::size_t support_cap() const { return cap_; }
  void set_support_cap(std::size_t cap) { cap_ = cap; }

  Index stride(std::size_t site) const { return strides_.at(site); }
  std::uint32_t digit(Index index, std::size_t site) const {
    return static_cast<std::uint32_t>(index / strides_[site] % dims_[site]);
  }
  Index index_of(std::span<const std::uint32_t> digits) const;

  Complex amplitude(std::span<const std::uint32_t> digits) const;
  // Dense vector; throws CapacityError when the total dimension exceeds the cap.
  std::vector<Complex> dense() const;
  Eigen::VectorXcd dense_vector() const;
  double norm() const;

  // {"dims", "labels", "amplitudes": [[re, im], ...]} for small registers,
  // "support": [[index, re, im], ...] once the dense form would exceed 4096.
  nlohmann::json to_json() const;
  static QuditRegister from_json(const nlohmann::json& doc);

  // Internal: replaces the support. Entries must be sorted and distinct.
  void assign_entries(std::vector<Entry> entries);
  void assign_layout(std::vector<std::uint32_t> dims, std::vector<std::string> labels);

private:
  void rebuild_strides();

  std::vector<std::uint32_t> dims_;
  std::vector<std::string> labels_;
  std::vector<Index> strides_;
  std::vector<Entry> entries_;
  std::size_t cap_ = support_cap_from_env();
};

// <a|b>; registers must have identical dims.
Complex inner_product(const QuditRegister& a, const QuditRegister& b);

// Permutes the joint basis of `sites`: local state t (mixed radix over the
// listed sites, first listed most significant) goes to table[t]. Throws
// std::invalid_argument unless the table is a bijection of the right size.
QuditRegister apply_basis_permutation(QuditRegister reg, std::span<const std::size_t> sites,
                                      std::span<const std::uint64_t> table);

// Same, with the permutation given as an in-place rewrite of the local digits.
// The map must be a bijection; a collision on the support throws std::logic_error.
using DigitMap = std::function<void(std::span<std::uint32_t>)>;
QuditRegister apply_digit_map(QuditRegister reg, std::span<const std::size_t> sites, const DigitMap& map);

// |j> -> d^{-1/2} sum_k w^{jk} |k> with w = exp(2 pi i / d); Hadamard for d = 2.
QuditRegister apply_fourier(QuditRegister reg, std::size_t site);
QuditRegister apply_inverse_fourier(QuditRegister reg, std::size_t site);

// Generalized Paulis: X|j> = |j+1>, Z|j> = w^j |j>.
QuditRegister apply_x(QuditRegister reg, std::size_t site, std::uint32_t power = 1);
QuditRegister apply_z(QuditRegister reg, std::size_t site, std::uint32_t power = 1);

struct Outcome {
  std::vector<std::uint32_t> values;
  Basis basis = Basis::computational;
};

// Born-rule sample over `sites`; the state collapses and is renormalized.
// Diagonal measurement applies the Fourier transform, measures, and maps the
// collapsed sites back, so they are left in the measured diagonal state.
std::pair<Outcome, QuditRegister> measure(QuditRegister reg, std::span<const std::size_t> sites, Basis basis,
                                          Rng& rng);

// Joint outcome distribution of `sites` in the computational basis, keyed by
// the local mixed-radix value.
std::vector<std::pair<std::uint64_t, double>> outcome_distribution(const QuditRegister& reg,
                                                                   std::span<const std::size_t> sites);

// Drops a site that is in a product basis state (e.g. after measurement).
// Throws std::invalid_argument if the site is still entangled or superposed.
QuditRegister remove_site(QuditRegister reg, std::size_t site);

// Appends new sites in |0>.
QuditRegister append_sites(QuditRegister reg, std::span<const std::uint32_t> dims,
                           std::span<const std::string> labels = {});

// New site i is old site order[i]; order must be a permutation of all sites.
QuditRegister reorder_sites(QuditRegister reg, std::span<const std::size_t> order);

// Tensor product, a's sites first.
QuditRegister tensor(const QuditRegister& a, const QuditRegister& b);

// ---------------------------------------------------------------------------
// Reduced states

struct DensityView {
  std::vector<std::size_t> sites;
  std::vector<std::uint32_t> dims;
  Eigen::MatrixXcd matrix;

  // Hermitian and unit trace within 1e-10, PSD within 1e-8.
  bool is_valid() const;
};

inline constexpr std::size_t kMaxDenseDensity = 4096;

// Partial trace over the complement of `sites` (kept in the listed order).
DensityView reduced_density(const QuditRegister& reg, std::span<const std::size_t> sites);
DensityView pure_density(const QuditRegister& reg);

struct Distance {
  double fidelity = 0.0;  // (tr sqrt(sqrt(a) b sqrt(a)))^2
  double trace_distance = 0.0;
};

Distance distance(const DensityView& a, const DensityView& b);

// <psi| rho |psi> for a pure reference state on the same dimensions.
double fidelity_to_pure(const DensityView& rho, const QuditRegister& psi);

// Trace distance between the reduced states of two registers on `sites`,
// without forming the full reduced matrices: the support is split into
// connected blocks that share traced-out indices, and each block is
// diagonalized from whichever side (kept or traced) is smaller.
double subsystem_trace_distance(const QuditRegister& a, const QuditRegister& b,
                                std::span<const std::size_t> sites);

// ---------------------------------------------------------------------------
// Quantum one-time pad

struct PauliKey {
  // (a, b) per site, encoding X^a Z^b.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

  bool operator==(const PauliKey&) const = default;
};

PauliKey random_pauli_key(std::span<const std::uint32_t> dims, Rng& rng);
// ceil(log2 d) bits for a, then for b, per site; least significant bit first.
std::vector<std::uint8_t> pauli_key_bits(const PauliKey& key, std::span<const std::uint32_t> dims);
PauliKey pauli_key_from_bits(std::span<const std::uint8_t> bits, std::span<const std::uint32_t> dims);
std::size_t pauli_key_bit_length(std::span<const std::uint32_t> dims);

// Applies X^a Z^b to each listed site; decrypt applies Z^{-b} X^{-a}.
QuditRegister qotp_encrypt(QuditRegister reg, std::span<const std::size_t> sites, const PauliKey& key);
QuditRegister qotp_decrypt(QuditRegister reg, std::span<const std::size_t> sites, const PauliKey& key);

}  // namespace aqss
