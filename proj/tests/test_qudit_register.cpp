#include "doctest.h"

#include <bit>
#include <cmath>
#include <numbers>

#include "aqss/errors.hpp"
#include "aqss/oracles.hpp"
#include "aqss/quantum_threshold.hpp"
#include "aqss/qudit_register.hpp"
#include "support.hpp"

using namespace aqss;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);

QuditRegister bell() {
  const Complex amps[] = {r2, 0, 0, r2};
  return QuditRegister::prepare({2, 2}, amps);
}

QuditRegister random_register(std::vector<std::uint32_t> dims, Rng& rng) {
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<Complex> amps(total);
  double n = 0;
  for (auto& a : amps) {
    a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    n += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(n);
  return QuditRegister::prepare(std::move(dims), amps);
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("prepare") {
  const Complex zero[] = {1, 0};
  const auto z = QuditRegister::prepare({2}, zero);
  CHECK(z.support() == 1);
  CHECK(std::abs(z.amplitude(std::vector<std::uint32_t>{0}) - Complex(1)) < 1e-15);
  CHECK(bell().support() == 2);
  const double r3 = 1 / std::sqrt(3.0);
  const Complex q[] = {r3, r3, r3};
  CHECK(std::abs(QuditRegister::prepare({3}, q).norm() - 1) < 1e-12);
  const Complex bad[] = {1, 1};
  CHECK_THROWS(QuditRegister::prepare({2}, bad));
  CHECK_THROWS(QuditRegister::prepare({4}, std::vector<Complex>{1, 0, 0, 0}));
}

TEST_CASE("basis permutations") {
  // CNOT: |10> <-> |11>.
  const std::size_t sites[] = {0, 1};
  const std::uint64_t cnot[] = {0, 1, 3, 2};
  const std::uint32_t ten[] = {1, 0};
  const auto out = apply_basis_permutation(QuditRegister::basis_state({2, 2}, ten), sites, cnot);
  CHECK(std::abs(out.amplitude(std::vector<std::uint32_t>{1, 1}) - Complex(1)) < 1e-15);

  Rng rng(4);
  const auto psi = random_register({2, 2}, rng);
  const std::uint64_t id[] = {0, 1, 2, 3};
  CHECK(std::abs(inner_product(psi, apply_basis_permutation(psi, sites, id)) - Complex(1)) < 1e-12);

  const std::uint64_t bad[] = {0, 0, 1, 2};
  CHECK_THROWS(apply_basis_permutation(psi, sites, bad));

  // |x, y> -> |x, y + x mod 3>, checked on every basis state.
  const DigitMap add = [](std::span<std::uint32_t> d) { d[1] = (d[1] + d[0]) % 3; };
  for (std::uint32_t x = 0; x < 3; ++x)
    for (std::uint32_t y = 0; y < 3; ++y) {
      const std::uint32_t in[] = {x, y};
      const auto r = apply_digit_map(QuditRegister::basis_state({3, 3}, in), sites, add);
      const std::uint32_t want[] = {x, (x + y) % 3};
      CHECK(std::abs(r.amplitude(want) - Complex(1)) < 1e-15);
    }
  const auto qq = random_register({3, 3}, rng);
  CHECK(std::abs(apply_digit_map(qq, sites, add).norm() - 1) < 1e-12);
}

TEST_CASE("Fourier and Paulis") {
  const auto h0 = apply_fourier(testing::basis(2, 0), 0);
  CHECK(std::abs(h0.amplitude(std::vector<std::uint32_t>{0}) - Complex(r2)) < 1e-15);
  CHECK(std::abs(h0.amplitude(std::vector<std::uint32_t>{1}) - Complex(r2)) < 1e-15);

  // H on all three qubits of GHZ3 leaves only even-parity strings, uniformly.
  const Complex ghz[] = {r2, 0, 0, 0, 0, 0, 0, r2};
  auto g = QuditRegister::prepare({2, 2, 2}, ghz);
  for (std::size_t s = 0; s < 3; ++s) g = apply_fourier(g, s);
  const auto dense = g.dense();
  for (std::size_t i = 0; i < 8; ++i) {
    const bool even = std::popcount(i) % 2 == 0;
    CHECK(std::abs(std::abs(dense[i]) - (even ? 0.5 : 0.0)) < 1e-12);
  }

  Rng rng(8);
  for (std::uint32_t d : {2U, 3U, 5U}) {
    const auto psi = random_register({d, d}, rng);
    CHECK(std::abs(inner_product(psi, apply_inverse_fourier(apply_fourier(psi, 1), 1)) - Complex(1)) < 1e-12);
    const auto xz = apply_z(apply_x(psi, 0, 2), 1, 3);
    CHECK(std::abs(xz.norm() - 1) < 1e-10);
    CHECK(std::abs(inner_product(psi, apply_x(apply_x(psi, 0, d - 1), 0)) - Complex(1)) < 1e-12);
  }
  const std::uint32_t one[] = {1};
  const auto z1 = apply_z(QuditRegister::basis_state({3}, one), 0);
  CHECK(std::abs(z1.amplitude(one) - std::polar(1.0, 2 * std::numbers::pi / 3)) < 1e-12);
}

TEST_CASE("property: gates preserve the norm") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::uint32_t d = rng.below(2) ? 2 : 3;
    auto psi = random_register({d, d, d}, rng);
    for (int g = 0; g < 10; ++g) {
      const std::size_t s = rng.below(3);
      switch (rng.below(4)) {
        case 0: psi = apply_fourier(psi, s); break;
        case 1: psi = apply_inverse_fourier(psi, s); break;
        case 2: psi = apply_x(psi, s, 1 + rng.below(d - 1)); break;
        default: psi = apply_z(psi, s, 1 + rng.below(d - 1)); break;
      }
      CHECK(std::abs(psi.norm() - 1) < 1e-10);
    }
  }
}

TEST_CASE("measurement") {
  Rng rng(12);
  const std::size_t s0[] = {0};
  auto [o, after] = measure(testing::basis(2, 0), s0, Basis::computational, rng);
  CHECK(o.values == std::vector<std::uint32_t>{0});

  const std::size_t both[] = {0, 1};
  for (int t = 0; t < 200; ++t) {
    auto [out, post] = measure(bell(), both, Basis::computational, rng);
    CHECK(out.values[0] == out.values[1]);
    CHECK(std::abs(post.norm() - 1) < 1e-12);
  }

  const Complex ghz[] = {r2, 0, 0, 0, 0, 0, 0, r2};
  const auto g = QuditRegister::prepare({2, 2, 2}, ghz);
  const std::size_t all3[] = {0, 1, 2};
  for (int t = 0; t < 10000; ++t) {
    const auto [out, post] = measure(g, all3, Basis::diagonal, rng);
    if ((out.values[0] ^ out.values[1] ^ out.values[2]) != 0) FAIL("odd parity outcome");
  }

  // Collapse leaves a removable product site.
  auto [m1, collapsed] = measure(bell(), s0, Basis::computational, rng);
  const auto rest = remove_site(collapsed, 0);
  CHECK(rest.site_count() == 1);
  CHECK_THROWS(remove_site(bell(), 0));
}

TEST_CASE("reduced density examples") {
  const std::size_t s0[] = {0};
  const auto half = reduced_density(bell(), s0);
  CHECK(max_diff(half.matrix, Eigen::MatrixXcd::Identity(2, 2) / 2.0) < 1e-12);
  CHECK(half.is_valid());

  Rng rng(5);
  const auto psi = random_register({2, 3}, rng);
  const std::size_t all[] = {0, 1};
  const auto full = reduced_density(psi, all);
  const Eigen::VectorXcd v = psi.dense_vector();
  CHECK(max_diff(full.matrix, v * v.adjoint()) < 1e-12);

  // One share of the ((2,3)) qutrit code is maximally mixed.
  auto reg = testing::basis(3, 1);
  auto [enc, coded] = qts_encode(reg, 0, QtsParams{2, 3, 3});
  for (auto s : enc.share_sites) {
    const std::size_t one[] = {s};
    CHECK(max_diff(reduced_density(coded, one).matrix, Eigen::MatrixXcd::Identity(3, 3) / 3.0) < 1e-12);
  }
}

TEST_CASE("property: reduced states are valid and match the dense oracle") {
  Rng rng(6);
  for (int t = 0; t < 60; ++t) {
    std::vector<std::uint32_t> dims;
    const std::size_t n = 2 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) dims.push_back(rng.below(2) ? 2 : 3);
    const auto psi = random_register(dims, rng);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
      if (rng.below(2)) keep.push_back(i);
    if (keep.empty()) keep.push_back(n - 1);
    const auto rho = reduced_density(psi, keep);
    CHECK(rho.is_valid());
    const auto dense = psi.dense();
    CHECK(max_diff(rho.matrix, oracle::dense_partial_trace(dense, dims, keep)) < 1e-12);
    // Block trace distance agrees with the dense one.
    const auto phi = random_register(dims, rng);
    const double td = distance(rho, reduced_density(phi, keep)).trace_distance;
    CHECK(std::abs(subsystem_trace_distance(psi, phi, keep) - td) < 1e-9);
  }
}

TEST_CASE("distance examples") {
  const std::size_t s0[] = {0};
  const auto r0 = reduced_density(testing::basis(2, 0), s0);
  const auto r1 = reduced_density(testing::basis(2, 1), s0);
  auto d = distance(r0, r0);
  CHECK(d.fidelity == doctest::Approx(1).epsilon(1e-12));
  CHECK(d.trace_distance == doctest::Approx(0).epsilon(1e-12));
  d = distance(r0, r1);
  CHECK(d.fidelity == doctest::Approx(0).epsilon(1e-12));
  CHECK(d.trace_distance == doctest::Approx(1).epsilon(1e-12));
  DensityView mixed = r0;
  mixed.matrix = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  d = distance(r0, mixed);
  CHECK(d.fidelity == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.trace_distance == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("register layout helpers") {
  Rng rng(1);
  const auto a = random_register({2, 3}, rng);
  const auto b = random_register({5}, rng);
  const auto ab = tensor(a, b);
  CHECK(ab.dims() == std::vector<std::uint32_t>{2, 3, 5});
  const std::size_t order[] = {2, 0, 1};
  const auto re = reorder_sites(ab, order);
  CHECK(re.dims() == std::vector<std::uint32_t>{5, 2, 3});
  CHECK(std::abs(inner_product(tensor(b, a), re) - Complex(1)) < 1e-12);
  const std::uint32_t extra[] = {3};
  CHECK(append_sites(a, extra).site_count() == 3);
  CHECK(QuditRegister::from_json(ab.to_json()).dims() == ab.dims());
  CHECK(std::abs(inner_product(QuditRegister::from_json(ab.to_json()), ab) - Complex(1)) < 1e-12);
}

TEST_CASE("support cap") {
  auto reg = QuditRegister::prepare({3}, std::vector<Complex>{1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0)});
  reg.set_support_cap(9);
  const std::uint32_t more[] = {3, 3};
  reg = append_sites(reg, more);
  reg = apply_fourier(reg, 1);
  CHECK_THROWS_AS(apply_fourier(reg, 2), CapacityError);
}

TEST_CASE("quantum one-time pad") {
  const std::size_t s0[] = {0};
  Rng rng(77);
  const std::uint32_t dims2[] = {2};
  PauliKey zero;
  zero.entries = {{0, 0}};
  const auto psi = testing::random_qudit(2, rng);
  CHECK(std::abs(inner_product(psi, qotp_encrypt(psi, s0, zero)) - Complex(1)) < 1e-12);

  for (std::uint32_t d : {2U, 3U, 5U}) {
    for (int t = 0; t < 5; ++t) {
      const auto s = testing::random_qudit(d, rng);
      Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(d, d);
      for (std::uint32_t a = 0; a < d; ++a)
        for (std::uint32_t b = 0; b < d; ++b) {
          PauliKey k;
          k.entries = {{a, b}};
          const auto c = qotp_encrypt(s, s0, k);
          avg += reduced_density(c, s0).matrix;
          CHECK(std::abs(inner_product(s, qotp_decrypt(c, s0, k)) - Complex(1)) < 1e-12);
        }
      avg /= static_cast<double>(d * d);
      CHECK(max_diff(avg, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d)) < 1e-12);
      const auto rho = reduced_density(s, s0).matrix;
      CHECK(max_diff(avg, oracle::pauli_twirl(rho, d)) < 1e-12);
    }
  }

  // Key bits: 1+1 for a qubit, 2+2 for a qutrit.
  CHECK(pauli_key_bit_length(dims2) == 2);
  const std::uint32_t dims3[] = {3, 2};
  CHECK(pauli_key_bit_length(dims3) == 6);
  for (int t = 0; t < 50; ++t) {
    const auto k = random_pauli_key(dims3, rng);
    CHECK(pauli_key_from_bits(pauli_key_bits(k, dims3), dims3) == k);
  }
  const std::vector<std::uint8_t> out_of_range = {1, 1, 0, 0, 0, 0};  // a = 3 for d = 3
  CHECK_THROWS(pauli_key_from_bits(out_of_range, dims3));
}
