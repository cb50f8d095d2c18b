#include "doctest.h"

#include <bit>
#include <cmath>

#include "aqss/oracles.hpp"
#include "aqss/two_group_qkd.hpp"
#include "support.hpp"

using namespace aqss;

namespace {

const double r2 = 1 / std::sqrt(2.0);

QuditRegister singlet() {
  const Complex a[] = {0, r2, -r2, 0};
  return QuditRegister::prepare({2, 2}, a);
}
QuditRegister triplet() {
  const Complex a[] = {r2, 0, 0, r2};
  return QuditRegister::prepare({2, 2}, a);
}
QuditRegister ghz(int n) {
  std::vector<Complex> a(std::size_t{1} << n, 0);
  a.front() = a.back() = r2;
  return QuditRegister::prepare(std::vector<std::uint32_t>(static_cast<std::size_t>(n), 2), a);
}

double overlap(const QuditRegister& a, const QuditRegister& b) { return std::abs(inner_product(a, b)); }

std::vector<Edge> chain(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return e;
}

std::vector<QuditRegister> triplets(std::size_t count) { return std::vector<QuditRegister>(count, triplet()); }

}  // namespace

TEST_CASE("singlet to triplet") {
  // Equal up to the global phase -1.
  const auto t = singlet_to_triplet(singlet());
  CHECK(std::abs(inner_product(triplet(), t) + Complex(1)) < 1e-12);
  CHECK(overlap(singlet_to_triplet(triplet()), triplet()) < 1e-12);
  // Fidelity to the singlet carries over to the triplet.
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const double f = rng.uniform();
    const Complex a[] = {0, std::sqrt(f) * r2, -std::sqrt(f) * r2, std::sqrt(1 - f)};
    const auto in = QuditRegister::prepare({2, 2}, a);
    CHECK(std::norm(inner_product(triplet(), singlet_to_triplet(in))) ==
          doctest::Approx(std::norm(inner_product(singlet(), in))).epsilon(1e-12));
  }
}

TEST_CASE("GHZ merge") {
  Rng rng(2);
  const auto two = merge_to_ghz(triplets(1), chain(2), 0, 2, rng);
  CHECK(overlap(two.state, ghz(2)) == doctest::Approx(1).epsilon(1e-10));
  CHECK(two.broadcast_bits == 0);

  for (int t = 0; t < 20; ++t) {
    const auto three = merge_to_ghz(triplets(2), chain(3), 0, 3, rng);
    CHECK(overlap(three.state, ghz(3)) == doctest::Approx(1).epsilon(1e-10));
    const auto star = merge_to_ghz(triplets(3), {{0, 1}, {0, 2}, {0, 3}}, 0, 4, rng);
    const auto line = merge_to_ghz(triplets(3), chain(4), 0, 4, rng);
    CHECK(overlap(star.state, line.state) == doctest::Approx(1).epsilon(1e-10));
    const auto mid = merge_to_ghz(triplets(3), chain(4), 2, 4, rng);
    CHECK(overlap(mid.state, ghz(4)) == doctest::Approx(1).epsilon(1e-10));
  }
  CHECK_THROWS(merge_to_ghz(triplets(2), {{0, 1}, {0, 1}}, 0, 3, rng));
}

TEST_CASE("property: merge broadcast grows linearly") {
  Rng rng(3);
  for (int n = 2; n <= 10; ++n) {
    const auto m = merge_to_ghz(triplets(static_cast<std::size_t>(n - 1)), chain(n), 0, n, rng);
    CHECK(m.broadcast_bits <= static_cast<std::size_t>(n - 2));
    CHECK(overlap(m.state, ghz(n)) == doctest::Approx(1).epsilon(1e-10));
  }
}

TEST_CASE("property: parity law") {
  Rng mrng(4), nrng(5);
  for (int n : {2, 3, 4, 5, 6}) {
    const auto g = ghz(n);
    for (int r = 0; r < 2000; ++r) {
      const auto bits = measure_round(g, 0.0, mrng, nrng);
      int x = 0;
      for (auto b : bits) x ^= b;
      if (x != 0) FAIL("odd parity for n=" << n);
      for (int s = 1; s < n; ++s) {
        int a = 0;
        for (int i = 0; i < s; ++i) a ^= bits[static_cast<std::size_t>(i)];
        int b = 0;
        for (int i = s; i < n; ++i) b ^= bits[static_cast<std::size_t>(i)];
        if (a != b) FAIL("group parities differ");
      }
    }
    // Exactly zero odd mass by direct amplitude inspection.
    const auto dist = oracle::ghz_diagonal_distribution(n);
    double odd = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) odd += std::popcount(i) % 2 ? dist[i] : 0.0;
    CHECK(odd < 1e-15);
  }
}

TEST_CASE("sift") {
  ProtocolConfig c;
  std::vector<std::vector<std::uint8_t>> outcomes(32, std::vector<std::uint8_t>{1, 0, 0, 1});
  Rng rng(6);
  auto s = sift(outcomes, c, rng);
  CHECK(s.delta == 0);
  CHECK(s.check_a == s.check_b);
  CHECK(s.check_positions.size() == 16);
  CHECK(s.proceed);
  CHECK(s.noncheck_a.size() == 16);

  // One forced flip on one party in one check round.
  Rng again(6);
  const auto pos = sift(outcomes, c, again).check_positions[3];
  outcomes[pos][2] ^= 1;
  Rng third(6);
  s = sift(outcomes, c, third);
  CHECK(s.delta == 1);
  CHECK(s.check_a[3] != s.check_b[3]);
}

TEST_CASE("effective error probability and capacity") {
  CHECK(effective_error_probability(1, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(effective_error_probability(2, 0.1) == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(effective_error_probability(5, 0.0) == 0.0);
  for (int s = 1; s <= 64; ++s)
    for (double p = 0; p <= 1.0; p += 0.01)
      CHECK(std::abs(effective_error_probability(s, p) - (1 - std::pow(1 - 2 * p, s)) / 2) < 1e-12);

  CHECK(channel_capacity(0) == 1.0);
  CHECK(channel_capacity(1) == 1.0);
  CHECK(channel_capacity(0.5) == 0.0);
  const double h = -0.18 * std::log2(0.18) - 0.82 * std::log2(0.82);
  CHECK(channel_capacity(0.18) == doctest::Approx(1 - h).epsilon(1e-14));
}

TEST_CASE("property: P monotone in p, tends to 1/2, capacity bounds") {
  for (int s = 1; s <= 64; ++s) {
    double prev = -1;
    for (int i = 0; i <= 500; ++i) {
      const double P = effective_error_probability(s, 0.5 * i / 500);
      CHECK(P >= prev - 1e-12);
      prev = P;
    }
  }
  CHECK(std::abs(effective_error_probability(64, 0.1) - 0.5) < 1e-6);
  for (int i = 0; i <= 1000; ++i) {
    const double P = i / 1000.0;
    const double c = channel_capacity(P);
    CHECK(c >= 0);
    CHECK(c <= 1);
    if (i != 500) CHECK(c > 0);
    if (i != 0 && i != 1000) CHECK(c < 1);
  }
}

TEST_CASE("property: P matches Monte Carlo within 3 sigma") {
  Rng rng(8);
  for (int s = 1; s <= 4; ++s)
    for (double p : {0.05, 0.1, 0.2}) {
      const auto mc = oracle::xor_noise_monte_carlo(s, p, 100000, rng);
      CHECK(std::abs(mc.mean - effective_error_probability(s, p)) <= 3 * mc.sigma);
    }
}

TEST_CASE("EPR distribution statistics") {
  ProtocolConfig c;
  c.sample_size = 10000;
  Rng rng(9);
  auto d = distribute_epr(c, rng);
  CHECK_FALSE(d.failed_edge);
  for (const auto& s : d.stats) CHECK(s.mismatches == 0);
  CHECK(d.pairs.size() == 3);
  CHECK(d.pairs[0].size() == 32);

  c.noise_p = 0.05;
  d = distribute_epr(c, rng);
  for (const auto& s : d.stats) {
    const double sigma = std::sqrt(0.05 * 0.95 / 10000);
    CHECK(std::abs(s.error_estimate - 0.05) <= 3 * sigma);
  }

  c.noise_p = 0;
  c.eve_edge = 1;
  d = distribute_epr(c, rng);
  REQUIRE(d.failed_edge);
  CHECK(*d.failed_edge == 1);
  CHECK(std::abs(d.stats[1].error_estimate - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / 10000));
  CHECK(d.stats[0].error_estimate == 0);
}

TEST_CASE("group mismatch composes the group-level P values") {
  ProtocolConfig c;
  c.noise_p = 0.1;
  c.rounds = 4000;
  c.abort_threshold = 0.99;
  c.seed = 10;
  const auto t = run_protocol(c);
  REQUIRE(t.sift);
  const double pa = effective_error_probability(2, 0.1);
  const double expect = 2 * pa * (1 - pa);
  const double m = static_cast<double>(c.check_count());
  const double rate = static_cast<double>(t.sift->delta) / m;
  CHECK(std::abs(rate - expect) <= 3 * std::sqrt(expect * (1 - expect) / m));
}

TEST_CASE("protocol runs") {
  ProtocolConfig c;
  c.seed = 7;
  const auto t = run_protocol(c);
  CHECK_FALSE(t.aborted());
  REQUIRE(t.key);
  CHECK(t.key->agreed);
  CHECK(t.sift->delta == 0);
  CHECK(t.key->blocks == 2);
  CHECK(t.key->key_a.size() == 8);
  CHECK(t.summary()["agreed"] == true);
  CHECK(run_protocol(c).to_json() == t.to_json());

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ProtocolConfig n5;
    n5.n = 5;
    n5.split = 3;
    n5.tree = {{0, 1}, {0, 2}, {2, 3}, {3, 4}};
    n5.leader = 2;
    n5.seed = seed;
    const auto r = run_protocol(n5);
    CHECK_FALSE(r.aborted());
    CHECK(r.key->agreed);
    for (const auto& row : r.outcomes) {
      int x = 0;
      for (auto b : row) x ^= b;
      CHECK(x == 0);
    }
  }

  c.eve_edge = 0;
  c.sample_size = 256;
  const auto e = run_protocol(c);
  CHECK(e.aborted());
  CHECK(*e.aborted_at == 1);
}

TEST_CASE("config validation and JSON") {
  ProtocolConfig c;
  c.split = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.split = 2;
  c.tree = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.tree.clear();
  c.eve_edge = 9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.eve_edge.reset();
  c.noise_p = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.noise_p = 0.01;
  c.reconciliation = Reconciliation::paper_literal;
  const auto back = ProtocolConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(ProtocolConfig().threshold() == doctest::Approx(1.0 / 7));
}
