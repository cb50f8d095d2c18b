#include "doctest.h"

#include <algorithm>
#include <map>

#include "aqss/field.hpp"
#include "aqss/rng.hpp"

using namespace aqss;

namespace {
FieldElement F(std::uint64_t v, std::uint64_t q) { return FieldElement(v, q); }
}  // namespace

TEST_CASE("prime helpers") {
  CHECK(is_prime(2));
  CHECK(is_prime(13));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(9));
  CHECK(next_prime(4) == 5);
  CHECK(next_prime(5) == 5);
  CHECK(mod_inverse(3, 7) == 5);
  CHECK(mod_pow(3, 6, 7) == 1);
  CHECK_THROWS(FieldElement(1, 6));
}

TEST_CASE("field arithmetic") {
  const auto a = F(5, 7), b = F(4, 7);
  CHECK((a + b).value() == 2);
  CHECK((a - b).value() == 1);
  CHECK((b - a).value() == 6);
  CHECK((a * b).value() == 6);
  CHECK((a / b * b) == a);
  CHECK((-a).value() == 2);
  CHECK_THROWS(F(0, 7).inverse());
  CHECK_THROWS(a + F(1, 5));
}

TEST_CASE("interpolation") {
  const std::pair<FieldElement, FieldElement> pts[] = {{F(1, 7), F(1, 7)}, {F(3, 7), F(0, 7)}};
  const auto f = gf_interpolate(pts);
  REQUIRE(f.size() == 2);
  CHECK(f[0].value() == 5);
  CHECK(f[1].value() == 3);

  const std::pair<FieldElement, FieldElement> one[] = {{F(0, 11), F(4, 11)}};
  const auto c = gf_interpolate(one);
  REQUIRE(c.size() == 1);
  CHECK(c[0].value() == 4);

  const std::pair<FieldElement, FieldElement> dup[] = {{F(2, 7), F(1, 7)}, {F(2, 7), F(3, 7)}};
  CHECK_THROWS(gf_interpolate(dup));
}

TEST_CASE("property: interpolation recovers random polynomials") {
  Rng rng(2);
  for (std::uint64_t q : {5ULL, 7ULL, 13ULL, 101ULL}) {
    for (int t = 0; t < 50; ++t) {
      const std::size_t k = 1 + rng.below(std::min<std::uint64_t>(q - 1, 6));
      Polynomial p;
      for (std::size_t i = 0; i < k; ++i) p.push_back(F(rng.below(q), q));
      std::vector<std::pair<FieldElement, FieldElement>> pts;
      for (std::size_t x = 1; x <= k; ++x) pts.emplace_back(F(x, q), evaluate(p, F(x, q)));
      auto got = gf_interpolate(pts);
      got.resize(k, F(0, q));
      CHECK(got == p);
    }
  }
}

TEST_CASE("shamir examples") {
  const FieldElement blinding[] = {F(3, 7)};
  const auto shares = shamir_split_with(F(5, 7), 3, blinding);
  REQUIRE(shares.size() == 3);
  CHECK(shares[0].index == 1);
  CHECK(shares[0].value.value() == 1);
  CHECK(shares[1].value.value() == 4);
  CHECK(shares[2].value.value() == 0);
  const ClassicalShare pick[] = {shares[0], shares[2]};
  CHECK(shamir_reconstruct(pick, 2).value() == 5);

  Rng rng(1);
  for (const auto& s : shamir_split(F(6, 11), 1, 4, rng)) CHECK(s.value.value() == 6);
  const auto three = shamir_split(F(2, 11), 3, 5, rng);
  CHECK_THROWS(shamir_reconstruct(std::span(three).first(2), 3));

  const auto j = shares[1].to_json();
  CHECK(ClassicalShare::from_json(j).value == shares[1].value);
}

TEST_CASE("property: shamir round trip for all n < q <= 13") {
  Rng rng(9);
  for (std::uint64_t q : {3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    for (int n = 1; n < static_cast<int>(q); ++n) {
      for (int k = 1; k <= n; ++k) {
        for (std::uint64_t s = 0; s < q; ++s) {
          for (int t = 0; t < 100; ++t) {
            auto shares = shamir_split(F(s, q), k, n, rng);
            // A random k-subset.
            for (int i = 0; i < k; ++i) std::swap(shares[i], shares[i + rng.below(n - i)]);
            if (shamir_reconstruct(std::span(shares).first(k), k).value() != s) {
              FAIL("round trip failed q=" << q << " k=" << k << " n=" << n << " s=" << s);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("property: k-1 shares are independent of the secret") {
  struct Case {
    std::uint64_t q;
    int k, n;
  };
  for (const auto c : {Case{5, 2, 4}, Case{7, 3, 5}, Case{5, 3, 4}}) {
    std::map<std::vector<std::uint64_t>, int> reference;
    for (std::uint64_t s = 0; s < c.q; ++s) {
      std::map<std::vector<std::uint64_t>, int> counts;
      // Every blinding polynomial.
      std::uint64_t total = 1;
      for (int i = 1; i < c.k; ++i) total *= c.q;
      for (std::uint64_t b = 0; b < total; ++b) {
        std::vector<FieldElement> blinding;
        for (std::uint64_t r = b, i = 1; i < static_cast<std::uint64_t>(c.k); ++i, r /= c.q)
          blinding.push_back(F(r % c.q, c.q));
        const auto shares = shamir_split_with(F(s, c.q), c.n, blinding);
        std::vector<std::uint64_t> first;
        for (int i = 0; i < c.k - 1; ++i) first.push_back(shares[i].value.value());
        ++counts[first];
      }
      if (s == 0) reference = counts;
      CHECK(counts == reference);
    }
  }
}
