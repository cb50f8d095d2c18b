#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "aqss/rng.hpp"
#include "json.hpp"

namespace aqss {

bool is_prime(std::uint64_t n);
// Least prime >= n.
std::uint64_t next_prime(std::uint64_t n);

// Raw residue helpers for hot loops; q must be prime and operands reduced.
std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e, std::uint64_t q);
std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t q);

// An element of GF(q), q prime. Binary operators require equal moduli.
class FieldElement {
public:
  FieldElement(std::uint64_t value, std::uint64_t modulus);

  std::uint64_t value() const { return value_; }
  std::uint64_t modulus() const { return modulus_; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement inverse() const;

  bool operator==(const FieldElement&) const = default;

private:
  void check_same(const FieldElement& o) const;

  std::uint64_t value_;
  std::uint64_t modulus_;
};

// Coefficients from the constant term upwards.
using Polynomial = std::vector<FieldElement>;

FieldElement evaluate(const Polynomial& poly, const FieldElement& x);

// The unique polynomial of degree < points.size() through every point.
// Throws std::invalid_argument on repeated x or mixed moduli.
Polynomial gf_interpolate(std::span<const std::pair<FieldElement, FieldElement>> points);

struct ClassicalShare {
  std::uint64_t index = 0;  // evaluation point
  FieldElement value{0, 2};

  nlohmann::json to_json() const;
  static ClassicalShare from_json(const nlohmann::json& doc);
};

// Shares are f(1..n) for f = secret + c_1 x + ... + c_{k-1} x^{k-1}.
std::vector<ClassicalShare> shamir_split(const FieldElement& secret, int k, int n, Rng& rng);
// Test hook with explicit blinding coefficients c_1..c_{k-1}.
std::vector<ClassicalShare> shamir_split_with(const FieldElement& secret, int n,
                                              std::span<const FieldElement> blinding);
// Interpolates f(0) from at least k shares; throws std::invalid_argument otherwise.
FieldElement shamir_reconstruct(std::span<const ClassicalShare> shares, int k);

}  // namespace aqss
