#include "aqss/field.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace aqss {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  while (!is_prime(n)) ++n;
  return n;
}

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<__uint128_t>(a) * b % q);
}

std::uint64_t mod_pow(std::uint64_t a, std::uint64_t e, std::uint64_t q) {
  std::uint64_t r = 1 % q;
  a %= q;
  while (e) {
    if (e & 1U) r = mod_mul(r, a, q);
    a = mod_mul(a, a, q);
    e >>= 1U;
  }
  return r;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t q) {
  if (a % q == 0) throw std::domain_error("zero has no inverse");
  return mod_pow(a, q - 2, q);
}

FieldElement::FieldElement(std::uint64_t value, std::uint64_t modulus) : value_(0), modulus_(modulus) {
  if (!is_prime(modulus)) throw std::invalid_argument("field modulus " + std::to_string(modulus) + " is not prime");
  value_ = value % modulus;
}

void FieldElement::check_same(const FieldElement& o) const {
  if (modulus_ != o.modulus_) throw std::invalid_argument("field elements from different fields");
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(o);
  return {(value_ + o.value_) % modulus_, modulus_};
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(o);
  return {(value_ + modulus_ - o.value_) % modulus_, modulus_};
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(o);
  return {mod_mul(value_, o.value_, modulus_), modulus_};
}

FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inverse(); }

FieldElement FieldElement::operator-() const { return {(modulus_ - value_) % modulus_, modulus_}; }

FieldElement FieldElement::inverse() const { return {mod_inverse(value_, modulus_), modulus_}; }

FieldElement evaluate(const Polynomial& poly, const FieldElement& x) {
  FieldElement acc(0, x.modulus());
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial gf_interpolate(std::span<const std::pair<FieldElement, FieldElement>> points) {
  if (points.empty()) throw std::invalid_argument("interpolation needs at least one point");
  const std::uint64_t q = points.front().first.modulus();
  std::set<std::uint64_t> xs;
  for (const auto& [x, y] : points) {
    if (x.modulus() != q || y.modulus() != q) throw std::invalid_argument("points from different fields");
    if (!xs.insert(x.value()).second)
      throw std::invalid_argument("repeated x value " + std::to_string(x.value()));
  }

  const FieldElement zero(0, q), one(1, q);
  Polynomial result(points.size(), zero);
  for (std::size_t i = 0; i < points.size(); ++i) {
    // Lagrange basis numerator prod_{j != i} (x - x_j), built coefficient-wise.
    Polynomial basis{one};
    FieldElement denom = one;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      Polynomial next(basis.size() + 1, zero);
      for (std::size_t t = 0; t < basis.size(); ++t) {
        next[t + 1] = next[t + 1] + basis[t];
        next[t] = next[t] - basis[t] * points[j].first;
      }
      basis = std::move(next);
      denom = denom * (points[i].first - points[j].first);
    }
    const FieldElement scale = points[i].second / denom;
    for (std::size_t t = 0; t < basis.size(); ++t) result[t] = result[t] + basis[t] * scale;
  }
  return result;
}

nlohmann::json ClassicalShare::to_json() const {
  return {{"index", index}, {"value", value.value()}, {"field", value.modulus()}};
}

ClassicalShare ClassicalShare::from_json(const nlohmann::json& doc) {
  return {doc.at("index").get<std::uint64_t>(),
          FieldElement(doc.at("value").get<std::uint64_t>(), doc.at("field").get<std::uint64_t>())};
}

std::vector<ClassicalShare> shamir_split_with(const FieldElement& secret, int n,
                                              std::span<const FieldElement> blinding) {
  const std::uint64_t q = secret.modulus();
  if (n < 1) throw std::invalid_argument("need at least one share");
  if (static_cast<std::uint64_t>(n) >= q) throw std::invalid_argument("shamir needs q > n");
  if (static_cast<int>(blinding.size()) + 1 > n) throw std::invalid_argument("threshold exceeds share count");
  Polynomial f{secret};
  f.insert(f.end(), blinding.begin(), blinding.end());
  std::vector<ClassicalShare> shares;
  for (int i = 1; i <= n; ++i) {
    const FieldElement x(static_cast<std::uint64_t>(i), q);
    shares.push_back({static_cast<std::uint64_t>(i), evaluate(f, x)});
  }
  return shares;
}

std::vector<ClassicalShare> shamir_split(const FieldElement& secret, int k, int n, Rng& rng) {
  if (k < 1 || k > n) throw std::invalid_argument("shamir needs 1 <= k <= n");
  std::vector<FieldElement> blinding;
  for (int i = 1; i < k; ++i) blinding.emplace_back(rng.below(secret.modulus()), secret.modulus());
  return shamir_split_with(secret, n, blinding);
}

FieldElement shamir_reconstruct(std::span<const ClassicalShare> shares, int k) {
  if (k < 1) throw std::invalid_argument("threshold must be positive");
  if (static_cast<int>(shares.size()) < k)
    throw std::invalid_argument("need " + std::to_string(k) + " shares, got " + std::to_string(shares.size()));
  const std::uint64_t q = shares.front().value.modulus();
  std::vector<std::pair<FieldElement, FieldElement>> points;
  for (int i = 0; i < k; ++i) points.emplace_back(FieldElement(shares[i].index, q), shares[i].value);
  return gf_interpolate(points).front();
}

}  // namespace aqss
