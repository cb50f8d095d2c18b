#include "doctest.h"

#include "aqss/linear_code.hpp"
#include "aqss/two_group_qkd.hpp"

using namespace aqss;

namespace {

Bits word(unsigned v, std::size_t n) {
  Bits b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(v >> i & 1);
  return b;
}

std::size_t weight(const Bits& b) {
  std::size_t w = 0;
  for (auto x : b) w += x;
  return w;
}

}  // namespace

TEST_CASE("Hamming(7,4,3) parameters") {
  const auto h = LinearCode::hamming_7_4();
  CHECK(h.length() == 7);
  CHECK(h.dimension() == 4);
  CHECK(h.min_distance() == 3);
  CHECK(h.correction_radius() == 1);
  for (unsigned m = 0; m < 16; ++m) {
    const auto c = h.encode(word(m, 4));
    CHECK(weight(h.syndrome(c)) == 0);
    const auto d = h.decode(c);
    CHECK(d.message == word(m, 4));
    CHECK(d.correction_weight == 0);
  }
}

TEST_CASE("decoding corrects single errors and reports heavier ones") {
  const auto h = LinearCode::hamming_7_4();
  for (unsigned m = 0; m < 16; ++m) {
    const auto c = h.encode(word(m, 4));
    for (std::size_t i = 0; i < 7; ++i) {
      auto r = c;
      r[i] ^= 1;
      const auto d = h.decode(r);
      CHECK(d.codeword == c);
      CHECK(d.within_radius);
    }
  }
  // Coset leaders of Hamming(7,4) all have weight <= 1: every word decodes.
  for (unsigned s = 0; s < 8; ++s) CHECK(weight(h.coset_leader(word(s, 3))) <= 1);
}

TEST_CASE("code from JSON; minimum distance computed exhaustively") {
  const auto rep = LinearCode::from_json(
      nlohmann::json{{"generator", {"111"}}, {"parity_check", {"110", "011"}}});
  CHECK(rep.min_distance() == 3);
  CHECK(rep.decode(Bits{1, 0, 1}).message == Bits{1});
  const auto again = LinearCode::from_json(rep.to_json());
  CHECK(again.min_distance() == 3);
  CHECK(LinearCode::from_json("hamming74").min_distance() == 3);
  // G H^T != 0.
  CHECK_THROWS(LinearCode::from_json(nlohmann::json{{"generator", {"111"}}, {"parity_check", {"100", "011"}}}));
}

TEST_CASE("property: syndrome reconciliation is exhaustive within the radius") {
  const auto h = LinearCode::hamming_7_4();
  for (bool leader_in_a : {true, false}) {
    for (unsigned a = 0; a < 128; ++a) {
      for (unsigned e = 0; e < 128; ++e) {
        const Bits xa = word(a, 7), xb = word(a ^ e, 7);
        const auto r = reconcile_and_key(xa, xb, h, Reconciliation::syndrome, leader_in_a);
        const auto w = weight(word(e, 7));
        if (w <= 1) {
          if (!r.agreed || r.flagged_blocks != 0) FAIL("not corrected: a=" << a << " e=" << e);
        } else if (w == 2) {
          // Two discrepancies: the keys differ or the block is flagged.
          if (r.agreed && r.flagged_blocks == 0) FAIL("silent two-bit error: a=" << a << " e=" << e);
        }
      }
    }
  }
}

TEST_CASE("paper-literal reconciliation") {
  const auto h = LinearCode::hamming_7_4();
  const auto c = h.encode(Bits{1, 0, 1, 1});
  auto r = reconcile_and_key(c, c, h, Reconciliation::paper_literal, true);
  CHECK(r.agreed);
  CHECK(r.key_a == Bits{1, 0, 1, 1});
  // Both sides one error away from the same codeword: still agree.
  auto xa = c, xb = c;
  xa[0] ^= 1;
  xb[5] ^= 1;
  CHECK(reconcile_and_key(xa, xb, h, Reconciliation::paper_literal, true).agreed);
  // A non-codeword reference with a one-bit discrepancy can split the groups;
  // syndrome mode does not.
  int literal_failures = 0;
  for (unsigned a = 0; a < 128; ++a)
    for (std::size_t i = 0; i < 7; ++i) {
      auto y = word(a, 7);
      y[i] ^= 1;
      literal_failures += reconcile_and_key(word(a, 7), y, h, Reconciliation::paper_literal, true).agreed ? 0 : 1;
      CHECK(reconcile_and_key(word(a, 7), y, h, Reconciliation::syndrome, true).agreed);
    }
  CHECK(literal_failures > 0);
}

TEST_CASE("blocks and remainder") {
  const auto h = LinearCode::hamming_7_4();
  Bits sixteen(16, 0);
  const auto r = reconcile_and_key(sixteen, sixteen, h, Reconciliation::syndrome, true);
  CHECK(r.blocks == 2);
  CHECK(r.discarded_bits == 2);
  CHECK(r.key_a.size() == 8);
}
