#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aqss/classical_sharing.hpp"
#include "json.hpp"

namespace aqss {

// Binary linear block code C(m, k, d) with generator G (k x m) and
// parity-check H ((m-k) x m). Words are bit vectors of length m.
class LinearCode {
public:
  // Validates G H^T = 0 and full rank of both matrices, then computes d by
  // enumerating all 2^k codewords and builds the syndrome table.
  LinearCode(std::vector<Bits> generator, std::vector<Bits> parity_check);

  static LinearCode hamming_7_4();
  // {"generator": ["1000110", ...], "parity_check": [...]} or the string "hamming74".
  static LinearCode from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  std::size_t length() const { return m_; }
  std::size_t dimension() const { return k_; }
  std::size_t min_distance() const { return d_; }
  std::size_t correction_radius() const { return (d_ - 1) / 2; }

  const std::vector<Bits>& generator() const { return generator_; }
  const std::vector<Bits>& parity_check() const { return parity_check_; }

  Bits encode(const Bits& message) const;
  Bits syndrome(const Bits& word) const;
  // Minimum-weight word with this syndrome (first found in weight order).
  Bits coset_leader(const Bits& syndrome) const;

  struct Decoded {
    Bits codeword;
    Bits message;
    std::size_t correction_weight = 0;
    bool within_radius = true;  // false: more errors than the code can correct
  };
  // Nearest codeword by syndrome decoding.
  Decoded decode(const Bits& word) const;

private:
  using Word = std::uint64_t;
  Word pack(const Bits& bits, std::size_t width) const;
  static Bits unpack(Word w, std::size_t width);
  Word syndrome_word(Word w) const;

  std::size_t m_ = 0;
  std::size_t k_ = 0;
  std::size_t d_ = 0;
  std::vector<Bits> generator_;
  std::vector<Bits> parity_check_;
  std::vector<Word> g_rows_;
  std::vector<Word> h_rows_;
  std::vector<Word> leaders_;  // by syndrome value
  std::vector<std::pair<Word, Word>> codewords_;  // (codeword, message), sorted by codeword
};

}  // namespace aqss
