#include "aqss/linear_code.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace aqss {

namespace {

std::size_t rank_gf2(std::vector<std::uint64_t> rows) {
  std::size_t rank = 0;
  for (int bit = 63; bit >= 0; --bit) {
    const std::uint64_t mask = std::uint64_t{1} << bit;
    auto pivot = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                              [mask](std::uint64_t r) { return (r & mask) != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + static_cast<std::ptrdiff_t>(rank), pivot);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rank && (rows[i] & mask)) rows[i] ^= rows[rank];
    ++rank;
  }
  return rank;
}

// Next word with the same popcount (Gosper).
std::uint64_t next_same_weight(std::uint64_t v) {
  const std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace

LinearCode::Word LinearCode::pack(const Bits& bits, std::size_t width) const {
  if (bits.size() != width)
    throw std::invalid_argument("expected " + std::to_string(width) + " bits, got " + std::to_string(bits.size()));
  Word w = 0;
  for (std::size_t i = 0; i < width; ++i)
    if (bits[i]) w |= Word{1} << i;
  return w;
}

Bits LinearCode::unpack(Word w, std::size_t width) {
  Bits bits(width);
  for (std::size_t i = 0; i < width; ++i) bits[i] = static_cast<std::uint8_t>((w >> i) & 1U);
  return bits;
}

LinearCode::Word LinearCode::syndrome_word(Word w) const {
  Word s = 0;
  for (std::size_t r = 0; r < h_rows_.size(); ++r)
    if (std::popcount(h_rows_[r] & w) & 1) s |= Word{1} << r;
  return s;
}

LinearCode::LinearCode(std::vector<Bits> generator, std::vector<Bits> parity_check)
    : generator_(std::move(generator)), parity_check_(std::move(parity_check)) {
  if (generator_.empty()) throw std::invalid_argument("generator matrix is empty");
  m_ = generator_.front().size();
  k_ = generator_.size();
  if (m_ == 0 || m_ > 63) throw std::invalid_argument("block length must be in 1..63");
  if (k_ > 20) throw std::invalid_argument("code dimension above 20 is not supported");
  if (parity_check_.size() != m_ - k_) throw std::invalid_argument("parity-check matrix must have m-k rows");
  if (m_ - k_ > 24) throw std::invalid_argument("syndrome table above 2^24 entries is not supported");
  for (const auto& row : generator_) g_rows_.push_back(pack(row, m_));
  for (const auto& row : parity_check_) h_rows_.push_back(pack(row, m_));
  if (rank_gf2(g_rows_) != k_) throw std::invalid_argument("generator rows are not independent");
  if (rank_gf2(h_rows_) != m_ - k_) throw std::invalid_argument("parity-check rows are not independent");
  for (auto g : g_rows_)
    if (syndrome_word(g) != 0) throw std::invalid_argument("G H^T is not zero");

  d_ = m_ + 1;
  for (Word msg = 0; msg < (Word{1} << k_); ++msg) {
    Word c = 0;
    for (std::size_t i = 0; i < k_; ++i)
      if ((msg >> i) & 1U) c ^= g_rows_[i];
    codewords_.emplace_back(c, msg);
    if (msg != 0) d_ = std::min<std::size_t>(d_, static_cast<std::size_t>(std::popcount(c)));
  }
  if (k_ == m_) d_ = 1;
  std::sort(codewords_.begin(), codewords_.end());

  const std::size_t syndromes = std::size_t{1} << (m_ - k_);
  leaders_.assign(syndromes, ~Word{0});
  std::size_t filled = 0;
  for (std::size_t w = 0; w <= m_ && filled < syndromes; ++w) {
    if (w == 0) {
      leaders_[0] = 0;
      ++filled;
      continue;
    }
    for (Word e = (Word{1} << w) - 1; e < (Word{1} << m_); e = next_same_weight(e)) {
      auto& slot = leaders_[syndrome_word(e)];
      if (slot == ~Word{0}) {
        slot = e;
        if (++filled == syndromes) break;
      }
      if (e == ((Word{1} << w) - 1) << (m_ - w)) break;  // last word of this weight
    }
  }
}

LinearCode LinearCode::hamming_7_4() {
  return LinearCode({bits_from_string("1000110"), bits_from_string("0100101"), bits_from_string("0010011"),
                     bits_from_string("0001111")},
                    {bits_from_string("1101100"), bits_from_string("1011010"), bits_from_string("0111001")});
}

LinearCode LinearCode::from_json(const nlohmann::json& doc) {
  if (doc.is_string()) {
    if (doc.get<std::string>() == "hamming74") return hamming_7_4();
    throw std::invalid_argument("unknown code '" + doc.get<std::string>() + "'");
  }
  std::vector<Bits> g, h;
  for (const auto& row : doc.at("generator")) g.push_back(bits_from_string(row.get<std::string>()));
  for (const auto& row : doc.at("parity_check")) h.push_back(bits_from_string(row.get<std::string>()));
  return LinearCode(std::move(g), std::move(h));
}

nlohmann::json LinearCode::to_json() const {
  std::vector<std::string> g, h;
  for (const auto& row : generator_) g.push_back(bits_to_string(row));
  for (const auto& row : parity_check_) h.push_back(bits_to_string(row));
  return {{"m", m_}, {"k", k_}, {"d", d_}, {"generator", g}, {"parity_check", h}};
}

Bits LinearCode::encode(const Bits& message) const {
  const Word msg = pack(message, k_);
  Word c = 0;
  for (std::size_t i = 0; i < k_; ++i)
    if ((msg >> i) & 1U) c ^= g_rows_[i];
  return unpack(c, m_);
}

Bits LinearCode::syndrome(const Bits& word) const { return unpack(syndrome_word(pack(word, m_)), m_ - k_); }

Bits LinearCode::coset_leader(const Bits& syndrome) const {
  return unpack(leaders_.at(pack(syndrome, m_ - k_)), m_);
}

LinearCode::Decoded LinearCode::decode(const Bits& word) const {
  const Word w = pack(word, m_);
  const Word e = leaders_[syndrome_word(w)];
  const Word c = w ^ e;
  auto it = std::lower_bound(codewords_.begin(), codewords_.end(), std::make_pair(c, Word{0}));
  if (it == codewords_.end() || it->first != c) throw std::logic_error("syndrome decoding left the code");
  Decoded out;
  out.codeword = unpack(c, m_);
  out.message = unpack(it->second, k_);
  out.correction_weight = static_cast<std::size_t>(std::popcount(e));
  out.within_radius = out.correction_weight <= correction_radius();
  return out;
}

}  // namespace aqss
