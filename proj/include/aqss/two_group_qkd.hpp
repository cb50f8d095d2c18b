#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqss/classical_sharing.hpp"
#include "aqss/linear_code.hpp"
#include "aqss/qudit_register.hpp"
#include "aqss/rng.hpp"
#include "json.hpp"

namespace aqss {

enum class Reconciliation { paper_literal, syndrome };

std::string to_string(Reconciliation mode);
Reconciliation parse_reconciliation(std::string_view text);

using Edge = std::pair<int, int>;

// Parties are 0..n-1. Group A is parties [0, split), group B the rest.
struct ProtocolConfig {
  int n = 4;
  int split = 2;
  std::vector<Edge> tree;  // empty: the chain 0-1-...-(n-1)
  int leader = 0;
  int rounds = 32;  // 2m GHZ rounds, m of them check rounds
  double noise_p = 0.0;
  std::optional<std::size_t> eve_edge;  // intercept-resend on tree edge i
  // Maximum tolerated mismatch fraction at steps (1) and (7). Unset: the
  // code's correction radius per block length.
  std::optional<double> abort_threshold;
  std::size_t sample_size = 64;  // verification pairs per edge (at least `rounds`)
  LinearCode code = LinearCode::hamming_7_4();
  Reconciliation reconciliation = Reconciliation::syndrome;
  std::uint64_t seed = 0;

  std::vector<Edge> edges() const;
  double threshold() const;
  // Throws std::invalid_argument.
  void validate() const;
  int check_count() const { return rounds / 2; }

  nlohmann::json to_json() const;
  static ProtocolConfig from_json(const nlohmann::json& doc);
};

// One message on the simulated authenticated classical channel.
struct BusEvent {
  int step = 0;
  std::string sender;
  std::string receiver;  // "*" for broadcast
  std::size_t bits = 0;
  std::string what;

  nlohmann::json to_json() const;
};

struct EdgeStats {
  Edge edge;
  std::size_t generated = 0;
  std::size_t sampled = 0;
  std::size_t mismatches = 0;
  double error_estimate = 0.0;
  bool intercepted = false;

  nlohmann::json to_json() const;
};

struct EprDistribution {
  // pairs[e][round]: two qubits, site 0 for edge.first, site 1 for edge.second.
  std::vector<std::vector<QuditRegister>> pairs;
  std::vector<EdgeStats> stats;
  std::optional<std::size_t> failed_edge;
  std::vector<BusEvent> events;
};

// Step (1): per edge, rounds + sample singlets; Eve (if configured) measures
// the second party's qubit of every pair on her edge in a random basis and
// resends it. A random subset of `sample` pairs is measured in random matched
// bases, with the receiver's outcome flipped at rate noise_p; singlets should
// anticorrelate. An edge whose mismatch rate exceeds the threshold fails.
EprDistribution distribute_epr(const ProtocolConfig& config, Rng& rng);

// Step (2): the second party applies XZ. The singlet maps to minus the triplet.
QuditRegister singlet_to_triplet(QuditRegister pair);

struct GhzMerge {
  QuditRegister state;  // site i is party i
  std::size_t broadcast_bits = 0;
  std::vector<BusEvent> events;
};

// Step (4): breadth-first from the leader. The first edge's pair is a 2-party
// GHZ state; every later edge (a, b) is attached by a CNOT from a's GHZ qubit
// onto a's half, a computational measurement of that half, a 1-bit broadcast
// and X on b's half when the bit is 1. Throws if the tree is disconnected.
GhzMerge merge_to_ghz(std::vector<QuditRegister> pairs, const std::vector<Edge>& tree, int leader, int n,
                      Rng& rng);

// Step (5): diagonal-basis outcome bits per party, each flipped with probability noise_p.
std::vector<std::uint8_t> measure_round(const QuditRegister& ghz, double noise_p, Rng& measure_rng, Rng& noise_rng);

struct SiftResult {
  std::vector<std::size_t> check_positions;  // sorted, m entries
  Bits check_a, check_b;                     // effective check bits per group
  std::size_t delta = 0;                     // Hamming distance of check_a and check_b
  bool proceed = false;
  Bits noncheck_a, noncheck_b;
  std::vector<BusEvent> events;
};

// Steps (6)-(7) over outcomes[round][party].
SiftResult sift(const std::vector<std::vector<std::uint8_t>>& outcomes, const ProtocolConfig& config, Rng& rng);

struct KeyResult {
  Bits key_a, key_b;
  bool agreed = false;
  std::size_t blocks = 0;
  std::size_t discarded_bits = 0;
  std::size_t flagged_blocks = 0;  // detected uncorrectable discrepancies
  std::vector<BusEvent> events;

  nlohmann::json to_json() const;
};

// Step (8). Strings are split into blocks of the code length; the remainder
// is discarded. paper_literal: each group decodes its own block to the
// nearest codeword. syndrome: the leader's group announces its syndrome, the
// other group corrects by the coset leader of the difference, then both
// decode. Keys are the concatenated message bits.
KeyResult reconcile_and_key(const Bits& noncheck_a, const Bits& noncheck_b, const LinearCode& code,
                            Reconciliation mode, bool leader_in_a);

// Odd-order terms of Binomial(s, p): chance the XOR of s noisy bits is wrong.
double effective_error_probability(int s, double p);
// 1 - H(P) in bits.
double channel_capacity(double P);

struct ProtocolTranscript {
  ProtocolConfig config;
  std::vector<EdgeStats> edge_stats;
  std::vector<std::vector<std::uint8_t>> outcomes;  // [round][party]
  std::optional<SiftResult> sift;
  std::optional<KeyResult> key;
  std::optional<int> aborted_at;  // protocol step
  std::string abort_reason;
  std::map<int, std::size_t> bits_per_step;
  std::size_t merge_broadcast_bits = 0;  // per round
  std::vector<BusEvent> events;

  bool aborted() const { return aborted_at.has_value(); }
  nlohmann::json summary() const;
  nlohmann::json to_json() const;
};

// Steps (1)-(8) in order; deterministic under config.seed.
ProtocolTranscript run_protocol(const ProtocolConfig& config);

}  // namespace aqss
