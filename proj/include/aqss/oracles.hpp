#pragma once

// Brute-force reference computations. Each one recomputes a quantity from
// its definition, sharing data types with the library but none of its
// algorithms, so agreement is evidence rather than tautology.

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aqss/access_structure.hpp"
#include "aqss/qudit_register.hpp"
#include "aqss/rng.hpp"
#include "json.hpp"

namespace aqss::oracle {

// Minimum clique partition by enumerating every set partition. Returns the
// size and the first minimum partition in restricted-growth order.
struct BruteCover {
  std::size_t size = 0;
  std::vector<std::vector<std::size_t>> classes;
};
BruteCover brute_force_clique_cover(const ASGraph& graph);

// Every connected labelled graph on 1..max_vertices vertices.
std::vector<ASGraph> connected_graphs(std::size_t max_vertices);
ASGraph random_graph(std::size_t vertices, double edge_probability, Rng& rng);

// Authorization straight from the definition: some minimal set is contained.
bool authorized_by_inclusion(const AccessStructure& gamma, const std::set<std::string>& players);

// Every subset enumerated: no two authorized sets are disjoint, and the
// complement of every unauthorized set is authorized.
bool is_maximal(const AccessStructure& gamma);

// Dense amplitudes of the ((k, 2k-1)) polynomial encoding of basis secret s,
// expanded from the code definition: sites are evaluation points 0..2k-2.
std::vector<Complex> dense_qts_codeword(int k, std::uint64_t q, std::uint64_t s);

// Dense partial trace keeping `keep` (listed order), site 0 most significant.
Eigen::MatrixXcd dense_partial_trace(std::span<const Complex> psi, std::span<const std::uint32_t> dims,
                                     std::span<const std::size_t> keep);

// Outcome distribution of H^{(x)n} applied to the n-qubit GHZ state, by dense
// matrix-vector products.
std::vector<double> ghz_diagonal_distribution(int n);

struct MonteCarlo {
  double mean = 0.0;
  double sigma = 0.0;  // standard error of the mean
  std::size_t samples = 0;
};
// Frequency with which the XOR of s independent p-noisy bits is flipped.
MonteCarlo xor_noise_monte_carlo(int s, double p, std::size_t samples, Rng& rng);

// Uniform average of X^a Z^b rho (X^a Z^b)^dagger over all d^2 keys, dense.
Eigen::MatrixXcd pauli_twirl(const Eigen::MatrixXcd& rho, std::uint32_t d);

// Named agreement suites: clique_bruteforce, qts_disentangle, parity_law, p_formula.
std::vector<std::string> suite_names();
// {"suite", "agree", ...details}. Throws std::invalid_argument for unknown names.
nlohmann::json run_suite(std::string_view name, std::uint64_t seed);

}  // namespace aqss::oracle
