#include "aqss/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "aqss/quantum_threshold.hpp"
#include "aqss/two_group_qkd.hpp"

namespace aqss::oracle {

namespace {

bool is_clique(const ASGraph& g, const std::vector<std::size_t>& cls) {
  for (std::size_t i = 0; i < cls.size(); ++i)
    for (std::size_t j = i + 1; j < cls.size(); ++j)
      if (!g.adjacent(cls[i], cls[j])) return false;
  return true;
}

bool connected(const ASGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (std::size_t u = 0; u < n; ++u)
      if (!seen[u] && g.adjacent(v, u)) {
        seen[u] = true;
        stack.push_back(u);
      }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

double trace_distance_dense(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

std::vector<std::vector<std::size_t>> subsets_of(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if ((m >> i) & 1U) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

QuditRegister random_state(std::uint32_t d, Rng& rng) {
  std::vector<Complex> amps(d);
  double norm = 0.0;
  for (auto& a : amps) {
    // Box-Muller pair for a complex Gaussian.
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = {r * std::cos(2 * std::numbers::pi * u2), r * std::sin(2 * std::numbers::pi * u2)};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return QuditRegister::prepare({d}, amps);
}

}  // namespace

BruteCover brute_force_clique_cover(const ASGraph& graph) {
  const std::size_t n = graph.vertex_count();
  BruteCover best;
  best.size = n + 1;
  if (n == 0) {
    best.size = 0;
    return best;
  }
  std::vector<std::size_t> labels(n, 0);
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t v, std::size_t used) {
    if (v == n) {
      std::vector<std::vector<std::size_t>> classes(used);
      for (std::size_t i = 0; i < n; ++i) classes[labels[i]].push_back(i);
      if (used < best.size && std::all_of(classes.begin(), classes.end(),
                                          [&](const auto& c) { return is_clique(graph, c); })) {
        best.size = used;
        best.classes = std::move(classes);
      }
      return;
    }
    for (std::size_t c = 0; c <= used; ++c) {
      labels[v] = c;
      walk(v + 1, std::max(used, c + 1));
    }
  };
  walk(0, 0);
  return best;
}

std::vector<ASGraph> connected_graphs(std::size_t max_vertices) {
  std::vector<ASGraph> out;
  for (std::size_t n = 1; n <= max_vertices; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) slots.emplace_back(a, b);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
      ASGraph g(n);
      for (std::size_t i = 0; i < slots.size(); ++i)
        if ((mask >> i) & 1U) g.add_edge(slots[i].first, slots[i].second);
      if (connected(g)) out.push_back(std::move(g));
    }
  }
  return out;
}

ASGraph random_graph(std::size_t vertices, double edge_probability, Rng& rng) {
  ASGraph g(vertices);
  for (std::size_t a = 0; a < vertices; ++a)
    for (std::size_t b = a + 1; b < vertices; ++b)
      if (rng.bernoulli(edge_probability)) g.add_edge(a, b);
  return g;
}

bool authorized_by_inclusion(const AccessStructure& gamma, const std::set<std::string>& players) {
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    const auto members = gamma.members(j);
    if (std::all_of(members.begin(), members.end(), [&](const std::string& p) { return players.count(p) > 0; }))
      return true;
  }
  return false;
}

bool is_maximal(const AccessStructure& gamma) {
  const std::size_t n = gamma.player_count();
  if (n > 20) throw std::invalid_argument("maximality check is limited to 20 players");
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  auto auth = [&](std::uint64_t u) {
    return std::any_of(gamma.sets().begin(), gamma.sets().end(), [u](std::uint64_t s) { return (s & ~u) == 0; });
  };
  for (std::uint64_t u = 0; u <= all; ++u) {
    const bool a = auth(u), b = auth(all & ~u);
    if (a == b) return false;  // both: two disjoint authorized sets; neither: not maximal
  }
  return true;
}

std::vector<Complex> dense_qts_codeword(int k, std::uint64_t q, std::uint64_t s) {
  const int points = 2 * k - 1;
  std::uint64_t size = 1, randomness = 1;
  for (int i = 0; i < points; ++i) size *= q;
  for (int i = 0; i < k - 1; ++i) randomness *= q;
  std::vector<Complex> out(size);
  const double amp = 1.0 / std::sqrt(static_cast<double>(randomness));
  for (std::uint64_t r = 0; r < randomness; ++r) {
    std::vector<std::uint64_t> coeff(static_cast<std::size_t>(k));
    std::uint64_t t = r;
    for (int j = 0; j < k - 1; ++j) {
      coeff[j] = t % q;
      t /= q;
    }
    coeff[k - 1] = s;
    std::uint64_t index = 0;
    for (int x = 0; x < points; ++x) {
      std::uint64_t value = 0, xp = 1;
      for (int j = 0; j < k; ++j) {
        value = (value + coeff[j] * xp) % q;
        xp = xp * static_cast<std::uint64_t>(x) % q;
      }
      index = index * q + value;
    }
    out[index] += amp;
  }
  return out;
}

Eigen::MatrixXcd dense_partial_trace(std::span<const Complex> psi, std::span<const std::uint32_t> dims,
                                     std::span<const std::size_t> keep) {
  std::vector<bool> kept(dims.size(), false);
  for (auto s : keep) kept.at(s) = true;
  std::uint64_t dk = 1, dr = 1;
  for (std::size_t s = 0; s < dims.size(); ++s) (kept[s] ? dk : dr) *= dims[s];
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dr));
  std::vector<std::uint32_t> digit(dims.size());
  for (std::uint64_t i = 0; i < psi.size(); ++i) {
    std::uint64_t t = i;
    for (std::size_t s = dims.size(); s-- > 0;) {
      digit[s] = static_cast<std::uint32_t>(t % dims[s]);
      t /= dims[s];
    }
    std::uint64_t row = 0, col = 0;
    for (auto s : keep) row = row * dims[s] + digit[s];
    for (std::size_t s = 0; s < dims.size(); ++s)
      if (!kept[s]) col = col * dims[s] + digit[s];
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = psi[i];
  }
  return m * m.adjoint();
}

std::vector<double> ghz_diagonal_distribution(int n) {
  const std::size_t size = std::size_t{1} << n;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size));
  v(0) = v(static_cast<Eigen::Index>(size - 1)) = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd next(full.rows() * 2, full.cols() * 2);
    for (Eigen::Index r = 0; r < full.rows(); ++r)
      for (Eigen::Index c = 0; c < full.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = full(r, c) * h;
    full = std::move(next);
  }
  const Eigen::VectorXcd out = full * v;
  std::vector<double> probs(size);
  for (std::size_t i = 0; i < size; ++i) probs[i] = std::norm(out(static_cast<Eigen::Index>(i)));
  return probs;
}

MonteCarlo xor_noise_monte_carlo(int s, double p, std::size_t samples, Rng& rng) {
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    int parity = 0;
    for (int b = 0; b < s; ++b) parity ^= rng.bernoulli(p) ? 1 : 0;
    flipped += static_cast<std::size_t>(parity);
  }
  MonteCarlo mc;
  mc.samples = samples;
  mc.mean = static_cast<double>(flipped) / static_cast<double>(samples);
  mc.sigma = std::sqrt(mc.mean * (1 - mc.mean) / static_cast<double>(samples));
  return mc;
}

Eigen::MatrixXcd pauli_twirl(const Eigen::MatrixXcd& rho, std::uint32_t d) {
  const auto dd = static_cast<Eigen::Index>(d);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dd, dd), z = Eigen::MatrixXcd::Zero(dd, dd);
  for (Eigen::Index j = 0; j < dd; ++j) {
    x((j + 1) % dd, j) = 1.0;
    z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / d);
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dd, dd);
  Eigen::MatrixXcd xa = Eigen::MatrixXcd::Identity(dd, dd);
  for (std::uint32_t a = 0; a < d; ++a) {
    Eigen::MatrixXcd zb = Eigen::MatrixXcd::Identity(dd, dd);
    for (std::uint32_t b = 0; b < d; ++b) {
      const Eigen::MatrixXcd u = xa * zb;
      acc += u * rho * u.adjoint();
      zb = z * zb;
    }
    xa = x * xa;
  }
  return acc / static_cast<double>(d * d);
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() { return {"clique_bruteforce", "qts_disentangle", "parity_law", "p_formula"}; }

namespace {

nlohmann::json suite_clique(std::uint64_t seed) {
  Rng rng = Rng(seed).split("clique_bruteforce");
  auto graphs = connected_graphs(6);
  const std::size_t connected_count = graphs.size();
  for (int i = 0; i < 200; ++i) {
    const std::size_t v = 1 + rng.below(8);
    graphs.push_back(random_graph(v, 0.2 + 0.6 * rng.uniform(), rng));
  }
  std::size_t mismatches = 0;
  nlohmann::json first = nullptr;
  for (const auto& g : graphs) {
    const auto main = min_clique_partition(g);
    const auto brute = brute_force_clique_cover(g);
    if (main.size() != brute.size || main.classes != brute.classes || !main.is_valid_for(g)) {
      if (mismatches++ == 0) first = {{"graph", g.to_json()}, {"main", main.to_json()}, {"oracle", brute.classes}};
    }
  }
  return {{"agree", mismatches == 0},
          {"connected_graphs", connected_count},
          {"random_graphs", 200},
          {"mismatches", mismatches},
          {"first_mismatch", first}};
}

nlohmann::json suite_qts(std::uint64_t seed) {
  Rng rng = Rng(seed).split("qts_disentangle");
  nlohmann::json cases = nlohmann::json::array();
  bool agree = true;
  for (auto [k, q] : {std::pair<int, std::uint32_t>{2, 3}, {3, 5}}) {
    const QtsParams params{k, 2 * k - 1, q};
    double encode_error = 0.0, min_fidelity = 1.0, max_leak = 0.0;
    std::vector<QuditRegister> secrets;
    for (std::uint32_t s = 0; s < q; ++s) {
      const std::uint32_t digit[1] = {s};
      secrets.push_back(QuditRegister::basis_state({q}, digit));
      const auto [enc, reg] = qts_encode(secrets.back(), 0, params);
      const auto got = reg.dense();
      const auto want = dense_qts_codeword(k, q, s);
      for (std::size_t i = 0; i < want.size(); ++i) encode_error = std::max(encode_error, std::abs(got[i] - want[i]));
    }
    for (int i = 0; i < 20; ++i) secrets.push_back(random_state(q, rng));

    const auto subsets = subsets_of(static_cast<std::size_t>(params.n));
    std::vector<Eigen::VectorXcd> encoded;
    for (const auto& secret : secrets) {
      const auto [enc, reg] = qts_encode(secret, 0, params);
      encoded.push_back(reg.dense_vector());
      const Eigen::VectorXcd psi = secret.dense_vector();
      for (const auto& sub : subsets) {
        if (static_cast<int>(sub.size()) < k) continue;
        std::vector<HeldShare> held;
        for (auto s : sub) held.push_back({static_cast<int>(s), enc.share_sites[s]});
        const auto [site, out] = qts_reconstruct(reg, enc, held);
        const auto dense = out.dense();
        const std::size_t keep[1] = {site};
        const auto rho = dense_partial_trace(dense, out.dims(), keep);
        min_fidelity = std::min(min_fidelity, (psi.adjoint() * rho * psi)(0, 0).real());
      }
    }
    // Sub-threshold views: orthogonal basis pairs and one superposition pair.
    const QuditRegister& plus = secrets[q];
    const QuditRegister& other = secrets[q + 1];
    std::vector<std::pair<QuditRegister, QuditRegister>> pairs{{secrets[0], secrets[1]}, {plus, other}};
    for (const auto& [a, b] : pairs) {
      const auto ra = qts_encode(a, 0, params).second;
      const auto rb = qts_encode(b, 0, params).second;
      const auto da = ra.dense(), db = rb.dense();
      for (const auto& sub : subsets) {
        if (static_cast<int>(sub.size()) >= k) continue;
        max_leak = std::max(max_leak, trace_distance_dense(dense_partial_trace(da, ra.dims(), sub),
                                                           dense_partial_trace(db, rb.dims(), sub)));
      }
    }
    const bool ok = encode_error < 1e-12 && min_fidelity >= 1 - 1e-9 && max_leak <= 1e-9;
    agree = agree && ok;
    cases.push_back({{"k", k},
                     {"n", params.n},
                     {"q", q},
                     {"encode_max_error", encode_error},
                     {"min_fidelity", min_fidelity},
                     {"max_subthreshold_trace_distance", max_leak},
                     {"agree", ok}});
  }
  return {{"agree", agree}, {"cases", cases}};
}

nlohmann::json suite_parity(std::uint64_t seed) {
  Rng rng = Rng(seed).split("parity_law");
  Rng merge_rng = rng.split("merge"), measure_rng = rng.split("measure"), noise_rng = rng.split("noise");
  const int n = 4;
  const int rounds = 10000;
  std::vector<Edge> tree{{0, 1}, {1, 2}, {2, 3}};
  const double h = 1.0 / std::sqrt(2.0);
  const Complex bell[4] = {{h, 0}, {0, 0}, {0, 0}, {h, 0}};
  std::size_t odd = 0, group_mismatch = 0;
  for (int r = 0; r < rounds; ++r) {
    std::vector<QuditRegister> pairs(tree.size(), QuditRegister::prepare({2, 2}, bell));
    const auto merged = merge_to_ghz(std::move(pairs), tree, 0, n, merge_rng);
    const auto bits = measure_round(merged.state, 0.0, measure_rng, noise_rng);
    int parity = 0;
    for (auto b : bits) parity ^= b;
    odd += static_cast<std::size_t>(parity);
    for (int s = 1; s < n; ++s) {
      int left = 0;
      for (int i = 0; i < s; ++i) left ^= bits[i];
      if (left != (parity ^ left)) ++group_mismatch;
    }
  }
  double odd_mass = 0.0;
  const auto dist = ghz_diagonal_distribution(n);
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (std::popcount(i) % 2) odd_mass += dist[i];
  return {{"agree", odd == 0 && group_mismatch == 0 && odd_mass < 1e-12},
          {"n", n},
          {"rounds", rounds},
          {"odd_parity_outcomes", odd},
          {"group_parity_mismatches", group_mismatch},
          {"dense_odd_mass", odd_mass}};
}

nlohmann::json suite_p(std::uint64_t seed) {
  Rng rng = Rng(seed).split("p_formula");
  nlohmann::json grid = nlohmann::json::array();
  bool agree = true;
  const std::size_t samples = 100000;
  for (int s = 1; s <= 4; ++s)
    for (double p : {0.05, 0.1, 0.2}) {
      const double formula = effective_error_probability(s, p);
      const double closed = (1.0 - std::pow(1.0 - 2.0 * p, s)) / 2.0;
      Rng cell = rng.split(static_cast<std::uint64_t>(s * 1000 + std::lround(p * 100)));
      const auto mc = xor_noise_monte_carlo(s, p, samples, cell);
      const double sigma = std::sqrt(formula * (1 - formula) / static_cast<double>(samples));
      const bool ok = std::abs(formula - closed) <= 1e-12 && std::abs(mc.mean - formula) <= 3 * sigma;
      agree = agree && ok;
      grid.push_back({{"s", s}, {"p", p}, {"formula", formula}, {"closed_form", closed},
                      {"monte_carlo", mc.mean}, {"sigma", sigma}, {"agree", ok}});
    }
  return {{"agree", agree}, {"samples", samples}, {"grid", grid}};
}

}  // namespace

nlohmann::json run_suite(std::string_view name, std::uint64_t seed) {
  nlohmann::json out;
  if (name == "clique_bruteforce")
    out = suite_clique(seed);
  else if (name == "qts_disentangle")
    out = suite_qts(seed);
  else if (name == "parity_law")
    out = suite_parity(seed);
  else if (name == "p_formula")
    out = suite_p(seed);
  else
    throw std::invalid_argument("unknown oracle suite '" + std::string(name) + "'");
  out["suite"] = name;
  return out;
}

}  // namespace aqss::oracle
