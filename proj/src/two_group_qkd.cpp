#include "aqss/two_group_qkd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace aqss {

namespace {

std::string party(int i) { return "P" + std::to_string(i); }

std::size_t bits_to_index(std::size_t count) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < count) ++b;
  return b;
}

QuditRegister singlet() {
  const double h = 1.0 / std::sqrt(2.0);
  const Complex amps[4] = {{0, 0}, {h, 0}, {-h, 0}, {0, 0}};
  return QuditRegister::prepare({2, 2}, amps);
}

// First `count` entries of a seeded Fisher-Yates shuffle of 0..total-1.
std::vector<std::size_t> random_subset(std::size_t total, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(total - i)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::string to_string(Reconciliation mode) {
  return mode == Reconciliation::syndrome ? "syndrome" : "paper_literal";
}

Reconciliation parse_reconciliation(std::string_view text) {
  if (text == "syndrome") return Reconciliation::syndrome;
  if (text == "paper_literal" || text == "paper-literal" || text == "literal") return Reconciliation::paper_literal;
  throw std::invalid_argument("unknown reconciliation mode '" + std::string(text) + "'");
}

std::vector<Edge> ProtocolConfig::edges() const {
  if (!tree.empty()) return tree;
  std::vector<Edge> chain;
  for (int i = 0; i + 1 < n; ++i) chain.emplace_back(i, i + 1);
  return chain;
}

double ProtocolConfig::threshold() const {
  if (abort_threshold) return *abort_threshold;
  return static_cast<double>(code.correction_radius()) / static_cast<double>(code.length());
}

void ProtocolConfig::validate() const {
  if (n < 2) throw std::invalid_argument("need at least 2 parties");
  if (split < 1 || split >= n) throw std::invalid_argument("group split must leave both groups non-empty");
  if (leader < 0 || leader >= n) throw std::invalid_argument("leader out of range");
  if (rounds < 2 || rounds % 2 != 0) throw std::invalid_argument("rounds must be even and positive");
  if (!(noise_p >= 0.0 && noise_p < 0.5)) throw std::invalid_argument("noise_p must be in [0, 0.5)");
  if (abort_threshold && !(*abort_threshold > 0.0 && *abort_threshold < 1.0))
    throw std::invalid_argument("abort threshold must be in (0, 1)");
  if (sample_size < 1) throw std::invalid_argument("sample size must be positive");
  const auto es = edges();
  if (es.size() != static_cast<std::size_t>(n - 1)) throw std::invalid_argument("tree needs exactly n-1 edges");
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : es) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw std::invalid_argument("tree edge out of range");
    const int ra = find(a), rb = find(b);
    if (ra == rb) throw std::invalid_argument("tree edges contain a cycle");
    parent[ra] = rb;
  }
  if (eve_edge && *eve_edge >= es.size()) throw std::invalid_argument("eavesdropped edge out of range");
}

nlohmann::json ProtocolConfig::to_json() const {
  nlohmann::json tree_json = nlohmann::json::array();
  for (const auto& [a, b] : edges()) tree_json.push_back({a, b});
  return {{"n", n},
          {"split", split},
          {"tree", std::move(tree_json)},
          {"leader", leader},
          {"rounds", rounds},
          {"noise_p", noise_p},
          {"eve_edge", eve_edge ? nlohmann::json(*eve_edge) : nlohmann::json(nullptr)},
          {"abort_threshold", threshold()},
          {"sample_size", sample_size},
          {"code", code.to_json()},
          {"reconciliation", to_string(reconciliation)},
          {"seed", seed}};
}

ProtocolConfig ProtocolConfig::from_json(const nlohmann::json& doc) {
  ProtocolConfig c;
  c.n = doc.value("n", c.n);
  c.split = doc.value("split", c.split);
  if (doc.contains("tree"))
    for (const auto& e : doc.at("tree")) c.tree.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  c.leader = doc.value("leader", c.leader);
  c.rounds = doc.value("rounds", c.rounds);
  c.noise_p = doc.value("noise_p", c.noise_p);
  if (doc.contains("eve_edge") && !doc.at("eve_edge").is_null()) c.eve_edge = doc.at("eve_edge").get<std::size_t>();
  if (doc.contains("abort_threshold") && !doc.at("abort_threshold").is_null())
    c.abort_threshold = doc.at("abort_threshold").get<double>();
  c.sample_size = doc.value("sample_size", c.sample_size);
  if (doc.contains("code")) c.code = LinearCode::from_json(doc.at("code"));
  if (doc.contains("reconciliation"))
    c.reconciliation = parse_reconciliation(doc.at("reconciliation").get<std::string>());
  c.seed = doc.value("seed", c.seed);
  return c;
}

nlohmann::json BusEvent::to_json() const {
  return {{"step", step}, {"from", sender}, {"to", receiver}, {"bits", bits}, {"what", what}};
}

nlohmann::json EdgeStats::to_json() const {
  return {{"edge", {edge.first, edge.second}},
          {"generated", generated},
          {"sampled", sampled},
          {"mismatches", mismatches},
          {"error_estimate", error_estimate},
          {"intercepted", intercepted}};
}

EprDistribution distribute_epr(const ProtocolConfig& config, Rng& rng) {
  EprDistribution out;
  const auto es = config.edges();
  const auto rounds = static_cast<std::size_t>(config.rounds);
  const std::size_t sample = std::max(config.sample_size, rounds);
  for (std::size_t e = 0; e < es.size(); ++e) {
    Rng edge_rng = rng.split(e);
    Rng eve_rng = edge_rng.split("eve");
    Rng pick_rng = edge_rng.split("sample");
    Rng meas_rng = edge_rng.split("measure");
    Rng noise_rng = edge_rng.split("noise");

    EdgeStats stats;
    stats.edge = es[e];
    stats.generated = rounds + sample;
    stats.sampled = sample;
    stats.intercepted = config.eve_edge == e;

    std::vector<QuditRegister> pairs(stats.generated, singlet());
    if (stats.intercepted) {
      const std::size_t target = 1;
      for (auto& pr : pairs) {
        const Basis basis = eve_rng.bernoulli(0.5) ? Basis::diagonal : Basis::computational;
        pr = measure(std::move(pr), std::span<const std::size_t>(&target, 1), basis, eve_rng).second;
      }
    }

    const auto sampled = random_subset(stats.generated, sample, pick_rng);
    std::vector<bool> is_sampled(stats.generated, false);
    for (auto i : sampled) is_sampled[i] = true;
    for (auto i : sampled) {
      const Basis basis = meas_rng.bernoulli(0.5) ? Basis::diagonal : Basis::computational;
      const std::size_t both[2] = {0, 1};
      auto [outcome, rest] = measure(std::move(pairs[i]), both, basis, meas_rng);
      const std::uint32_t received = outcome.values[1] ^ (noise_rng.bernoulli(config.noise_p) ? 1U : 0U);
      if (outcome.values[0] == received) ++stats.mismatches;  // singlets anticorrelate in both bases
    }
    stats.error_estimate = static_cast<double>(stats.mismatches) / static_cast<double>(sample);

    std::vector<QuditRegister> kept;
    for (std::size_t i = 0; i < stats.generated && kept.size() < rounds; ++i)
      if (!is_sampled[i]) kept.push_back(std::move(pairs[i]));
    out.pairs.push_back(std::move(kept));

    const auto [a, b] = es[e];
    out.events.push_back({1, party(a), party(b), stats.generated, "sample positions"});
    out.events.push_back({1, party(a), party(b), 2 * sample, "sample bases and outcomes"});
    out.events.push_back({1, party(b), party(a), 2 * sample, "sample bases and outcomes"});
    if (!out.failed_edge && stats.error_estimate > config.threshold()) out.failed_edge = e;
    out.stats.push_back(stats);
  }
  return out;
}

QuditRegister singlet_to_triplet(QuditRegister pair) {
  pair = apply_z(std::move(pair), 1);
  return apply_x(std::move(pair), 1);
}

GhzMerge merge_to_ghz(std::vector<QuditRegister> pairs, const std::vector<Edge>& tree, int leader, int n, Rng& rng) {
  if (pairs.size() != tree.size()) throw std::invalid_argument("need one pair per tree edge");
  if (n == 1) throw std::invalid_argument("a GHZ merge needs at least two parties");
  QuditRegister reg;
  for (const auto& p : pairs) reg = tensor(reg, p);

  std::vector<std::vector<std::size_t>> incident(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < tree.size(); ++e) {
    incident.at(static_cast<std::size_t>(tree[e].first)).push_back(e);
    incident.at(static_cast<std::size_t>(tree[e].second)).push_back(e);
  }
  GhzMerge out;
  std::vector<long> ghz_site(static_cast<std::size_t>(n), -1);
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<bool> edge_used(tree.size(), false);
  std::vector<std::size_t> measured;
  std::queue<int> frontier;
  frontier.push(leader);
  reached[static_cast<std::size_t>(leader)] = true;
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    for (auto e : incident[static_cast<std::size_t>(a)]) {
      if (edge_used[e]) continue;
      edge_used[e] = true;
      const bool a_first = tree[e].first == a;
      const int b = a_first ? tree[e].second : tree[e].first;
      const std::size_t ha = 2 * e + (a_first ? 0 : 1);
      const std::size_t hb = 2 * e + (a_first ? 1 : 0);
      if (ghz_site[static_cast<std::size_t>(a)] < 0) {
        ghz_site[static_cast<std::size_t>(a)] = static_cast<long>(ha);
      } else {
        const std::size_t cnot[2] = {static_cast<std::size_t>(ghz_site[static_cast<std::size_t>(a)]), ha};
        reg = apply_digit_map(std::move(reg), cnot, [](std::span<std::uint32_t> d) { d[1] ^= d[0]; });
        auto [outcome, next] = measure(std::move(reg), std::span<const std::size_t>(&ha, 1), Basis::computational, rng);
        reg = std::move(next);
        measured.push_back(ha);
        if (outcome.values[0]) reg = apply_x(std::move(reg), hb);
        ++out.broadcast_bits;
        out.events.push_back({4, party(a), "*", 1, "merge outcome for " + party(b)});
      }
      ghz_site[static_cast<std::size_t>(b)] = static_cast<long>(hb);
      reached[static_cast<std::size_t>(b)] = true;
      frontier.push(b);
    }
  }
  if (std::find(reached.begin(), reached.end(), false) != reached.end())
    throw std::invalid_argument("tree does not reach every party from the leader");

  // Drop measured halves, then put party i at site i.
  std::sort(measured.rbegin(), measured.rend());
  std::vector<std::size_t> remap(reg.site_count());
  std::iota(remap.begin(), remap.end(), std::size_t{0});
  for (auto s : measured) {
    reg = remove_site(std::move(reg), s);
    for (auto& r : remap)
      if (r > s) --r;
  }
  std::vector<std::size_t> order;
  for (int i = 0; i < n; ++i) order.push_back(remap[static_cast<std::size_t>(ghz_site[static_cast<std::size_t>(i)])]);
  out.state = reorder_sites(std::move(reg), order);
  for (int i = 0; i < n; ++i) out.state.set_label(static_cast<std::size_t>(i), party(i));
  return out;
}

std::vector<std::uint8_t> measure_round(const QuditRegister& ghz, double noise_p, Rng& measure_rng, Rng& noise_rng) {
  std::vector<std::size_t> sites(ghz.site_count());
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  const auto outcome = measure(ghz, sites, Basis::diagonal, measure_rng).first;
  std::vector<std::uint8_t> bits;
  for (auto v : outcome.values) bits.push_back(static_cast<std::uint8_t>(v ^ (noise_rng.bernoulli(noise_p) ? 1U : 0U)));
  return bits;
}

SiftResult sift(const std::vector<std::vector<std::uint8_t>>& outcomes, const ProtocolConfig& config, Rng& rng) {
  const std::size_t total = outcomes.size();
  const std::size_t m = total / 2;
  SiftResult out;
  out.check_positions = random_subset(total, m, rng);
  std::vector<bool> is_check(total, false);
  for (auto i : out.check_positions) is_check[i] = true;

  auto effective = [&](std::size_t round, int lo, int hi) {
    std::uint8_t x = 0;
    for (int p = lo; p < hi; ++p) x ^= outcomes[round].at(static_cast<std::size_t>(p));
    return x;
  };
  for (std::size_t r = 0; r < total; ++r) {
    const auto a = effective(r, 0, config.split);
    const auto b = effective(r, config.split, config.n);
    if (is_check[r]) {
      out.check_a.push_back(a);
      out.check_b.push_back(b);
      if (a != b) ++out.delta;
    } else {
      out.noncheck_a.push_back(a);
      out.noncheck_b.push_back(b);
    }
  }
  out.proceed = static_cast<double>(out.delta) <= config.threshold() * static_cast<double>(m) + 1e-12;

  out.events.push_back({6, party(config.leader), "*", m * bits_to_index(total), "check positions"});
  for (int p = 0; p < config.n; ++p) {
    const int rep = p < config.split ? 0 : config.split;
    if (p != rep) out.events.push_back({7, party(p), party(rep), total, "check and non-check bits to group"});
  }
  out.events.push_back({7, party(0), "*", m, "group A effective check bits"});
  out.events.push_back({7, party(config.split), "*", m, "group B effective check bits"});
  return out;
}

nlohmann::json KeyResult::to_json() const {
  return {{"key_a", bits_to_string(key_a)},
          {"key_b", bits_to_string(key_b)},
          {"agreed", agreed},
          {"blocks", blocks},
          {"discarded_bits", discarded_bits},
          {"flagged_blocks", flagged_blocks}};
}

KeyResult reconcile_and_key(const Bits& noncheck_a, const Bits& noncheck_b, const LinearCode& code,
                            Reconciliation mode, bool leader_in_a) {
  if (noncheck_a.size() != noncheck_b.size()) throw std::invalid_argument("effective strings differ in length");
  const std::size_t len = code.length();
  KeyResult out;
  out.blocks = noncheck_a.size() / len;
  out.discarded_bits = noncheck_a.size() % len;
  for (std::size_t blk = 0; blk < out.blocks; ++blk) {
    const auto first = noncheck_a.begin() + static_cast<std::ptrdiff_t>(blk * len);
    Bits xa(first, first + static_cast<std::ptrdiff_t>(len));
    const auto first_b = noncheck_b.begin() + static_cast<std::ptrdiff_t>(blk * len);
    Bits xb(first_b, first_b + static_cast<std::ptrdiff_t>(len));
    bool flagged = false;
    if (mode == Reconciliation::syndrome) {
      Bits& reference = leader_in_a ? xa : xb;
      Bits& follower = leader_in_a ? xb : xa;
      auto diff = code.syndrome(reference);
      const auto own = code.syndrome(follower);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] ^= own[i];
      const auto e = code.coset_leader(diff);
      std::size_t weight = 0;
      for (std::size_t i = 0; i < len; ++i) {
        follower[i] ^= e[i];
        weight += e[i];
      }
      flagged = weight > code.correction_radius();
      out.events.push_back({8, leader_in_a ? "group A" : "group B", "*", diff.size(), "block syndrome"});
    }
    const auto da = code.decode(xa);
    const auto db = code.decode(xb);
    if (mode == Reconciliation::paper_literal) flagged = !da.within_radius || !db.within_radius;
    out.flagged_blocks += flagged ? 1 : 0;
    out.key_a.insert(out.key_a.end(), da.message.begin(), da.message.end());
    out.key_b.insert(out.key_b.end(), db.message.begin(), db.message.end());
  }
  out.agreed = out.key_a == out.key_b;
  return out;
}

double effective_error_probability(int s, double p) {
  if (s < 1) throw std::invalid_argument("group size must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
  double total = 0.0;
  double binom = static_cast<double>(s);  // C(s, 1)
  for (int r = 1; r <= s; r += 2) {
    total += binom * std::pow(p, r) * std::pow(1.0 - p, s - r);
    // C(s, r+2) = C(s, r) (s-r)(s-r-1) / ((r+1)(r+2))
    binom = binom * (s - r) * (s - r - 1) / ((r + 1.0) * (r + 2.0));
  }
  return total;
}

double channel_capacity(double P) {
  if (!(P >= 0.0 && P <= 1.0)) throw std::invalid_argument("P must be in [0, 1]");
  auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
  return 1.0 - (term(P) + term(1.0 - P));
}

nlohmann::json ProtocolTranscript::summary() const {
  nlohmann::json j;
  j["aborted"] = aborted();
  j["abort_step"] = aborted_at ? nlohmann::json(*aborted_at) : nlohmann::json(nullptr);
  j["abort_reason"] = abort_reason;
  const int m = config.check_count();
  j["m"] = m;
  if (sift) {
    j["delta"] = sift->delta;
    j["delta_over_m"] = static_cast<double>(sift->delta) / m;
  } else {
    j["delta"] = nullptr;
    j["delta_over_m"] = nullptr;
  }
  j["agreed"] = key ? key->agreed : false;
  const std::size_t key_bits = key ? key->key_a.size() : 0;
  j["key_bits"] = key_bits;
  j["key_rate"] = static_cast<double>(key_bits) / config.rounds;
  std::size_t classical = 0;
  for (const auto& [step, bits] : bits_per_step) classical += bits;
  j["classical_bits"] = classical;
  j["merge_broadcast_bits_per_round"] = merge_broadcast_bits;
  const double pa = effective_error_probability(config.split, config.noise_p);
  const double pb = effective_error_probability(config.n - config.split, config.noise_p);
  j["predicted_group_error"] = {pa, pb};
  j["predicted_mismatch"] = pa * (1 - pb) + pb * (1 - pa);
  j["predicted_capacity"] = {channel_capacity(pa), channel_capacity(pb)};
  return j;
}

nlohmann::json ProtocolTranscript::to_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["summary"] = summary();
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : edge_stats) stats.push_back(s.to_json());
  j["edges"] = std::move(stats);
  std::vector<std::string> rounds;
  for (const auto& r : outcomes) rounds.push_back(bits_to_string(r));
  j["outcomes"] = rounds;
  if (sift) {
    j["check_positions"] = sift->check_positions;
    j["check_a"] = bits_to_string(sift->check_a);
    j["check_b"] = bits_to_string(sift->check_b);
    j["noncheck_a"] = bits_to_string(sift->noncheck_a);
    j["noncheck_b"] = bits_to_string(sift->noncheck_b);
    j["decision"] = sift->proceed ? "proceed" : "abort";
  }
  j["key"] = key ? key->to_json() : nlohmann::json(nullptr);
  nlohmann::json per_step = nlohmann::json::object();
  for (const auto& [step, bits] : bits_per_step) per_step[std::to_string(step)] = bits;
  j["bits_per_step"] = std::move(per_step);
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back(e.to_json());
  j["events"] = std::move(ev);
  return j;
}

ProtocolTranscript run_protocol(const ProtocolConfig& config) {
  config.validate();
  ProtocolTranscript t;
  t.config = config;
  Rng root(config.seed);
  Rng epr_rng = root.split("epr");
  Rng merge_rng = root.split("merge");
  Rng measure_rng = root.split("measure");
  Rng noise_rng = root.split("noise");
  Rng check_rng = root.split("check");
  const auto es = config.edges();

  auto finish = [&t]() {
    for (const auto& e : t.events) t.bits_per_step[e.step] += e.bits;
    return t;
  };
  auto append = [&t](const std::vector<BusEvent>& evs) { t.events.insert(t.events.end(), evs.begin(), evs.end()); };

  // (1)
  auto dist = distribute_epr(config, epr_rng);
  t.edge_stats = dist.stats;
  append(dist.events);
  if (dist.failed_edge) {
    const auto& s = dist.stats[*dist.failed_edge];
    t.aborted_at = 1;
    t.abort_reason = "edge " + std::to_string(*dist.failed_edge) + " verification error " +
                     std::to_string(s.error_estimate) + " exceeds threshold " + std::to_string(config.threshold());
    return finish();
  }
  // (2), (3)
  for (std::size_t e = 0; e < es.size(); ++e) {
    for (auto& pr : dist.pairs[e]) pr = singlet_to_triplet(std::move(pr));
    if (es[e].second != config.leader)
      t.events.push_back({3, party(es[e].second), party(config.leader), 1, "conversion complete"});
  }
  // (4), (5)
  for (int r = 0; r < config.rounds; ++r) {
    std::vector<QuditRegister> round_pairs;
    for (std::size_t e = 0; e < es.size(); ++e) round_pairs.push_back(dist.pairs[e][static_cast<std::size_t>(r)]);
    auto merged = merge_to_ghz(std::move(round_pairs), es, config.leader, config.n, merge_rng);
    t.merge_broadcast_bits = merged.broadcast_bits;
    append(merged.events);
    t.outcomes.push_back(measure_round(merged.state, config.noise_p, measure_rng, noise_rng));
  }
  // (6), (7)
  t.sift = sift(t.outcomes, config, check_rng);
  append(t.sift->events);
  if (!t.sift->proceed) {
    t.aborted_at = 7;
    t.abort_reason = "check mismatch " + std::to_string(t.sift->delta) + "/" + std::to_string(config.check_count()) +
                     " exceeds threshold " + std::to_string(config.threshold());
    return finish();
  }
  // (8)
  t.key = reconcile_and_key(t.sift->noncheck_a, t.sift->noncheck_b, config.code, config.reconciliation,
                            config.leader < config.split);
  append(t.key->events);
  return finish();
}

}  // namespace aqss
