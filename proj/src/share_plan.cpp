#include "aqss/share_plan.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "aqss/errors.hpp"
#include "aqss/field.hpp"

namespace aqss {

PlanNode PlanNode::leaf(Party owner, std::string label) {
  PlanNode node;
  node.kind = Kind::leaf;
  node.owner = std::move(owner);
  node.label = std::move(label);
  return node;
}

PlanNode PlanNode::threshold(int k, std::vector<PlanNode> children, std::string label) {
  const int n = static_cast<int>(children.size());
  if (k < 1 || k > n) throw std::invalid_argument("threshold node needs 1 <= k <= n");
  PlanNode node;
  node.kind = Kind::threshold;
  node.k = k;
  node.n = n;
  node.children = std::move(children);
  node.label = std::move(label);
  return node;
}

bool PlanNode::operator==(const PlanNode& other) const {
  if (kind != other.kind) return false;
  if (kind == Kind::leaf) return owner == other.owner;
  return k == other.k && n == other.n && children == other.children;
}

std::size_t PlanNode::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t total = 0;
  for (const auto& c : children) total += c.leaf_count();
  return total;
}

std::string to_string(PlanMode mode) {
  return mode == PlanMode::strict ? "strict" : "dealer-assisted";
}

PlanMode parse_plan_mode(std::string_view text) {
  if (text == "strict") return PlanMode::strict;
  if (text == "dealer-assisted" || text == "dealer_assisted" || text == "assisted")
    return PlanMode::dealer_assisted;
  throw std::invalid_argument("unknown plan mode '" + std::string(text) + "'");
}

namespace {

std::string set_label(const AccessStructure& gamma, PlayerMask m) {
  std::string out;
  for (const auto& p : gamma.members_of(m)) out += p;
  return out;
}

PlanNode and_node(const AccessStructure& gamma, PlayerMask set) {
  std::vector<PlanNode> leaves;
  for (const auto& p : gamma.members_of(set)) leaves.push_back(PlanNode::leaf(Party::player(p)));
  const int size = static_cast<int>(leaves.size());
  return PlanNode::threshold(size, std::move(leaves), set_label(gamma, set));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ((k,n)) over the class's players when the class is every k-subset of them.
std::optional<PlanNode> threshold_shape(const AccessStructure& gamma, const std::vector<PlayerMask>& sets) {
  const int k = std::popcount(sets.front());
  PlayerMask all = 0;
  for (auto m : sets) {
    if (std::popcount(m) != k) return std::nullopt;
    all |= m;
  }
  const int n = std::popcount(all);
  if (binomial(n, k) != sets.size() || n > 2 * k - 1) return std::nullopt;
  std::vector<PlanNode> leaves;
  for (const auto& p : gamma.members_of(all)) leaves.push_back(PlanNode::leaf(Party::player(p)));
  std::string label;
  for (auto m : sets) label += (label.empty() ? "" : ",") + set_label(gamma, m);
  return PlanNode::threshold(k, std::move(leaves), label);
}

// Least common player of the class (players are sorted, so the lowest bit).
std::optional<PlayerMask> common_player(const std::vector<PlayerMask>& sets) {
  PlayerMask common = ~PlayerMask{0};
  for (auto m : sets) common &= m;
  if (common == 0) return std::nullopt;
  return common & (~common + 1);
}

}  // namespace

SharePlan build_aqss_plan(const AccessStructure& gamma, const PlanOptions& options) {
  SharePlan plan;
  plan.mode = options.mode;
  plan.partition = min_clique_partition(build_as_graph(gamma), options.partition);
  plan.lambda = plan.partition.size();

  std::size_t dealer_leaves = 0;
  std::vector<PlanNode> class_nodes;
  for (std::size_t c = 0; c < plan.partition.classes.size(); ++c) {
    std::vector<PlayerMask> sets;
    for (auto v : plan.partition.classes[c]) sets.push_back(gamma.sets()[v]);

    if (auto node = threshold_shape(gamma, sets)) {
      class_nodes.push_back(std::move(*node));
      continue;
    }
    const int r = static_cast<int>(sets.size());
    std::string label;
    for (auto m : sets) label += (label.empty() ? "" : ",") + set_label(gamma, m);
    std::vector<PlanNode> children;
    for (auto m : sets) children.push_back(and_node(gamma, m));
    if (const auto holder = common_player(sets)) {
      const auto name = gamma.members_of(*holder).front();
      for (int i = 0; i < r - 1; ++i) children.push_back(PlanNode::leaf(Party::player(name), "extra"));
    } else if (options.mode == PlanMode::dealer_assisted) {
      for (int i = 0; i < r - 1; ++i) children.push_back(PlanNode::leaf(Party::dealer(), "extra"));
      dealer_leaves += static_cast<std::size_t>(r - 1);
    } else {
      throw PlanError("partial-link class {" + label +
                      "} has no common player; use dealer-assisted mode");
    }
    class_nodes.push_back(PlanNode::threshold(r, std::move(children), label));
  }

  if (plan.lambda == 1) {
    plan.root = std::move(class_nodes.front());
  } else {
    const int lambda = static_cast<int>(plan.lambda);
    for (int i = 0; i < lambda - 1; ++i) class_nodes.push_back(PlanNode::leaf(Party::dealer(), "home"));
    dealer_leaves += plan.lambda - 1;
    plan.root = PlanNode::threshold(lambda, std::move(class_nodes), "outer");
  }
  plan.home_share_count = dealer_leaves;
  plan.exceeds_theorem_bound = dealer_leaves > plan.lambda - 1;
  return plan;
}

bool evaluate_coalition(const PlanNode& node, const Coalition& coalition) {
  if (node.is_leaf()) return coalition.count(node.owner) > 0;
  int satisfied = 0;
  for (const auto& child : node.children)
    if (evaluate_coalition(child, coalition) && ++satisfied >= node.k) return true;
  return false;
}

bool evaluate_coalition(const SharePlan& plan, const Coalition& coalition) {
  return evaluate_coalition(plan.root, coalition);
}

std::vector<Party> leaf_owners(const PlanNode& root) {
  std::vector<Party> out;
  std::function<void(const PlanNode&)> walk = [&](const PlanNode& n) {
    if (n.is_leaf()) {
      out.push_back(n.owner);
      return;
    }
    for (const auto& c : n.children) walk(c);
  };
  walk(root);
  return out;
}

namespace {

bool eval_shares(const PlanNode& node, const std::vector<bool>& held, std::size_t& next) {
  if (node.is_leaf()) return held.at(next++);
  int satisfied = 0;
  for (const auto& child : node.children)
    if (eval_shares(child, held, next)) ++satisfied;  // no short-circuit: `next` must advance
  return satisfied >= node.k;
}

// Shares of `node` occupy ids [first, first + leaf_count). Marks k-1 siblings
// at every level of the path to `leaf` as fully held, leaving the path itself empty.
void build_witness(const PlanNode& node, std::size_t first, std::size_t leaf, std::vector<bool>& held) {
  if (node.is_leaf()) return;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t on_path = 0;
  std::size_t start = first;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const std::size_t count = node.children[i].leaf_count();
    if (leaf >= start && leaf < start + count) on_path = i;
    ranges.emplace_back(start, count);
    start += count;
  }
  build_witness(node.children[on_path], ranges[on_path].first, leaf, held);
  int picked = 0;
  for (std::size_t i = 0; i < node.children.size() && picked < node.k - 1; ++i) {
    if (i == on_path) continue;
    std::fill_n(held.begin() + static_cast<std::ptrdiff_t>(ranges[i].first), ranges[i].second, true);
    ++picked;
  }
}

}  // namespace

bool evaluate_shares(const PlanNode& root, const std::vector<bool>& held) {
  if (held.size() != root.leaf_count()) throw std::invalid_argument("share mask size mismatch");
  std::size_t next = 0;
  return eval_shares(root, held, next);
}

std::optional<std::vector<std::size_t>> importance_witness(const PlanNode& root, std::size_t leaf) {
  const std::size_t total = root.leaf_count();
  if (leaf >= total) throw std::out_of_range("share id out of range");
  std::vector<bool> held(total, false);
  build_witness(root, 0, leaf, held);
  if (evaluate_shares(root, held)) return std::nullopt;
  auto with = held;
  with[leaf] = true;
  if (!evaluate_shares(root, with)) return std::nullopt;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < total; ++i)
    if (held[i]) out.push_back(i);
  return out;
}

std::uint64_t plan_field(const PlanNode& root, std::size_t secret_dimension) {
  std::uint64_t need = std::max<std::uint64_t>(secret_dimension, 2);
  std::function<void(const PlanNode&)> walk = [&](const PlanNode& n) {
    if (n.is_leaf()) return;
    if (n.k == n.n)
      need = std::max<std::uint64_t>(need, n.k >= 2 ? 3 : 2);
    else
      need = std::max<std::uint64_t>(need, static_cast<std::uint64_t>(2 * n.k - 1));
    for (const auto& c : n.children) walk(c);
  };
  walk(root);
  return next_prime(need);
}

nlohmann::json to_json(const PlanNode& node) {
  if (node.is_leaf()) {
    nlohmann::json j{{"kind", "leaf"}, {"owner", node.owner.to_string()}};
    if (!node.label.empty()) j["label"] = node.label;
    return j;
  }
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : node.children) children.push_back(to_json(c));
  nlohmann::json j{{"kind", "threshold"}, {"k", node.k}, {"n", node.n}, {"children", std::move(children)}};
  if (!node.label.empty()) j["label"] = node.label;
  return j;
}

nlohmann::json to_json(const SharePlan& plan) {
  return {{"mode", to_string(plan.mode)},
          {"lambda", plan.lambda},
          {"partition", plan.partition.to_json()},
          {"home_share_count", plan.home_share_count},
          {"exceeds_theorem_bound", plan.exceeds_theorem_bound},
          {"root", to_json(plan.root)}};
}

PlanNode plan_node_from_json(const nlohmann::json& doc) {
  const auto kind = doc.at("kind").get<std::string>();
  const std::string label = doc.value("label", "");
  if (kind == "leaf") return PlanNode::leaf(Party::parse(doc.at("owner").get<std::string>()), label);
  if (kind != "threshold") throw std::invalid_argument("unknown plan node kind '" + kind + "'");
  std::vector<PlanNode> children;
  for (const auto& c : doc.at("children")) children.push_back(plan_node_from_json(c));
  const int n = doc.value("n", static_cast<int>(children.size()));
  if (n != static_cast<int>(children.size())) throw std::invalid_argument("threshold node n does not match children");
  return PlanNode::threshold(doc.at("k").get<int>(), std::move(children), label);
}

namespace {

void render_into(const PlanNode& node, int depth, std::ostringstream& out) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  if (node.is_leaf()) {
    out << indent << node.owner.to_string() << '\n';
    return;
  }
  out << indent << "((" << node.k << ',' << node.n << "))";
  const bool flat = std::all_of(node.children.begin(), node.children.end(),
                                [](const PlanNode& c) { return c.is_leaf(); });
  if (flat) {
    out << " :";
    for (std::size_t i = 0; i < node.children.size(); ++i)
      out << (i ? ", " : " ") << node.children[i].owner.to_string();
    out << '\n';
    return;
  }
  out << '\n';
  for (const auto& c : node.children) render_into(c, depth + 1, out);
}

}  // namespace

std::string render(const PlanNode& node) {
  std::ostringstream out;
  render_into(node, 0, out);
  return out.str();
}

// ---------------------------------------------------------------------------

nlohmann::json HomeShareReport::to_json() const {
  nlohmann::json j{{"r", r},
                   {"lambda", lambda},
                   {"added_player", added_player},
                   {"pure_state_count", pure_state_count},
                   {"theorem_count", theorem_count}};
  j["x"] = x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  j["naive_count"] = naive_count ? nlohmann::json(*naive_count) : nlohmann::json(nullptr);
  j["naive_formula"] = naive_formula();
  j["gamma_prime_max"] = gamma_prime_max ? gamma_prime_max->to_json() : nlohmann::json(nullptr);
  j["plan_mode"] = plan_mode ? nlohmann::json(to_string(*plan_mode)) : nlohmann::json(nullptr);
  nlohmann::json leaves = nlohmann::json::array();
  for (std::size_t i = 0; i < dealer_leaves.size(); ++i)
    leaves.push_back({{"share", dealer_leaves[i]},
                      {"important", static_cast<bool>(dealer_leaf_important[i])},
                      {"witness", witnesses[i]}});
  j["dealer_leaves"] = std::move(leaves);
  return j;
}

HomeShareReport home_share_analytics(const AccessStructure& gamma, const PartitionOptions& options) {
  HomeShareReport report;
  report.r = gamma.size();
  report.lambda = min_clique_partition(build_as_graph(gamma), options).size();
  report.pure_state_count = report.r;
  report.theorem_count = report.lambda - 1;

  std::string extra = "X";
  while (gamma.index_of(extra)) extra += "'";
  report.added_player = extra;
  if (gamma.player_count() + 1 <= kMaxMaximalizePlayers) {
    auto players = gamma.players();
    players.push_back(extra);
    std::vector<std::vector<PlayerId>> sets;
    for (std::size_t j = 0; j < gamma.size(); ++j) {
      auto members = gamma.members(j);
      members.push_back(extra);
      sets.push_back(std::move(members));
    }
    const AccessStructure gamma_prime(players, sets);
    auto maximal = maximalize(gamma_prime);
    const PlayerMask bit = PlayerMask{1} << *maximal.gamma_max.index_of(extra);
    report.x = static_cast<std::size_t>(std::count_if(maximal.gamma_max.sets().begin(),
                                                      maximal.gamma_max.sets().end(),
                                                      [bit](PlayerMask m) { return (m & bit) != 0; }));
    report.naive_count = report.r + (report.r - 1) * *report.x;
    report.gamma_prime_max = std::move(maximal.gamma_max);
  }

  std::optional<SharePlan> plan;
  for (auto mode : {PlanMode::strict, PlanMode::dealer_assisted}) {
    try {
      plan = build_aqss_plan(gamma, PlanOptions{mode, options});
      break;
    } catch (const PlanError&) {
    }
  }
  if (plan) {
    report.plan_mode = plan->mode;
    const auto owners = leaf_owners(plan->root);
    for (std::size_t i = 0; i < owners.size(); ++i) {
      if (!owners[i].is_dealer()) continue;
      const auto witness = importance_witness(plan->root, i);
      report.dealer_leaves.push_back(i);
      report.dealer_leaf_important.push_back(witness.has_value());
      report.witnesses.push_back(witness.value_or(std::vector<std::size_t>{}));
    }
  }
  return report;
}

}  // namespace aqss
