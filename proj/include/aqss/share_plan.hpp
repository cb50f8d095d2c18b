#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "aqss/access_structure.hpp"
#include "json.hpp"

namespace aqss {

// One node of a nested threshold scheme. A leaf is a single share handed to
// its owner; a threshold node ((k,n)) splits its input into n shares, one per
// child, of which any k suffice.
struct PlanNode {
  enum class Kind { leaf, threshold };

  Kind kind = Kind::leaf;
  Party owner;  // leaf only
  int k = 0;    // threshold only
  int n = 0;
  std::vector<PlanNode> children;
  std::string label;  // descriptive only; ignored by comparisons

  static PlanNode leaf(Party owner, std::string label = {});
  static PlanNode threshold(int k, std::vector<PlanNode> children, std::string label = {});

  bool is_leaf() const { return kind == Kind::leaf; }
  bool operator==(const PlanNode& other) const;

  std::size_t leaf_count() const;
};

enum class PlanMode { strict, dealer_assisted };

std::string to_string(PlanMode mode);
PlanMode parse_plan_mode(std::string_view text);

struct SharePlan {
  PlanNode root;
  PlanMode mode = PlanMode::strict;
  std::size_t lambda = 1;
  CliquePartition partition;
  std::size_t home_share_count = 0;
  // Dealer-assisted plans may route within-class extras to the dealer.
  bool exceeds_theorem_bound = false;
};

struct PlanOptions {
  PlanMode mode = PlanMode::strict;
  PartitionOptions partition;
};

// Outer ((lambda, 2*lambda-1)) majority over one subtree per partial-link class
// plus lambda-1 dealer leaves (omitted when lambda == 1). A class that is
// exactly the k-subsets of an n-player set becomes ((k,n)); otherwise an
// r-set class becomes ((r, 2r-1)) over ((|a|,|a|)) subtrees and r-1 extra
// shares. The extras go to the least common player of the class; without one,
// strict mode throws PlanError and dealer-assisted mode gives them to the dealer.
SharePlan build_aqss_plan(const AccessStructure& gamma, const PlanOptions& options = {});

// Leaves are satisfied by their owner's presence; ((k,n)) by >= k children.
bool evaluate_coalition(const PlanNode& node, const Coalition& coalition);
bool evaluate_coalition(const SharePlan& plan, const Coalition& coalition);

// Leaf owners in depth-first order; the position is the share id.
std::vector<Party> leaf_owners(const PlanNode& root);
// Same semantics over individual shares: held[i] refers to leaf i.
bool evaluate_shares(const PlanNode& root, const std::vector<bool>& held);

// A set T of shares (excluding `leaf`) such that T fails and T + {leaf}
// satisfies the plan, or nullopt when the share is not important.
std::optional<std::vector<std::size_t>> importance_witness(const PlanNode& root, std::size_t leaf);

// Quantum field used to realize the plan: the least prime at least the
// secret dimension and every polynomial node's 2k-1. ((m,m)) nodes are
// realized as chains of ((2,2)) schemes and only need 3.
std::uint64_t plan_field(const PlanNode& root, std::size_t secret_dimension);

nlohmann::json to_json(const PlanNode& node);
nlohmann::json to_json(const SharePlan& plan);
PlanNode plan_node_from_json(const nlohmann::json& doc);
// Indented text rendering, e.g. "((2,3))" followed by children.
std::string render(const PlanNode& node);

struct HomeShareReport {
  std::size_t r = 0;
  std::size_t lambda = 0;
  std::string added_player;
  // Maximal structure of gamma with added_player joined to every set, and the
  // quantities derived from it. Absent when the universe is too large to maximalize.
  std::optional<AccessStructure> gamma_prime_max;
  std::optional<std::size_t> x;            // minimal sets of gamma_prime_max containing added_player
  std::optional<std::size_t> naive_count;  // r + (r-1) x
  std::size_t pure_state_count = 0; // r
  std::size_t theorem_count = 0;    // lambda - 1
  std::optional<PlanMode> plan_mode;               // mode of the plan used for importance, if any
  std::vector<std::size_t> dealer_leaves;          // share ids of home shares in that plan
  std::vector<bool> dealer_leaf_important;
  std::vector<std::vector<std::size_t>> witnesses; // importance witness per dealer leaf

  // "r+(r-1)x" with r filled in, e.g. "3+2x".
  std::string naive_formula() const { return std::to_string(r) + "+" + std::to_string(r > 0 ? r - 1 : 0) + "x"; }
  nlohmann::json to_json() const;
};

HomeShareReport home_share_analytics(const AccessStructure& gamma, const PartitionOptions& options = {});

}  // namespace aqss
