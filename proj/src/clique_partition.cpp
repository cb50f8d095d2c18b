#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "aqss/access_structure.hpp"

namespace aqss {

namespace {

using Mask = std::uint64_t;

// Restricted-growth search: vertex v joins an existing class (in label order)
// or opens the next one. The first complete assignment found under a class
// limit is therefore the lexicographically least labelling within that limit.
class ExactCover {
public:
  explicit ExactCover(const ASGraph& g) : n_(g.vertex_count()), adj_(n_, 0) {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (a != b && g.adjacent(a, b)) adj_[a] |= Mask{1} << b;
  }

  std::vector<std::size_t> solve(std::size_t lower_bound) {
    for (std::size_t limit = std::max<std::size_t>(lower_bound, 1); limit <= n_; ++limit) {
      classes_.clear();
      labels_.assign(n_, 0);
      if (search(0, limit)) return labels_;
    }
    throw std::logic_error("clique cover search exhausted");  // limit == n always succeeds
  }

private:
  bool fits(Mask cls, std::size_t v) const { return (cls & ~adj_[v]) == 0; }

  // Every unassigned vertex must still have somewhere to go.
  bool forward_ok(std::size_t next, std::size_t limit) const {
    if (classes_.size() < limit) return true;
    for (std::size_t u = next; u < n_; ++u) {
      const bool placeable = std::any_of(classes_.begin(), classes_.end(),
                                         [&](Mask c) { return fits(c, u); });
      if (!placeable) return false;
    }
    return true;
  }

  bool search(std::size_t v, std::size_t limit) {
    if (v == n_) return true;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      if (!fits(classes_[c], v)) continue;
      classes_[c] |= Mask{1} << v;
      labels_[v] = c;
      if (forward_ok(v + 1, limit) && search(v + 1, limit)) return true;
      classes_[c] &= ~(Mask{1} << v);
    }
    if (classes_.size() < limit) {
      classes_.push_back(Mask{1} << v);
      labels_[v] = classes_.size() - 1;
      if (forward_ok(v + 1, limit) && search(v + 1, limit)) return true;
      classes_.pop_back();
    }
    return false;
  }

  std::size_t n_;
  std::vector<Mask> adj_;
  std::vector<Mask> classes_;
  std::vector<std::size_t> labels_;
};

// Size of a greedily built independent set: no two of its vertices can share a clique.
std::size_t independent_set_bound(const ASGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto degree = [&](std::size_t v) {
    std::size_t d = 0;
    for (std::size_t u = 0; u < n; ++u) d += g.adjacent(v, u) ? 1 : 0;
    return d;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree(a) < degree(b); });
  std::vector<std::size_t> chosen;
  for (auto v : order) {
    const bool free = std::none_of(chosen.begin(), chosen.end(),
                                   [&](std::size_t u) { return g.adjacent(u, v); });
    if (free) chosen.push_back(v);
  }
  return chosen.size();
}

std::vector<std::vector<std::size_t>> classes_from_labels(const std::vector<std::size_t>& labels) {
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] >= classes.size()) classes.resize(labels[v] + 1);
    classes[labels[v]].push_back(v);
  }
  return classes;
}

}  // namespace

bool CliquePartition::is_valid_for(const ASGraph& graph) const {
  std::vector<int> seen(graph.vertex_count(), 0);
  for (const auto& cls : classes) {
    if (cls.empty()) return false;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (cls[i] >= graph.vertex_count()) return false;
      ++seen[cls[i]];
      for (std::size_t j = i + 1; j < cls.size(); ++j)
        if (!graph.adjacent(cls[i], cls[j])) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

nlohmann::json CliquePartition::to_json() const {
  return {{"size", size()}, {"exact", exact}, {"classes", classes}};
}

CliquePartition greedy_clique_partition(const ASGraph& graph) {
  CliquePartition out;
  out.exact = false;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    auto it = std::find_if(out.classes.begin(), out.classes.end(), [&](const auto& cls) {
      return std::all_of(cls.begin(), cls.end(), [&](std::size_t u) { return graph.adjacent(u, v); });
    });
    if (it == out.classes.end())
      out.classes.push_back({v});
    else
      it->push_back(v);
  }
  return out;
}

CliquePartition min_clique_partition(const ASGraph& graph, const PartitionOptions& options) {
  const std::size_t n = graph.vertex_count();
  if (n == 0) return {};
  const std::size_t max_exact = std::min<std::size_t>(options.max_exact, 64);
  if (n > max_exact) {
    if (!options.allow_heuristic)
      throw std::invalid_argument("graph has " + std::to_string(n) + " vertices; exact clique cover is limited to " +
                                  std::to_string(max_exact) + " (enable the heuristic)");
    return greedy_clique_partition(graph);
  }
  ExactCover solver(graph);
  CliquePartition out;
  out.classes = classes_from_labels(solver.solve(independent_set_bound(graph)));
  out.exact = true;
  return out;
}

}  // namespace aqss
