// aqss: command-line front end. Every subcommand prints one JSON RunReport.
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "aqss/harness.hpp"
#include "aqss/linear_code.hpp"

namespace {

using namespace aqss;

struct Globals {
  std::uint64_t seed = 0;
  bool pretty = false;
};

PlanMode mode_from(const std::string& s) { return parse_plan_mode(s); }

void add_partition_flags(CLI::App* cmd, PartitionOptions& p) {
  cmd->add_option("--max-exact", p.max_exact, "Largest graph solved by exact clique cover");
  cmd->add_flag("--heuristic", p.allow_heuristic, "Fall back to greedy clique cover above --max-exact");
}

std::vector<Edge> parse_tree(const std::string& text) {
  std::vector<Edge> edges;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw CLI::ValidationError("--tree", "edges look like 0-1");
    edges.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
  }
  return edges;
}

int emit(const RunReport& report, const Globals& g) {
  std::cout << report.to_json().dump(g.pretty ? 2 : -1) << '\n';
  return static_cast<int>(report.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Access-structure quantum secret sharing and two-group QKD simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Root seed for every random stream")->capture_default_str();
  app.add_flag("--pretty", g.pretty, "Indent the JSON report");

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Canonical form, no-cloning check, partition, maximal structure");
  c_analyze->add_option("gamma", analyze.gamma, "Access structure or @file")->required();
  add_partition_flags(c_analyze, analyze.partition);

  PlanArgs plan;
  std::string plan_mode = "strict";
  auto* c_plan = app.add_subcommand("plan", "Build the nested threshold plan");
  c_plan->add_option("gamma", plan.gamma, "Access structure or @file")->required();
  c_plan->add_option("--mode", plan_mode, "strict or dealer_assisted");
  add_partition_flags(c_plan, plan.partition);

  ShareArgs share;
  std::string share_mode = "strict";
  auto add_share_flags = [&](CLI::App* cmd, bool coalition) {
    cmd->add_option("gamma", share.gamma, "Access structure or @file")->required();
    cmd->add_option("--mode", share_mode, "strict or dealer_assisted");
    cmd->add_option("--secret", share.secret, "Digit, +, -, random or a JSON register");
    cmd->add_option("--dim", share.secret_dim, "Secret dimension for the named forms");
    cmd->add_flag("--encrypted", share.encrypted, "Use the one-time-pad path");
    if (coalition) cmd->add_option("--coalition", share.coalition, "Comma-separated players, dealer allowed")->required();
    add_partition_flags(cmd, share.partition);
  };
  auto* c_share = app.add_subcommand("share", "Distribute a secret and print the share manifest");
  add_share_flags(c_share, false);
  auto* c_rec = app.add_subcommand("reconstruct", "Share, then reconstruct for a coalition");
  add_share_flags(c_rec, true);
  auto* c_leak = app.add_subcommand("leakage", "Trace distance seen by an unauthorized coalition");
  add_share_flags(c_leak, true);
  c_leak->add_option("--secret-b", share.secret_b, "Second secret to compare against");

  QkdArgs qkd;
  std::string eve, tree, reconciliation = "syndrome", code = "hamming74";
  std::optional<double> threshold;
  auto* c_qkd = app.add_subcommand("qkd", "Simulate the two-group key distribution");
  c_qkd->add_option("--n", qkd.config.n, "Total parties");
  c_qkd->add_option("--split", qkd.config.split, "Size of group A (parties 0..split-1)");
  c_qkd->add_option("--rounds", qkd.config.rounds, "GHZ rounds (2m)");
  c_qkd->add_option("--noise", qkd.config.noise_p, "Per-party measurement flip probability");
  c_qkd->add_option("--eve", eve, "Intercept-resend on a tree edge, e.g. edge=1");
  c_qkd->add_option("--tree", tree, "Spanning tree edges, e.g. 0-1,1-2,2-3");
  c_qkd->add_option("--leader", qkd.config.leader, "Party that starts the GHZ merge");
  c_qkd->add_option("--sample", qkd.config.sample_size, "Verification pairs per edge");
  c_qkd->add_option("--threshold", threshold, "Abort threshold on mismatch fraction");
  c_qkd->add_option("--reconciliation", reconciliation, "syndrome or paper_literal");
  c_qkd->add_option("--code", code, "hamming74 or @file with {generator, parity_check}");
  c_qkd->add_option("--trials", qkd.trials, "Independent seeded runs to aggregate");
  c_qkd->add_option("--threads", qkd.threads, "Worker threads for --trials (0: all cores)");
  c_qkd->add_flag("--transcript", qkd.transcript, "Include the full transcript");

  std::string suite;
  auto* c_oracle = app.add_subcommand("oracle", "Run a brute-force cross-check suite");
  c_oracle->add_option("suite", suite, "clique_bruteforce, qts_disentangle, parity_law or p_formula")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::input_error);
  }

  try {
    if (*c_analyze) return emit(cmd_analyze(analyze), g);
    if (*c_plan) {
      plan.mode = mode_from(plan_mode);
      return emit(cmd_plan(plan), g);
    }
    if (*c_share || *c_rec || *c_leak) {
      share.mode = mode_from(share_mode);
      share.seed = g.seed;
      if (*c_share) return emit(cmd_share(share), g);
      if (*c_rec) return emit(cmd_reconstruct(share), g);
      return emit(cmd_leakage(share), g);
    }
    if (*c_qkd) {
      auto& c = qkd.config;
      c.seed = g.seed;
      c.abort_threshold = threshold;
      if (!tree.empty()) c.tree = parse_tree(tree);
      if (!eve.empty()) {
        const auto eq = eve.find('=');
        c.eve_edge = std::stoul(eq == std::string::npos ? eve : eve.substr(eq + 1));
      }
      c.reconciliation = parse_reconciliation(reconciliation);
      c.code = code == "hamming74" ? LinearCode::hamming_7_4()
                                   : LinearCode::from_json(nlohmann::json::parse(read_source(code)));
      return emit(cmd_qkd(qkd), g);
    }
    if (*c_oracle) return emit(cmd_oracle(suite, g.seed), g);
  } catch (const std::exception& e) {
    std::cerr << "aqss: " << e.what() << '\n';
    return static_cast<int>(ExitCode::input_error);
  }
  return static_cast<int>(ExitCode::fault);
}
