#include "aqss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aqss/engine.hpp"
#include "aqss/errors.hpp"
#include "aqss/oracles.hpp"

namespace aqss {

std::string RunReport::inputs_digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(inputs.dump())));
  return buf;
}

nlohmann::json RunReport::to_json() const {
  return {{"command", command},
          {"seed", seed},
          {"inputs", inputs},
          {"inputs_digest", inputs_digest()},
          {"outputs", outputs},
          {"exit_code", static_cast<int>(status)},
          {"timing_ms", timing_ms}};
}

RunReport guarded(std::string command, std::uint64_t seed, nlohmann::json inputs,
                  const std::function<void(RunReport&)>& body) {
  RunReport report;
  report.command = std::move(command);
  report.seed = seed;
  report.inputs = std::move(inputs);
  const auto start = std::chrono::steady_clock::now();
  auto fail = [&report](ExitCode code, const char* kind, const std::exception& e) {
    report.status = code;
    report.outputs = {{"error", e.what()}, {"kind", kind}};
  };
  try {
    body(report);
  } catch (const ParseError& e) {
    fail(ExitCode::input_error, "parse", e);
    report.outputs["position"] = e.position();
  } catch (const AuthorizationError& e) {
    fail(ExitCode::refused, "unauthorized", e);
  } catch (const CapacityError& e) {
    fail(ExitCode::input_error, "capacity", e);
  } catch (const PlanError& e) {
    fail(ExitCode::input_error, "plan", e);
  } catch (const std::invalid_argument& e) {
    fail(ExitCode::input_error, "input", e);
  } catch (const nlohmann::json::exception& e) {
    fail(ExitCode::input_error, "json", e);
  } catch (const std::exception& e) {
    fail(ExitCode::fault, "internal", e);
  }
  report.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string read_source(std::string_view text) {
  if (text.empty() || text.front() != '@') return std::string(text);
  const std::string path(text.substr(1));
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

QuditRegister parse_secret(std::string_view source, std::uint32_t dim, Rng& rng) {
  const std::string text = read_source(source);
  if (!text.empty() && text.front() == '{') return QuditRegister::from_json(nlohmann::json::parse(text));
  std::vector<Complex> amps(dim);
  if (text == "+") {
    std::fill(amps.begin(), amps.end(), Complex{1.0 / std::sqrt(static_cast<double>(dim)), 0.0});
  } else if (text == "-") {
    for (std::uint32_t j = 0; j < dim; ++j)
      amps[j] = std::polar(1.0 / std::sqrt(static_cast<double>(dim)), 2.0 * std::numbers::pi * j / dim);
  } else if (text == "random") {
    double norm = 0.0;
    for (auto& a : amps) {
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      a = {r * std::cos(2 * std::numbers::pi * u2), r * std::sin(2 * std::numbers::pi * u2)};
      norm += std::norm(a);
    }
    for (auto& a : amps) a /= std::sqrt(norm);
  } else {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty())
      throw std::invalid_argument("secret must be a digit, '+', '-', 'random' or a JSON register");
    if (v >= dim) throw std::invalid_argument("basis digit " + text + " out of range for dimension " + std::to_string(dim));
    amps[v] = 1.0;
  }
  return QuditRegister::prepare({dim}, amps);
}

namespace {

nlohmann::json partition_json(const AccessStructure& gamma, const CliquePartition& partition) {
  nlohmann::json j = partition.to_json();
  nlohmann::json labelled = nlohmann::json::array();
  for (const auto& cls : partition.classes) {
    std::vector<nlohmann::json> sets;
    for (auto v : cls) sets.push_back(gamma.members(v));
    labelled.push_back(sets);
  }
  j["class_sets"] = std::move(labelled);
  return j;
}

nlohmann::json partition_inputs(const PartitionOptions& o) {
  return {{"max_exact", o.max_exact}, {"heuristic", o.allow_heuristic}};
}

// File contents become part of the replay inputs.
AccessStructure load_gamma(const std::string& source, RunReport& r) {
  const std::string text = read_source(source);
  if (text != source) r.inputs["gamma_text"] = text;
  return parse_access_structure(text);
}

Coalition checked_coalition(const AccessStructure& gamma, const std::string& text) {
  const auto coalition = parse_coalition(text);
  for (const auto& p : coalition)
    if (p.is_player() && !gamma.index_of(p.name))
      throw std::invalid_argument("coalition member '" + p.name + "' is not a player of the access structure");
  return coalition;
}

SharePlan plan_for(const ShareArgs& args, const AccessStructure& gamma) {
  return build_aqss_plan(gamma, PlanOptions{args.mode, args.partition});
}

nlohmann::json share_inputs(const ShareArgs& args) {
  return {{"gamma", args.gamma},
          {"mode", to_string(args.mode)},
          {"partition", partition_inputs(args.partition)},
          {"secret", args.secret},
          {"secret_b", args.secret_b},
          {"secret_dim", args.secret_dim},
          {"coalition", args.coalition},
          {"encrypted", args.encrypted}};
}

// Trace distance between the key-averaged ciphertext and the maximally mixed
// state: what a coalition without the key can see of the dealer's share.
double encrypted_view_distance(const QuditRegister& secret) {
  std::uint64_t keys = 1;
  for (auto d : secret.dims()) keys *= static_cast<std::uint64_t>(d) * d;
  if (keys > 4096) throw CapacityError("too many keys to average the ciphertext exactly");
  std::vector<std::size_t> sites(secret.site_count());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = i;
  DensityView avg = pure_density(secret);
  avg.matrix.setZero();
  for (std::uint64_t k = 0; k < keys; ++k) {
    PauliKey key;
    std::uint64_t t = k;
    for (auto d : secret.dims()) {
      const auto a = static_cast<std::uint32_t>(t % d);
      t /= d;
      const auto b = static_cast<std::uint32_t>(t % d);
      t /= d;
      key.entries.emplace_back(a, b);
    }
    avg.matrix += pure_density(qotp_encrypt(secret, sites, key)).matrix;
  }
  avg.matrix /= static_cast<double>(keys);
  DensityView mixed = avg;
  mixed.matrix = Eigen::MatrixXcd::Identity(avg.matrix.rows(), avg.matrix.cols()) /
                 static_cast<double>(avg.matrix.rows());
  return distance(avg, mixed).trace_distance;
}

nlohmann::json quantum_leakage(const SharePlan& plan, const Coalition& coalition, const ShareArgs& args, Rng& rng) {
  nlohmann::json j;
  double worst = 0.0;
  auto run = [&](const char* name, const std::string& a, const std::string& b) {
    Rng ra = rng.split(std::string("leak-a-") + name), rb = rng.split(std::string("leak-b-") + name);
    const auto report = leakage_report(plan, coalition, parse_secret(a, args.secret_dim, ra),
                                       parse_secret(b, args.secret_dim, rb));
    j[name] = report.to_json();
    worst = std::max(worst, report.trace_distance);
  };
  run("orthogonal", "0", "1");
  run("superposition", "+", "-");
  if (!args.secret_b.empty()) run("requested", args.secret, args.secret_b);
  j["max_trace_distance"] = worst;
  return j;
}

}  // namespace

RunReport cmd_analyze(const AnalyzeArgs& args) {
  return guarded("analyze", 0, {{"gamma", args.gamma}, {"partition", partition_inputs(args.partition)}},
                 [&](RunReport& r) {
    const auto gamma = load_gamma(args.gamma, r);
    const auto graph = build_as_graph(gamma);
    const auto partition = min_clique_partition(graph, args.partition);
    auto& out = r.outputs;
    out["gamma"] = {{"text", gamma.to_string()}, {"structure", gamma.to_json()}};
    out["no_cloning"] = check_no_cloning(gamma);
    out["lambda"] = partition.size();
    out["lambda_exact"] = partition.exact;
    out["partition"] = partition_json(gamma, partition);
    out["graph"] = graph.to_json();
    out["graph"]["components"] = graph.component_count();
    if (!check_no_cloning(gamma)) {
      out["gamma_max"] = {{"available", false}, {"reason", "structure has disjoint authorized sets"}};
    } else if (gamma.player_count() > kMaxMaximalizePlayers) {
      out["gamma_max"] = {{"available", false}, {"reason", "too many players to enumerate"}};
    } else {
      const auto maximal = maximalize(gamma);
      nlohmann::json added = nlohmann::json::array();
      for (auto m : maximal.added_sets) added.push_back(maximal.gamma_max.members_of(m));
      out["gamma_max"] = {{"available", true},
                          {"text", maximal.gamma_max.to_string()},
                          {"structure", maximal.gamma_max.to_json()},
                          {"selection_rule", maximal.selection_rule},
                          {"added_sets", std::move(added)}};
    }
    out["home_shares"] = home_share_analytics(gamma, args.partition).to_json();
  });
}

RunReport cmd_plan(const PlanArgs& args) {
  return guarded("plan", 0,
                 {{"gamma", args.gamma}, {"mode", to_string(args.mode)}, {"partition", partition_inputs(args.partition)}},
                 [&](RunReport& r) {
    const auto gamma = load_gamma(args.gamma, r);
    const auto plan = build_aqss_plan(gamma, PlanOptions{args.mode, args.partition});
    r.outputs["plan"] = to_json(plan);
    r.outputs["rendered"] = render(plan.root);
    nlohmann::json owners = nlohmann::json::array();
    for (const auto& p : leaf_owners(plan.root)) owners.push_back(p.to_string());
    r.outputs["share_owners"] = std::move(owners);
    r.outputs["field_for_qubit_secret"] = plan_field(plan.root, 2);
  });
}

RunReport cmd_share(const ShareArgs& args) {
  return guarded("share", args.seed, share_inputs(args), [&](RunReport& r) {
    const auto gamma = load_gamma(args.gamma, r);
    Rng rng(args.seed);
    Rng secret_rng = rng.split("secret");
    const auto secret = parse_secret(args.secret, args.secret_dim, secret_rng);
    if (args.encrypted) {
      Rng enc_rng = rng.split("encrypted");
      r.outputs["encrypted"] = encrypted_share(gamma, secret, enc_rng).manifest();
      return;
    }
    const auto alloc = quantum_share(plan_for(args, gamma), secret);
    r.outputs["allocation"] = alloc.manifest();
    r.outputs["norm"] = alloc.state.norm();
  });
}

RunReport cmd_reconstruct(const ShareArgs& args) {
  return guarded("reconstruct", args.seed, share_inputs(args), [&](RunReport& r) {
    const auto gamma = load_gamma(args.gamma, r);
    const auto coalition = checked_coalition(gamma, args.coalition);
    Rng rng(args.seed);
    Rng secret_rng = rng.split("secret");
    const auto secret = parse_secret(args.secret, args.secret_dim, secret_rng);
    r.outputs["coalition"] = to_string(coalition);

    if (args.encrypted) {
      Rng enc_rng = rng.split("encrypted");
      const auto enc = encrypted_share(gamma, secret, enc_rng);
      const bool authorized = gamma.is_authorized(gamma.mask_of(coalition));
      r.outputs["authorized"] = authorized;
      r.outputs["path"] = "encrypted";
      if (!authorized) {
        r.status = ExitCode::refused;
        r.outputs["refusal"] = "coalition holds no authorized set of key shares";
        r.outputs["leakage"] = {{"key_averaged_trace_distance_to_mixed", encrypted_view_distance(secret)}};
        return;
      }
      const auto out = encrypted_reconstruct(enc, coalition);
      r.outputs["fidelity"] = std::norm(inner_product(secret, out));
      return;
    }

    const auto plan = plan_for(args, gamma);
    r.outputs["path"] = "quantum";
    const bool authorized = evaluate_coalition(plan, coalition);
    r.outputs["authorized"] = authorized;
    if (!authorized) {
      r.status = ExitCode::refused;
      r.outputs["refusal"] = "coalition does not satisfy the share plan";
      r.outputs["leakage"] = quantum_leakage(plan, coalition, args, rng);
      return;
    }
    const auto alloc = quantum_share(plan, secret);
    const auto rec = quantum_reconstruct(alloc, coalition);
    r.outputs["fidelity"] = rec.fidelity(secret);
    r.outputs["output_site"] = rec.output_site;
    r.outputs["q"] = alloc.q;
    r.outputs["coalition_sites"] = alloc.sites_of(coalition).size();
  });
}

RunReport cmd_leakage(const ShareArgs& args) {
  return guarded("leakage", args.seed, share_inputs(args), [&](RunReport& r) {
    const auto gamma = load_gamma(args.gamma, r);
    const auto coalition = checked_coalition(gamma, args.coalition);
    Rng rng(args.seed);
    r.outputs["coalition"] = to_string(coalition);
    if (args.encrypted) {
      if (gamma.is_authorized(gamma.mask_of(coalition)))
        throw AuthorizationError("coalition is authorized; leakage is not defined");
      Rng secret_rng = rng.split("secret");
      const auto secret = parse_secret(args.secret, args.secret_dim, secret_rng);
      r.outputs["leakage"] = {{"key_averaged_trace_distance_to_mixed", encrypted_view_distance(secret)}};
      return;
    }
    const auto plan = plan_for(args, gamma);
    if (evaluate_coalition(plan, coalition))
      throw AuthorizationError("coalition " + to_string(coalition) + " is authorized; leakage is not defined");
    r.outputs["leakage"] = quantum_leakage(plan, coalition, args, rng);
  });
}

RunReport cmd_qkd(const QkdArgs& args) {
  nlohmann::json inputs{{"config", args.config.to_json()}, {"trials", args.trials}, {"transcript", args.transcript}};
  return guarded("qkd", args.config.seed, inputs, [&](RunReport& r) {
    args.config.validate();
    if (args.trials <= 1) {
      const auto t = run_protocol(args.config);
      r.outputs["summary"] = t.summary();
      nlohmann::json edges = nlohmann::json::array();
      for (const auto& s : t.edge_stats) edges.push_back(s.to_json());
      r.outputs["edges"] = std::move(edges);
      if (t.key) r.outputs["key"] = t.key->to_json();
      if (args.transcript) r.outputs["transcript"] = t.to_json();
      if (t.aborted()) r.status = ExitCode::refused;
      return;
    }
    std::vector<nlohmann::json> summaries(args.trials);
    std::vector<std::string> errors(args.trials);
    std::atomic<std::size_t> next{0};
    const Rng trial_root = Rng(args.config.seed).split("trial");
    auto worker = [&]() {
      for (std::size_t i = next++; i < args.trials; i = next++) {
        try {
          ProtocolConfig c = args.config;
          Rng seeded = trial_root.split(i);
          c.seed = seeded.next();
          summaries[i] = run_protocol(c).summary();
          summaries[i]["seed"] = c.seed;
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    };
    std::size_t threads = args.threads ? args.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, args.trials);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (!e.empty()) throw std::runtime_error("trial failed: " + e);

    std::size_t aborted = 0, agreed = 0;
    std::map<std::string, std::size_t> by_step;
    double delta_sum = 0.0, rate_sum = 0.0;
    std::size_t delta_count = 0;
    for (const auto& s : summaries) {
      if (s["aborted"].get<bool>()) {
        ++aborted;
        ++by_step["step" + std::to_string(s["abort_step"].get<int>())];
      }
      if (s["agreed"].get<bool>()) ++agreed;
      if (!s["delta_over_m"].is_null()) {
        delta_sum += s["delta_over_m"].get<double>();
        ++delta_count;
      }
      rate_sum += s["key_rate"].get<double>();
    }
    const auto n = static_cast<double>(args.trials);
    r.outputs["trials"] = args.trials;
    r.outputs["abort_rate"] = static_cast<double>(aborted) / n;
    r.outputs["aborts_by_step"] = by_step;
    r.outputs["agreement_rate"] = static_cast<double>(agreed) / n;
    r.outputs["mean_delta_over_m"] = delta_count ? nlohmann::json(delta_sum / static_cast<double>(delta_count))
                                                 : nlohmann::json(nullptr);
    r.outputs["mean_key_rate"] = rate_sum / n;
    r.outputs["runs"] = summaries;
  });
}

RunReport cmd_oracle(std::string_view suite, std::uint64_t seed) {
  return guarded("oracle", seed, {{"suite", suite}}, [&](RunReport& r) {
    r.outputs = oracle::run_suite(suite, seed);
    if (!r.outputs["agree"].get<bool>()) r.status = ExitCode::fault;
  });
}

}  // namespace aqss
