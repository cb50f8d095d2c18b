#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "aqss/access_structure.hpp"
#include "aqss/qudit_register.hpp"
#include "aqss/rng.hpp"
#include "aqss/share_plan.hpp"
#include "aqss/two_group_qkd.hpp"
#include "json.hpp"

namespace aqss {

enum class ExitCode : int { ok = 0, refused = 2, input_error = 3, fault = 4 };

struct RunReport {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json inputs;
  nlohmann::json outputs;
  double timing_ms = 0.0;
  ExitCode status = ExitCode::ok;

  // FNV-1a of the canonical inputs JSON, as 16 hex digits.
  std::string inputs_digest() const;
  nlohmann::json to_json() const;
};

// Reads "@path" from a file, anything else verbatim.
std::string read_source(std::string_view text);

// Secret specs: a basis digit ("0", "2"), "+" (uniform), "-" (Fourier image
// of |1>), "random" (seeded), or a JSON register. `dim` applies to the named forms.
QuditRegister parse_secret(std::string_view source, std::uint32_t dim, Rng& rng);

struct AnalyzeArgs {
  std::string gamma;
  PartitionOptions partition;
};

struct PlanArgs {
  std::string gamma;
  PlanMode mode = PlanMode::strict;
  PartitionOptions partition;
};

struct ShareArgs {
  std::string gamma;
  PlanMode mode = PlanMode::strict;
  PartitionOptions partition;
  std::string secret = "+";
  std::string secret_b;  // leakage only; defaults to the state orthogonal-ish partner
  std::uint32_t secret_dim = 2;
  std::string coalition;
  bool encrypted = false;
  std::uint64_t seed = 0;
};

struct QkdArgs {
  ProtocolConfig config;
  std::size_t trials = 1;
  bool transcript = false;
  std::size_t threads = 0;  // 0: hardware concurrency
};

RunReport cmd_analyze(const AnalyzeArgs& args);
RunReport cmd_plan(const PlanArgs& args);
RunReport cmd_share(const ShareArgs& args);
// Share then reconstruct for the coalition; unauthorized coalitions get a
// refusal (status refused) together with a leakage report.
RunReport cmd_reconstruct(const ShareArgs& args);
RunReport cmd_leakage(const ShareArgs& args);
RunReport cmd_qkd(const QkdArgs& args);
RunReport cmd_oracle(std::string_view suite, std::uint64_t seed);

// Runs `body` on a fresh report; exceptions become error outputs with the
// matching status (parse/input/capacity/plan: input_error, authorization:
// refused, anything else: fault).
RunReport guarded(std::string command, std::uint64_t seed, nlohmann::json inputs,
                  const std::function<void(RunReport&)>& body);

}  // namespace aqss
