#include "doctest.h"

#include <cstdlib>
#include <fstream>

#include "aqss/errors.hpp"
#include "aqss/harness.hpp"
#include "aqss/oracles.hpp"

using namespace aqss;

TEST_CASE("analyze") {
  AnalyzeArgs a;
  a.gamma = "{ABC,BD,EFG}";
  auto r = cmd_analyze(a);
  CHECK(r.status == ExitCode::ok);
  CHECK(r.outputs["lambda"] == 2);
  CHECK(r.outputs["no_cloning"] == false);
  CHECK(r.outputs["gamma_max"]["available"] == false);

  a.gamma = "{ABC,ADE,BDF}";
  r = cmd_analyze(a);
  CHECK(r.outputs["lambda"] == 1);
  CHECK(r.outputs["no_cloning"] == true);
  CHECK(r.outputs["gamma_max"]["available"] == true);

  a.gamma = "{}";
  r = cmd_analyze(a);
  CHECK(r.status == ExitCode::input_error);
  CHECK(r.outputs["position"] == 1);
}

TEST_CASE("gamma from a file") {
  const char* path = "aqss_harness_gamma.txt";
  std::ofstream(path) << "{AB,CD}\n";
  AnalyzeArgs a;
  a.gamma = std::string("@") + path;
  CHECK(cmd_analyze(a).outputs["lambda"] == 2);
  std::remove(path);
  CHECK(cmd_analyze(a).status == ExitCode::input_error);
}

TEST_CASE("reconstruct: authorized, refused, encrypted") {
  ShareArgs s;
  s.gamma = "{AB,CD}";
  s.coalition = "A,B,dealer";
  auto r = cmd_reconstruct(s);
  CHECK(r.status == ExitCode::ok);
  CHECK(r.outputs["fidelity"].get<double>() == doctest::Approx(1).epsilon(1e-12));

  s.coalition = "A,C";
  r = cmd_reconstruct(s);
  CHECK(r.status == ExitCode::refused);
  CHECK(r.outputs["leakage"]["max_trace_distance"].get<double>() < 1e-9);

  s.coalition = "C,D";
  s.encrypted = true;
  r = cmd_reconstruct(s);
  CHECK(r.status == ExitCode::ok);
  CHECK(r.outputs["fidelity"].get<double>() == doctest::Approx(1).epsilon(1e-12));

  s.coalition = "A,C";
  r = cmd_reconstruct(s);
  CHECK(r.status == ExitCode::refused);
  CHECK(r.outputs["leakage"]["key_averaged_trace_distance_to_mixed"].get<double>() < 1e-12);

  s.coalition = "A,Z";
  CHECK(cmd_reconstruct(s).status == ExitCode::input_error);
}

TEST_CASE("leakage command") {
  ShareArgs s;
  s.gamma = "{ABC,BD,EFG}";
  s.coalition = "A,B,C";
  s.secret = "random";
  s.secret_b = "1";
  auto r = cmd_leakage(s);
  CHECK(r.status == ExitCode::ok);
  CHECK(r.outputs["leakage"]["max_trace_distance"].get<double>() < 1e-9);
  s.coalition = "B,D,dealer";
  CHECK(cmd_leakage(s).status == ExitCode::refused);
}

TEST_CASE("secrets") {
  Rng rng(1);
  CHECK(parse_secret("2", 3, rng).dims() == std::vector<std::uint32_t>{3});
  CHECK_THROWS(parse_secret("3", 3, rng));
  CHECK_THROWS(parse_secret("x", 2, rng));
  CHECK(std::abs(parse_secret("-", 2, rng).dense()[1] + Complex(1 / std::sqrt(2.0))) < 1e-12);
  Rng a(5), b(5);
  CHECK(std::abs(inner_product(parse_secret("random", 3, a), parse_secret("random", 3, b)) - Complex(1)) < 1e-12);
  const auto j = parse_secret("+", 2, rng).to_json().dump();
  CHECK(parse_secret(j, 2, rng).site_count() == 1);
}

TEST_CASE("replay: same seed and inputs give identical outputs") {
  QkdArgs q;
  q.config.seed = 7;
  const auto a = cmd_qkd(q), b = cmd_qkd(q);
  CHECK(a.outputs.dump() == b.outputs.dump());
  CHECK(a.inputs_digest() == b.inputs_digest());
  CHECK(a.outputs["summary"]["agreed"] == true);
  CHECK(a.outputs["summary"]["delta"] == 0);

  q.trials = 12;
  q.threads = 4;
  const auto t1 = cmd_qkd(q);
  q.threads = 1;
  const auto t2 = cmd_qkd(q);
  CHECK(t1.outputs.dump() == t2.outputs.dump());
  CHECK(t1.outputs["agreement_rate"] == 1.0);

  ShareArgs s;
  s.gamma = "{AB,CD}";
  s.secret = "random";
  s.seed = 3;
  CHECK(cmd_share(s).outputs.dump() == cmd_share(s).outputs.dump());
  s.encrypted = true;
  CHECK(cmd_share(s).outputs.dump() == cmd_share(s).outputs.dump());
  s.seed = 4;
  const auto other = cmd_share(s);
  s.seed = 3;
  CHECK(other.outputs.dump() != cmd_share(s).outputs.dump());
}

TEST_CASE("qkd abort is a refusal") {
  QkdArgs q;
  q.config.eve_edge = 1;
  q.config.sample_size = 256;
  const auto r = cmd_qkd(q);
  CHECK(r.status == ExitCode::refused);
  CHECK(r.outputs["summary"]["abort_step"] == 1);
  q.config.n = 1;
  CHECK(cmd_qkd(q).status == ExitCode::input_error);
}

TEST_CASE("oracle suites") {
  for (const auto& name : oracle::suite_names()) {
    const auto r = cmd_oracle(name, 0);
    CHECK(r.status == ExitCode::ok);
    CHECK(r.outputs["agree"] == true);
  }
  CHECK(cmd_oracle("nope", 0).status == ExitCode::input_error);
}

TEST_CASE("guarded maps exceptions to exit codes") {
  auto run = [](auto thrower) { return guarded("t", 0, {}, [&](RunReport&) { thrower(); }).status; };
  CHECK(run([] { throw ParseError("bad", 3); }) == ExitCode::input_error);
  CHECK(run([] { throw AuthorizationError("no"); }) == ExitCode::refused);
  CHECK(run([] { throw CapacityError("big"); }) == ExitCode::input_error);
  CHECK(run([] { throw std::logic_error("bug"); }) == ExitCode::fault);
  const auto rep = guarded("t", 9, {{"x", 1}}, [](RunReport& r) { r.outputs["y"] = 2; });
  const auto j = rep.to_json();
  CHECK(j["command"] == "t");
  CHECK(j["seed"] == 9);
  CHECK(j["inputs_digest"].get<std::string>().size() == 16);
  CHECK(j.contains("timing_ms"));
}
