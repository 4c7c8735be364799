#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "zkss/errors.h"
#include "zkss/simulator.h"

namespace {

using nlohmann::json;

std::optional<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void PrintTiming(const zkss::GameReport& report) {
  for (const zkss::PhaseTiming& t : report.timing) {
    std::fprintf(stderr, "timing %-10s %9.2f ms\n", t.phase.c_str(), t.millis);
  }
}

int Simulate(const zkss::GameConfig& config, const std::string& out_dir) {
  zkss::GameResult result = zkss::RunGame(config);
  zkss::WriteArtifacts(result, out_dir);
  const zkss::GameReport& report = result.report;

  json summary = {{"finalPhase", zkss::PhaseName(report.final_phase)},
                  {"derangementOk", report.derangement_ok},
                  {"anonymityOk", report.anonymity_ok},
                  {"protocolViolation", report.protocol_violation},
                  {"expectation", report.expectation},
                  {"expectationMet", report.expectation_met},
                  {"out", out_dir}};
  bool ok = report.expectation_met;
  if (report.final_phase == zkss::Phase::kComplete) {
    zkss::EventIdRegistry session;
    zkss::VerifyOptions options{&result.logs, &session, true};
    zkss::Checklist checklist = zkss::VerifyReport(report, result.final_view, result.truth, options);
    summary["checklist"] = zkss::ToJson(checklist);
    ok = ok && checklist.all();
  }
  std::cout << summary.dump(2) << "\n";
  PrintTiming(report);
  return ok ? 0 : 1;
}

int Verify(const std::filesystem::path& report_path) {
  std::optional<std::string> text = ReadFile(report_path);
  if (!text) {
    std::cerr << "cannot read " << report_path << "\n";
    return 2;
  }
  zkss::GameReport report = zkss::GameReportFromJson(json::parse(*text));

  // Ground truth is never persisted; replaying the config regenerates it.
  zkss::GameResult replay = zkss::RunGame(report.config);
  const std::filesystem::path dir = report_path.parent_path();

  zkss::ArtifactLogs logs = replay.logs;
  zkss::PublicView snapshot = replay.final_view;
  if (auto state = ReadFile(dir / "state.json")) {
    logs.state_json = *state;
    snapshot = zkss::PublicViewFromJson(json::parse(*state));
  }
  if (auto txlog = ReadFile(dir / "txlog.jsonl")) logs.txlog = *txlog;
  if (auto relay = ReadFile(dir / "relay.jsonl")) logs.relay_log = *relay;

  zkss::EventIdRegistry session;
  zkss::VerifyOptions options{&logs, &session, true};
  zkss::Checklist checklist = zkss::VerifyReport(report, snapshot, replay.truth, options);
  bool reproducible = replay.report_json == *text && replay.logs.txlog == logs.txlog;

  json out = zkss::ToJson(checklist);
  out["reproducible"] = reproducible;
  std::cout << out.dump(2) << "\n";
  return checklist.all() && reproducible ? 0 : 1;
}

int KeysGen(uint64_t seed, int index, bool with_rsa) {
  zkss::Participant p = zkss::DeriveParticipant(seed, index, with_rsa);
  json out = {{"seed", seed},
              {"index", index},
              {"address", p.key.address().ToHex()},
              {"publicKey", zkss::ToHex(p.key.public_key())},
              {"secretKey", zkss::ToHex(p.key.secret())},
              {"deliveryAddress", p.delivery_address}};
  if (p.rsa) {
    out["rsaPublicKey"] = zkss::ToBase64(p.rsa->public_key.Encode());
    out["randomness"] = p.rsa->public_key.Fingerprint().ToHex();
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zkss: Secret Santa protocol engine and adversarial simulator"};
  app.require_subcommand(1);

  zkss::GameConfig config;
  std::string attack = "none";
  bool no_commit = false;
  std::string out_dir = "zkss-out";
  CLI::App* simulate = app.add_subcommand("simulate", "run one game and write its artifacts");
  simulate->add_option("--n", config.n, "participant count (>= 2)")->required()->check(CLI::Range(2, 4096));
  simulate->add_option("--seed", config.seed, "64-bit game seed")->required();
  simulate->add_flag("--no-commit-step", no_commit, "skip the commitment step");
  simulate->add_option("--attack", attack, "adversary script")
      ->check(CLI::IsMember({"none", "malleable-sig", "double-nullifier", "self-pick", "frontrun",
                             "stale-root"}));
  simulate->add_option("--out", out_dir, "artifact directory");

  std::string report_path;
  CLI::App* verify = app.add_subcommand("verify", "re-check a persisted game against its replay");
  verify->add_option("--report", report_path, "path to report.json")->required();

  uint64_t key_seed = 0;
  int key_index = 0;
  bool no_rsa = false;
  CLI::App* keys = app.add_subcommand("keys", "key utilities");
  keys->require_subcommand(1);
  CLI::App* gen = keys->add_subcommand("gen", "derive a participant's keys from a seed");
  gen->add_option("--seed", key_seed, "game seed")->required();
  gen->add_option("--index", key_index, "participant index")->check(CLI::NonNegativeNumber);
  gen->add_flag("--no-rsa", no_rsa, "skip the RSA envelope key");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      config.commitment_step = !no_commit;
      config.adversary = zkss::AdversaryFromName(attack);
      return Simulate(config, out_dir);
    }
    if (*verify) return Verify(report_path);
    if (*gen) return KeysGen(key_seed, key_index, !no_rsa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
