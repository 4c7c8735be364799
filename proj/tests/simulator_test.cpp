#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.h"
#include "zkss/errors.h"
#include "zkss/simulator.h"

namespace zkss {
namespace {

GameConfig Config(int n, uint64_t seed, Adversary adversary = Adversary::kNone, bool commit = true,
                  bool rsa = false) {
  GameConfig c;
  c.n = n;
  c.seed = seed;
  c.adversary = adversary;
  c.commitment_step = commit;
  c.rsa_randomness = rsa;
  return c;
}

// receiver index of each participant's slot, from ground truth.
std::vector<int> Assignment(const GameResult& g) {
  std::map<Address, int> index;
  for (const Participant& p : g.truth.participants) index[p.key.address()] = p.index;
  std::vector<int> gives_to(g.truth.participants.size(), -1);
  for (const SenderEntry& e : g.final_view.senders) {
    gives_to[*g.truth.OwnerOf(e.nullifier)] = index.at(*e.assigned_receiver);
  }
  return gives_to;
}

TEST(RunGame, HonestFiveSeed42) {
  GameResult g = RunGame(Config(5, 42, Adversary::kNone, true, true));
  EXPECT_EQ(g.report.final_phase, Phase::kComplete);
  EXPECT_TRUE(g.report.derangement_ok);
  EXPECT_TRUE(g.report.anonymity_ok);
  EXPECT_TRUE(g.report.expectation_met);
  EXPECT_FALSE(g.report.protocol_violation);
  EXPECT_EQ(g.report.receipts.at("disclose:ACCEPTED"), 5);
  EXPECT_EQ(g.report.timing.size(), 4u);
  EventIdRegistry session;
  Checklist c = VerifyReport(g.report, g.final_view, g.truth, {&g.logs, &session, true});
  EXPECT_TRUE(c.all()) << ToJson(c).dump();
}

TEST(RunGame, TwoPlayersSwap) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    GameResult g = RunGame(Config(2, seed));
    ASSERT_EQ(g.report.final_phase, Phase::kComplete) << seed;
    EXPECT_EQ(Assignment(g), (std::vector<int>{1, 0}));
  }
}

TEST(RunGame, ThreePlayersHitBothDerangements) {
  std::map<std::vector<int>, int> seen;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    GameResult g = RunGame(Config(3, seed));
    ASSERT_EQ(g.report.final_phase, Phase::kComplete) << seed;
    ++seen[Assignment(g)];
  }
  // The derangements of {0,1,2} are the two 3-cycles.
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_TRUE(seen.contains({1, 2, 0}));
  EXPECT_TRUE(seen.contains({2, 0, 1}));
  for (const auto& [perm, count] : seen) EXPECT_GT(count, 350);
}

TEST(RunGame, CompletesWithoutFixedPoints) {
  for (int n : {4, 6, 9}) {
    for (uint64_t seed = 0; seed < 60; ++seed) {
      GameResult g = RunGame(Config(n, seed));
      ASSERT_EQ(g.report.final_phase, Phase::kComplete) << n << "/" << seed;
      std::vector<int> a = Assignment(g);
      for (int i = 0; i < n; ++i) EXPECT_NE(a[i], i);
      EXPECT_TRUE(g.report.derangement_ok);
    }
  }
}

TEST(RunGame, Reproducible) {
  GameResult a = RunGame(Config(5, 9, Adversary::kFrontrun, true, true));
  GameResult b = RunGame(Config(5, 9, Adversary::kFrontrun, true, true));
  EXPECT_EQ(a.report_json, b.report_json);
  EXPECT_EQ(a.logs.txlog, b.logs.txlog);
  EXPECT_EQ(a.logs.relay_log, b.logs.relay_log);
  EXPECT_EQ(a.logs.state_json, b.logs.state_json);
  GameResult c = RunGame(Config(5, 10, Adversary::kFrontrun, true, true));
  EXPECT_NE(a.report_json, c.report_json);
}

TEST(RunGame, ReportJsonRoundTripOmitsTiming) {
  GameResult g = RunGame(Config(4, 3));
  nlohmann::json j = nlohmann::json::parse(g.report_json);
  EXPECT_FALSE(j.contains("timing"));
  EXPECT_EQ(ToJson(GameReportFromJson(j)), j);
  EXPECT_EQ(GameConfigFromJson(ToJson(g.report.config)), g.report.config);
}

TEST(RunGame, InvalidConfig) {
  EXPECT_THROW(RunGame(Config(1, 0)), RangeError);
  EXPECT_THROW(RunAttack(Config(3, 0)), std::invalid_argument);
  EXPECT_THROW(AdversaryFromName("sybil"), MalformedInputError);
  EXPECT_EQ(AdversaryFromName(AdversaryName(Adversary::kStaleRoot)), Adversary::kStaleRoot);
}

TEST(RunAttack, MalleableWithoutCommitmentsOccupiesSlots) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GameResult g = RunAttack(Config(5, seed, Adversary::kMalleableSig, false));
    EXPECT_GE(g.report.attack.adversary_slots, 2);
    EXPECT_GE(g.report.attack.locked_out, 1);
    EXPECT_TRUE(g.report.protocol_violation);
    EXPECT_TRUE(g.report.stalled);
    EXPECT_NE(g.report.final_phase, Phase::kComplete);
    EXPECT_FALSE(g.report.derangement_ok);
    EXPECT_TRUE(g.report.expectation_met);
  }
}

TEST(RunAttack, MalleableWithCommitmentsIsContained) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GameResult g = RunAttack(Config(5, seed, Adversary::kMalleableSig, true));
    const AttackStats& a = g.report.attack;
    EXPECT_EQ(a.adversary_slots, 1);
    EXPECT_EQ(a.extra_submissions, 4);
    EXPECT_EQ(a.extra_submissions_rejected, 4);
    EXPECT_EQ(a.second_commit_rejected, 1);
    EXPECT_EQ(g.report.receipts.at("commit:REVERTED(already-committed)"), 1);
    EXPECT_EQ(g.report.final_phase, Phase::kComplete);
    EXPECT_TRUE(g.report.derangement_ok);
    EXPECT_FALSE(g.report.protocol_violation);
  }
}

TEST(RunAttack, DoubleNullifierReplaysRejected) {
  for (bool commit : {true, false}) {
    GameResult g = RunAttack(Config(6, 4, Adversary::kDoubleNullifier, commit));
    EXPECT_EQ(g.report.attack.replay_attempts, 6);
    EXPECT_EQ(g.report.attack.replay_rejected, 6);
    EXPECT_EQ(g.report.attack.fresh_randomness_rejected, 1);
    EXPECT_EQ(g.report.receipts.at("submitRandomness:REVERTED(nullifier-spent)"), 7);
    EXPECT_TRUE(g.report.expectation_met);
  }
}

TEST(RunAttack, SelfPickFails) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GameResult g = RunAttack(Config(4, seed, Adversary::kSelfPick));
    EXPECT_EQ(g.report.attack.self_pick_attempts, 1);
    EXPECT_EQ(g.report.attack.self_pick_accepted, 0);
    EXPECT_EQ(g.report.self_assignments_accepted, 0);
    EXPECT_EQ(g.report.receipts.at("disclose:REVERTED(bad-proof)"), 1);
    EXPECT_TRUE(g.report.expectation_met);
  }
}

TEST(RunAttack, FrontrunCostsOneRetry) {
  int fired = 0;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    GameResult g = RunAttack(Config(5, seed, Adversary::kFrontrun));
    const AttackStats& a = g.report.attack;
    EXPECT_EQ(a.victim_collisions, a.frontrun_fired ? 1 : 0) << seed;
    EXPECT_EQ(g.report.final_phase, Phase::kComplete);
    EXPECT_TRUE(g.report.derangement_ok);
    if (a.frontrun_fired) {
      ++fired;
      EXPECT_NE(*a.victim, *a.adversary);
      EXPECT_EQ(g.report.receipts.at("disclose:REVERTED(collision)"), 1);
    }
  }
  EXPECT_GT(fired, 20);
}

TEST(RunAttack, StaleRootRejected) {
  GameResult g = RunAttack(Config(5, 1, Adversary::kStaleRoot));
  EXPECT_EQ(g.report.attack.stale_root_rejected, 1);
  EXPECT_EQ(g.report.receipts.at("submitRandomness:REVERTED(stale-root)"), 1);
  EXPECT_TRUE(g.report.expectation_met);
  GameResult direct = RunAttack(Config(5, 1, Adversary::kStaleRoot, false));
  EXPECT_EQ(direct.report.attack.stale_root_rejected, 0);
  EXPECT_TRUE(direct.report.expectation_met);
}

TEST(VerifyReport, FixedPointInjectedFailsDerangement) {
  GameResult g = RunGame(Config(4, 8));
  GameReport tampered = g.report;
  tampered.assignment[0].receiver = tampered.assignment[0].sender;
  Checklist c = VerifyReport(tampered, g.final_view, g.truth, {&g.logs, nullptr, true});
  EXPECT_FALSE(c.derangement);
  EXPECT_FALSE(c.all());

  PublicView view = g.final_view;
  view.senders[0].assigned_receiver = g.report.assignment[0].sender;
  GameReport consistent = g.report;
  consistent.assignment[0].receiver = view.senders[0].assigned_receiver;
  EXPECT_FALSE(VerifyReport(consistent, view, g.truth, {&g.logs, nullptr, true}).derangement);
}

TEST(VerifyReport, SessionRejectsRepeatedEventId) {
  GameResult a = RunGame(Config(3, 1));
  GameResult b = RunGame(Config(3, 2));
  EventIdRegistry session;
  EXPECT_TRUE(VerifyReport(a.report, a.final_view, a.truth, {&a.logs, &session, true}).event_id_unique);
  EXPECT_TRUE(VerifyReport(b.report, b.final_view, b.truth, {&b.logs, &session, true}).event_id_unique);
  EXPECT_FALSE(VerifyReport(a.report, a.final_view, a.truth, {&a.logs, &session, true}).event_id_unique);
}

TEST(VerifyReport, EnvelopesDecryptOnlyForOwner) {
  GameResult g = RunGame(Config(4, 5, Adversary::kNone, true, true));
  Checklist c = VerifyReport(g.report, g.final_view, g.truth, {&g.logs, nullptr, true});
  EXPECT_TRUE(c.envelopes);

  // Sender decrypts its own envelope to the receiver's scripted string.
  std::map<Address, const Participant*> by_address;
  for (const Participant& p : g.truth.participants) by_address[p.key.address()] = &p;
  for (const SenderEntry& e : g.final_view.senders) {
    const Participant& owner = g.truth.participants[*g.truth.OwnerOf(e.nullifier)];
    Bytes plain = DecryptDeliveryAddress(*e.encrypted_delivery_address, *owner.rsa);
    EXPECT_EQ(std::string(plain.begin(), plain.end()),
              by_address.at(*e.assigned_receiver)->delivery_address);
  }

  PublicView swapped = g.final_view;
  std::swap(swapped.senders[0].encrypted_delivery_address, swapped.senders[1].encrypted_delivery_address);
  EXPECT_FALSE(VerifyReport(g.report, swapped, g.truth, {&g.logs, nullptr, true}).envelopes);
}

TEST(VerifyReport, HighSSignatureInTruthFailsLowS) {
  GameResult g = RunGame(Config(3, 6));
  GroundTruth truth = g.truth;
  truth.signatures[0] = truth.signatures[0].Mirrored();
  EXPECT_FALSE(VerifyReport(g.report, g.final_view, truth, {&g.logs, nullptr, true}).low_s);
}

TEST(LinkSearch, CleanForHonestGames) {
  for (bool rsa : {false, true}) {
    GameResult g = RunGame(Config(5, 11, Adversary::kNone, true, rsa));
    EXPECT_TRUE(FindAddressRandomnessLinks(g.logs, g.truth).empty());
  }
}

TEST(LinkSearch, DetectsPlantedLinks) {
  GameResult g = RunGame(Config(4, 12, Adversary::kNone, true, true));
  const Participant& p = g.truth.participants[1];
  std::string address = p.key.address().ToHex();

  ArtifactLogs leaky = g.logs;
  leaky.relay_log += nlohmann::json({{"from", address}, {"r", p.rsa->public_key.Fingerprint().ToHex()}}).dump() + "\n";
  auto links = FindAddressRandomnessLinks(leaky, g.truth);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].participant, 1);
  EXPECT_EQ(links[0].artifact, "relay.jsonl");

  // An origin attached to a relayed submission is exactly such a link.
  ArtifactLogs with_origin = g.logs;
  std::istringstream in(g.logs.txlog);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (j["tx"]["call"] == "submitRandomness") {
      Nullifier null{FieldElement::FromHex(j["tx"]["args"]["publics"]["nullS"].get<std::string>())};
      j["tx"]["origin"] = g.truth.participants[*g.truth.OwnerOf(null)].key.address().ToHex();
    }
    out += j.dump() + "\n";
  }
  with_origin.txlog = out;
  std::set<int> linked;
  for (const Link& l : FindAddressRandomnessLinks(with_origin, g.truth)) linked.insert(l.participant);
  EXPECT_EQ(linked, (std::set<int>{0, 1, 2, 3}));
}

TEST(Artifacts, WrittenAndReloadable) {
  GameResult g = RunGame(Config(3, 13, Adversary::kNone, true, true));
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "zkss-simulator-test";
  std::filesystem::remove_all(dir);
  WriteArtifacts(g, dir);
  for (const char* name : {"state.json", "txlog.jsonl", "relay.jsonl", "report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  std::ifstream in(dir / "report.json");
  std::stringstream buffer;
  buffer << in.rdbuf();
  EXPECT_EQ(buffer.str(), g.report_json);
  std::ifstream state(dir / "state.json");
  EXPECT_EQ(PublicViewFromJson(nlohmann::json::parse(state)), g.final_view);
  std::filesystem::remove_all(dir);
}

TEST(Participants, StableAcrossGameSizes) {
  Participant a = DeriveParticipant(77, 2, false);
  Participant b = DeriveParticipant(77, 2, false);
  EXPECT_EQ(a.key.address(), b.key.address());
  EXPECT_EQ(a.delivery_address, b.delivery_address);
  EXPECT_NE(DeriveParticipant(77, 3, false).key.address(), a.key.address());
  EXPECT_NE(DeriveParticipant(78, 2, false).key.address(), a.key.address());
  EXPECT_LE(a.delivery_address.size(), kOaepCapacity);
  EXPECT_THROW(DeriveParticipant(1, -1, false), RangeError);
}

}  // namespace
}  // namespace zkss
